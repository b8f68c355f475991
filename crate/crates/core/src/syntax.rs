//! Statement-level parser for method bodies.
//!
//! Only the structure that shapes control flow is recovered: statements,
//! short-circuit operators, ternaries, call sites and nested bodies (lambdas,
//! anonymous and local classes, switch expressions). Everything else inside
//! an expression is treated as opaque.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::ExtractError;
use crate::lexer::{Token, TokenKind};

#[derive(Debug, Clone, PartialEq)]
pub enum Stmt {
    Block(Vec<Stmt>),
    Expr(Expr),
    If { cond: Expr, then: Box<Stmt>, els: Option<Box<Stmt>> },
    While { cond: Expr, body: Box<Stmt> },
    DoWhile { body: Box<Stmt>, cond: Expr },
    For { init: Expr, cond: Expr, update: Expr, body: Box<Stmt> },
    Switch { scrutinee: Expr, groups: Vec<SwitchGroup> },
    Try { resources: Expr, body: Box<Stmt>, catches: Vec<Stmt>, finally: Option<Box<Stmt>> },
    Return(Expr),
    Throw(Expr),
    Yield(Expr),
    Break(Option<String>),
    Continue(Option<String>),
    Labeled(String, Box<Stmt>),
}

/// Consecutive `case`/`default` labels sharing one statement list.
#[derive(Debug, Clone, PartialEq)]
pub struct SwitchGroup {
    pub cases: usize,
    pub default: bool,
    /// `->` labels never fall through.
    pub arrow: bool,
    pub body: Vec<Stmt>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Logic {
    And,
    Or,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Seq(Vec<Expr>),
    Call(String),
    Logical { op: Logic, left: Box<Expr>, right: Box<Expr> },
    Ternary { cond: Box<Expr>, then: Box<Expr>, els: Box<Expr> },
    /// A body with its own `return` scope (lambda block, member of an
    /// anonymous or local class).
    Body(Box<Stmt>),
    /// A switch used as an expression.
    Switch(Box<Stmt>),
}

impl Expr {
    fn empty() -> Self {
        Expr::Seq(Vec::new())
    }
}

/// Parse the significant tokens between a method's braces.
pub fn parse_body(tokens: &[Token]) -> Result<Vec<Stmt>, ExtractError> {
    let toks: Vec<&Token> = tokens.iter().filter(|t| !t.is_trivia()).collect();
    let end_line = toks.last().map_or(0, |t| t.line);
    Parser { toks: &toks, pos: 0, end_line }.stmts_to_end()
}

struct Parser<'t, 'a> {
    toks: &'t [&'a Token],
    pos: usize,
    end_line: u32,
}

fn is_ternary_question(toks: &[&Token], k: usize) -> bool {
    if !toks[k].is("?") || toks[k].kind != TokenKind::Operator {
        return false;
    }
    let prev_angle = k > 0 && toks[k - 1].is("<");
    let next_closes = toks.get(k + 1).is_none_or(|n| {
        [">", ">>", ">>>", ",", ")"].iter().any(|s| n.is(s))
            || n.is_keyword("extends")
            || n.is_keyword("super")
    });
    !prev_angle && !next_closes
}

/// Counts the `?` tokens in `tokens` that act as ternary operators.
pub fn count_ternaries(tokens: &[Token]) -> usize {
    let toks: Vec<&Token> = tokens.iter().filter(|t| !t.is_trivia()).collect();
    (0..toks.len()).filter(|&k| is_ternary_question(&toks, k)).count()
}

fn is_open(t: &Token) -> bool {
    t.kind == TokenKind::Punctuation && (t.is("(") || t.is("[") || t.is("{"))
}

fn is_close(t: &Token) -> bool {
    t.kind == TokenKind::Punctuation && (t.is(")") || t.is("]") || t.is("}"))
}

/// Index of the bracket closing the one at `open`.
fn matching(toks: &[&Token], open: usize) -> Option<usize> {
    let mut depth = 0usize;
    for (j, t) in toks.iter().enumerate().skip(open) {
        if is_open(t) {
            depth += 1;
        } else if is_close(t) {
            depth = depth.checked_sub(1)?;
            if depth == 0 {
                return Some(j);
            }
        }
    }
    None
}

/// Positions of tokens at bracket depth zero satisfying `pred`.
fn top_level(toks: &[&Token], mut pred: impl FnMut(&[&Token], usize) -> bool) -> Vec<usize> {
    let mut depth = 0usize;
    let mut out = Vec::new();
    for k in 0..toks.len() {
        let t = toks[k];
        if is_open(t) {
            depth += 1;
        } else if is_close(t) {
            depth = depth.saturating_sub(1);
        } else if depth == 0 && pred(toks, k) {
            out.push(k);
        }
    }
    out
}

pub(crate) fn parse_expr(toks: &[&Token]) -> Expr {
    if toks.is_empty() {
        return Expr::empty();
    }
    let commas = top_level(toks, |t, k| t[k].is(","));
    if !commas.is_empty() {
        let mut parts = Vec::new();
        let mut from = 0;
        for c in commas.into_iter().chain(core::iter::once(toks.len())) {
            parts.push(parse_expr(&toks[from..c]));
            from = c + 1;
        }
        return Expr::Seq(parts);
    }
    if let Some(q) = top_level(toks, is_ternary_question).first().copied() {
        if let Some(colon) = ternary_colon(toks, q) {
            return Expr::Ternary {
                cond: Box::new(parse_expr(&toks[..q])),
                then: Box::new(parse_expr(&toks[q + 1..colon])),
                els: Box::new(parse_expr(&toks[colon + 1..])),
            };
        }
    }
    for (op, text) in [(Logic::Or, "||"), (Logic::And, "&&")] {
        if let Some(&k) = top_level(toks, |t, k| t[k].is(text)).last() {
            return Expr::Logical {
                op,
                left: Box::new(parse_expr(&toks[..k])),
                right: Box::new(parse_expr(&toks[k + 1..])),
            };
        }
    }
    atoms(toks)
}

fn ternary_colon(toks: &[&Token], q: usize) -> Option<usize> {
    let mut pending = 0usize;
    let rest = &toks[q + 1..];
    let positions = top_level(rest, |t, k| is_ternary_question(t, k) || t[k].is(":"));
    for p in positions {
        if rest[p].is("?") {
            pending += 1;
        } else if pending == 0 {
            return Some(q + 1 + p);
        } else {
            pending -= 1;
        }
    }
    None
}

/// Append `e`, splicing sequences so nested parentheses do not nest `Seq`s.
fn push_flat(out: &mut Vec<Expr>, e: Expr) {
    match e {
        Expr::Seq(parts) => out.extend(parts),
        other => out.push(other),
    }
}

fn atoms(toks: &[&Token]) -> Expr {
    let mut out = Vec::new();
    let mut k = 0;
    while k < toks.len() {
        let t = toks[k];
        if t.is_keyword("switch") && toks.get(k + 1).is_some_and(|n| n.is("(")) {
            if let Some(close) = matching(toks, k + 1) {
                if toks.get(close + 1).is_some_and(|n| n.is("{")) {
                    if let Some(end) = matching(toks, close + 1) {
                        let scrutinee = parse_expr(&toks[k + 2..close]);
                        let mut p = Parser { toks: &toks[close + 2..end], pos: 0, end_line: toks[end].line };
                        if let Ok(groups) = p.switch_groups() {
                            out.push(Expr::Switch(Box::new(Stmt::Switch { scrutinee, groups })));
                            k = end + 1;
                            continue;
                        }
                    }
                }
            }
        }
        if is_open(t) {
            let Some(close) = matching(toks, k) else {
                k += 1;
                continue;
            };
            let inner = &toks[k + 1..close];
            if t.is("{") {
                let prev = k.checked_sub(1).map(|p| toks[p]);
                if prev.is_some_and(|p| p.is("->")) {
                    let mut p = Parser { toks: inner, pos: 0, end_line: toks[close].line };
                    match p.stmts_to_end() {
                        Ok(stmts) => out.push(Expr::Body(Box::new(Stmt::Block(stmts)))),
                        Err(_) => push_flat(&mut out, parse_expr(inner)),
                    }
                } else if prev.is_some_and(|p| p.is(")")) {
                    out.extend(class_members(inner));
                } else {
                    push_flat(&mut out, parse_expr(inner));
                }
            } else {
                push_flat(&mut out, parse_expr(inner));
                let callee = k.checked_sub(1).map(|p| toks[p]).filter(|p| {
                    t.is("(")
                        && (p.kind == TokenKind::Identifier || p.is_keyword("this") || p.is_keyword("super"))
                });
                if let Some(name) = callee {
                    out.push(Expr::Call(name.text.clone()));
                }
            }
            k = close + 1;
            continue;
        }
        k += 1;
    }
    if out.len() == 1 {
        out.pop().unwrap()
    } else {
        Expr::Seq(out)
    }
}

/// Members of an anonymous or local class body: method bodies, initializer
/// blocks and field initializers.
fn class_members(toks: &[&Token]) -> Vec<Expr> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut k = 0;
    while k < toks.len() {
        let t = toks[k];
        if t.is(";") {
            let member = &toks[start..k];
            if let Some(eq) = member.iter().position(|t| t.is("=")) {
                out.push(parse_expr(&member[eq + 1..]));
            }
            start = k + 1;
        } else if t.is("{") {
            let header = &toks[start..k];
            let Some(close) = matching(toks, k) else { break };
            if header.iter().any(|t| t.is("=")) {
                k = close + 1;
                continue;
            }
            let inner = &toks[k + 1..close];
            let nested_type = header
                .iter()
                .any(|t| t.is_keyword("class") || t.is_keyword("interface") || t.is_keyword("enum"));
            if nested_type {
                out.extend(class_members(inner));
            } else {
                let mut p = Parser { toks: inner, pos: 0, end_line: toks[close].line };
                match p.stmts_to_end() {
                    Ok(stmts) => out.push(Expr::Body(Box::new(Stmt::Block(stmts)))),
                    Err(_) => out.push(parse_expr(inner)),
                }
            }
            k = close + 1;
            start = k;
            continue;
        } else if is_open(t) {
            if let Some(close) = matching(toks, k) {
                k = close + 1;
                continue;
            }
        }
        k += 1;
    }
    out
}

impl<'t, 'a> Parser<'t, 'a> {
    fn peek(&self) -> Option<&'a Token> {
        self.toks.get(self.pos).copied()
    }

    fn peek_at(&self, off: usize) -> Option<&'a Token> {
        self.toks.get(self.pos + off).copied()
    }

    fn line(&self) -> u32 {
        self.peek().map_or(self.end_line, |t| t.line)
    }

    fn err(&self, what: &str) -> ExtractError {
        ExtractError::malformed(self.line(), what)
    }

    fn expect(&mut self, text: &str) -> Result<&'a Token, ExtractError> {
        match self.peek() {
            Some(t) if t.is(text) => {
                self.pos += 1;
                Ok(t)
            }
            _ => Err(self.err(&alloc::format!("expected `{text}`"))),
        }
    }

    /// Consume a bracketed group starting at the current `(`/`{`/`[` and
    /// return its inner tokens.
    fn group(&mut self, open: &str) -> Result<&'t [&'a Token], ExtractError> {
        let start = self.pos;
        self.expect(open)?;
        let close = matching(self.toks, start).ok_or_else(|| self.err("unbalanced brackets"))?;
        self.pos = close + 1;
        Ok(&self.toks[start + 1..close])
    }

    fn stmts_to_end(&mut self) -> Result<Vec<Stmt>, ExtractError> {
        let mut out = Vec::new();
        while self.pos < self.toks.len() {
            out.push(self.stmt()?);
        }
        Ok(out)
    }

    /// Tokens up to (not including) the next `;` at depth zero; consumes the `;`.
    fn until_semicolon(&mut self) -> Result<&'t [&'a Token], ExtractError> {
        let rest = &self.toks[self.pos..];
        let semi = top_level(rest, |t, k| t[k].is(";"))
            .first()
            .copied()
            .ok_or_else(|| self.err("missing `;`"))?;
        self.pos += semi + 1;
        Ok(&rest[..semi])
    }

    fn paren_expr(&mut self) -> Result<Expr, ExtractError> {
        Ok(parse_expr(self.group("(")?))
    }

    fn boxed_stmt(&mut self) -> Result<Box<Stmt>, ExtractError> {
        if self.peek().is_none() {
            return Err(self.err("missing statement"));
        }
        Ok(Box::new(self.stmt()?))
    }

    fn block(&mut self) -> Result<Stmt, ExtractError> {
        let inner = self.group("{")?;
        let mut p = Parser { toks: inner, pos: 0, end_line: self.toks[self.pos - 1].line };
        Ok(Stmt::Block(p.stmts_to_end()?))
    }

    fn stmt(&mut self) -> Result<Stmt, ExtractError> {
        let t = self.peek().ok_or_else(|| self.err("unexpected end of body"))?;
        if t.is("{") {
            return self.block();
        }
        if t.is(";") {
            self.pos += 1;
            return Ok(Stmt::Expr(Expr::empty()));
        }
        if t.kind == TokenKind::Keyword {
            match t.text.as_str() {
                "if" => {
                    self.pos += 1;
                    let cond = self.paren_expr()?;
                    let then = self.boxed_stmt()?;
                    let els = if self.peek().is_some_and(|n| n.is_keyword("else")) {
                        self.pos += 1;
                        Some(self.boxed_stmt()?)
                    } else {
                        None
                    };
                    return Ok(Stmt::If { cond, then, els });
                }
                "else" => return Err(self.err("`else` without `if`")),
                "while" => {
                    self.pos += 1;
                    let cond = self.paren_expr()?;
                    let body = self.boxed_stmt()?;
                    return Ok(Stmt::While { cond, body });
                }
                "do" => {
                    self.pos += 1;
                    let body = self.boxed_stmt()?;
                    if !self.peek().is_some_and(|n| n.is_keyword("while")) {
                        return Err(self.err("`do` without `while`"));
                    }
                    self.pos += 1;
                    let cond = self.paren_expr()?;
                    self.expect(";")?;
                    return Ok(Stmt::DoWhile { body, cond });
                }
                "for" => {
                    self.pos += 1;
                    let header = self.group("(")?;
                    let semis = top_level(header, |t, k| t[k].is(";"));
                    let (init, cond, update) = match semis.as_slice() {
                        [a, b] => (
                            parse_expr(&header[..*a]),
                            parse_expr(&header[a + 1..*b]),
                            parse_expr(&header[b + 1..]),
                        ),
                        [] => {
                            let colon = top_level(header, |t, k| t[k].is(":"))
                                .first()
                                .copied()
                                .ok_or_else(|| self.err("malformed `for` header"))?;
                            (parse_expr(&header[colon + 1..]), Expr::empty(), Expr::empty())
                        }
                        _ => return Err(self.err("malformed `for` header")),
                    };
                    let body = self.boxed_stmt()?;
                    return Ok(Stmt::For { init, cond, update, body });
                }
                "switch" => {
                    self.pos += 1;
                    let scrutinee = self.paren_expr()?;
                    let inner = self.group("{")?;
                    let mut p = Parser { toks: inner, pos: 0, end_line: self.toks[self.pos - 1].line };
                    let groups = p.switch_groups()?;
                    return Ok(Stmt::Switch { scrutinee, groups });
                }
                "case" | "default" => return Err(self.err("case label outside `switch`")),
                "try" => return self.try_stmt(),
                "catch" | "finally" => return Err(self.err("`catch`/`finally` without `try`")),
                "return" | "throw" => {
                    self.pos += 1;
                    let e = parse_expr(self.until_semicolon()?);
                    return Ok(if t.is("return") { Stmt::Return(e) } else { Stmt::Throw(e) });
                }
                "break" | "continue" => {
                    self.pos += 1;
                    let label = match self.peek() {
                        Some(n) if n.kind == TokenKind::Identifier => {
                            self.pos += 1;
                            Some(n.text.clone())
                        }
                        _ => None,
                    };
                    self.expect(";")?;
                    return Ok(if t.is("break") { Stmt::Break(label) } else { Stmt::Continue(label) });
                }
                "synchronized" if self.peek_at(1).is_some_and(|n| n.is("(")) => {
                    self.pos += 1;
                    let lock = self.paren_expr()?;
                    let body = self.block()?;
                    return Ok(Stmt::Block(alloc::vec![Stmt::Expr(lock), body]));
                }
                _ => {}
            }
        }
        if t.kind == TokenKind::Identifier {
            if self.peek_at(1).is_some_and(|n| n.is(":")) {
                self.pos += 2;
                let inner = self.boxed_stmt()?;
                return Ok(Stmt::Labeled(t.text.clone(), inner));
            }
            let yield_like = t.is("yield")
                && self.peek_at(1).is_some_and(|n| {
                    !(n.kind == TokenKind::Operator && n.text.ends_with('=')
                        || [";", "(", ".", "[", "++", "--", "->"].iter().any(|s| n.is(s)))
                });
            if yield_like {
                self.pos += 1;
                return Ok(Stmt::Yield(parse_expr(self.until_semicolon()?)));
            }
        }
        if let Some(stmt) = self.local_type()? {
            return Ok(stmt);
        }
        Ok(Stmt::Expr(parse_expr(self.until_semicolon()?)))
    }

    /// `class`/`interface`/`enum`/`record` declared inside a method.
    fn local_type(&mut self) -> Result<Option<Stmt>, ExtractError> {
        let rest = &self.toks[self.pos..];
        let mut k = 0;
        while k < rest.len() {
            let t = rest[k];
            let modifier = ["final", "abstract", "static", "strictfp"].iter().any(|m| t.is_keyword(m));
            if t.is("@") && rest.get(k + 1).is_some_and(|n| n.kind == TokenKind::Identifier) {
                k += 2;
                if rest.get(k).is_some_and(|n| n.is("(")) {
                    k = matching(rest, k).map_or(rest.len(), |c| c + 1);
                }
                continue;
            }
            if modifier {
                k += 1;
                continue;
            }
            break;
        }
        let Some(t) = rest.get(k) else { return Ok(None) };
        let is_type = t.is_keyword("class")
            || t.is_keyword("interface")
            || t.is_keyword("enum")
            || (t.is("record") && rest.get(k + 1).is_some_and(|n| n.kind == TokenKind::Identifier));
        if !is_type {
            return Ok(None);
        }
        let Some(brace) = rest.iter().position(|t| t.is("{")) else {
            return Err(self.err("local type without body"));
        };
        let close = matching(rest, brace).ok_or_else(|| self.err("unbalanced braces"))?;
        let members = class_members(&rest[brace + 1..close]);
        self.pos += close + 1;
        Ok(Some(Stmt::Expr(Expr::Seq(members))))
    }

    fn try_stmt(&mut self) -> Result<Stmt, ExtractError> {
        self.pos += 1;
        let resources = if self.peek().is_some_and(|n| n.is("(")) {
            Some(self.paren_expr()?)
        } else {
            None
        };
        let body = Box::new(self.block()?);
        let mut catches = Vec::new();
        while self.peek().is_some_and(|n| n.is_keyword("catch")) {
            self.pos += 1;
            self.group("(")?;
            catches.push(self.block()?);
        }
        let finally = if self.peek().is_some_and(|n| n.is_keyword("finally")) {
            self.pos += 1;
            Some(Box::new(self.block()?))
        } else {
            None
        };
        if resources.is_none() && catches.is_empty() && finally.is_none() {
            return Err(self.err("`try` without `catch` or `finally`"));
        }
        Ok(Stmt::Try { resources: resources.unwrap_or_else(Expr::empty), body, catches, finally })
    }

    fn switch_groups(&mut self) -> Result<Vec<SwitchGroup>, ExtractError> {
        let mut groups = Vec::new();
        while self.pos < self.toks.len() {
            let mut group = SwitchGroup { cases: 0, default: false, arrow: false, body: Vec::new() };
            let mut labelled = false;
            while let Some(t) = self.peek() {
                if t.is_keyword("case") {
                    group.cases += 1;
                } else if t.is_keyword("default") && self.peek_at(1).is_some_and(|n| n.is(":") || n.is("->")) {
                    group.default = true;
                } else {
                    break;
                }
                labelled = true;
                let rest = &self.toks[self.pos..];
                let end = top_level(rest, |r, j| r[j].is(":") || r[j].is("->"))
                    .first()
                    .copied()
                    .ok_or_else(|| self.err("case label without `:`"))?;
                group.arrow = rest[end].is("->");
                self.pos += end + 1;
                if group.arrow {
                    break;
                }
            }
            if !labelled {
                return Err(self.err("statement before first case label"));
            }
            if group.arrow {
                group.body.push(self.stmt()?);
            } else {
                while let Some(t) = self.peek() {
                    let label = t.is_keyword("case")
                        || (t.is_keyword("default") && self.peek_at(1).is_some_and(|n| n.is(":") || n.is("->")));
                    if label {
                        break;
                    }
                    group.body.push(self.stmt()?);
                }
            }
            groups.push(group);
        }
        Ok(groups)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexer::tokenize;

    fn parse(src: &str) -> Vec<Stmt> {
        parse_body(&tokenize(src).unwrap()).unwrap()
    }

    fn parse_err(src: &str) -> ExtractError {
        parse_body(&tokenize(src).unwrap()).unwrap_err()
    }

    #[test]
    fn if_else_chain() {
        let s = parse("if (a) x(); else if (b) y(); else z();");
        let Stmt::If { els: Some(els), .. } = &s[0] else { panic!("{s:?}") };
        assert!(matches!(**els, Stmt::If { els: Some(_), .. }));
    }

    #[test]
    fn short_circuit_precedence() {
        let toks = tokenize("a || b && c").unwrap();
        let refs: Vec<&Token> = toks.iter().filter(|t| !t.is_trivia()).collect();
        let Expr::Logical { op: Logic::Or, right, .. } = parse_expr(&refs) else { panic!() };
        assert!(matches!(*right, Expr::Logical { op: Logic::And, .. }));
    }

    #[test]
    fn ternary_and_generic_wildcards() {
        let toks = tokenize("List<?> xs = p ? a : b ? c : d;").unwrap();
        assert_eq!(count_ternaries(&toks), 2);
        let toks = tokenize("Map<? extends K, ?> m;").unwrap();
        assert_eq!(count_ternaries(&toks), 0);
    }

    #[test]
    fn switch_groups_and_arrows() {
        let s = parse("switch (x) { case 1: case 2: a(); break; case 3: b(); default: c(); }");
        let Stmt::Switch { groups, .. } = &s[0] else { panic!() };
        assert_eq!(groups.len(), 3);
        assert_eq!((groups[0].cases, groups[1].cases, groups[2].default), (2, 1, true));
        let s = parse("int y = switch (x) { case 1 -> 5; default -> { yield 6; } };");
        let Stmt::Expr(Expr::Switch(_)) = &s[0] else { panic!("{s:?}") };
    }

    #[test]
    fn try_catch_finally() {
        let s = parse("try (R r = open()) { use(r); } catch (A e) { } catch (B e) { } finally { close(); }");
        let Stmt::Try { catches, finally, .. } = &s[0] else { panic!() };
        assert_eq!(catches.len(), 2);
        assert!(finally.is_some());
    }

    #[test]
    fn lambdas_and_anonymous_classes_become_bodies() {
        let s = parse("run(() -> { if (a) return; }); Object o = new Object() { int f() { return g(); } };");
        let Stmt::Expr(Expr::Seq(parts)) = &s[0] else { panic!("{s:?}") };
        assert!(parts.iter().any(|e| matches!(e, Expr::Body(_))));
        assert!(matches!(&s[1], Stmt::Expr(Expr::Seq(p)) if p.iter().any(|e| matches!(e, Expr::Body(_)))));
    }

    #[test]
    fn labels_and_jumps() {
        let s = parse("outer: for (;;) { while (x) { continue outer; } break; }");
        assert!(matches!(&s[0], Stmt::Labeled(l, _) if l == "outer"));
    }

    #[test]
    fn malformed_structures() {
        assert!(parse_err("x = 1;\nelse y();").line == 2);
        parse_err("do { x(); } y();");
        parse_err("case 1: x();");
        parse_err("try { x(); }");
        parse_err("catch (E e) {}");
        parse_err("x = 1");
        parse_err("switch (x) { y(); }");
    }

    #[test]
    fn local_class() {
        let s = parse("class L { void m() { if (a) b(); } }\nL l = new L();");
        assert_eq!(s.len(), 2);
    }
}
