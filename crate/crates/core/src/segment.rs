//! Splits a token stream into method spans.
//!
//! A method is an identifier followed by a parameter list and a `{ ... }` body
//! at file or type-body level. Anything nested inside a method body (local
//! classes, anonymous classes, lambdas) belongs to that method.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{ExtractError, ExtractErrorKind};
use crate::lexer::{Token, TokenKind};

#[derive(Debug, Clone, PartialEq)]
pub struct MethodSpan {
    pub name: String,
    pub start_line: u32,
    /// Line of the closing brace.
    pub end_line: u32,
    /// Significant tokens strictly between the outer braces.
    pub body: Vec<Token>,
    /// Called identifiers in order of appearance (duplicates kept).
    pub callees: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Header {
    Method { name: usize, start: usize },
    TypeBody,
    Other,
}

pub fn segment_methods(tokens: &[Token]) -> Result<Vec<MethodSpan>, ExtractError> {
    let sig: Vec<&Token> = tokens.iter().filter(|t| !t.is_trivia()).collect();
    let mut spans = Vec::new();
    // open type bodies, by line of their `{`
    let mut containers: Vec<u32> = Vec::new();
    let mut header_start = 0;
    let mut i = 0;
    while i < sig.len() {
        let t = sig[i];
        match t.text.as_str() {
            "{" => {
                let header = &sig[header_start..i];
                match classify(header) {
                    Header::Method { name, start } => {
                        let close = matching_brace(&sig, i)?;
                        let body: Vec<Token> =
                            sig[i + 1..close].iter().map(|t| (*t).clone()).collect();
                        spans.push(MethodSpan {
                            name: header[name].text.clone(),
                            start_line: header[start].line,
                            end_line: sig[close].line,
                            callees: callees(&body),
                            body,
                        });
                        i = close + 1;
                        header_start = i;
                        continue;
                    }
                    Header::TypeBody => {
                        containers.push(t.line);
                        header_start = i + 1;
                    }
                    Header::Other => {
                        let close = matching_brace(&sig, i)?;
                        i = close + 1;
                        header_start = i;
                        continue;
                    }
                }
            }
            "}" => {
                if containers.pop().is_none() {
                    return Err(ExtractError { line: t.line, kind: ExtractErrorKind::UnbalancedBraces });
                }
                header_start = i + 1;
            }
            ";" => header_start = i + 1,
            _ => {}
        }
        i += 1;
    }
    if let Some(line) = containers.pop() {
        return Err(ExtractError { line, kind: ExtractErrorKind::UnbalancedBraces });
    }
    Ok(spans)
}

fn matching_brace(sig: &[&Token], open: usize) -> Result<usize, ExtractError> {
    let mut depth = 0usize;
    for (j, t) in sig.iter().enumerate().skip(open) {
        if t.is("{") {
            depth += 1;
        } else if t.is("}") {
            depth -= 1;
            if depth == 0 {
                return Ok(j);
            }
        }
    }
    Err(ExtractError { line: sig[open].line, kind: ExtractErrorKind::UnbalancedBraces })
}

/// Index of the `(` matching the `)` at `close`.
fn matching_open_paren(toks: &[&Token], close: usize) -> Option<usize> {
    let mut depth = 0usize;
    for j in (0..=close).rev() {
        if toks[j].is(")") {
            depth += 1;
        } else if toks[j].is("(") {
            depth -= 1;
            if depth == 0 {
                return Some(j);
            }
        }
    }
    None
}

fn skip_annotations(header: &[&Token]) -> usize {
    let mut k = 0;
    while k + 1 < header.len() && header[k].is("@") && header[k + 1].kind == TokenKind::Identifier {
        k += 2;
        while k + 1 < header.len() && header[k].is(".") && header[k + 1].kind == TokenKind::Identifier {
            k += 2;
        }
        if k < header.len() && header[k].is("(") {
            let mut depth = 0usize;
            while k < header.len() {
                if header[k].is("(") {
                    depth += 1;
                } else if header[k].is(")") {
                    depth -= 1;
                    if depth == 0 {
                        k += 1;
                        break;
                    }
                }
                k += 1;
            }
        }
    }
    k
}

fn classify(header: &[&Token]) -> Header {
    let start = skip_annotations(header);
    if start >= header.len() {
        return Header::Other;
    }
    let h = &header[start..];
    let declares_type = |upto: usize| {
        h[..upto].iter().enumerate().any(|(k, t)| {
            ["class", "interface", "enum"].iter().any(|kw| t.is_keyword(kw))
                || (t.kind == TokenKind::Identifier
                    && t.is("record")
                    && h.get(k + 1).is_some_and(|n| n.kind == TokenKind::Identifier))
        })
    };
    if let Some(close) = h.iter().rposition(|t| t.is(")")) {
        let tail = &h[close + 1..];
        let tail_ok = tail.is_empty()
            || tail[0].is_keyword("throws")
            || tail.iter().all(|t| t.is_keyword("const"));
        if tail_ok {
            if let Some(open) = matching_open_paren(h, close) {
                let named = open > 0 && h[open - 1].kind == TokenKind::Identifier;
                let anonymous = open > 1 && h[open - 2].is_keyword("new");
                let initializer = h[..open].iter().any(|t| t.is("=") || t.is("->"));
                if named && !anonymous && !initializer && !declares_type(open) {
                    return Header::Method { name: start + open - 1, start };
                }
            }
        }
    }
    if declares_type(h.len())
        || h.iter().any(|t| t.is_keyword("struct") || t.is_keyword("union") || t.is_keyword("new"))
    {
        Header::TypeBody
    } else {
        Header::Other
    }
}

/// Identifiers (and `this`/`super`) used as call targets inside a body.
pub fn callees(body: &[Token]) -> Vec<String> {
    let refs: Vec<&Token> = body.iter().collect();
    let mut out = Vec::new();
    for (k, t) in refs.iter().enumerate() {
        let callable = t.kind == TokenKind::Identifier || t.is_keyword("this") || t.is_keyword("super");
        if !callable || !refs.get(k + 1).is_some_and(|n| n.is("(")) {
            continue;
        }
        let after_new = k > 0 && refs[k - 1].is_keyword("new");
        if !after_new && is_declaration(&refs, k + 1) {
            continue;
        }
        out.push(t.text.clone());
    }
    out
}

/// True when the parameter list opening at `open` is followed by a body or a
/// `throws` clause, i.e. it declares a member rather than calling it.
fn is_declaration(toks: &[&Token], open: usize) -> bool {
    let mut depth = 0usize;
    for j in open..toks.len() {
        if toks[j].is("(") {
            depth += 1;
        } else if toks[j].is(")") {
            depth -= 1;
            if depth == 0 {
                return toks.get(j + 1).is_some_and(|n| n.is("{") || n.is_keyword("throws"));
            }
        }
    }
    false
}
