//! Control-flow graphs and the McCabe family of complexity measures.
//!
//! Nodes are basic blocks; a block whose terminator has more than one
//! outgoing edge is a decision. Multi-way decisions (`switch`, `try` with
//! handlers) are a single node with one edge per case label or handler,
//! so parallel edges are allowed.
//!
//! Decision points: `if`, `while`, `for`, `do`, each `case` label, each
//! `catch`, `?:`, `&&` and `||`. Short-circuit operators and ternaries are
//! modelled as small if-then / if-then-else diamonds at their evaluation
//! point.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::ExtractError;
use crate::syntax::{Expr, Logic, Stmt};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Entry,
    Exit,
    Block,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecisionKind {
    If,
    While,
    For,
    DoWhile,
    Switch,
    Catch,
    Ternary,
    And,
    Or,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub kind: NodeKind,
    pub decision: Option<DecisionKind>,
    pub succs: Vec<usize>,
    pub calls: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControlFlowGraph {
    pub nodes: Vec<Node>,
    pub entry: usize,
    pub exit: usize,
}

impl ControlFlowGraph {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.nodes.iter().map(|n| n.succs.len()).sum()
    }

    /// Sum over decision nodes of (out-degree - 1).
    pub fn added_outcomes(&self) -> usize {
        self.nodes.iter().map(|n| n.succs.len().saturating_sub(1)).sum()
    }

    pub fn preds(&self) -> Vec<Vec<usize>> {
        let mut preds = vec![Vec::new(); self.nodes.len()];
        for (u, n) in self.nodes.iter().enumerate() {
            for &v in &n.succs {
                preds[v].push(u);
            }
        }
        preds
    }
}

struct Jump {
    label: Option<String>,
    brk: usize,
    cont: Option<usize>,
    /// Target of unlabeled `break` (loops and switches).
    breakable: bool,
    switch: bool,
}

struct Ctx {
    ret: usize,
    jumps: Vec<Jump>,
}

struct Builder {
    nodes: Vec<Node>,
    exit: usize,
}

/// Build the flow graph of a parsed method body. Unreachable blocks (code
/// after `return`, joins that nothing reaches) are pruned.
pub fn build_cfg(body: &[Stmt]) -> Result<ControlFlowGraph, ExtractError> {
    let mut b = Builder { nodes: Vec::new(), exit: 0 };
    let entry = b.node(NodeKind::Entry);
    b.exit = b.node(NodeKind::Exit);
    let mut ctx = Ctx { ret: b.exit, jumps: Vec::new() };
    let first = b.block();
    b.edge(entry, first);
    if let Some(end) = b.stmts(body, Some(first), &mut ctx)? {
        b.edge(end, b.exit);
    }
    Ok(b.finish(entry))
}

impl Builder {
    fn node(&mut self, kind: NodeKind) -> usize {
        self.nodes.push(Node { kind, decision: None, succs: Vec::new(), calls: Vec::new() });
        self.nodes.len() - 1
    }

    fn block(&mut self) -> usize {
        self.node(NodeKind::Block)
    }

    fn edge(&mut self, from: usize, to: usize) {
        self.nodes[from].succs.push(to);
    }

    fn decide(&mut self, at: usize, kind: DecisionKind) {
        self.nodes[at].decision = Some(kind);
    }

    fn live(&mut self, cur: Option<usize>) -> usize {
        cur.unwrap_or_else(|| self.block())
    }

    fn finish(self, entry: usize) -> ControlFlowGraph {
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![entry];
        while let Some(u) = stack.pop() {
            if !core::mem::replace(&mut seen[u], true) {
                stack.extend(self.nodes[u].succs.iter().copied());
            }
        }
        seen[self.exit] = true;
        let mut remap = vec![usize::MAX; self.nodes.len()];
        let mut next = 0;
        for (u, keep) in seen.iter().enumerate() {
            if *keep {
                remap[u] = next;
                next += 1;
            }
        }
        let nodes = self
            .nodes
            .into_iter()
            .zip(&seen)
            .filter(|(_, keep)| **keep)
            .map(|(mut n, _)| {
                n.succs = n.succs.iter().map(|&s| remap[s]).collect();
                if n.succs.len() < 2 {
                    n.decision = None;
                }
                n
            })
            .collect();
        ControlFlowGraph { nodes, entry: remap[entry], exit: remap[self.exit] }
    }

    fn stmts(
        &mut self,
        stmts: &[Stmt],
        mut cur: Option<usize>,
        ctx: &mut Ctx,
    ) -> Result<Option<usize>, ExtractError> {
        for s in stmts {
            cur = self.stmt(s, cur, ctx, None)?;
        }
        Ok(cur)
    }

    fn find_jump(ctx: &Ctx, label: Option<&str>, want_continue: bool) -> Option<usize> {
        let found = ctx.jumps.iter().rev().find(|j| match label {
            Some(l) => j.label.as_deref() == Some(l),
            None if want_continue => j.cont.is_some(),
            None => j.breakable,
        })?;
        if want_continue {
            found.cont
        } else {
            Some(found.brk)
        }
    }

    fn stmt(
        &mut self,
        s: &Stmt,
        cur: Option<usize>,
        ctx: &mut Ctx,
        label: Option<&str>,
    ) -> Result<Option<usize>, ExtractError> {
        let label = label.map(String::from);
        match s {
            Stmt::Block(inner) => self.stmts(inner, cur, ctx),
            Stmt::Expr(e) => {
                let c = self.live(cur);
                Ok(Some(self.expr(e, c)?))
            }
            Stmt::If { cond, then, els } => {
                let c = self.live(cur);
                let d = self.expr(cond, c)?;
                self.decide(d, DecisionKind::If);
                let join = self.block();
                let t = self.block();
                self.edge(d, t);
                if let Some(end) = self.stmt(then, Some(t), ctx, None)? {
                    self.edge(end, join);
                }
                match els {
                    Some(els) => {
                        let f = self.block();
                        self.edge(d, f);
                        if let Some(end) = self.stmt(els, Some(f), ctx, None)? {
                            self.edge(end, join);
                        }
                    }
                    None => self.edge(d, join),
                }
                Ok(Some(join))
            }
            Stmt::While { cond, body } => {
                let c = self.live(cur);
                let head = self.block();
                self.edge(c, head);
                let d = self.expr(cond, head)?;
                self.decide(d, DecisionKind::While);
                let after = self.block();
                let b = self.block();
                self.edge(d, b);
                self.edge(d, after);
                ctx.jumps.push(Jump { label, brk: after, cont: Some(head), breakable: true, switch: false });
                let end = self.stmt(body, Some(b), ctx, None);
                ctx.jumps.pop();
                if let Some(end) = end? {
                    self.edge(end, head);
                }
                Ok(Some(after))
            }
            Stmt::DoWhile { body, cond } => {
                let c = self.live(cur);
                let b = self.block();
                self.edge(c, b);
                let test = self.block();
                let after = self.block();
                ctx.jumps.push(Jump { label, brk: after, cont: Some(test), breakable: true, switch: false });
                let end = self.stmt(body, Some(b), ctx, None);
                ctx.jumps.pop();
                if let Some(end) = end? {
                    self.edge(end, test);
                }
                let d = self.expr(cond, test)?;
                self.decide(d, DecisionKind::DoWhile);
                self.edge(d, b);
                self.edge(d, after);
                Ok(Some(after))
            }
            Stmt::For { init, cond, update, body } => {
                let c = self.live(cur);
                let c = self.expr(init, c)?;
                let head = self.block();
                self.edge(c, head);
                let d = self.expr(cond, head)?;
                self.decide(d, DecisionKind::For);
                let after = self.block();
                let b = self.block();
                let step = self.block();
                self.edge(d, b);
                self.edge(d, after);
                ctx.jumps.push(Jump { label, brk: after, cont: Some(step), breakable: true, switch: false });
                let end = self.stmt(body, Some(b), ctx, None);
                ctx.jumps.pop();
                if let Some(end) = end? {
                    self.edge(end, step);
                }
                let u = self.expr(update, step)?;
                self.edge(u, head);
                Ok(Some(after))
            }
            Stmt::Switch { scrutinee, groups } => {
                let c = self.live(cur);
                let d = self.expr(scrutinee, c)?;
                self.decide(d, DecisionKind::Switch);
                let after = self.block();
                ctx.jumps.push(Jump { label, brk: after, cont: None, breakable: true, switch: true });
                let mut fall: Option<usize> = None;
                let mut has_default = false;
                let mut result = Ok(());
                for g in groups {
                    let entry = self.block();
                    for _ in 0..g.cases {
                        self.edge(d, entry);
                    }
                    if g.default {
                        has_default = true;
                        self.edge(d, entry);
                    }
                    if let Some(f) = fall.take() {
                        self.edge(f, entry);
                    }
                    match self.stmts(&g.body, Some(entry), ctx) {
                        Ok(end) if g.arrow => {
                            if let Some(end) = end {
                                self.edge(end, after);
                            }
                        }
                        Ok(end) => fall = end,
                        Err(e) => {
                            result = Err(e);
                            break;
                        }
                    }
                }
                ctx.jumps.pop();
                result?;
                if let Some(f) = fall {
                    self.edge(f, after);
                }
                if !has_default {
                    self.edge(d, after);
                }
                Ok(Some(after))
            }
            Stmt::Try { resources, body, catches, finally } => {
                let c = self.live(cur);
                let d = self.expr(resources, c)?;
                let join = self.block();
                let t = self.block();
                self.edge(d, t);
                if let Some(end) = self.stmt(body, Some(t), ctx, None)? {
                    self.edge(end, join);
                }
                if !catches.is_empty() {
                    self.decide(d, DecisionKind::Catch);
                }
                for h in catches {
                    let hb = self.block();
                    self.edge(d, hb);
                    if let Some(end) = self.stmt(h, Some(hb), ctx, None)? {
                        self.edge(end, join);
                    }
                }
                match finally {
                    Some(f) => self.stmt(f, Some(join), ctx, None),
                    None => Ok(Some(join)),
                }
            }
            Stmt::Return(e) | Stmt::Throw(e) => {
                let c = self.live(cur);
                let c = self.expr(e, c)?;
                self.edge(c, ctx.ret);
                Ok(None)
            }
            Stmt::Yield(e) => {
                let c = self.live(cur);
                let c = self.expr(e, c)?;
                let target = ctx
                    .jumps
                    .iter()
                    .rev()
                    .find(|j| j.switch)
                    .map(|j| j.brk)
                    .ok_or_else(|| ExtractError::malformed(0, "`yield` outside switch"))?;
                self.edge(c, target);
                Ok(None)
            }
            Stmt::Break(l) | Stmt::Continue(l) => {
                let is_continue = matches!(s, Stmt::Continue(_));
                let target = Self::find_jump(ctx, l.as_deref(), is_continue).ok_or_else(|| {
                    ExtractError::malformed(0, if is_continue { "`continue` outside loop" } else { "`break` outside loop or switch" })
                })?;
                let c = self.live(cur);
                self.edge(c, target);
                Ok(None)
            }
            Stmt::Labeled(l, inner) => match **inner {
                Stmt::While { .. } | Stmt::DoWhile { .. } | Stmt::For { .. } | Stmt::Switch { .. } => {
                    self.stmt(inner, cur, ctx, Some(l))
                }
                _ => {
                    let after = self.block();
                    ctx.jumps.push(Jump { label: Some(l.clone()), brk: after, cont: None, breakable: false, switch: false });
                    let end = self.stmt(inner, cur, ctx, None);
                    ctx.jumps.pop();
                    if let Some(end) = end? {
                        self.edge(end, after);
                    }
                    Ok(Some(after))
                }
            },
        }
    }

    /// Compile an expression evaluated at block `cur`; returns the block where
    /// evaluation ends (which then carries whatever terminator follows).
    fn expr(&mut self, e: &Expr, cur: usize) -> Result<usize, ExtractError> {
        Ok(match e {
            Expr::Seq(parts) => {
                let mut c = cur;
                for p in parts {
                    c = self.expr(p, c)?;
                }
                c
            }
            Expr::Call(name) => {
                self.nodes[cur].calls.push(name.clone());
                cur
            }
            Expr::Logical { op, left, right } => {
                let d = self.expr(left, cur)?;
                self.decide(d, if *op == Logic::And { DecisionKind::And } else { DecisionKind::Or });
                let r = self.block();
                let join = self.block();
                self.edge(d, r);
                self.edge(d, join);
                let r_end = self.expr(right, r)?;
                self.edge(r_end, join);
                join
            }
            Expr::Ternary { cond, then, els } => {
                let d = self.expr(cond, cur)?;
                self.decide(d, DecisionKind::Ternary);
                let join = self.block();
                for arm in [then, els] {
                    let a = self.block();
                    self.edge(d, a);
                    let end = self.expr(arm, a)?;
                    self.edge(end, join);
                }
                join
            }
            Expr::Body(stmt) => {
                let end = self.block();
                let mut inner = Ctx { ret: end, jumps: Vec::new() };
                let start = self.block();
                self.edge(cur, start);
                if let Some(last) = self.stmt(stmt, Some(start), &mut inner, None)? {
                    self.edge(last, end);
                }
                end
            }
            Expr::Switch(stmt) => {
                let mut ctx = Ctx { ret: self.exit, jumps: Vec::new() };
                match self.stmt(stmt, Some(cur), &mut ctx, None)? {
                    Some(end) => end,
                    None => self.block(),
                }
            }
        })
    }
}

/// v(G) = E - N + 2.
pub fn cyclomatic(g: &ControlFlowGraph) -> usize {
    (g.edge_count() + 2).saturating_sub(g.node_count())
}

/// Cyclomatic complexity after collapsing every structured prime.
pub fn essential(g: &ControlFlowGraph) -> usize {
    Reducer::new(g, Mode::Essential).run(&Order::Ascending)
}

/// Cyclomatic complexity of the design-reduced graph. Call-free nodes with a
/// single successor are bypassed, parallel edges merged, self-loops on
/// call-free nodes dropped, and call-free decisions from which no call is
/// reachable sent straight to the exit. Only decisions that govern a call
/// survive; a method without calls reduces to 1.
pub fn design_complexity(g: &ControlFlowGraph) -> usize {
    Reducer::new(g, Mode::Design).run(&Order::Ascending)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Essential,
    Design,
}

/// Node visiting order used when searching for the next reducible prime.
/// Blocks are created outer construct first, so ascending ids visit
/// outermost constructs first.
#[derive(Debug, Clone)]
pub enum Order {
    Ascending,
    Descending,
    Custom(Vec<usize>),
}

/// Reduce with an explicit visiting order; the fixpoint does not depend on
/// the order.
pub fn reduce_with_order(g: &ControlFlowGraph, mode: Mode, order: &Order) -> usize {
    Reducer::new(g, mode).run(order)
}

struct Reducer {
    succs: Vec<Vec<usize>>,
    calls: Vec<bool>,
    alive: Vec<bool>,
    entry: usize,
    exit: usize,
    mode: Mode,
}

impl Reducer {
    fn new(g: &ControlFlowGraph, mode: Mode) -> Self {
        Reducer {
            succs: g.nodes.iter().map(|n| n.succs.clone()).collect(),
            calls: g.nodes.iter().map(|n| !n.calls.is_empty()).collect(),
            alive: vec![true; g.nodes.len()],
            entry: g.entry,
            exit: g.exit,
            mode,
        }
    }

    fn preds(&self) -> Vec<Vec<usize>> {
        let mut preds = vec![Vec::new(); self.succs.len()];
        for (u, ss) in self.succs.iter().enumerate() {
            if self.alive[u] {
                for &v in ss {
                    preds[v].push(u);
                }
            }
        }
        preds
    }

    fn run(mut self, order: &Order) -> usize {
        let n = self.succs.len();
        let ids: Vec<usize> = match order {
            Order::Ascending => (0..n).collect(),
            Order::Descending => (0..n).rev().collect(),
            Order::Custom(ids) => ids.clone(),
        };
        'outer: loop {
            let preds = self.preds();
            for &u in &ids {
                if self.alive[u] && self.try_reduce(u, &preds) {
                    continue 'outer;
                }
            }
            break;
        }
        let nodes = self.alive.iter().filter(|a| **a).count();
        let edges: usize = (0..n).filter(|&u| self.alive[u]).map(|u| self.succs[u].len()).sum();
        (edges + 2).saturating_sub(nodes)
    }

    fn only_from(preds: &[usize], u: usize) -> bool {
        !preds.is_empty() && preds.iter().all(|&p| p == u)
    }

    /// A node that can be absorbed as the body of a construct headed by `u`.
    fn is_arm(&self, t: usize, u: usize, preds: &[Vec<usize>]) -> bool {
        t != u && t != self.entry && t != self.exit && Self::only_from(&preds[t], u) && self.succs[t].len() == 1
    }

    fn try_reduce(&mut self, u: usize, preds: &[Vec<usize>]) -> bool {
        if self.mode == Mode::Design {
            return self.try_design(u, preds);
        }
        let out = self.succs[u].clone();
        match out.len() {
            0 => false,
            1 => {
                // sequence
                let v = out[0];
                if v == u || v == self.exit || v == self.entry || preds[v].len() != 1 {
                    return false;
                }
                let absorbed: Vec<usize> =
                    self.succs[v].iter().map(|&s| if s == v { u } else { s }).collect();
                self.succs[u] = absorbed;
                self.calls[u] |= self.calls[v];
                self.alive[v] = false;
                self.succs[v].clear();
                true
            }
            _ => {
                // self loop: do-while with a collapsed body
                if out.len() == 2 && out.iter().filter(|&&s| s == u).count() == 1 {
                    let x = *out.iter().find(|&&s| s != u).unwrap();
                    self.succs[u] = vec![x];
                    return true;
                }
                // while: u -> {b, x}, b -> u
                if out.len() == 2 && out[0] != out[1] {
                    for (b, x) in [(out[0], out[1]), (out[1], out[0])] {
                        if x != u && self.is_arm(b, u, preds) && self.succs[b][0] == u {
                            self.alive[b] = false;
                            self.succs[b].clear();
                            self.succs[u] = vec![x];
                            return true;
                        }
                    }
                }
                // if-then, if-then-else, multi-way with a common join
                let mut join: Option<usize> = None;
                let mut arms: Vec<usize> = Vec::new();
                for &t in &out {
                    let target = if self.is_arm(t, u, preds) { self.succs[t][0] } else { t };
                    if target == u || join.is_some_and(|j| j != target) {
                        return false;
                    }
                    join = Some(target);
                    if target != t && !arms.contains(&t) {
                        arms.push(t);
                    }
                }
                let Some(j) = join else { return false };
                // a join that is itself one of the arms means the "arm" was the join
                if arms.contains(&j) {
                    return false;
                }
                for a in arms {
                    self.alive[a] = false;
                    self.succs[a].clear();
                }
                self.succs[u] = vec![j];
                true
            }
        }
    }

    fn reaches_call(&self, u: usize) -> bool {
        let mut seen = vec![false; self.succs.len()];
        let mut stack = self.succs[u].clone();
        while let Some(v) = stack.pop() {
            if self.calls[v] {
                return true;
            }
            if !core::mem::replace(&mut seen[v], true) {
                stack.extend(self.succs[v].iter().copied());
            }
        }
        false
    }

    fn prune(&mut self) {
        let mut seen = vec![false; self.succs.len()];
        let mut stack = vec![self.entry];
        while let Some(v) = stack.pop() {
            if !core::mem::replace(&mut seen[v], true) {
                stack.extend(self.succs[v].iter().copied());
            }
        }
        seen[self.exit] = true;
        for (v, keep) in seen.into_iter().enumerate() {
            if !keep {
                self.alive[v] = false;
                self.succs[v].clear();
            }
        }
    }

    fn try_design(&mut self, u: usize, preds: &[Vec<usize>]) -> bool {
        let out = &self.succs[u];
        let mut unique: Vec<usize> = Vec::with_capacity(out.len());
        for &s in out {
            if !unique.contains(&s) {
                unique.push(s);
            }
        }
        if unique.len() < out.len() {
            self.succs[u] = unique;
            return true;
        }
        if !self.calls[u] && out.len() > 1 && out.contains(&u) {
            self.succs[u].retain(|&s| s != u);
            return true;
        }
        if !self.calls[u] && out.len() > 1 && !self.reaches_call(u) {
            self.succs[u] = vec![self.exit];
            self.prune();
            return true;
        }
        if u == self.entry || u == self.exit || self.calls[u] || out.len() != 1 || out[0] == u {
            return false;
        }
        let w = out[0];
        for &p in &preds[u] {
            for s in self.succs[p].iter_mut().filter(|s| **s == u) {
                *s = w;
            }
        }
        self.alive[u] = false;
        self.succs[u].clear();
        true
    }
}

/// Full McCabe triple for a parsed body.
pub fn mccabe(body: &[Stmt]) -> Result<(ControlFlowGraph, usize, usize, usize), ExtractError> {
    let g = build_cfg(body)?;
    let v = cyclomatic(&g);
    let ev = essential(&g);
    let iv = design_complexity(&g);
    Ok((g, v, ev, iv))
}
