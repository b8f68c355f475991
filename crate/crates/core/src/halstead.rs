//! Halstead operator/operand counts and the derived measures.
//!
//! Counting table:
//! * operators: every operator and punctuation token except the closing
//!   delimiters `)`, `]`, `}` (a pair counts once, via its opener), every
//!   keyword except `this` and `super`, and one implicit method delimiter;
//! * operands: identifiers, literals, `this`, `super`.

use alloc::collections::BTreeSet;

use crate::lexer::{Token, TokenKind};

/// Text used for the implicit delimiter; cannot collide with a real token.
const DELIMITER: &str = "<method>";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct HalsteadCounts {
    pub n1: usize,
    pub n2: usize,
    pub big_n1: usize,
    pub big_n2: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HalsteadMeasures {
    pub n: f64,
    pub v: f64,
    pub l: f64,
    pub d: f64,
    pub i: f64,
    pub e: f64,
    pub b: f64,
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Operator,
    Operand,
    Ignored,
}

pub fn classify(t: &Token) -> Role {
    match t.kind {
        TokenKind::Comment | TokenKind::Whitespace => Role::Ignored,
        TokenKind::Identifier | TokenKind::Literal => Role::Operand,
        TokenKind::Keyword if t.is("this") || t.is("super") => Role::Operand,
        TokenKind::Keyword => Role::Operator,
        TokenKind::Punctuation if t.is(")") || t.is("]") || t.is("}") => Role::Ignored,
        TokenKind::Punctuation | TokenKind::Operator => Role::Operator,
    }
}

/// Count the tokens of a method body (the tokens strictly inside its braces).
pub fn count(body: &[Token]) -> HalsteadCounts {
    let mut ops = BTreeSet::new();
    let mut opnds = BTreeSet::new();
    ops.insert(DELIMITER);
    let mut c = HalsteadCounts { big_n1: 1, ..Default::default() };
    for t in body {
        match classify(t) {
            Role::Operator => {
                ops.insert(t.text.as_str());
                c.big_n1 += 1;
            }
            Role::Operand => {
                opnds.insert(t.text.as_str());
                c.big_n2 += 1;
            }
            Role::Ignored => {}
        }
    }
    c.n1 = ops.len();
    c.n2 = opnds.len();
    c
}

impl HalsteadCounts {
    /// Derived measures. With no operands, D = 0, L = 1, E = 0 and I = V.
    pub fn measures(&self) -> HalsteadMeasures {
        let n = (self.big_n1 + self.big_n2) as f64;
        let vocab = (self.n1 + self.n2) as f64;
        let v = if vocab > 0.0 { n * libm::log2(vocab) } else { 0.0 };
        let (d, l) = if self.n2 == 0 {
            (0.0, 1.0)
        } else {
            let d = (self.n1 as f64 / 2.0) * (self.big_n2 as f64 / self.n2 as f64);
            (d, 1.0 / d)
        };
        let e = d * v;
        HalsteadMeasures { n, v, l, d, i: l * v, e, b: v / 3000.0, t: e / 18.0 }
    }
}
