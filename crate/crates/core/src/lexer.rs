//! Lossless tokenizer for a brace-delimited, C/Java-like language.
//!
//! Every byte of the input lands in exactly one token, so concatenating the
//! token texts reproduces the source. Comments and whitespace are kept as
//! tokens; later stages skip them through [`Token::is_trivia`].

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{ExtractError, ExtractErrorKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum TokenKind {
    Keyword,
    Identifier,
    Operator,
    Literal,
    Punctuation,
    Comment,
    Whitespace,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    /// 1-based line of the first character.
    pub line: u32,
}

impl Token {
    pub fn is_trivia(&self) -> bool {
        matches!(self.kind, TokenKind::Comment | TokenKind::Whitespace)
    }

    pub fn is(&self, text: &str) -> bool {
        self.text == text
    }

    pub fn is_keyword(&self, text: &str) -> bool {
        self.kind == TokenKind::Keyword && self.text == text
    }

    /// Number of newlines inside the token text.
    pub fn newlines(&self) -> u32 {
        self.text.bytes().filter(|&b| b == b'\n').count() as u32
    }
}

const KEYWORDS: &[&str] = &[
    "abstract", "assert", "auto", "boolean", "break", "byte", "case", "catch", "char",
    "class", "const", "continue", "default", "do", "double", "else", "enum", "extends",
    "extern", "final", "finally", "float", "for", "goto", "if", "implements", "import",
    "inline", "instanceof", "int", "interface", "long", "native", "new", "package",
    "private", "protected", "public", "register", "return", "short", "signed", "sizeof",
    "static", "strictfp", "struct", "super", "switch", "synchronized", "this", "throw",
    "throws", "transient", "try", "typedef", "union", "unsigned", "void", "volatile",
    "while",
];

const LITERAL_WORDS: &[&str] = &["true", "false", "null"];

// Longest first within each leading character is not required: matching tries
// longer lengths before shorter ones.
const OPERATORS: &[&str] = &[
    ">>>=", "<<=", ">>=", ">>>", "...", "->", "::", "++", "--", "&&", "||", "==", "!=",
    "<=", ">=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<", ">>", "+", "-",
    "*", "/", "%", "=", "<", ">", "!", "~", "?", ":", "&", "|", "^", "@",
];

const PUNCTUATION: &[char] = &['(', ')', '{', '}', '[', ']', ';', ',', '.'];

pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.contains(&word)
}

/// Tokenize `source`. `goto` is rejected: the reducers behind essential and
/// design complexity only understand structured jumps.
pub fn tokenize(source: &str) -> Result<Vec<Token>, ExtractError> {
    Lexer { src: source, pos: 0, line: 1, out: Vec::new() }.run()
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: u32,
    out: Vec<Token>,
}

impl<'a> Lexer<'a> {
    fn run(mut self) -> Result<Vec<Token>, ExtractError> {
        while self.pos < self.src.len() {
            let rest = &self.src[self.pos..];
            let c = rest.chars().next().unwrap_or('\0');
            let start_line = self.line;
            let (kind, len) = if c.is_whitespace() {
                let len = rest
                    .char_indices()
                    .find(|(_, ch)| !ch.is_whitespace())
                    .map_or(rest.len(), |(i, _)| i);
                (TokenKind::Whitespace, len)
            } else if rest.starts_with("//") {
                (TokenKind::Comment, rest.find('\n').unwrap_or(rest.len()))
            } else if let Some(body) = rest.strip_prefix("/*") {
                match body.find("*/") {
                    Some(i) => (TokenKind::Comment, i + 4),
                    None => return Err(self.err(ExtractErrorKind::UnterminatedComment)),
                }
            } else if c == '"' || c == '\'' {
                (TokenKind::Literal, self.quoted(rest, c)?)
            } else if c.is_ascii_digit()
                || (c == '.' && rest[1..].starts_with(|d: char| d.is_ascii_digit()))
            {
                (TokenKind::Literal, number_len(rest))
            } else if c.is_alphabetic() || c == '_' || c == '$' {
                let len = rest
                    .char_indices()
                    .find(|&(_, ch)| !(ch.is_alphanumeric() || ch == '_' || ch == '$'))
                    .map_or(rest.len(), |(i, _)| i);
                let word = &rest[..len];
                if word == "goto" {
                    return Err(self.err(ExtractErrorKind::Goto));
                }
                let kind = if LITERAL_WORDS.contains(&word) {
                    TokenKind::Literal
                } else if is_keyword(word) {
                    TokenKind::Keyword
                } else {
                    TokenKind::Identifier
                };
                (kind, len)
            } else if PUNCTUATION.contains(&c) {
                (TokenKind::Punctuation, 1)
            } else if let Some(op) = OPERATORS
                .iter()
                .filter(|op| rest.starts_with(**op))
                .max_by_key(|op| op.len())
            {
                (TokenKind::Operator, op.len())
            } else {
                return Err(self.err(ExtractErrorKind::UnexpectedChar(c)));
            };
            let text = &rest[..len];
            self.line += text.bytes().filter(|&b| b == b'\n').count() as u32;
            self.pos += len;
            self.out.push(Token { kind, text: String::from(text), line: start_line });
        }
        Ok(self.out)
    }

    fn err(&self, kind: ExtractErrorKind) -> ExtractError {
        ExtractError { line: self.line, kind }
    }

    /// Length of a string or char literal starting at `rest`, including the
    /// closing quote. Literals may not span lines (text blocks excepted).
    fn quoted(&self, rest: &str, quote: char) -> Result<usize, ExtractError> {
        if quote == '"' && rest.starts_with("\"\"\"") {
            return match rest[3..].find("\"\"\"") {
                Some(i) => Ok(i + 6),
                None => Err(self.err(ExtractErrorKind::UnterminatedString)),
            };
        }
        let mut escaped = false;
        for (i, ch) in rest.char_indices().skip(1) {
            match ch {
                '\n' => break,
                '\\' if !escaped => escaped = true,
                c if c == quote && !escaped => return Ok(i + 1),
                _ => escaped = false,
            }
        }
        Err(self.err(ExtractErrorKind::UnterminatedString))
    }
}

fn number_len(rest: &str) -> usize {
    let bytes = rest.as_bytes();
    let hex = rest.starts_with("0x") || rest.starts_with("0X");
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let exponent_sign = (b == b'+' || b == b'-')
            && i > 0
            && !hex
            && matches!(bytes[i - 1], b'e' | b'E')
            && bytes.get(i + 1).is_some_and(u8::is_ascii_digit);
        let digit_follows = bytes.get(i + 1).is_some_and(u8::is_ascii_digit);
        if b.is_ascii_alphanumeric() || b == b'_' || exponent_sign || (b == b'.' && digit_follows) {
            i += 1;
        } else if b == b'.' && i > 0 && bytes[..i].iter().all(u8::is_ascii_digit) {
            // `1.` followed by a non-digit, e.g. `1.f`
            i += 1;
        } else {
            break;
        }
    }
    i
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn kinds_and_text(src: &str) -> Vec<(TokenKind, String)> {
        tokenize(src)
            .unwrap()
            .into_iter()
            .filter(|t| !t.is_trivia())
            .map(|t| (t.kind, t.text))
            .collect()
    }

    #[test]
    fn simple_assignment() {
        use TokenKind::*;
        let got = kinds_and_text("a=b+1;");
        let want: Vec<(TokenKind, String)> = vec![
            (Identifier, "a".into()),
            (Operator, "=".into()),
            (Identifier, "b".into()),
            (Operator, "+".into()),
            (Literal, "1".into()),
            (Punctuation, ";".into()),
        ];
        assert_eq!(got, want);
    }

    #[test]
    fn empty_input() {
        assert!(tokenize("").unwrap().is_empty());
    }

    #[test]
    fn comment_hides_keywords() {
        let toks = tokenize("// if (x)").unwrap();
        assert_eq!(toks.len(), 1);
        assert_eq!(toks[0].kind, TokenKind::Comment);
        let toks = tokenize("s = \"while (true) if\";").unwrap();
        assert!(toks.iter().all(|t| t.kind != TokenKind::Keyword));
    }

    #[test]
    fn lossless_and_lines() {
        let src = "class A {\n  /* x\n y */ int f() { return 0x1F + 1.5e-3; }\r\n}\n";
        let toks = tokenize(src).unwrap();
        let joined: String = toks.iter().map(|t| t.text.as_str()).collect();
        assert_eq!(joined, src);
        let ret = toks.iter().find(|t| t.is("return")).unwrap();
        assert_eq!(ret.line, 3);
        assert!(toks.iter().any(|t| t.is("1.5e-3")));
        assert!(toks.iter().any(|t| t.is("0x1F")));
    }

    #[test]
    fn longest_operator_match() {
        let got = kinds_and_text("x >>>= 2; y = a->b;");
        assert!(got.iter().any(|(_, t)| t == ">>>="));
        assert!(got.iter().any(|(_, t)| t == "->"));
    }

    #[test]
    fn unterminated_comment_reports_line() {
        let e = tokenize("a;\nb;\n/* open").unwrap_err();
        assert_eq!(e.kind, ExtractErrorKind::UnterminatedComment);
        assert_eq!(e.line, 3);
    }

    #[test]
    fn unterminated_string_reports_line() {
        let e = tokenize("x = 1;\ns = \"abc\n;").unwrap_err();
        assert_eq!(e.kind, ExtractErrorKind::UnterminatedString);
        assert_eq!(e.line, 2);
    }

    #[test]
    fn escaped_quotes() {
        let got = kinds_and_text(r#"s = "a\"b"; c = '\'';"#);
        assert!(got.iter().any(|(k, t)| *k == TokenKind::Literal && t == r#""a\"b""#));
        assert!(got.iter().any(|(k, t)| *k == TokenKind::Literal && t == r"'\''"));
    }

    #[test]
    fn goto_rejected() {
        let e = tokenize("void f() {\n goto out; }").unwrap_err();
        assert_eq!(e.kind, ExtractErrorKind::Goto);
        assert_eq!(e.line, 2);
    }

    #[test]
    fn literal_words() {
        let got = kinds_and_text("x = null; y = true;");
        assert_eq!(got[2], (TokenKind::Literal, "null".into()));
    }
}
