//! Tokenizer shared by the closed-form expression, transform and proof
//! languages. Unicode mathematical symbols are folded onto ASCII spellings
//! so parsers only deal with one alphabet.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Number(String),
    Ident(String),
    Sym(&'static str),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Number(s) | Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Sym(s) => write!(f, "`{s}`"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    /// Byte offset of the first character.
    pub offset: usize,
}

/// A syntax error: byte offset plus the set of tokens that would have been
/// accepted there.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("syntax error at byte {offset}: expected {}, found {found}", .expected.join(" | "))]
pub struct ParseError {
    pub offset: usize,
    pub expected: Vec<String>,
    pub found: String,
}

impl ParseError {
    pub fn new(offset: usize, expected: &[&str], found: impl Into<String>) -> Self {
        ParseError { offset, expected: expected.iter().map(|s| s.to_string()).collect(), found: found.into() }
    }
}

// Longest spellings first.
const SYMBOLS: &[&str] = &[
    "<=>", "=>", "<=", ">=", "!=", "/\\", "\\/", "+", "-", "*", "/", "^", "(", ")", "[", "]", "{", "}", ",", ".", ";",
    ":", "|", "!", "<", ">", "=", "~",
];

fn unicode_alias(c: char) -> Option<Tok> {
    let t = match c {
        '−' | '–' => Tok::Sym("-"),
        '·' | '×' | '⋅' => Tok::Sym("*"),
        '≤' => Tok::Sym("<="),
        '≥' => Tok::Sym(">="),
        '≠' => Tok::Sym("!="),
        '⇒' | '→' => Tok::Sym("=>"),
        '⟺' | '⇔' | '↔' => Tok::Sym("<=>"),
        '∧' => Tok::Sym("/\\"),
        '∨' => Tok::Sym("\\/"),
        '¬' => Tok::Sym("~"),
        '∈' => Tok::Ident("in".into()),
        '∉' => Tok::Ident("notin".into()),
        '∀' => Tok::Ident("forall".into()),
        '∃' => Tok::Ident("exists".into()),
        '⊆' => Tok::Ident("subset".into()),
        'π' => Tok::Ident("pi".into()),
        'ε' | 'ϵ' => Tok::Ident("eps".into()),
        '∞' => Tok::Ident("inf".into()),
        _ => return None,
    };
    Some(t)
}

fn is_ident_start(c: char) -> bool {
    (c.is_alphabetic() || c == '_') && unicode_alias(c).is_none()
}

fn is_ident_continue(c: char) -> bool {
    (c.is_alphanumeric() || c == '_' || c == '\'') && unicode_alias(c).is_none()
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let bytes = src.as_bytes();
    let mut chars = src.char_indices().peekable();
    while let Some(&(offset, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        if let Some(tok) = unicode_alias(c) {
            chars.next();
            out.push(Token { tok, offset });
            continue;
        }
        if c.is_ascii_digit() {
            let mut end = offset;
            while end < bytes.len() && bytes[end].is_ascii_digit() {
                end += 1;
            }
            if end + 1 < bytes.len() && bytes[end] == b'.' && bytes[end + 1].is_ascii_digit() {
                end += 1;
                while end < bytes.len() && bytes[end].is_ascii_digit() {
                    end += 1;
                }
            }
            if end < bytes.len() && (bytes[end] == b'e' || bytes[end] == b'E') {
                let mut k = end + 1;
                if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                    k += 1;
                }
                if k < bytes.len() && bytes[k].is_ascii_digit() {
                    while k < bytes.len() && bytes[k].is_ascii_digit() {
                        k += 1;
                    }
                    end = k;
                }
            }
            out.push(Token { tok: Tok::Number(src[offset..end].to_string()), offset });
            while chars.peek().is_some_and(|&(i, _)| i < end) {
                chars.next();
            }
            continue;
        }
        if is_ident_start(c) {
            let mut name = String::new();
            while let Some(&(_, d)) = chars.peek() {
                if name.is_empty() || is_ident_continue(d) {
                    name.push(d);
                    chars.next();
                } else {
                    break;
                }
            }
            out.push(Token { tok: Tok::Ident(name), offset });
            continue;
        }
        let rest = &src[offset..];
        match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
            Some(sym) => {
                out.push(Token { tok: Tok::Sym(sym), offset });
                let end = offset + sym.len();
                while chars.peek().is_some_and(|&(i, _)| i < end) {
                    chars.next();
                }
            }
            None => return Err(ParseError::new(offset, &["token"], c.to_string())),
        }
    }
    Ok(out)
}

/// Cursor over a token slice with the helpers every recursive-descent parser
/// here needs.
#[derive(Debug, Clone)]
pub struct Cursor<'a> {
    tokens: &'a [Token],
    pos: usize,
    end_offset: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(tokens: &'a [Token], end_offset: usize) -> Self {
        Cursor { tokens, pos: 0, end_offset }
    }

    pub fn pos(&self) -> usize {
        self.pos
    }

    pub fn reset(&mut self, pos: usize) {
        self.pos = pos;
    }

    pub fn peek(&self) -> Option<&'a Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    pub fn peek_at(&self, ahead: usize) -> Option<&'a Tok> {
        self.tokens.get(self.pos + ahead).map(|t| &t.tok)
    }

    pub fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end_offset, |t| t.offset)
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    pub fn bump(&mut self) -> Option<&'a Tok> {
        let t = self.tokens.get(self.pos).map(|t| &t.tok);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    pub fn is_sym(&self, sym: &str) -> bool {
        matches!(self.peek(), Some(Tok::Sym(s)) if *s == sym)
    }

    pub fn is_ident(&self, name: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == name)
    }

    pub fn eat_sym(&mut self, sym: &str) -> bool {
        if self.is_sym(sym) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn eat_ident(&mut self, name: &str) -> bool {
        if self.is_ident(name) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn found(&self) -> String {
        self.peek().map_or_else(|| "end of input".to_string(), |t| t.to_string())
    }

    pub fn error(&self, expected: &[&str]) -> ParseError {
        ParseError::new(self.offset(), expected, self.found())
    }

    pub fn expect_sym(&mut self, sym: &'static str) -> Result<(), ParseError> {
        if self.eat_sym(sym) {
            Ok(())
        } else {
            Err(self.error(&[sym]))
        }
    }

    pub fn expect_ident(&mut self) -> Result<&'a str, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.error(&["identifier"])),
        }
    }

    pub fn expect_end(&self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error(&["end of input"]))
        }
    }
}
