//! Lexer and recursive-descent parser for the Hamiltonian expression language.
//!
//! ```text
//! sum     := ["-"] summand (("+" | "-") summand)*
//! summand := "h.c." | product
//! product := item ("*" item)*
//! item    := number | ident | "i" | "c" "(" int ")" | "c'" "(" int ")"
//!          | "n" "(" int ")" | "(" sum ")" ["h.c."]
//! ```
//!
//! Products are distributed over parenthesised sums, so the result is a flat
//! list of terms in source order. A `h.c.` summand stands for the adjoint of
//! every summand before it in the same sum, back to the previous `h.c.`.

use std::fmt;

use thiserror::Error;

use super::{Coefficient, FactorKind, ModeFactor, OperatorExpression, OperatorTerm};

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{kind} at column {}", .position + 1)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    /// 0-based character offset into the source text.
    pub position: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParseErrorKind {
    UnexpectedCharacter(char),
    Syntax { expected: String, found: String },
    UnknownFunction(String),
    InvalidModeIndex(String),
    NothingToConjugate,
    InvalidNumber(String),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::UnexpectedCharacter(c) => write!(f, "unexpected character `{c}`"),
            Self::Syntax { expected, found } => write!(f, "expected {expected}, found {found}"),
            Self::UnknownFunction(name) => {
                write!(f, "unknown operator `{name}` (expected c, c' or n)")
            }
            Self::InvalidModeIndex(text) => {
                write!(f, "invalid mode index `{text}` (modes are numbered from 1)")
            }
            Self::NothingToConjugate => write!(f, "`h.c.` must follow '+' and at least one term"),
            Self::InvalidNumber(text) => write!(f, "invalid number `{text}`"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Number(String),
    Ident(String),
    Prime,
    LParen,
    RParen,
    Plus,
    Minus,
    Star,
    HermConj,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Number(s) => write!(f, "number `{s}`"),
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Prime => f.write_str("`'`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Plus => f.write_str("`+`"),
            Tok::Minus => f.write_str("`-`"),
            Tok::Star => f.write_str("`*`"),
            Tok::HermConj => f.write_str("`h.c.`"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        let tok = match c {
            _ if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '\'' => Tok::Prime,
            'h' if chars[i..].starts_with(&['h', '.', 'c', '.']) => {
                i += 4;
                tokens.push((Tok::HermConj, start));
                continue;
            }
            _ if c.is_ascii_alphabetic() || c == '_' => {
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                tokens.push((Tok::Ident(chars[start..i].iter().collect()), start));
                continue;
            }
            _ if c.is_ascii_digit()
                || (c == '.' && chars.get(i + 1).is_some_and(char::is_ascii_digit)) =>
            {
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        while j < chars.len() && chars[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                tokens.push((Tok::Number(chars[start..i].iter().collect()), start));
                continue;
            }
            other => {
                return Err(ParseError {
                    kind: ParseErrorKind::UnexpectedCharacter(other),
                    position: start,
                })
            }
        };
        tokens.push((tok, start));
        i += 1;
    }
    tokens.push((Tok::End, chars.len()));
    Ok(tokens)
}

struct Parser {
    tokens: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].0
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let k = (self.pos + offset).min(self.tokens.len() - 1);
        &self.tokens[k].0
    }

    fn position(&self) -> usize {
        self.tokens[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let tok = self.tokens[self.pos].0.clone();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        tok
    }

    fn error(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            kind,
            position: self.position(),
        }
    }

    fn syntax(&self, expected: &str) -> ParseError {
        self.error(ParseErrorKind::Syntax {
            expected: expected.to_string(),
            found: self.peek().to_string(),
        })
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.syntax(expected))
        }
    }

    fn sum(&mut self) -> Result<Vec<OperatorTerm>, ParseError> {
        let mut terms: Vec<OperatorTerm> = Vec::new();
        let mut conjugated_upto = 0;
        let mut negative = match self.peek() {
            Tok::Minus => {
                self.bump();
                true
            }
            _ => false,
        };
        loop {
            if *self.peek() == Tok::HermConj {
                if negative || terms.len() == conjugated_upto {
                    return Err(self.error(ParseErrorKind::NothingToConjugate));
                }
                self.bump();
                let adjoints: Vec<OperatorTerm> = terms[conjugated_upto..]
                    .iter()
                    .map(OperatorTerm::adjoint)
                    .collect();
                terms.extend(adjoints);
                conjugated_upto = terms.len();
            } else {
                for mut term in self.product()? {
                    if negative {
                        term.coefficient = term.coefficient.negated();
                    }
                    terms.push(term);
                }
            }
            negative = match self.peek() {
                Tok::Plus => false,
                Tok::Minus => true,
                _ => return Ok(terms),
            };
            self.bump();
        }
    }

    fn product(&mut self) -> Result<Vec<OperatorTerm>, ParseError> {
        let mut acc = vec![OperatorTerm::identity()];
        loop {
            let item = self.item()?;
            acc = acc
                .iter()
                .flat_map(|left| item.iter().map(move |right| left.times(right)))
                .collect();
            if *self.peek() != Tok::Star {
                return Ok(acc);
            }
            self.bump();
        }
    }

    fn item(&mut self) -> Result<Vec<OperatorTerm>, ParseError> {
        let start = self.position();
        match self.peek().clone() {
            Tok::Number(text) => {
                self.bump();
                let value: f64 = text.parse().map_err(|_| ParseError {
                    kind: ParseErrorKind::InvalidNumber(text.clone()),
                    position: start,
                })?;
                if !value.is_finite() {
                    return Err(ParseError {
                        kind: ParseErrorKind::InvalidNumber(text),
                        position: start,
                    });
                }
                Ok(vec![OperatorTerm::scalar(Coefficient::real(value))])
            }
            Tok::Ident(name) => {
                let is_call = matches!(self.peek_at(1), Tok::LParen | Tok::Prime);
                match (name.as_str(), is_call) {
                    ("c" | "n", true) => self.mode_factor(name),
                    (_, true) => Err(self.error(ParseErrorKind::UnknownFunction(name))),
                    ("c" | "n", false) => {
                        self.bump();
                        Err(self.syntax("`(` after operator name"))
                    }
                    ("i", false) => {
                        self.bump();
                        Ok(vec![OperatorTerm::scalar(Coefficient::imaginary_unit())])
                    }
                    (_, false) => {
                        self.bump();
                        Ok(vec![OperatorTerm::scalar(Coefficient::parameter(&name))])
                    }
                }
            }
            Tok::LParen => {
                self.bump();
                let mut inner = self.sum()?;
                self.expect(Tok::RParen, "`)` or an operator")?;
                if *self.peek() == Tok::HermConj {
                    self.bump();
                    let adjoints: Vec<OperatorTerm> =
                        inner.iter().map(OperatorTerm::adjoint).collect();
                    inner.extend(adjoints);
                }
                Ok(inner)
            }
            _ => Err(self.syntax("a number, parameter, operator or `(`")),
        }
    }

    fn mode_factor(&mut self, name: String) -> Result<Vec<OperatorTerm>, ParseError> {
        let name_pos = self.position();
        self.bump();
        let primed = *self.peek() == Tok::Prime;
        if primed {
            self.bump();
        }
        let kind = match (name.as_str(), primed) {
            ("c", false) => FactorKind::Lower,
            ("c", true) => FactorKind::Raise,
            ("n", false) => FactorKind::Number,
            _ => {
                return Err(ParseError {
                    kind: ParseErrorKind::UnknownFunction(format!("{name}'")),
                    position: name_pos,
                })
            }
        };
        self.expect(Tok::LParen, "`(`")?;
        let index_pos = self.position();
        let mode = match self.bump() {
            Tok::Number(text) => match text.parse::<usize>() {
                Ok(m) if m >= 1 && text.bytes().all(|b| b.is_ascii_digit()) => m,
                _ => {
                    return Err(ParseError {
                        kind: ParseErrorKind::InvalidModeIndex(text),
                        position: index_pos,
                    })
                }
            },
            Tok::Minus => {
                let rest = match self.peek() {
                    Tok::Number(t) => t.clone(),
                    _ => String::new(),
                };
                return Err(ParseError {
                    kind: ParseErrorKind::InvalidModeIndex(format!("-{rest}")),
                    position: index_pos,
                });
            }
            other => {
                return Err(ParseError {
                    kind: ParseErrorKind::Syntax {
                        expected: "a mode index".into(),
                        found: other.to_string(),
                    },
                    position: index_pos,
                })
            }
        };
        self.expect(Tok::RParen, "`)`")?;
        Ok(vec![OperatorTerm {
            coefficient: Coefficient::real(1.0),
            factors: vec![ModeFactor { kind, mode }],
        }])
    }
}

/// Parses an expression such as `lambda*(c'(2)*c(1) + h.c.)`.
pub fn parse(text: &str) -> Result<OperatorExpression, ParseError> {
    let mut parser = Parser {
        tokens: lex(text)?,
        pos: 0,
    };
    let terms = parser.sum()?;
    if *parser.peek() != Tok::End {
        return Err(parser.syntax("`+`, `-`, `*` or end of input"));
    }
    Ok(OperatorExpression::from_terms(terms))
}
