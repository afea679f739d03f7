//! Recursive-descent parser for the field-definition grammar:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := ['-'] atom ['^' integer]
//! atom   := number | 'x0'..'x3' | func '(' expr ')' | '(' expr ')'
//! func   := 'sin' | 'cos' | 'exp' | 'sqrt'
//! ```
//!
//! The exponent may carry its own sign (`x1^-2`).

use thiserror::Error;

use super::{Expression, Func};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedEnd,
    UnexpectedChar(char),
    UnknownIdentifier(String),
    BadNumber(String),
    BadExponent,
    TrailingInput,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{} at byte offset {offset}", describe(.kind))]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

fn describe(kind: &ParseErrorKind) -> String {
    match kind {
        ParseErrorKind::UnexpectedEnd => "unexpected end of input".to_string(),
        ParseErrorKind::UnexpectedChar(c) => format!("unexpected character '{c}'"),
        ParseErrorKind::UnknownIdentifier(id) => format!("unknown identifier '{id}'"),
        ParseErrorKind::BadNumber(s) => format!("malformed number '{s}'"),
        ParseErrorKind::BadExponent => "exponent must be an integer".to_string(),
        ParseErrorKind::TrailingInput => "unexpected trailing input".to_string(),
    }
}

pub fn parse(text: &str) -> Result<Expression, ParseError> {
    let mut parser = Parser { src: text, pos: 0 };
    let e = parser.expr()?;
    parser.skip_ws();
    if parser.pos < text.len() {
        return Err(parser.error(ParseErrorKind::TrailingInput));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            offset: self.pos,
            kind,
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek_raw() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek_raw(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.peek_raw()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        match self.peek() {
            Some(found) if found == c => {
                self.pos += c.len_utf8();
                Ok(())
            }
            Some(found) => Err(self.error(ParseErrorKind::UnexpectedChar(found))),
            None => Err(self.error(ParseErrorKind::UnexpectedEnd)),
        }
    }

    fn expr(&mut self) -> Result<Expression, ParseError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc + self.term()?;
            } else if self.eat('-') {
                acc = acc - self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expression, ParseError> {
        let mut acc = self.factor()?;
        loop {
            if self.eat('*') {
                acc = acc * self.factor()?;
            } else if self.eat('/') {
                acc = acc / self.factor()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<Expression, ParseError> {
        let negate = self.eat('-');
        let mut base = self.atom()?;
        if self.eat('^') {
            base = base.powi(self.integer()?);
        }
        Ok(if negate { -base } else { base })
    }

    fn integer(&mut self) -> Result<i32, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let mut end = start;
        let bytes = self.src.as_bytes();
        if end < bytes.len() && (bytes[end] == b'-' || bytes[end] == b'+') {
            end += 1;
        }
        let digits_start = end;
        while end < bytes.len() && bytes[end].is_ascii_digit() {
            end += 1;
        }
        if end == digits_start {
            return Err(match self.peek_raw() {
                None => self.error(ParseErrorKind::UnexpectedEnd),
                Some(_) => self.error(ParseErrorKind::BadExponent),
            });
        }
        let value = self.src[start..end]
            .parse::<i32>()
            .map_err(|_| self.error(ParseErrorKind::BadExponent))?;
        self.pos = end;
        Ok(value)
    }

    fn atom(&mut self) -> Result<Expression, ParseError> {
        match self.peek() {
            None => Err(self.error(ParseErrorKind::UnexpectedEnd)),
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(')')?;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.identifier(),
            Some(c) => Err(self.error(ParseErrorKind::UnexpectedChar(c))),
        }
    }

    fn number(&mut self) -> Result<Expression, ParseError> {
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let mut end = start;
        while end < bytes.len() && (bytes[end].is_ascii_digit() || bytes[end] == b'.') {
            end += 1;
        }
        if end < bytes.len() && (bytes[end] == b'e' || bytes[end] == b'E') {
            let mut look = end + 1;
            if look < bytes.len() && (bytes[look] == b'+' || bytes[look] == b'-') {
                look += 1;
            }
            if look < bytes.len() && bytes[look].is_ascii_digit() {
                while look < bytes.len() && bytes[look].is_ascii_digit() {
                    look += 1;
                }
                end = look;
            }
        }
        let text = &self.src[start..end];
        let value = text
            .parse::<f64>()
            .map_err(|_| self.error(ParseErrorKind::BadNumber(text.to_string())))?;
        self.pos = end;
        Ok(Expression::constant(value))
    }

    fn identifier(&mut self) -> Result<Expression, ParseError> {
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let mut end = start;
        while end < bytes.len() && (bytes[end].is_ascii_alphanumeric() || bytes[end] == b'_') {
            end += 1;
        }
        let name = &self.src[start..end];
        let coord = match name {
            "x0" => Some(0),
            "x1" => Some(1),
            "x2" => Some(2),
            "x3" => Some(3),
            _ => None,
        };
        if let Some(mu) = coord {
            self.pos = end;
            return Ok(Expression::coord(mu));
        }
        let Some(func) = Func::from_name(name) else {
            return Err(self.error(ParseErrorKind::UnknownIdentifier(name.to_string())));
        };
        self.pos = end;
        self.expect('(')?;
        let arg = self.expr()?;
        self.expect(')')?;
        Ok(Expression::call(func, arg))
    }
}
