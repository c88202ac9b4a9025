//! Reading binary forms from text: a JSON coefficient array (descending `t0`
//! power) or an expression in `t0, t1` with `+ - * / ^` and parentheses.

use num_traits::One;
use serde_json::Value;

use crate::binform::{BinaryForm, Form};
use crate::error::{Error, Result};
use crate::mpoly::MPoly;
use crate::scalar::{parse_rational, Rational};

type P = MPoly<Rational>;

pub fn parse_form(text: &str) -> Result<BinaryForm> {
    if text.trim_start().starts_with('[') {
        parse_json(text)
    } else {
        parse_expression(text)
    }
}

fn parse_json(text: &str) -> Result<BinaryForm> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let (line, column) = position(text, text.len() - text.trim_start().len());
    let err = |message: &str| Error::Parse {
        line,
        column,
        message: message.to_string(),
    };
    let items = v.as_array().ok_or_else(|| err("expected an array"))?;
    if items.is_empty() {
        return Err(err("empty coefficient array"));
    }
    let coeffs = items
        .iter()
        .map(|c| match c {
            Value::String(s) => parse_rational(s),
            Value::Number(x) if x.is_i64() || x.is_u64() => parse_rational(&x.to_string()),
            _ => None,
        })
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| err("coefficients must be integers or rational strings"))?;
    Ok(Form::new(coeffs))
}

/// 1-based line and column of a byte offset.
fn position(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rational),
    Var(usize),
    Op(char),
    End,
}

struct Parser<'a> {
    text: &'a str,
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            out.push((Tok::Num(parse_rational(&text[start..i]).unwrap()), start));
        } else if c == 't' && matches!(bytes.get(i + 1), Some(b'0' | b'1')) {
            out.push((Tok::Var((bytes[i + 1] - b'0') as usize), i));
            i += 2;
        } else if "+-*/^()".contains(c) {
            out.push((Tok::Op(c), i));
            i += 1;
        } else {
            let (line, column) = position(text, i);
            return Err(Error::Parse {
                line,
                column,
                message: format!(
                    "unexpected character '{}'",
                    text[i..].chars().next().unwrap()
                ),
            });
        }
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn error(&self, message: impl Into<String>) -> Error {
        let (line, column) = position(self.text, self.toks[self.pos].1);
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    fn eat(&mut self, op: char) -> bool {
        if *self.peek() == Tok::Op(op) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    // sum := ['-'] product (('+' | '-') product)*
    fn sum(&mut self) -> Result<P> {
        let neg = self.eat('-');
        let mut acc = self.product()?;
        if neg {
            acc = -acc;
        }
        loop {
            if self.eat('+') {
                acc = acc + self.product()?;
            } else if self.eat('-') {
                acc = acc - self.product()?;
            } else {
                return Ok(acc);
            }
        }
    }

    // product := power (('*' | '/') power)*
    fn product(&mut self) -> Result<P> {
        let mut acc = self.power()?;
        loop {
            if self.eat('*') {
                acc = acc * self.power()?;
            } else if self.eat('/') {
                let at = self.pos;
                let d = self.power()?;
                if !d.is_constant() || d.is_zero() {
                    self.pos = at;
                    return Err(self.error("can only divide by a nonzero constant"));
                }
                acc = acc.scale(&(Rational::one() / d.coeff(&[0, 0])));
            } else {
                return Ok(acc);
            }
        }
    }

    // power := atom ['^' integer]
    fn power(&mut self) -> Result<P> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        match self.peek().clone() {
            Tok::Num(e) if e.is_integer() && e <= Rational::from_integer(1000.into()) => {
                self.pos += 1;
                Ok(base.pow(e.to_integer().try_into().unwrap()))
            }
            _ => Err(self.error("expected a small nonnegative integer exponent")),
        }
    }

    fn atom(&mut self) -> Result<P> {
        match self.peek().clone() {
            Tok::Num(q) => {
                self.pos += 1;
                Ok(P::constant(2, q))
            }
            Tok::Var(i) => {
                self.pos += 1;
                Ok(P::var(2, i))
            }
            Tok::Op('(') => {
                self.pos += 1;
                let inner = self.sum()?;
                if !self.eat(')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(inner)
            }
            Tok::Op('-') => {
                self.pos += 1;
                Ok(-self.power()?)
            }
            Tok::End => Err(self.error("unexpected end of input")),
            Tok::Op(c) => Err(self.error(format!("unexpected '{c}'"))),
        }
    }
}

fn parse_expression(text: &str) -> Result<BinaryForm> {
    let mut p = Parser {
        text,
        toks: tokenize(text)?,
        pos: 0,
    };
    let poly = p.sum()?;
    if *p.peek() != Tok::End {
        return Err(p.error("trailing input"));
    }
    let mut degree = None;
    for (m, _) in poly.terms() {
        let d = m[0] + m[1];
        match degree {
            None => degree = Some(d),
            Some(e) if e != d => {
                return Err(Error::NonHomogeneous {
                    expected: e,
                    found: d,
                })
            }
            _ => {}
        }
    }
    let d = degree.unwrap_or(0);
    Ok(Form::new(
        (0..=d).map(|i| poly.coeff(&[d - i, i])).collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expands_products() {
        let f = parse_form("t0*t1*(t0-t1)*(t0-2*t1)").unwrap();
        assert_eq!(f, Form::from_integers(&[0, 1, -3, 2, 0]));
        let f = parse_form("(t0^2 + t1^2)^2 - 1/2*t0^4").unwrap();
        assert_eq!(f.coefficient_strings(), ["1/2", "0", "2", "0", "1"]);
        assert_eq!(
            parse_form("-t0 + 3/4*t1").unwrap().coefficient_strings(),
            ["-1", "3/4"]
        );
    }

    #[test]
    fn json_arrays() {
        assert_eq!(parse_form("[\"1\"]").unwrap(), Form::from_integers(&[1]));
        assert_eq!(
            parse_form("[1, \"-2/3\", 0]")
                .unwrap()
                .coefficient_strings(),
            ["1", "-2/3", "0"]
        );
        assert!(matches!(parse_form("[1, 2"), Err(Error::Parse { .. })));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            parse_form("t0^2 + t1"),
            Err(Error::NonHomogeneous { .. })
        ));
        match parse_form("t0 *\n  (t1 + x)") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 9)),
            other => panic!("{other:?}"),
        }
        match parse_form("t0 + ") {
            Err(Error::Parse { column, .. }) => assert_eq!(column, 6),
            other => panic!("{other:?}"),
        }
        assert!(parse_form("t0/t1").is_err());
        assert!(parse_form("(t0").is_err());
    }
}
