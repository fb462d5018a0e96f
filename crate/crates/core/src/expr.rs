//! Exact arithmetic expressions over named parameters.
//!
//! Bundle values may be plain scalars (`"1/2"`, `"3-2 i"`) or expressions
//! such as `8*<K,h>`, `2*(g-1)*<b,C>^3` or `-<C1,h>`. Parameter names are
//! either identifiers (`g`) or anything enclosed in angle brackets
//! (`<C1,h>`). The bare name `i` is the imaginary unit.

use indexmap::IndexMap;
use thiserror::Error;

use crate::scalars::{GaussRational, Rational, ScalarError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("unknown symbol {0:?}")]
    UnresolvedSymbol(String),
    #[error("syntax error in {input:?} at offset {offset}: {message}")]
    Syntax {
        input: String,
        offset: usize,
        message: String,
    },
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Resolved parameter values, in declaration order.
pub type Params = IndexMap<String, GaussRational>;

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(Rational),
    Name(String),
    Op(char),
}

fn tokenize(input: &str) -> Result<Vec<(usize, Token)>, ExprError> {
    let bytes = input.as_bytes();
    let mut out = Vec::new();
    let mut pos = 0;
    let syntax = |offset, message: &str| ExprError::Syntax {
        input: input.to_string(),
        offset,
        message: message.to_string(),
    };
    while pos < bytes.len() {
        let c = bytes[pos] as char;
        match c {
            ' ' | '\t' => pos += 1,
            '+' | '-' | '*' | '/' | '^' | '(' | ')' => {
                out.push((pos, Token::Op(c)));
                pos += 1;
            }
            '0'..='9' => {
                let start = pos;
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
                let n: Rational = input[start..pos].parse()?;
                out.push((start, Token::Num(n)));
            }
            '<' => {
                let start = pos;
                let end = input[pos..]
                    .find('>')
                    .ok_or_else(|| syntax(start, "unterminated <...> name"))?;
                pos += end + 1;
                out.push((start, Token::Name(input[start..pos].to_string())));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = pos;
                while pos < bytes.len()
                    && (bytes[pos].is_ascii_alphanumeric() || bytes[pos] == b'_' || bytes[pos] == b'\'')
                {
                    pos += 1;
                }
                out.push((start, Token::Name(input[start..pos].to_string())));
            }
            _ => return Err(syntax(pos, &format!("unexpected character {c:?}"))),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    input: &'a str,
    tokens: Vec<(usize, Token)>,
    pos: usize,
    params: &'a Params,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.input.len(), |(o, _)| *o)
    }

    fn error(&self, message: &str) -> ExprError {
        ExprError::Syntax {
            input: self.input.to_string(),
            offset: self.offset(),
            message: message.to_string(),
        }
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Token::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<GaussRational, ExprError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = &acc + &self.term()?;
            } else if self.eat('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<GaussRational, ExprError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = &acc * &self.unary()?;
            } else if self.eat('/') {
                acc = acc.checked_div(&self.unary()?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<GaussRational, ExprError> {
        if self.eat('-') {
            return Ok(-self.unary()?);
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<GaussRational, ExprError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let negative = self.eat('-');
        match self.tokens.get(self.pos).cloned() {
            Some((_, Token::Num(n))) => {
                self.pos += 1;
                let e = n.to_i64().ok_or_else(|| self.error("exponent too large"))?;
                Ok(base.pow(if negative { -e } else { e })?)
            }
            _ => Err(self.error("expected an integer exponent")),
        }
    }

    fn atom(&mut self) -> Result<GaussRational, ExprError> {
        match self.tokens.get(self.pos).cloned() {
            Some((_, Token::Num(n))) => {
                self.pos += 1;
                Ok(GaussRational::real(n))
            }
            Some((_, Token::Name(name))) => {
                self.pos += 1;
                if let Some(v) = self.params.get(&name) {
                    Ok(v.clone())
                } else if name == "i" {
                    Ok(GaussRational::i())
                } else {
                    Err(ExprError::UnresolvedSymbol(name))
                }
            }
            Some((_, Token::Op('('))) => {
                self.pos += 1;
                let v = self.expr()?;
                if !self.eat(')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(v)
            }
            _ => Err(self.error("expected a number, name or '('")),
        }
    }
}

/// Evaluates `input` exactly. Plain scalar literals in canonical syntax are
/// accepted directly; anything else is parsed as an expression.
pub fn evaluate(input: &str, params: &Params) -> Result<GaussRational, ExprError> {
    if let Ok(v) = input.parse::<GaussRational>() {
        return Ok(v);
    }
    let tokens = tokenize(input)?;
    if tokens.is_empty() {
        return Err(ExprError::Syntax {
            input: input.to_string(),
            offset: 0,
            message: "empty expression".into(),
        });
    }
    let mut p = Parser {
        input,
        tokens,
        pos: 0,
        params,
    };
    let v = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(p.error("trailing input"));
    }
    Ok(v)
}

/// Resolves parameter definitions in order; each definition may refer to
/// parameters declared before it.
pub fn resolve_params<'a>(
    defs: impl IntoIterator<Item = (&'a str, &'a str)>,
) -> Result<Params, (String, ExprError)> {
    let mut out = Params::new();
    for (name, def) in defs {
        let v = evaluate(def, &out).map_err(|e| (name.to_string(), e))?;
        out.insert(name.to_string(), v);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> Params {
        resolve_params([("g", "3"), ("<C1,h>", "3"), ("<K,h>", "-<C1,h>"), ("<b,C>", "-2")]).unwrap()
    }

    fn ev(s: &str) -> String {
        evaluate(s, &params()).unwrap().to_string()
    }

    #[test]
    fn literals_and_expressions() {
        assert_eq!(ev("1/2+3/4 i"), "1/2+3/4 i");
        assert_eq!(ev("8*(1-g)"), "-16");
        assert_eq!(ev("8*<K,h>"), "-24");
        assert_eq!(ev("2*(g-1)*<b,C>^3"), "-32");
        assert_eq!(ev("-<b,C>^2"), "-4");
        assert_eq!(ev("i*i"), "-1");
        assert_eq!(ev("2^-2"), "1/4");
    }

    #[test]
    fn errors() {
        assert!(matches!(evaluate("1/0", &params()), Err(ExprError::Scalar(_))));
        assert_eq!(
            evaluate("2*<D,h>", &params()),
            Err(ExprError::UnresolvedSymbol("<D,h>".into()))
        );
        assert!(matches!(evaluate("(1+2", &params()), Err(ExprError::Syntax { .. })));
        assert!(matches!(evaluate("1 2", &params()), Err(ExprError::Syntax { .. })));
        assert!(matches!(evaluate("", &params()), Err(ExprError::Syntax { .. })));
    }
}
