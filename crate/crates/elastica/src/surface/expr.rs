//! Parser for the level-set expression mini-language.
//!
//! Grammar (usual precedence, whitespace-insensitive):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := ('+' | '-')* power
//! power  := atom ('^' integer)?
//! atom   := number | 'x'<k> | func '(' expr ')' | '(' expr ')'
//! func   := sqrt | sin | cos | exp | log
//! ```
//!
//! Variables are `x1 .. xn`; exponents are integer literals. Errors carry the
//! byte offset of the offending token.

use crate::{Error, Result};

/// Built-in unary functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sqrt,
    Sin,
    Cos,
    Exp,
    Log,
}

/// Expression tree for a scalar function of x1..xn.
#[derive(Debug, Clone, PartialEq)]
pub enum ExprAst {
    Const(f64),
    /// Zero-based variable index.
    Var(usize),
    Add(Box<ExprAst>, Box<ExprAst>),
    Sub(Box<ExprAst>, Box<ExprAst>),
    Mul(Box<ExprAst>, Box<ExprAst>),
    Div(Box<ExprAst>, Box<ExprAst>),
    Neg(Box<ExprAst>),
    /// Integer power.
    Pow(Box<ExprAst>, i32),
    Apply(Func, Box<ExprAst>),
}

struct Parser<'a> {
    text: &'a str,
    bytes: &'a [u8],
    pos: usize,
    dim: usize,
}

/// Parse a scalar expression in variables x1..x`dim`.
pub fn parse_levelset(text: &str, dim: usize) -> Result<ExprAst> {
    let mut p = Parser {
        text,
        bytes: text.as_bytes(),
        pos: 0,
        dim,
    };
    let ast = p.expr()?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(p.syntax("unexpected trailing input"));
    }
    Ok(ast)
}

impl<'a> Parser<'a> {
    fn syntax(&self, message: &str) -> Error {
        Error::Syntax {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, ch: u8) -> bool {
        if self.peek() == Some(ch) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<ExprAst> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    lhs = ExprAst::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(b'-') => {
                    self.pos += 1;
                    lhs = ExprAst::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<ExprAst> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    lhs = ExprAst::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Some(b'/') => {
                    self.pos += 1;
                    lhs = ExprAst::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<ExprAst> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(ExprAst::Neg(Box::new(self.unary()?)))
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<ExprAst> {
        let base = self.atom()?;
        if self.eat(b'^') {
            self.skip_ws();
            let neg = self.eat(b'-');
            let start = self.pos;
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if self.pos == start {
                return Err(self.syntax("expected integer exponent"));
            }
            let mut k: i32 = self.text[start..self.pos]
                .parse()
                .map_err(|_| self.syntax("exponent out of range"))?;
            if neg {
                k = -k;
            }
            return Ok(ExprAst::Pow(Box::new(base), k));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<ExprAst> {
        match self.peek() {
            None => Err(self.syntax("expected operand, found end of input")),
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.syntax("expected `)`"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.identifier(),
            Some(_) => Err(self.syntax("expected operand")),
        }
    }

    fn number(&mut self) -> Result<ExprAst> {
        let start = self.pos;
        while self.pos < self.bytes.len() {
            let c = self.bytes[self.pos];
            if c.is_ascii_digit() || c == b'.' {
                self.pos += 1;
            } else if (c == b'e' || c == b'E')
                && self.pos > start
                && self
                    .bytes
                    .get(self.pos + 1)
                    .is_some_and(|&d| d.is_ascii_digit() || d == b'+' || d == b'-')
            {
                self.pos += 2;
                while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                break;
            } else {
                break;
            }
        }
        let lit = &self.text[start..self.pos];
        let v: f64 = lit.parse().map_err(|_| Error::Syntax {
            offset: start,
            message: format!("bad number literal `{lit}`"),
        })?;
        Ok(ExprAst::Const(v))
    }

    fn identifier(&mut self) -> Result<ExprAst> {
        let start = self.pos;
        while self.pos < self.bytes.len()
            && (self.bytes[self.pos].is_ascii_alphanumeric() || self.bytes[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let name = &self.text[start..self.pos];
        // Variable x<k>, 1-based.
        if let Some(rest) = name.strip_prefix('x') {
            if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
                let k: usize = rest.parse().map_err(|_| Error::UnknownIdentifier {
                    name: name.to_string(),
                    offset: start,
                })?;
                if k == 0 || k > self.dim {
                    return Err(Error::UnknownIdentifier {
                        name: name.to_string(),
                        offset: start,
                    });
                }
                return Ok(ExprAst::Var(k - 1));
            }
        }
        let func = match name {
            "sqrt" => Func::Sqrt,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "pi" => return Ok(ExprAst::Const(std::f64::consts::PI)),
            _ => {
                return Err(Error::UnknownIdentifier {
                    name: name.to_string(),
                    offset: start,
                })
            }
        };
        if !self.eat(b'(') {
            return Err(self.syntax("expected `(` after function name"));
        }
        let arg = self.expr()?;
        if self.eat(b',') {
            // Count extra args for the arity report, then fail.
            let mut got = 2;
            let _ = self.expr()?;
            while self.eat(b',') {
                let _ = self.expr()?;
                got += 1;
            }
            return Err(Error::Arity {
                name: name.to_string(),
                expected: 1,
                got,
            });
        }
        if !self.eat(b')') {
            return Err(self.syntax("expected `)`"));
        }
        Ok(ExprAst::Apply(func, Box::new(arg)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::jet::eval_value;

    #[test]
    fn unit_circle_at_point() {
        let ast = parse_levelset("x1^2 + x2^2 - 1", 2).unwrap();
        assert!(eval_value(&ast, &[1.0, 0.0]).unwrap().abs() < 1e-15);
        assert!((eval_value(&ast, &[0.0, 0.5]).unwrap() - (-0.75)).abs() < 1e-15);
    }

    #[test]
    fn sphere_radius_two() {
        let ast = parse_levelset("x1^2 + x2^2 + x3^2 - 4", 3).unwrap();
        assert!(eval_value(&ast, &[0.0, 0.0, 2.0]).unwrap().abs() < 1e-15);
    }

    #[test]
    fn syntax_error_carries_offset() {
        match parse_levelset("x1 +", 2) {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 4),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_identifier() {
        assert!(matches!(
            parse_levelset("x3 + 1", 2),
            Err(Error::UnknownIdentifier { .. })
        ));
        assert!(matches!(
            parse_levelset("foo(x1)", 2),
            Err(Error::UnknownIdentifier { .. })
        ));
    }

    #[test]
    fn arity_error() {
        assert!(matches!(
            parse_levelset("sin(x1, x2)", 2),
            Err(Error::Arity { expected: 1, got: 2, .. })
        ));
    }

    #[test]
    fn precedence_and_unary() {
        let ast = parse_levelset("-x1^2 + 2*x2", 2).unwrap();
        // -x1^2 parses as -(x1^2).
        assert!((eval_value(&ast, &[3.0, 1.0]).unwrap() - (-7.0)).abs() < 1e-15);
        let ast = parse_levelset("(x1 + x2)^3 / 4", 2).unwrap();
        assert!((eval_value(&ast, &[1.0, 1.0]).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn scientific_literals() {
        let ast = parse_levelset("1.5e-2 + x1*0", 1).unwrap();
        assert!((eval_value(&ast, &[2.0]).unwrap() - 0.015).abs() < 1e-18);
    }
}
