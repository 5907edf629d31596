//! Text syntax for algebra elements.
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := [rational '*'] factor+
//! factor := 'a' INT | '[' expr ',' expr ']' | 'ad(' expr ')^' INT '(' expr ')'
//!         | 'exp(' expr ')' | '(' expr ')'
//! rational := INT ['/' INT]
//! ```
//!
//! Juxtaposed factors multiply in the associative algebra. Whitespace
//! between tokens is ignored. Letter indices are checked at evaluation.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

use crate::algebra::{AlgebraError, TruncSeries};
use crate::rational::Q;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Letter(usize),
    Bracket(Box<Expr>, Box<Expr>),
    Product(Vec<Expr>),
    Sum(Vec<Expr>),
    Scale(Q, Box<Expr>),
    Exp(Box<Expr>),
    AdPow {
        base: Box<Expr>,
        exponent: u32,
        arg: Box<Expr>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("syntax error at line {line}, column {column} (offset {offset}): {message}")]
pub struct ParseError {
    pub offset: usize,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser { src, pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

/// Parses and evaluates in `A^n` over the letters `a0..ak`.
pub fn eval_str(src: &str, k: usize, n: usize) -> Result<TruncSeries, ExprError> {
    Ok(parse_expr(src)?.eval(k, n)?)
}

impl Expr {
    pub fn letter(i: usize) -> Self {
        Expr::Letter(i)
    }

    pub fn bracket(l: Expr, r: Expr) -> Self {
        Expr::Bracket(Box::new(l), Box::new(r))
    }

    pub fn scale(c: Q, x: Expr) -> Self {
        Expr::Scale(c, Box::new(x))
    }

    /// Largest letter index used, if any.
    pub fn max_letter(&self) -> Option<usize> {
        match self {
            Expr::Letter(i) => Some(*i),
            Expr::Bracket(l, r) => l.max_letter().max(r.max_letter()),
            Expr::Product(xs) | Expr::Sum(xs) => xs.iter().filter_map(Expr::max_letter).max(),
            Expr::Scale(_, x) | Expr::Exp(x) => x.max_letter(),
            Expr::AdPow { base, arg, .. } => base.max_letter().max(arg.max_letter()),
        }
    }

    pub fn eval(&self, k: usize, n: usize) -> Result<TruncSeries, AlgebraError> {
        match self {
            Expr::Letter(i) => TruncSeries::letter(k, n, *i),
            Expr::Bracket(l, r) => l.eval(k, n)?.bracket(&r.eval(k, n)?),
            Expr::Product(xs) => xs
                .iter()
                .try_fold(TruncSeries::one(k, n), |acc, x| acc.mul_trunc(&x.eval(k, n)?)),
            Expr::Sum(xs) => xs
                .iter()
                .try_fold(TruncSeries::zero(k, n), |acc, x| acc.try_add(&x.eval(k, n)?)),
            Expr::Scale(c, x) => Ok(x.eval(k, n)?.scale(c)),
            Expr::Exp(x) => x.eval(k, n)?.exp_trunc(),
            Expr::AdPow {
                base,
                exponent,
                arg,
            } => TruncSeries::ad_pow(&base.eval(k, n)?, *exponent as usize, &arg.eval(k, n)?),
        }
    }

    fn fmt_factor(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Sum(_) | Expr::Scale(..) | Expr::Product(_) => write!(f, "({self})"),
            _ => write!(f, "{self}"),
        }
    }

    fn fmt_term(&self, f: &mut fmt::Formatter<'_>, first: bool) -> fmt::Result {
        match self {
            Expr::Scale(c, x) => {
                let sign = if c.is_negative() { "-" } else { "+" };
                match (first, c.is_negative()) {
                    (true, false) => {}
                    (true, true) => write!(f, "-")?,
                    (false, _) => write!(f, " {sign} ")?,
                }
                write!(f, "{}*", fmt_abs(c))?;
                x.fmt_product_body(f)
            }
            Expr::Sum(_) => {
                if !first {
                    write!(f, " + ")?;
                }
                write!(f, "({self})")
            }
            _ => {
                if !first {
                    write!(f, " + ")?;
                }
                self.fmt_product_body(f)
            }
        }
    }

    /// The `factor+` part of a term.
    fn fmt_product_body(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Product(xs) if !xs.is_empty() => {
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    x.fmt_factor(f)?;
                }
                Ok(())
            }
            _ => self.fmt_factor(f),
        }
    }
}

fn fmt_abs(c: &Q) -> String {
    let a = c.abs();
    if a.denom().is_one() {
        a.numer().to_string()
    } else {
        format!("{}/{}", a.numer(), a.denom())
    }
}

/// Canonical form: parsing the output yields the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Letter(i) => write!(f, "a{i}"),
            Expr::Bracket(l, r) => write!(f, "[{l},{r}]"),
            Expr::Sum(xs) if xs.is_empty() => write!(f, "0*a0"),
            Expr::Sum(xs) => {
                for (i, x) in xs.iter().enumerate() {
                    x.fmt_term(f, i == 0)?;
                }
                Ok(())
            }
            Expr::Product(xs) if xs.is_empty() => write!(f, "exp(0*a0)"),
            Expr::Product(_) | Expr::Scale(..) => self.fmt_term(f, true),
            Expr::Exp(x) => write!(f, "exp({x})"),
            Expr::AdPow {
                base,
                exponent,
                arg,
            } => write!(f, "ad({base})^{exponent}({arg})"),
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn error(&self, message: &str) -> ParseError {
        let before = &self.src[..self.pos];
        let line = before.matches('\n').count() + 1;
        let line_start = before.rfind('\n').map_or(0, |i| i + 1);
        let column = self.src[line_start..self.pos].chars().count() + 1;
        ParseError {
            offset: self.pos,
            line,
            column,
            message: message.to_string(),
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
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected '{c}'")))
        }
    }

    fn keyword(&mut self, kw: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(kw) {
            self.pos += kw.len();
            true
        } else {
            false
        }
    }

    fn digits(&mut self) -> Result<&'a str, ParseError> {
        let start = self.pos;
        while self.peek_raw().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected integer"));
        }
        Ok(&self.src[start..self.pos])
    }

    fn integer<T: FromStr>(&mut self) -> Result<T, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let d = self.digits()?;
        d.parse().map_err(|_| self.error_at(start, "integer out of range"))
    }

    fn error_at(&self, pos: usize, message: &str) -> ParseError {
        Parser { src: self.src, pos }.error(message)
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = Vec::new();
        let mut negate = if self.eat('-') {
            true
        } else {
            self.eat('+');
            false
        };
        loop {
            let t = self.term()?;
            terms.push(if negate { negated(t) } else { t.0 });
            if self.eat('+') {
                negate = false;
            } else if self.eat('-') {
                negate = true;
            } else {
                break;
            }
        }
        Ok(if terms.len() == 1 {
            terms.pop().expect("one term")
        } else {
            Expr::Sum(terms)
        })
    }

    /// A term and whether it carried an explicit coefficient.
    fn term(&mut self) -> Result<(Expr, bool), ParseError> {
        let coeff = if self.peek().is_some_and(|c| c.is_ascii_digit()) {
            let num: BigInt = self.integer()?;
            let den: BigInt = if self.eat('/') { self.integer()? } else { BigInt::one() };
            if den.is_zero() {
                return Err(self.error("zero denominator"));
            }
            self.expect('*')?;
            Some(Q::new(num, den))
        } else {
            None
        };
        let mut factors = vec![self.factor()?];
        while matches!(self.peek(), Some('a' | '[' | '(' | 'e')) {
            factors.push(self.factor()?);
        }
        let body = if factors.len() == 1 {
            factors.pop().expect("one factor")
        } else {
            Expr::Product(factors)
        };
        Ok(match coeff {
            Some(c) => (Expr::scale(c, body), true),
            None => (body, false),
        })
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some('[') => {
                self.pos += 1;
                let l = self.expr()?;
                self.expect(',')?;
                let r = self.expr()?;
                self.expect(']')?;
                Ok(Expr::bracket(l, r))
            }
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            _ if self.keyword("ad(") => {
                let base = self.expr()?;
                self.expect(')')?;
                self.expect('^')?;
                let exponent = self.integer()?;
                self.expect('(')?;
                let arg = self.expr()?;
                self.expect(')')?;
                Ok(Expr::AdPow {
                    base: Box::new(base),
                    exponent,
                    arg: Box::new(arg),
                })
            }
            _ if self.keyword("exp(") => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(Expr::Exp(Box::new(e)))
            }
            Some('a') => {
                self.pos += 1;
                if !self.peek_raw().is_some_and(|c| c.is_ascii_digit()) {
                    return Err(self.error("expected letter index"));
                }
                Ok(Expr::Letter(self.integer()?))
            }
            _ => Err(self.error("expected factor")),
        }
    }
}

/// A leading minus folds into an explicit coefficient, otherwise it scales by −1.
fn negated((e, explicit): (Expr, bool)) -> Expr {
    match e {
        Expr::Scale(c, x) if explicit => Expr::Scale(-c, x),
        other => Expr::scale(-Q::one(), other),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn l(i: usize) -> Expr {
        Expr::Letter(i)
    }

    #[test]
    fn parses_examples() {
        let e = parse_expr("a0 + [a1,[a1,a0]]").unwrap();
        assert_eq!(
            e,
            Expr::Sum(vec![l(0), Expr::bracket(l(1), Expr::bracket(l(1), l(0)))])
        );
        let e = parse_expr("2/3*[a1,a2]").unwrap();
        assert_eq!(e, Expr::scale(q(2, 3), Expr::bracket(l(1), l(2))));
        let err = parse_expr("[a1").unwrap_err();
        assert_eq!(err.offset, 3);
        assert_eq!(err.message, "expected ','");
        assert_eq!((err.line, err.column), (1, 4));
    }

    #[test]
    fn signs_and_products() {
        let e = parse_expr("-a1 a2 + 1/2 * a0 - 3*(a1 + a2)").unwrap();
        assert_eq!(
            e,
            Expr::Sum(vec![
                Expr::scale(-Q::one(), Expr::Product(vec![l(1), l(2)])),
                Expr::scale(q(1, 2), l(0)),
                Expr::scale(q(-3, 1), Expr::Sum(vec![l(1), l(2)])),
            ])
        );
        let again = parse_expr(&e.to_string()).unwrap();
        assert_eq!(again, e);
    }

    #[test]
    fn adpow_and_exp() {
        let e = parse_expr("ad(a1)^2(a0) + exp(a1)").unwrap();
        let printed = e.to_string();
        assert_eq!(printed, "ad(a1)^2(a0) + exp(a1)");
        let s = e.eval(1, 3).unwrap();
        let direct = eval_str("[a1,[a1,a0]]", 1, 3).unwrap();
        let ex = eval_str("exp(a1)", 1, 3).unwrap();
        assert_eq!(s, direct.try_add(&ex).unwrap());
    }

    #[test]
    fn error_positions_span_lines() {
        let err = parse_expr("a0 +\n  [a1 a0]").unwrap_err();
        assert_eq!(err.line, 2);
        assert_eq!(err.column, 9);
        assert_eq!(err.message, "expected ','");
        assert!(parse_expr("a0 )").is_err());
        assert!(parse_expr("2 a0").is_err());
        assert!(parse_expr("1/0*a0").is_err());
    }

    #[test]
    fn letter_range_checked_at_eval() {
        let e = parse_expr("[a3,a0]").unwrap();
        assert_eq!(e.max_letter(), Some(3));
        assert!(matches!(
            e.eval(2, 3),
            Err(AlgebraError::LetterOutOfRange { .. })
        ));
    }
}
