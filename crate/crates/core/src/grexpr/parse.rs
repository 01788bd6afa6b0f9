//! Recursive-descent parser for the expression grammar
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := base ('^' INT)?
//! base   := NUMBER | IDENT | 'd' '(' IDENT ')' | FUNC '(' expr ')' | '(' expr ')' | '-' factor
//! ```

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::chart::ChartSpec;
use super::coeff::Coeff;
use super::expr::{apply_func, gdiv, Func, GradedExpr};
use super::ExprError;

pub fn parse_expr(text: &str, chart: &Arc<ChartSpec>) -> Result<GradedExpr, ExprError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, chart };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error(format!("unexpected '{}'", p.src[p.pos] as char)));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    chart: &'a Arc<ChartSpec>,
}

impl Parser<'_> {
    fn error(&self, msg: impl Into<String>) -> ExprError {
        ExprError::Syntax { pos: self.pos, msg: msg.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), ExprError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected '{}'", c as char)))
        }
    }

    fn expr(&mut self) -> Result<GradedExpr, ExprError> {
        let mut acc = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if c == b'+' { &acc + &rhs } else { &acc - &rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<GradedExpr, ExprError> {
        let mut acc = self.factor()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let rhs = self.factor()?;
            acc = if c == b'*' { &acc * &rhs } else { gdiv(&acc, &rhs)? };
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<GradedExpr, ExprError> {
        let base = self.base()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        self.skip_ws();
        let start = self.pos;
        if self.src.get(self.pos) == Some(&b'-') {
            self.pos += 1;
        }
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let k: i32 = digits.parse().map_err(|_| ExprError::Syntax { pos: start, msg: "expected integer exponent".into() })?;
        base.pow(k)
    }

    fn base(&mut self) -> Result<GradedExpr, ExprError> {
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.factor()?)
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.identifier(),
            Some(c) => Err(self.error(format!("unexpected '{}'", c as char))),
        }
    }

    fn number(&mut self) -> Result<GradedExpr, ExprError> {
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.') {
            self.pos += 1;
        }
        let mantissa = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let mut value = super::parse_rational(mantissa).ok_or(ExprError::Syntax { pos: start, msg: "malformed number".into() })?;
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            let negative = match self.src.get(self.pos) {
                Some(b'-') => {
                    self.pos += 1;
                    true
                }
                Some(b'+') => {
                    self.pos += 1;
                    false
                }
                _ => false,
            };
            let exp_start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if exp_start == self.pos {
                self.pos = save;
            } else {
                let e: usize = std::str::from_utf8(&self.src[exp_start..self.pos]).unwrap().parse().map_err(|_| {
                    ExprError::Syntax { pos: exp_start, msg: "exponent too large".into() }
                })?;
                let scale = BigRational::from_integer(num_traits::pow(BigInt::from(10), e));
                value = if negative { value / scale } else { value * scale };
            }
        }
        if value.is_zero() {
            return Ok(GradedExpr::zero(self.chart));
        }
        Ok(GradedExpr::constant(self.chart, Coeff::Exact(value)))
    }

    fn identifier(&mut self) -> Result<GradedExpr, ExprError> {
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        if name == "d" && self.peek() == Some(b'(') {
            self.pos += 1;
            self.skip_ws();
            let id_start = self.pos;
            while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
                self.pos += 1;
            }
            let coord = std::str::from_utf8(&self.src[id_start..self.pos]).unwrap();
            if coord.is_empty() {
                return Err(self.error("expected a coordinate name inside d(...)"));
            }
            let i = self
                .chart
                .index_of(coord)
                .ok_or_else(|| ExprError::UnknownDifferential { name: coord.to_string(), pos: id_start })?;
            self.expect(b')')?;
            return Ok(GradedExpr::differential(self.chart, i));
        }
        if let Some(f) = Func::from_name(name) {
            self.expect(b'(')?;
            let arg = self.expr()?;
            self.expect(b')')?;
            return apply_func(f, &arg);
        }
        match self.chart.index_of(name) {
            Some(i) => Ok(GradedExpr::coordinate(self.chart, i)),
            None => Err(ExprError::UnknownIdentifier { name: name.to_string(), pos: start }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::chart::Parity;
    use super::*;

    fn cyl() -> Arc<ChartSpec> {
        ChartSpec::even(&[("z", 0), ("p", 1), ("q", -1)])
    }

    #[test]
    fn parses_cylinder_form() {
        let c = cyl();
        let a = parse_expr("d(z) - p*(2+sin(p*q))*d(q)", &c).unwrap();
        assert_eq!(a.num_terms(), 3);
        assert_eq!(a.form_degree(), Some(1));
    }

    #[test]
    fn zero_is_empty() {
        assert!(parse_expr("0", &cyl()).unwrap().is_zero());
        assert!(parse_expr("p - p", &cyl()).unwrap().is_zero());
    }

    #[test]
    fn odd_differential_square() {
        let c = ChartSpec::from_decls(&[("y", Parity::Odd, "0")]).unwrap();
        assert!(!parse_expr("d(y)*d(y)", &c).unwrap().is_zero());
    }

    #[test]
    fn precedence_and_unary_minus() {
        let c = cyl();
        let a = parse_expr("-p^2 + 3*q - (p - q)/2", &c).unwrap();
        let b = parse_expr("-1*p*p + 7/2*q - 1/2*p", &c).unwrap();
        assert_eq!(a, b);
        assert_eq!(parse_expr("1e-3*p", &c).unwrap(), parse_expr("p/1000", &c).unwrap());
        assert_eq!(parse_expr("p^-2", &c).unwrap(), parse_expr("1/p^2", &c).unwrap());
    }

    #[test]
    fn errors_carry_positions() {
        let c = cyl();
        assert_eq!(parse_expr("p + w", &c), Err(ExprError::UnknownIdentifier { name: "w".into(), pos: 4 }));
        assert_eq!(parse_expr("d(w)", &c), Err(ExprError::UnknownDifferential { name: "w".into(), pos: 2 }));
        assert!(matches!(parse_expr("p +", &c), Err(ExprError::Syntax { pos: 3, .. })));
        assert!(matches!(parse_expr("(p", &c), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse_expr("sin(d(p))", &c), Err(ExprError::InvalidAtomArgument { .. })));
        let odd = ChartSpec::from_decls(&[("xi", Parity::Odd, "0")]).unwrap();
        assert!(matches!(parse_expr("exp(xi)", &odd), Err(ExprError::InvalidAtomArgument { .. })));
    }
}
