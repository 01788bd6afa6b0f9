//! Closed-form antiderivatives for a fixed family of integrand patterns.

use super::coeff::Coeff;
use super::derive::{partial, substitute};
use super::expr::{apply_func, gdiv, Atom, Func, GradedExpr};
use super::ExprError;

/// Integration bound: a number or an expression on the integrand's chart.
#[derive(Debug, Clone)]
pub enum Bound {
    Value(Coeff),
    Expr(GradedExpr),
}

impl Bound {
    pub fn zero() -> Bound {
        Bound::Value(Coeff::zero())
    }

    fn to_expr(&self, like: &GradedExpr) -> GradedExpr {
        match self {
            Bound::Value(c) => GradedExpr::constant(like.chart(), c.clone()),
            Bound::Expr(e) => e.clone(),
        }
    }
}

/// `∫_lower^upper g d(x_i)`, with `x_i` replaced by the bounds in an
/// antiderivative. Supported per monomial: Laurent powers of `x_i` (with
/// `1/x_i` giving a logarithm), or a nonnegative power of `x_i` times one of
/// sin, cos, exp, sinh, cosh of an argument linear in `x_i`.
pub fn integrate_univariate(g: &GradedExpr, i: usize, lower: &Bound, upper: &Bound) -> Result<GradedExpr, ExprError> {
    let f = antiderivative(g, i)?;
    let hi = at(&f, i, &upper.to_expr(g))?;
    let lo = at(&f, i, &lower.to_expr(g))?;
    Ok(&hi - &lo)
}

fn at(f: &GradedExpr, i: usize, value: &GradedExpr) -> Result<GradedExpr, ExprError> {
    let chart = f.chart();
    let n = chart.dim();
    let map: Vec<GradedExpr> =
        (0..n).map(|j| if j == i { value.clone() } else { GradedExpr::coordinate(chart, j) }).collect();
    let dmap: Vec<GradedExpr> = (0..n).map(|j| GradedExpr::differential(chart, j)).collect();
    substitute(f, &map, &dmap)
}

/// An antiderivative in `x_i` of a form-degree-0 expression.
pub(crate) fn antiderivative(g: &GradedExpr, i: usize) -> Result<GradedExpr, ExprError> {
    let chart = g.chart();
    if !g.is_function() {
        return Err(ExprError::NonIntegrable("integrand must have form degree 0".into()));
    }
    let name = &chart.coord(i).name;
    let mut out = GradedExpr::zero(chart);
    for (mono, c) in g.terms() {
        let term = GradedExpr::single(chart, mono.clone(), c.clone());
        if chart.parity(i).is_odd() {
            if mono.powers[i] != 0 {
                return Err(ExprError::NonIntegrable(format!("term already contains the odd coordinate {name}")));
            }
            out = &out + &(&GradedExpr::coordinate(chart, i) * &term);
            continue;
        }
        let k = mono.powers[i];
        let mut rest = mono.clone();
        rest.powers[i] = 0;
        let mut dependent: Option<(Func, GradedExpr)> = None;
        let mut kept = Vec::new();
        for (atom, e) in &mono.atoms {
            let arg = match atom {
                Atom::Func(f, t) => (Some(*f), GradedExpr::from_terms(chart.clone(), t.clone())),
                Atom::Group(t) => (None, GradedExpr::from_terms(chart.clone(), t.clone())),
            };
            if !arg.1.depends_on(i) {
                kept.push((atom.clone(), *e));
                continue;
            }
            match (arg.0, *e, &dependent) {
                (Some(f), 1, None) if f != Func::Log => dependent = Some((f, arg.1)),
                _ => {
                    return Err(ExprError::NonIntegrable(format!("unsupported dependence on {name} in {term}")));
                }
            }
        }
        rest.atoms = kept;
        let rest = GradedExpr::single(chart, rest, c.clone());
        let x = GradedExpr::coordinate(chart, i);
        let piece = match dependent {
            None if k == -1 => apply_func(Func::Log, &x)?,
            None => x.pow(k + 1)?.scale(&Coeff::ratio(1, (k + 1) as i64)),
            Some((f, u)) => {
                if k < 0 {
                    return Err(ExprError::NonIntegrable(format!("negative power of {name} times a transcendental")));
                }
                let a = partial(&u, i);
                if !partial(&a, i).is_zero() {
                    return Err(ExprError::NonIntegrable(format!("argument {u} is not linear in {name}")));
                }
                power_times_atom(&x, k as u32, f, &u, &a)?
            }
        };
        out = &out + &(&rest * &piece);
    }
    Ok(out)
}

/// `∫ x^k f(u) dx` for `u = a x + b` by repeated integration by parts.
fn power_times_atom(x: &GradedExpr, k: u32, f: Func, u: &GradedExpr, a: &GradedExpr) -> Result<GradedExpr, ExprError> {
    let (g, sign) = match f {
        Func::Sin => (Func::Cos, -1),
        Func::Cos => (Func::Sin, 1),
        Func::Exp => (Func::Exp, 1),
        Func::Sinh => (Func::Cosh, 1),
        Func::Cosh => (Func::Sinh, 1),
        Func::Log => unreachable!("log is rejected before"),
    };
    let primitive = apply_func(g, u)?.scale(&Coeff::int(sign));
    let first = gdiv(&(&x.pow(k as i32)? * &primitive), a)?;
    if k == 0 {
        return Ok(first);
    }
    let inner = power_times_atom(x, k - 1, g, u, a)?.scale(&Coeff::int(sign * k as i64));
    Ok(&first - &gdiv(&inner, a)?)
}
