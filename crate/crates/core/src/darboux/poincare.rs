//! Primitives of closed forms: the homogeneous ODE lemma, the radial
//! homotopy operator, axis-path primitives of closed one-forms and the
//! logarithmic primitive of weight-zero one-forms.

use crate::cartan::{exterior_d, interior, VectorField};
use crate::grexpr::{
    equal, gdiv, integrate_univariate, substitute, Bound, Coeff, EqualPolicy, EvalPoint, GradedExpr, Parity, Weight,
};
use crate::homogeneity::{degree_of, Tensor, WeightVectorField};

use super::DarbouxError;

#[derive(Debug, Clone, PartialEq)]
pub struct PdeSolution {
    pub f: GradedExpr,
    /// `w(g) + w(y¹)` when `g` is homogeneous.
    pub weight: Option<Weight>,
    pub warning: Option<String>,
}

/// `f = ∫₀^{y} g ds` in the coordinate `y`, so that `∂_y f = g` and
/// `f` vanishes on `y = 0`.
pub fn homog_solve_pde(g: &GradedExpr, y: usize, nabla: &WeightVectorField, policy: &EqualPolicy) -> Result<PdeSolution, DarbouxError> {
    let chart = g.chart();
    let f = integrate_univariate(g, y, &Bound::zero(), &Bound::Expr(GradedExpr::coordinate(chart, y)))?;
    let report = degree_of(&Tensor::Form(g.clone()), nabla, policy)?;
    let (weight, warning) = match report.degree {
        Some(d) => (Some(&d.weight + chart.weight(y)), None),
        None => (None, Some("integrand is not homogeneous; no weight is claimed".to_string())),
    };
    Ok(PdeSolution { f, weight, warning })
}

/// Whether every coefficient is a polynomial with exact coefficients and
/// nonnegative exponents.
fn is_plain_polynomial(w: &GradedExpr) -> bool {
    w.is_polynomial() && w.is_exact() && w.terms().keys().all(|m| m.powers.iter().all(|&p| p >= 0))
}

/// Radial homotopy operator `K = (L_E)⁻¹ i_E` with `E = Σ x^i ∂_i`,
/// so that `dK + Kd = id` on polynomial forms without constant part.
pub fn homotopy(w: &GradedExpr) -> Result<GradedExpr, DarbouxError> {
    if !is_plain_polynomial(w) {
        return Err(DarbouxError::NonPolynomial(w.to_string()));
    }
    let chart = w.chart();
    let euler = VectorField::new(chart, Parity::Even, (0..chart.dim()).map(|i| GradedExpr::coordinate(chart, i)).collect())?;
    let contracted = crate::cartan::contract(&euler, w);
    let mut out = GradedExpr::zero(chart);
    for (m, c) in contracted.terms() {
        let total: i64 = m.powers.iter().map(|&p| p as i64).sum::<i64>() + m.form_degree() as i64;
        let term = GradedExpr::single(chart, m.clone(), c.clone());
        out = &out + &term.scale(&Coeff::ratio(1, total));
    }
    Ok(out)
}

/// A primitive of a closed polynomial form vanishing at the origin, which
/// must be a zero of `∇`; homogeneous of the same degree as `ω`.
pub fn poincare_primitive(w: &GradedExpr, nabla: &WeightVectorField, center: &[f64]) -> Result<GradedExpr, DarbouxError> {
    let chart = w.chart();
    if center.iter().any(|&c| c != 0.0) {
        return Err(DarbouxError::Center("the homotopy is centred at the chart origin".into()));
    }
    let origin = EvalPoint::body(chart, center);
    for c in nabla.field().coeffs() {
        if crate::grexpr::eval_numeric(c, &origin).map(|v| v.body() != 0.0).unwrap_or(true) {
            return Err(DarbouxError::Center("the origin is not a zero of the weight field".into()));
        }
    }
    check_closed(w)?;
    homotopy(w)
}

fn check_closed(w: &GradedExpr) -> Result<(), DarbouxError> {
    let dw = exterior_d(w);
    if !equal(&dw, &GradedExpr::zero(w.chart()), &EqualPolicy::default()).equal {
        return Err(DarbouxError::NotClosed(dw.to_string()));
    }
    Ok(())
}

/// Primitive of a closed one-form along the broken path through the axes
/// starting at `base`: `f(base) = 0`. Homogeneous when `α` is and `base` is
/// the origin of a chart in which `∇` is diagonal.
pub fn closed_primitive(alpha: &GradedExpr, base: &[f64]) -> Result<GradedExpr, DarbouxError> {
    let chart = alpha.chart();
    let n = chart.dim();
    if alpha.is_zero() {
        return Ok(GradedExpr::zero(chart));
    }
    if !alpha.has_form_degree(1) {
        return Err(DarbouxError::FormDegree(1));
    }
    check_closed(alpha)?;
    let sigma = alpha.parity().ok_or(DarbouxError::MixedParity)?;
    let base_expr: Vec<GradedExpr> = (0..n)
        .map(|i| {
            if chart.parity(i).is_odd() {
                GradedExpr::zero(chart)
            } else {
                GradedExpr::constant(chart, exact_or_float(base[i]))
            }
        })
        .collect();
    let diffs: Vec<GradedExpr> = (0..n).map(|i| GradedExpr::differential(chart, i)).collect();
    let mut f = GradedExpr::zero(chart);
    for i in 0..n {
        // left coefficient of d(x^i) is (-1)^{σ_i(σ_f + 1)} ∂_i f
        let mut g = alpha.one_form_coefficient(i);
        if chart.parity(i).is_odd() && !sigma.is_odd() {
            g = -&g;
        }
        if g.is_zero() {
            continue;
        }
        let map: Vec<GradedExpr> =
            (0..n).map(|j| if j > i { base_expr[j].clone() } else { GradedExpr::coordinate(chart, j) }).collect();
        let g = substitute(&g, &map, &diffs)?;
        let lower = Bound::Expr(base_expr[i].clone());
        let upper = Bound::Expr(GradedExpr::coordinate(chart, i));
        f = &f + &integrate_univariate(&g, i, &lower, &upper)?;
    }
    Ok(f)
}

fn exact_or_float(x: f64) -> Coeff {
    match num_rational::BigRational::from_float(x) {
        Some(r) if x == x.round() || (x * 1024.0).fract() == 0.0 => Coeff::Exact(r),
        _ => Coeff::Float(x),
    }
}

/// `ω = c·d(x)/x + d(g)` for a closed weight-zero one-form, with
/// `∇ = x ∂_x` in the chart and `g` independent of `x`.
pub fn log_primitive(w: &GradedExpr, nabla: &WeightVectorField, policy: &EqualPolicy) -> Result<(Coeff, GradedExpr), DarbouxError> {
    let chart = w.chart();
    let field = nabla.field();
    let xs: Vec<usize> = (0..chart.dim()).filter(|&i| !field.coeff(i).is_zero()).collect();
    let [x] = xs[..] else {
        return Err(DarbouxError::Center("the weight field must read x ∂x".into()));
    };
    if *field.coeff(x) != GradedExpr::coordinate(chart, x) || chart.parity(x).is_odd() {
        return Err(DarbouxError::Center("the weight field must read x ∂x".into()));
    }
    check_closed(w)?;
    let report = degree_of(&Tensor::Form(w.clone()), nabla, policy)?;
    if report.degree.as_ref().map(|d| !d.weight.is_zero()).unwrap_or(true) {
        return Err(DarbouxError::WeightNotZero);
    }
    let c_expr = interior(field, w)?;
    let c = match c_expr.as_constant() {
        Some(c) => c,
        None => {
            let mut pt = chart.boxes().iter().map(|(lo, hi)| (lo + hi) / 2.0).collect::<Vec<_>>();
            pt[x] = 1.0;
            let v = crate::grexpr::eval_body(&c_expr, &pt)?;
            let c = exact_or_float(v);
            if !equal(&c_expr, &GradedExpr::constant(chart, c.clone()), policy).equal {
                return Err(DarbouxError::NotConstant(c_expr.to_string()));
            }
            c
        }
    };
    let xe = GradedExpr::coordinate(chart, x);
    let log_part = gdiv(&GradedExpr::differential(chart, x), &xe)?.scale(&c);
    let rest = w - &log_part;
    let mut base = vec![0.0; chart.dim()];
    base[x] = 1.0;
    let g = closed_primitive(&rest, &base)?;
    if g.depends_on(x) {
        return Err(DarbouxError::NotConstant(format!("remaining primitive depends on {}", chart.coord(x).name)));
    }
    Ok((c, g))
}
