//! Cartan calculus: exterior derivative, interior product, Lie derivative,
//! bracket of vector fields, pullback and pushforward along chart maps.
//!
//! Every operator is a graded derivation fixed by its bidegree and its values
//! on generators:
//!
//! | operator | bidegree      | on `x^j` | on `d(x^j)`  |
//! |----------|---------------|----------|--------------|
//! | `d`      | (1, even)     | `d(x^j)` | 0            |
//! | `i_X`    | (-1, σ(X))    | 0        | `X^j`        |
//! | `L_X`    | (0, σ(X))     | `X^j`    | `d(X^j)`     |
//!
//! so that, for instance, `i_{∂q}(d(p)∧d(q)) = -d(p)`.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::grexpr::{
    equal, parse_expr, partial, substitute, ChartSpec, Derivation, EqualPolicy, EqualityReport, ExprError, GradedExpr,
    Parity,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CartanError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("vector field coefficient for '{coord}' has the wrong parity or is not a function")]
    CoefficientParity { coord: String },
    #[error("expected {expected} coefficients, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("interior product needs a form of degree at least 1")]
    FormDegreeZero,
    #[error("chart map has no declared inverse")]
    MissingInverse,
    #[error("declared inverse does not invert the map: {0}")]
    BadInverse(String),
}

/// `X = Σ X^j ∂_{x^j}`, coefficients standing to the left of the derivations.
#[derive(Clone, PartialEq)]
pub struct VectorField {
    chart: Arc<ChartSpec>,
    parity: Parity,
    coeffs: Vec<GradedExpr>,
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VectorField({self})")
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| format!("({c})*∂{}", self.chart.coord(j).name))
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

impl VectorField {
    /// Checks that each coefficient is a function of parity `σ(X) + σ(x^j)`.
    pub fn new(chart: &Arc<ChartSpec>, parity: Parity, coeffs: Vec<GradedExpr>) -> Result<VectorField, CartanError> {
        if coeffs.len() != chart.dim() {
            return Err(CartanError::Arity { expected: chart.dim(), got: coeffs.len() });
        }
        for (j, c) in coeffs.iter().enumerate() {
            c.check_chart(&GradedExpr::zero(chart))?;
            if !c.is_function() || !c.has_parity(parity + chart.parity(j)) {
                return Err(CartanError::CoefficientParity { coord: chart.coord(j).name.clone() });
            }
        }
        let coeffs = coeffs.into_iter().map(|c| c.on_chart(chart)).collect::<Result<_, _>>()?;
        Ok(VectorField { chart: chart.clone(), parity, coeffs })
    }

    /// Parses one coefficient per coordinate; the parity is inferred from the
    /// first nonzero coefficient (even for the zero field).
    pub fn parse(chart: &Arc<ChartSpec>, coeffs: &[&str]) -> Result<VectorField, CartanError> {
        let exprs = coeffs.iter().map(|s| parse_expr(s, chart)).collect::<Result<Vec<_>, _>>()?;
        VectorField::from_exprs(chart, exprs)
    }

    pub fn from_exprs(chart: &Arc<ChartSpec>, exprs: Vec<GradedExpr>) -> Result<VectorField, CartanError> {
        let parity = exprs
            .iter()
            .enumerate()
            .find_map(|(j, c)| c.parity().map(|p| p + chart.parity(j)))
            .unwrap_or(Parity::Even);
        VectorField::new(chart, parity, exprs)
    }

    pub fn zero(chart: &Arc<ChartSpec>) -> VectorField {
        VectorField { chart: chart.clone(), parity: Parity::Even, coeffs: vec![GradedExpr::zero(chart); chart.dim()] }
    }

    /// The coordinate derivation `∂_{x^i}`.
    pub fn coordinate(chart: &Arc<ChartSpec>, i: usize) -> VectorField {
        let mut coeffs = vec![GradedExpr::zero(chart); chart.dim()];
        coeffs[i] = GradedExpr::one(chart);
        VectorField { chart: chart.clone(), parity: chart.parity(i), coeffs }
    }

    pub fn chart(&self) -> &Arc<ChartSpec> {
        &self.chart
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn coeffs(&self) -> &[GradedExpr] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> &GradedExpr {
        &self.coeffs[j]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(GradedExpr::is_zero)
    }

    /// `f X`, with `f` acting from the left.
    pub fn scale_by(&self, f: &GradedExpr) -> Result<VectorField, CartanError> {
        let coeffs = self.coeffs.iter().map(|c| f.try_mul(c)).collect::<Result<Vec<_>, _>>()?;
        let parity = f.parity().map_or(self.parity, |p| p + self.parity);
        if self.is_zero() || f.is_zero() {
            return Ok(VectorField::zero(&self.chart));
        }
        VectorField::new(&self.chart, parity, coeffs)
    }

    pub fn add(&self, other: &VectorField) -> Result<VectorField, CartanError> {
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.try_add(b)).collect::<Result<Vec<_>, _>>()?;
        VectorField::new(&self.chart, self.parity, coeffs)
    }

    pub fn sub(&self, other: &VectorField) -> Result<VectorField, CartanError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> VectorField {
        VectorField { chart: self.chart.clone(), parity: self.parity, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    /// `X(f) = Σ X^j ∂_j f`.
    pub fn apply(&self, f: &GradedExpr) -> GradedExpr {
        let mut out = GradedExpr::zero(f.chart());
        for (j, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                out = &out + &(c * &partial(f, j));
            }
        }
        out
    }

    fn lie_derivation(&self) -> Derivation {
        let on_diffs = self.coeffs.iter().map(exterior_d).collect();
        Derivation::new(0, self.parity, self.coeffs.clone(), on_diffs)
    }

    fn interior_derivation(&self) -> Derivation {
        let zeros = vec![GradedExpr::zero(&self.chart); self.chart.dim()];
        Derivation::new(-1, self.parity, zeros, self.coeffs.clone())
    }

    /// Coefficient-wise comparison under [`equal`].
    pub fn equals(&self, other: &VectorField, policy: &EqualPolicy) -> bool {
        self.coeffs.iter().zip(&other.coeffs).all(|(a, b)| equal(a, b, policy).equal)
    }
}

/// Exterior derivative, `d(f) = Σ d(x^i) ∂_i f` on functions.
pub fn exterior_d(w: &GradedExpr) -> GradedExpr {
    let chart = w.chart();
    let n = chart.dim();
    let on_coords = (0..n).map(|i| GradedExpr::differential(chart, i)).collect();
    Derivation::new(1, Parity::Even, on_coords, vec![GradedExpr::zero(chart); n]).apply(w)
}

/// Interior product `i_X ω`; the result is zero on functions, which are
/// rejected here to catch misuse.
pub fn interior(x: &VectorField, w: &GradedExpr) -> Result<GradedExpr, CartanError> {
    x.chart.as_ref().eq(w.chart().as_ref()).then_some(()).ok_or(ExprError::MixedCharts)?;
    if !w.is_zero() && w.has_form_degree(0) {
        return Err(CartanError::FormDegreeZero);
    }
    Ok(x.interior_derivation().apply(w))
}

/// Interior product that returns zero on functions.
pub(crate) fn contract(x: &VectorField, w: &GradedExpr) -> GradedExpr {
    x.interior_derivation().apply(w)
}

/// Lie derivative of a form.
pub fn lie_derivative(x: &VectorField, w: &GradedExpr) -> GradedExpr {
    x.lie_derivation().apply(w)
}

/// Lie derivative of a vector field, `L_X Y = [X, Y]`.
pub fn lie_derivative_field(x: &VectorField, y: &VectorField) -> Result<VectorField, CartanError> {
    lie_bracket(x, y)
}

/// Graded commutator `[X, Y] = XY - (-1)^{σ(X)σ(Y)} YX`.
pub fn lie_bracket(x: &VectorField, y: &VectorField) -> Result<VectorField, CartanError> {
    if *x.chart != *y.chart {
        return Err(ExprError::MixedCharts.into());
    }
    let sign_negative = x.parity.is_odd() && y.parity.is_odd();
    let coeffs: Vec<GradedExpr> = (0..x.chart.dim())
        .map(|j| {
            let xy = x.apply(&y.coeffs[j]);
            let yx = y.apply(&x.coeffs[j]);
            if sign_negative {
                &xy + &yx
            } else {
                &xy - &yx
            }
        })
        .collect();
    if coeffs.iter().all(GradedExpr::is_zero) {
        return Ok(VectorField::zero(&x.chart));
    }
    VectorField::new(&x.chart, x.parity + y.parity, coeffs)
}

/// A change of coordinates: `images[k]` is the k-th target coordinate
/// written in source coordinates; `inverse[j]` (if declared) is the j-th
/// source coordinate in target coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartMap {
    source: Arc<ChartSpec>,
    target: Arc<ChartSpec>,
    images: Vec<GradedExpr>,
    inverse: Option<Vec<GradedExpr>>,
}

impl ChartMap {
    pub fn new(
        source: &Arc<ChartSpec>,
        target: &Arc<ChartSpec>,
        images: Vec<GradedExpr>,
        inverse: Option<Vec<GradedExpr>>,
    ) -> Result<ChartMap, CartanError> {
        check_images(source, target, &images)?;
        if let Some(inv) = &inverse {
            check_images(target, source, inv)?;
        }
        Ok(ChartMap { source: source.clone(), target: target.clone(), images, inverse })
    }

    pub fn parse(
        source: &Arc<ChartSpec>,
        target: &Arc<ChartSpec>,
        images: &[&str],
        inverse: Option<&[&str]>,
    ) -> Result<ChartMap, CartanError> {
        let images = images.iter().map(|s| parse_expr(s, source)).collect::<Result<Vec<_>, _>>()?;
        let inverse = match inverse {
            Some(inv) => Some(inv.iter().map(|s| parse_expr(s, target)).collect::<Result<Vec<_>, _>>()?),
            None => None,
        };
        ChartMap::new(source, target, images, inverse)
    }

    pub fn identity(chart: &Arc<ChartSpec>) -> ChartMap {
        let images: Vec<_> = (0..chart.dim()).map(|i| GradedExpr::coordinate(chart, i)).collect();
        ChartMap { source: chart.clone(), target: chart.clone(), images: images.clone(), inverse: Some(images) }
    }

    pub fn source(&self) -> &Arc<ChartSpec> {
        &self.source
    }

    pub fn target(&self) -> &Arc<ChartSpec> {
        &self.target
    }

    pub fn images(&self) -> &[GradedExpr] {
        &self.images
    }

    pub fn inverse(&self) -> Option<&[GradedExpr]> {
        self.inverse.as_deref()
    }

    /// The map in the opposite direction, when an inverse is declared.
    pub fn inverted(&self) -> Result<ChartMap, CartanError> {
        let inv = self.inverse.clone().ok_or(CartanError::MissingInverse)?;
        Ok(ChartMap { source: self.target.clone(), target: self.source.clone(), images: inv, inverse: Some(self.images.clone()) })
    }

    /// Checks both round trips of a declared inverse with [`equal`].
    pub fn check_inverse(&self, policy: &EqualPolicy) -> Result<(), CartanError> {
        let inv = self.inverse.as_ref().ok_or(CartanError::MissingInverse)?;
        for (k, img) in self.images.iter().enumerate() {
            let round = substitute_functions(img, inv)?;
            let r = equal(&round, &GradedExpr::coordinate(&self.target, k), policy);
            if !r.equal {
                return Err(CartanError::BadInverse(format!("target coordinate {}", self.target.coord(k).name)));
            }
        }
        for (j, x) in inv.iter().enumerate() {
            let round = substitute_functions(x, &self.images)?;
            let r = equal(&round, &GradedExpr::coordinate(&self.source, j), policy);
            if !r.equal {
                return Err(CartanError::BadInverse(format!("source coordinate {}", self.source.coord(j).name)));
            }
        }
        Ok(())
    }
}

fn check_images(source: &Arc<ChartSpec>, target: &Arc<ChartSpec>, images: &[GradedExpr]) -> Result<(), CartanError> {
    if images.len() != target.dim() {
        return Err(CartanError::Arity { expected: target.dim(), got: images.len() });
    }
    for (k, img) in images.iter().enumerate() {
        if *img.chart().as_ref() != *source.as_ref() {
            return Err(ExprError::MixedCharts.into());
        }
        let sigma = target.parity(k);
        if !img.is_function() || !img.has_parity(sigma) {
            return Err(ExprError::ParityMismatch(format!(
                "image of '{}' must be a {sigma} function",
                target.coord(k).name
            ))
            .into());
        }
    }
    Ok(())
}

/// Substitutes coordinates of a function's chart by `images`; differentials
/// are sent to the differentials of the images.
fn substitute_functions(f: &GradedExpr, images: &[GradedExpr]) -> Result<GradedExpr, ExprError> {
    let dmap: Vec<GradedExpr> = images.iter().map(exterior_d).collect();
    substitute(f, images, &dmap)
}

/// `φ^* ω` for `ω` over the target chart.
pub fn pullback(phi: &ChartMap, w: &GradedExpr) -> Result<GradedExpr, CartanError> {
    if *w.chart().as_ref() != *phi.target.as_ref() {
        return Err(ExprError::MixedCharts.into());
    }
    Ok(substitute_functions(w, &phi.images)?)
}

/// `φ_* X` for `X` over the source chart; needs the declared inverse.
pub fn pushforward_vf(phi: &ChartMap, x: &VectorField) -> Result<VectorField, CartanError> {
    let inv = phi.inverse.as_ref().ok_or(CartanError::MissingInverse)?;
    let coeffs = phi
        .images
        .iter()
        .map(|img| substitute_functions(&x.apply(img), inv))
        .collect::<Result<Vec<_>, _>>()?;
    if coeffs.iter().all(GradedExpr::is_zero) {
        return Ok(VectorField::zero(&phi.target));
    }
    VectorField::new(&phi.target, x.parity, coeffs)
}

/// Convenience for tests and reports: compares `φ^*` of two forms.
pub fn pullback_matches(phi: &ChartMap, target_form: &GradedExpr, source_form: &GradedExpr, policy: &EqualPolicy) -> Result<EqualityReport, CartanError> {
    let pulled = pullback(phi, target_form)?;
    Ok(equal(&pulled, source_form, policy))
}
