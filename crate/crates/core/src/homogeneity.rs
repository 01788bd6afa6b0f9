//! Weight vector fields and homogeneity: degrees of tensors, chart checks,
//! linearization at zeros, tangent and cotangent lifts, and homogeneity and
//! involutivity of distributions.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::cartan::{lie_bracket, lie_derivative, CartanError, VectorField};
use crate::grexpr::{
    equal, eval_body, eval_body_exact, eval_numeric, Coeff, CoordinateDecl, Degree, EqualPolicy, EqualityMode, EvalPoint,
    ExprError, ChartSpec, GradedExpr, Parity, Weight,
};
use crate::linalg::{rank_gauss, rank_svd, rationalize, sample_rational_points};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HomogeneityError {
    #[error(transparent)]
    Cartan(#[from] CartanError),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("weight vector fields must be even")]
    NotEven,
    #[error("the field is not in canonical form Σ w_i x^i ∂_i on its chart")]
    NonCanonical,
    #[error("the field does not vanish at the point (coefficient of '{coord}' is {value}); a nonvanishing even field is a weight field")]
    NonVanishing { coord: String, value: f64 },
    #[error("generators lose rank at {witness:?}")]
    RankCollapse { witness: Vec<f64> },
    #[error("point has {got} entries, chart has {expected} coordinates")]
    PointArity { expected: usize, got: usize },
    #[error("evaluation failed at every sample point")]
    NoValidSample,
}

/// An even vector field used to measure weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVectorField {
    field: VectorField,
    canonical: bool,
}

impl WeightVectorField {
    pub fn new(field: VectorField) -> Result<WeightVectorField, HomogeneityError> {
        if field.parity() != Parity::Even {
            return Err(HomogeneityError::NotEven);
        }
        let canonical = verify_weight_chart(&field, field.chart());
        Ok(WeightVectorField { field, canonical })
    }

    pub fn field(&self) -> &VectorField {
        &self.field
    }

    pub fn chart(&self) -> &Arc<ChartSpec> {
        self.field.chart()
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical
    }
}

/// `∇ = Σ w_i x^i ∂_{x^i}` for the weights declared in the chart.
pub fn weight_field_of_chart(chart: &Arc<ChartSpec>) -> WeightVectorField {
    let coeffs = (0..chart.dim())
        .map(|i| GradedExpr::coordinate(chart, i).scale(&Coeff::Exact(chart.weight(i).0.clone())))
        .collect();
    let field = VectorField::new(chart, Parity::Even, coeffs).expect("w x has the parity of x");
    WeightVectorField { field, canonical: true }
}

/// Whether `∇` reads exactly `Σ w_i x^i ∂_{x^i}` with the chart's weights.
pub fn verify_weight_chart(nabla: &VectorField, chart: &Arc<ChartSpec>) -> bool {
    if nabla.parity() != Parity::Even || nabla.chart().as_ref() != chart.as_ref() {
        return false;
    }
    let expected = weight_field_of_chart(chart);
    nabla.coeffs().iter().zip(expected.field.coeffs()).all(|(a, b)| a == b)
}

/// Whether two charts carry the same weights, per parity, up to order.
pub fn weights_consistent(a: &ChartSpec, b: &ChartSpec) -> bool {
    let (mut ae, mut ao) = a.weight_set();
    let (mut be, mut bo) = b.weight_set();
    for v in [&mut ae, &mut ao, &mut be, &mut bo] {
        v.sort_by(|x, y| x.0.cmp(&y.0));
    }
    ae == be && ao == bo
}

#[derive(Debug, Clone, PartialEq)]
pub enum Diagonalizability {
    /// Real eigenvalues with full geometric multiplicity.
    Diagonalizable { eigenvalues: Vec<f64> },
    /// Some eigenvalue has a nonzero imaginary part.
    ComplexSpectrum,
    /// A real eigenvalue has geometric multiplicity below its algebraic one.
    Defective { eigenvalue: f64 },
}

impl Diagonalizability {
    pub fn is_diagonalizable(&self) -> bool {
        matches!(self, Diagonalizability::Diagonalizable { .. })
    }
}

#[derive(Debug, Clone)]
pub struct Linearization {
    /// `J[i][j] = ∂_j ∇^i` at the point, body values.
    pub jacobian: DMatrix<f64>,
    pub even_block: DMatrix<f64>,
    pub odd_block: DMatrix<f64>,
    pub verdict: Diagonalizability,
}

/// Jacobian of `∇` at a zero, split into even and odd blocks, with a real
/// diagonalizability verdict. This is a necessary condition only.
pub fn linearization_at_zero(nabla: &VectorField, point: &[f64]) -> Result<Linearization, HomogeneityError> {
    let chart = nabla.chart();
    let n = chart.dim();
    if point.len() != n {
        return Err(HomogeneityError::PointArity { expected: n, got: point.len() });
    }
    if nabla.parity() != Parity::Even {
        return Err(HomogeneityError::NotEven);
    }
    for (i, c) in nabla.coeffs().iter().enumerate() {
        let v = eval_body(c, point)?;
        if v.abs() > 1e-12 {
            return Err(HomogeneityError::NonVanishing { coord: chart.coord(i).name.clone(), value: v });
        }
    }
    let mut jac = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            jac[(i, j)] = eval_body(&crate::grexpr::partial(nabla.coeff(i), j), point)?;
        }
    }
    let even: Vec<usize> = (0..n).filter(|&i| !chart.parity(i).is_odd()).collect();
    let odd: Vec<usize> = (0..n).filter(|&i| chart.parity(i).is_odd()).collect();
    let block = |idx: &[usize]| DMatrix::from_fn(idx.len(), idx.len(), |a, b| jac[(idx[a], idx[b])]);
    let even_block = block(&even);
    let odd_block = block(&odd);
    let verdict = match (diagonalizable(&even_block), diagonalizable(&odd_block)) {
        (Diagonalizability::Diagonalizable { eigenvalues: mut a }, Diagonalizability::Diagonalizable { eigenvalues: b }) => {
            a.extend(b);
            Diagonalizability::Diagonalizable { eigenvalues: a }
        }
        (d @ Diagonalizability::Diagonalizable { .. }, other) => {
            let _ = d;
            other
        }
        (other, _) => other,
    };
    Ok(Linearization { jacobian: jac, even_block, odd_block, verdict })
}

fn diagonalizable(m: &DMatrix<f64>) -> Diagonalizability {
    let n = m.nrows();
    if n == 0 {
        return Diagonalizability::Diagonalizable { eigenvalues: vec![] };
    }
    let scale = m.amax().max(1.0);
    let tol = 1e-8 * scale;
    let eig = m.complex_eigenvalues();
    if eig.iter().any(|z| z.im.abs() > tol) {
        return Diagonalizability::ComplexSpectrum;
    }
    let mut values: Vec<f64> = eig.iter().map(|z| z.re).collect();
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut clusters: Vec<(f64, usize)> = Vec::new();
    for v in &values {
        match clusters.last_mut() {
            Some((c, k)) if (v - *c).abs() <= 1e-6 * scale => *k += 1,
            _ => clusters.push((*v, 1)),
        }
    }
    for (lambda, alg) in clusters {
        let shifted = m - DMatrix::identity(n, n) * lambda;
        let geo = n - rank_svd(&shifted, 1e-9);
        if geo < alg {
            return Diagonalizability::Defective { eigenvalue: lambda };
        }
    }
    Diagonalizability::Diagonalizable { eigenvalues: values }
}

/// A form (or function) or a vector field.
#[derive(Debug, Clone, PartialEq)]
pub enum Tensor {
    Form(GradedExpr),
    Field(VectorField),
}

impl Tensor {
    fn parity(&self) -> Option<Parity> {
        match self {
            Tensor::Form(e) => e.parity(),
            Tensor::Field(x) => Some(x.parity()),
        }
    }

    fn is_zero(&self) -> bool {
        match self {
            Tensor::Form(e) => e.is_zero(),
            Tensor::Field(x) => x.is_zero(),
        }
    }

    fn parts(&self) -> Vec<GradedExpr> {
        match self {
            Tensor::Form(e) => vec![e.clone()],
            Tensor::Field(x) => x.coeffs().to_vec(),
        }
    }

    fn lie(&self, nabla: &VectorField) -> Result<Tensor, HomogeneityError> {
        Ok(match self {
            Tensor::Form(e) => Tensor::Form(lie_derivative(nabla, e)),
            Tensor::Field(x) => Tensor::Field(lie_bracket(nabla, x)?),
        })
    }
}

impl std::fmt::Display for Tensor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Tensor::Form(e) => write!(f, "{e}"),
            Tensor::Field(x) => write!(f, "{x}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegreeReport {
    pub homogeneous: bool,
    pub degree: Option<Degree>,
    /// `L_∇ T − w·T` for the best candidate `w`.
    pub residual: Tensor,
    pub mode: EqualityMode,
}

/// Solves `L_∇ T = w·T` for a rational `w`.
pub fn degree_of(t: &Tensor, nabla: &WeightVectorField, policy: &EqualPolicy) -> Result<DegreeReport, HomogeneityError> {
    let lie = t.lie(nabla.field())?;
    if t.is_zero() {
        return Ok(DegreeReport { homogeneous: true, degree: None, residual: lie, mode: EqualityMode::Exact });
    }
    let Some(parity) = t.parity() else {
        return Ok(DegreeReport { homogeneous: false, degree: None, residual: lie, mode: EqualityMode::Exact });
    };
    let (ts, ls) = (t.parts(), lie.parts());
    let candidate = match exact_ratio(&ts, &ls) {
        Some(w) => Some(w),
        None => numeric_ratio(&ts, &ls, policy).and_then(|w| rationalize(w, 1000)),
    };
    let w = candidate.unwrap_or_else(|| BigRational::from_integer(BigInt::from(0)));
    let scaled: Vec<GradedExpr> = ts.iter().map(|e| e.scale(&Coeff::Exact(w.clone()))).collect();
    let residual_parts: Vec<GradedExpr> = ls.iter().zip(&scaled).map(|(l, s)| l - s).collect();
    let mut homogeneous = true;
    let mut mode = EqualityMode::Exact;
    for r in &residual_parts {
        let rep = equal(r, &GradedExpr::zero(r.chart()), policy);
        if rep.mode == EqualityMode::Randomized {
            mode = EqualityMode::Randomized;
        }
        if !rep.equal {
            homogeneous = false;
        }
    }
    let residual = match t {
        Tensor::Form(_) => Tensor::Form(residual_parts.into_iter().next().expect("one part")),
        Tensor::Field(x) => Tensor::Field(VectorField::new(x.chart(), x.parity(), residual_parts)?),
    };
    let degree = homogeneous.then(|| Degree::new(parity, Weight(w)));
    Ok(DegreeReport { homogeneous, degree, residual, mode })
}

/// `w` with `L = w·T` monomial by monomial, when all coefficients are exact.
fn exact_ratio(ts: &[GradedExpr], ls: &[GradedExpr]) -> Option<BigRational> {
    let mut w: Option<BigRational> = None;
    for (t, l) in ts.iter().zip(ls) {
        if !t.is_exact() || !l.is_exact() {
            return None;
        }
        if t.terms().keys().ne(l.terms().keys()) && !l.is_zero() {
            return None;
        }
        if l.is_zero() {
            if t.is_zero() {
                continue;
            }
            let zero = BigRational::from_integer(BigInt::from(0));
            if w.as_ref().is_some_and(|v| *v != zero) {
                return None;
            }
            w = Some(zero);
            continue;
        }
        for (m, c) in t.terms() {
            let r = l.terms()[m].as_exact()? / c.as_exact()?;
            match &w {
                None => w = Some(r),
                Some(v) if *v == r => {}
                Some(_) => return None,
            }
        }
    }
    w
}

/// Least-squares ratio `⟨L, T⟩ / ⟨T, T⟩` over sampled component values.
fn numeric_ratio(ts: &[GradedExpr], ls: &[GradedExpr], policy: &EqualPolicy) -> Option<f64> {
    let chart = ts[0].chart();
    let mut rng = ChaCha8Rng::seed_from_u64(policy.seed);
    let (mut num, mut den) = (0.0, 0.0);
    for _ in 0..8 {
        let pt = EvalPoint::random(chart, &mut rng);
        for (t, l) in ts.iter().zip(ls) {
            let tc = t.components();
            let lc = l.components();
            for (key, tv) in &tc {
                let Ok(tv) = eval_numeric(tv, &pt) else { continue };
                let lv = match lc.get(key) {
                    Some(e) => match eval_numeric(e, &pt) {
                        Ok(v) => v,
                        Err(_) => continue,
                    },
                    None => tv.scale(0.0),
                };
                for (a, b) in tv.coeffs().iter().zip(lv.coeffs()) {
                    num += a * b;
                    den += a * a;
                }
            }
        }
    }
    (den > 0.0).then(|| num / den)
}

/// Tangent lift on the chart `(x^a, dot_x^a)`, each `dot_x^a` with the
/// parity and weight of `x^a`.
pub fn tangent_lift(nabla: &WeightVectorField) -> Result<WeightVectorField, HomogeneityError> {
    lift(nabla, "dot_", false)
}

/// Cotangent lift on the chart `(x^a, p_x^a)`, with `w(p_a) = −w(x^a)`.
pub fn cotangent_lift(nabla: &WeightVectorField) -> Result<WeightVectorField, HomogeneityError> {
    lift(nabla, "p_", true)
}

fn lift(nabla: &WeightVectorField, prefix: &str, dual: bool) -> Result<WeightVectorField, HomogeneityError> {
    if !nabla.canonical {
        return Err(HomogeneityError::NonCanonical);
    }
    let chart = nabla.chart();
    let mut coords: Vec<CoordinateDecl> = chart.coords().to_vec();
    for c in chart.coords() {
        let w = if dual { Weight(-c.weight.0.clone()) } else { c.weight.clone() };
        coords.push(CoordinateDecl::new(format!("{prefix}{}", c.name), c.parity, w));
    }
    let mut boxes = chart.boxes().to_vec();
    boxes.extend(chart.boxes().iter().copied());
    let lifted = ChartSpec::new(coords)?.with_boxes(boxes)?;
    Ok(weight_field_of_chart(&lifted))
}

/// Generators of a distribution with its declared rank.
#[derive(Debug, Clone)]
pub struct Distribution {
    chart: Arc<ChartSpec>,
    generators: Vec<VectorField>,
    rank: usize,
}

impl Distribution {
    /// Checks independence of the generators at `base` by body rank.
    pub fn new(generators: Vec<VectorField>, base: &[f64]) -> Result<Distribution, HomogeneityError> {
        let chart = generators.first().map(|g| g.chart().clone()).ok_or(ExprError::InvalidDeclaration("empty distribution".into()))?;
        if base.len() != chart.dim() {
            return Err(HomogeneityError::PointArity { expected: chart.dim(), got: base.len() });
        }
        let rows = body_rows(&generators, base)?;
        let rank = rank_gauss(&rows, 1e-10);
        if rank < generators.len() {
            return Err(HomogeneityError::RankCollapse { witness: base.to_vec() });
        }
        Ok(Distribution { chart, rank, generators })
    }

    pub fn generators(&self) -> &[VectorField] {
        &self.generators
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn chart(&self) -> &Arc<ChartSpec> {
        &self.chart
    }
}

fn body_rows(fields: &[VectorField], point: &[f64]) -> Result<Vec<Vec<f64>>, ExprError> {
    fields.iter().map(|x| x.coeffs().iter().map(|c| eval_body(c, point)).collect()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpanOptions {
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
}

impl Default for SpanOptions {
    fn default() -> Self {
        SpanOptions { samples: 16, seed: 0, tol: 1e-9 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpanReport {
    pub ok: bool,
    /// Exact when every sample was decided in rational arithmetic.
    pub mode: EqualityMode,
    pub samples: usize,
    /// Point where a tested field leaves the span.
    pub witness: Option<Vec<f64>>,
    /// Index of the first tested field that leaves the span.
    pub failed: Option<usize>,
}

/// `L_∇ X_i ∈ span(X_1..X_k)` for all generators, tested at sample points.
pub fn distribution_homogeneous(d: &Distribution, nabla: &WeightVectorField, opts: &SpanOptions) -> Result<SpanReport, HomogeneityError> {
    let tested = d.generators.iter().map(|x| lie_bracket(nabla.field(), x)).collect::<Result<Vec<_>, _>>()?;
    span_test(d, &tested, opts)
}

/// All pairwise brackets of the generators lie in their span.
pub fn involutive_check(d: &Distribution, opts: &SpanOptions) -> Result<SpanReport, HomogeneityError> {
    let g = &d.generators;
    let mut tested = Vec::new();
    for i in 0..g.len() {
        for j in i..g.len() {
            if i == j && g[i].parity() == Parity::Even {
                continue;
            }
            tested.push(lie_bracket(&g[i], &g[j])?);
        }
    }
    span_test(d, &tested, opts)
}

enum PointVerdict {
    Pass,
    Fail(usize),
    Collapse,
    Skip,
}

fn span_test(d: &Distribution, tested: &[VectorField], opts: &SpanOptions) -> Result<SpanReport, HomogeneityError> {
    let exact = d.generators.iter().chain(tested).all(|x| x.coeffs().iter().all(|c| c.is_polynomial() && c.is_exact()));
    let points = sample_rational_points(&d.chart, opts.samples, opts.seed);
    let verdicts: Vec<(Vec<f64>, PointVerdict)> = points
        .par_iter()
        .map(|pt| {
            let fl: Vec<f64> = pt.iter().map(crate::grexpr::rational_to_f64).collect();
            let v = if exact { exact_point(d, tested, pt) } else { float_point(d, tested, &fl, opts.tol) };
            (fl, v)
        })
        .collect();
    let mut valid = 0;
    for (pt, v) in verdicts {
        match v {
            PointVerdict::Pass => valid += 1,
            PointVerdict::Skip => {}
            PointVerdict::Collapse => return Err(HomogeneityError::RankCollapse { witness: pt }),
            PointVerdict::Fail(k) => {
                return Ok(SpanReport {
                    ok: false,
                    mode: if exact { EqualityMode::Exact } else { EqualityMode::Randomized },
                    samples: valid + 1,
                    witness: Some(pt),
                    failed: Some(k),
                })
            }
        }
    }
    if valid == 0 {
        return Err(HomogeneityError::NoValidSample);
    }
    Ok(SpanReport {
        ok: true,
        mode: if exact { EqualityMode::Exact } else { EqualityMode::Randomized },
        samples: valid,
        witness: None,
        failed: None,
    })
}

fn exact_point(d: &Distribution, tested: &[VectorField], pt: &[BigRational]) -> PointVerdict {
    let rows_of = |fields: &[VectorField]| -> Option<Vec<Vec<BigRational>>> {
        fields.iter().map(|x| x.coeffs().iter().map(|c| eval_body_exact(c, pt)).collect()).collect()
    };
    let (Some(base), Some(extra)) = (rows_of(&d.generators), rows_of(tested)) else {
        return PointVerdict::Skip;
    };
    if rank_gauss(&base, 0.0) < d.rank {
        return PointVerdict::Collapse;
    }
    for (k, row) in extra.into_iter().enumerate() {
        let mut m = base.clone();
        m.push(row);
        if rank_gauss(&m, 0.0) > d.rank {
            return PointVerdict::Fail(k);
        }
    }
    PointVerdict::Pass
}

fn float_point(d: &Distribution, tested: &[VectorField], pt: &[f64], tol: f64) -> PointVerdict {
    let (Ok(base), Ok(extra)) = (body_rows(&d.generators, pt), body_rows(tested, pt)) else {
        return PointVerdict::Skip;
    };
    let n = d.chart.dim();
    let m = DMatrix::from_fn(base.len(), n, |i, j| base[i][j]);
    if rank_svd(&m, 1e-10) < d.rank {
        return PointVerdict::Collapse;
    }
    for (k, row) in extra.iter().enumerate() {
        if !crate::linalg::in_row_space(&m, row, tol) {
            return PointVerdict::Fail(k);
        }
    }
    PointVerdict::Pass
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grexpr::parse_expr;

    fn q(n: i64, d: i64) -> Weight {
        Weight::from_ratio(n, d)
    }

    #[test]
    fn chart_fields() {
        let c = ChartSpec::even(&[("z", 0), ("p", 1), ("q", -1)]);
        let nabla = weight_field_of_chart(&c);
        assert_eq!(nabla.field().coeffs()[1], parse_expr("p", &c).unwrap());
        assert_eq!(nabla.field().coeffs()[2], parse_expr("-q", &c).unwrap());
        assert!(verify_weight_chart(nabla.field(), &c));
        let x = ChartSpec::even(&[("x", 1)]);
        assert!(verify_weight_chart(&VectorField::parse(&x, &["x"]).unwrap(), &x));
        assert!(!verify_weight_chart(&VectorField::parse(&x, &["x^2"]).unwrap(), &x));
        let zero = ChartSpec::even(&[("a", 0), ("b", 0)]);
        assert!(weight_field_of_chart(&zero).field().is_zero());
    }

    #[test]
    fn linearizations() {
        let x = ChartSpec::even(&[("x", 1)]);
        let l = linearization_at_zero(&VectorField::parse(&x, &["x"]).unwrap(), &[0.0]).unwrap();
        assert_eq!(l.verdict, Diagonalizability::Diagonalizable { eigenvalues: vec![1.0] });
        let l = linearization_at_zero(&VectorField::parse(&x, &["x^2"]).unwrap(), &[0.0]).unwrap();
        assert!(l.verdict.is_diagonalizable());
        let xy = ChartSpec::even(&[("x", 0), ("y", 0)]);
        let l = linearization_at_zero(&VectorField::parse(&xy, &["x + y", "0"]).unwrap(), &[0.0, 0.0]).unwrap();
        assert_eq!(l.jacobian, DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 0.0]));
        assert!(l.verdict.is_diagonalizable());
        let l = linearization_at_zero(&VectorField::parse(&xy, &["y", "0"]).unwrap(), &[0.0, 0.0]).unwrap();
        assert!(matches!(l.verdict, Diagonalizability::Defective { .. }));
        let l = linearization_at_zero(&VectorField::parse(&xy, &["-y", "x"]).unwrap(), &[0.0, 0.0]).unwrap();
        assert_eq!(l.verdict, Diagonalizability::ComplexSpectrum);
        let err = linearization_at_zero(&VectorField::parse(&x, &["1 + x"]).unwrap(), &[0.0]).unwrap_err();
        assert!(matches!(err, HomogeneityError::NonVanishing { .. }));
    }

    #[test]
    fn degrees() {
        let policy = EqualPolicy::default();
        let c = ChartSpec::even(&[("x", 1), ("y", -1)]);
        let nabla = weight_field_of_chart(&c);
        let r = degree_of(&Tensor::Form(parse_expr("x*y", &c).unwrap()), &nabla, &policy).unwrap();
        assert_eq!(r.degree, Some(Degree::new(Parity::Even, Weight::zero())));
        let r = degree_of(&Tensor::Form(parse_expr("x*sin(x*y)*d(x)", &c).unwrap()), &nabla, &policy).unwrap();
        assert_eq!(r.degree, Some(Degree::new(Parity::Even, Weight::from_int(2))));
        let r = degree_of(&Tensor::Form(parse_expr("x + x^2", &c).unwrap()), &nabla, &policy).unwrap();
        assert!(!r.homogeneous);
        let r = degree_of(&Tensor::Field(VectorField::coordinate(&c, 0)), &nabla, &policy).unwrap();
        assert_eq!(r.degree, Some(Degree::new(Parity::Even, Weight::from_int(-1))));
        let pq = ChartSpec::even(&[("p", 1), ("q", 0)]);
        let r = degree_of(&Tensor::Form(parse_expr("p*d(q)", &pq).unwrap()), &weight_field_of_chart(&pq), &policy).unwrap();
        assert_eq!(r.degree.unwrap().weight, Weight::from_int(1));
        let half = ChartSpec::from_decls(&[("y", Parity::Odd, "1/2")]).unwrap();
        let r = degree_of(&Tensor::Form(parse_expr("d(y)*d(y)", &half).unwrap()), &weight_field_of_chart(&half), &policy).unwrap();
        assert_eq!(r.degree, Some(Degree::new(Parity::Even, q(1, 1))));
    }

    #[test]
    fn lifts() {
        let c = ChartSpec::even(&[("x", 1), ("y", -1)]);
        let t = tangent_lift(&weight_field_of_chart(&c)).unwrap();
        assert_eq!(t.chart().names(), vec!["x", "y", "dot_x", "dot_y"]);
        assert_eq!(t.field().coeffs()[3], parse_expr("-dot_y", t.chart()).unwrap());
        let ct = cotangent_lift(&weight_field_of_chart(&c)).unwrap();
        assert_eq!(ct.field().coeffs()[2], parse_expr("-p_x", ct.chart()).unwrap());
        let canonical = parse_expr("p_x*d(x) + p_y*d(y)", ct.chart()).unwrap();
        let r = degree_of(&Tensor::Form(canonical), &ct, &EqualPolicy::default()).unwrap();
        assert_eq!(r.degree.unwrap().weight, Weight::zero());
        let bad = WeightVectorField::new(VectorField::parse(&c, &["x^2", "0"]).unwrap()).unwrap();
        assert_eq!(tangent_lift(&bad), Err(HomogeneityError::NonCanonical));
    }

    #[test]
    fn distributions() {
        let opts = SpanOptions::default();
        let c = ChartSpec::even(&[("x", 1), ("y", 0)]);
        let d = Distribution::new(vec![VectorField::coordinate(&c, 0)], &[0.0, 0.0]).unwrap();
        assert!(distribution_homogeneous(&d, &weight_field_of_chart(&c), &opts).unwrap().ok);
        let d2 = Distribution::new(vec![VectorField::coordinate(&c, 0), VectorField::coordinate(&c, 1)], &[0.0, 0.0]).unwrap();
        assert!(involutive_check(&d2, &opts).unwrap().ok);

        let z = ChartSpec::even(&[("z", 0), ("p", 0), ("q", 0)]);
        let nabla = WeightVectorField::new(VectorField::parse(&z, &["1", "p*cos(q)", "-sin(q)"]).unwrap()).unwrap();
        let dz = Distribution::new(vec![VectorField::coordinate(&z, 0)], &[0.0, 0.0, 0.0]).unwrap();
        let r = distribution_homogeneous(&dz, &nabla, &opts).unwrap();
        assert!(r.ok);
        let dq = Distribution::new(vec![VectorField::coordinate(&z, 2)], &[0.0, 0.0, 0.0]).unwrap();
        let r = distribution_homogeneous(&dq, &nabla, &opts).unwrap();
        assert!(!r.ok);
        assert_eq!(r.mode, EqualityMode::Randomized);

        let gens = vec![VectorField::coordinate(&z, 2), VectorField::parse(&z, &["q", "1", "0"]).unwrap()];
        let d = Distribution::new(gens, &[0.0, 0.0, 0.0]).unwrap();
        let r = involutive_check(&d, &opts).unwrap();
        assert!(!r.ok && r.witness.is_some());
        let mixing = WeightVectorField::new(VectorField::parse(&z, &["0", "0", "z"]).unwrap()).unwrap();
        let r = distribution_homogeneous(&d, &mixing, &opts).unwrap();
        assert!(!r.ok);
        assert_eq!(r.mode, EqualityMode::Exact);
    }
}
