//! Pfaffian forms: the flat map of `dα`, the class of a one-form from its
//! characteristic distribution, presymplectic rank checks, Reeb and
//! Liouville fields, and the wedge-power class test on even charts.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use thiserror::Error;

use crate::cartan::{contract, exterior_d, interior, CartanError, VectorField};
use crate::grexpr::{
    equal, eval_body, eval_body_exact, ChartSpec, EqualPolicy, EqualityMode, ExprError, GradedExpr, Parity,
};
use crate::linalg::{
    in_row_space, rank_gauss, rank_svd, rational_point_to_f64, sample_rational_points, solve_left, Scalar,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PfaffianError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Cartan(#[from] CartanError),
    #[error("expected a {0}-form")]
    FormDegree(usize),
    #[error("form has no definite parity")]
    MixedParity,
    #[error("the wedge-power test is only defined on charts without odd coordinates")]
    OddCoordinates,
    #[error("form is not closed; its differential is {0}")]
    NotClosed(String),
    #[error("form is not contact here: {0}")]
    NotContact(String),
    #[error("2-form is degenerate: {0}")]
    Degenerate(String),
    #[error("evaluation failed at {0:?}")]
    Evaluation(Vec<f64>),
    #[error("no sample point could be evaluated")]
    NoValidSample,
}

/// Matrix of `♭` at a body point: row `a` holds the coefficients of
/// `i_{∂a} ω` on `d(x^b)`; for a one-form `α`, `ω = dα` and `alpha_row`
/// holds the coefficients of `α`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatMatrix {
    pub point: Vec<f64>,
    pub matrix: DMatrix<f64>,
    pub alpha_row: Option<Vec<f64>>,
    pub even: Vec<usize>,
    pub odd: Vec<usize>,
}

impl FlatMatrix {
    pub fn rank(&self) -> usize {
        rank_svd(&self.matrix, 1e-9)
    }

    /// Ranks of the even–even and odd–odd blocks.
    pub fn block_ranks(&self) -> (usize, usize) {
        let block = |idx: &[usize]| DMatrix::from_fn(idx.len(), idx.len(), |a, b| self.matrix[(idx[a], idx[b])]);
        (rank_svd(&block(&self.even), 1e-9), rank_svd(&block(&self.odd), 1e-9))
    }

    pub fn alpha_in_image(&self, tol: f64) -> Option<bool> {
        self.alpha_row.as_ref().map(|row| in_row_space(&self.matrix, row, tol))
    }
}

/// Symbolic rows `i_{∂a} ω` split into coefficient functions.
struct FlatSymbols {
    chart: Arc<ChartSpec>,
    rows: Vec<Vec<GradedExpr>>,
    alpha: Option<Vec<GradedExpr>>,
}

impl FlatSymbols {
    fn new(form: &GradedExpr) -> Result<FlatSymbols, PfaffianError> {
        let chart = form.chart().clone();
        let n = chart.dim();
        let (omega, alpha) = match form.form_degree() {
            Some(1) => {
                let alpha: Vec<GradedExpr> = (0..n).map(|b| form.one_form_coefficient(b)).collect();
                (exterior_d(form), Some(alpha))
            }
            Some(2) => (form.clone(), None),
            _ if form.is_zero() => return Err(PfaffianError::FormDegree(1)),
            _ => return Err(PfaffianError::FormDegree(2)),
        };
        if form.parity().is_none() {
            return Err(PfaffianError::MixedParity);
        }
        let rows = (0..n)
            .map(|a| {
                let row = contract(&VectorField::coordinate(&chart, a), &omega);
                (0..n).map(|b| row.one_form_coefficient(b)).collect()
            })
            .collect();
        Ok(FlatSymbols { chart, rows, alpha })
    }

    fn all_polynomial(&self) -> bool {
        self.rows.iter().chain(self.alpha.iter()).flatten().all(|e| e.is_polynomial() && e.is_exact())
    }

    fn at(&self, point: &[f64]) -> Result<FlatMatrix, PfaffianError> {
        let n = self.chart.dim();
        let err = |_| PfaffianError::Evaluation(point.to_vec());
        let mut m = DMatrix::zeros(n, n);
        for a in 0..n {
            for b in 0..n {
                m[(a, b)] = eval_body(&self.rows[a][b], point).map_err(err)?;
            }
        }
        let alpha_row = match &self.alpha {
            Some(al) => Some(al.iter().map(|e| eval_body(e, point)).collect::<Result<Vec<_>, _>>().map_err(err)?),
            None => None,
        };
        if !m.iter().chain(alpha_row.iter().flatten()).all(|v| v.is_finite()) {
            return Err(PfaffianError::Evaluation(point.to_vec()));
        }
        let even = (0..n).filter(|&i| !self.chart.parity(i).is_odd()).collect();
        let odd = (0..n).filter(|&i| self.chart.parity(i).is_odd()).collect();
        Ok(FlatMatrix { point: point.to_vec(), matrix: m, alpha_row, even, odd })
    }

    /// Exact rank of `♭` and of `♭` with the α-row appended.
    fn exact_at(&self, point: &[BigRational]) -> Option<(usize, Option<usize>, bool)> {
        let rows: Vec<Vec<BigRational>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(|e| eval_body_exact(e, point)).collect::<Option<Vec<_>>>())
            .collect::<Option<_>>()?;
        let rank = rank_gauss(&rows, 0.0);
        match &self.alpha {
            None => Some((rank, None, false)),
            Some(al) => {
                let row: Vec<BigRational> = al.iter().map(|e| eval_body_exact(e, point)).collect::<Option<_>>()?;
                let vanishing = row.iter().all(Zero::is_zero);
                let mut aug = rows;
                aug.push(row);
                Some((rank, Some(rank_gauss(&aug, 0.0)), vanishing))
            }
        }
    }
}

pub fn flat_matrix(form: &GradedExpr, point: &[f64]) -> Result<FlatMatrix, PfaffianError> {
    FlatSymbols::new(form)?.at(point)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassCase {
    Closed,
    /// `⟨α⟩ ∩ Im ♭_{dα} = 0`.
    Transversal,
    /// `⟨α⟩ ⊆ Im ♭_{dα}`.
    Contained,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormKind {
    Closed,
    Contact,
    SymplecticPotential,
    Precontact,
    PresymplecticPotential,
    Irregular,
}

impl fmt::Display for ClassCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassCase::Closed => "closed",
            ClassCase::Transversal => "transversal",
            ClassCase::Contained => "contained",
        })
    }
}

impl fmt::Display for FormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FormKind::Closed => "closed",
            FormKind::Contact => "contact",
            FormKind::SymplecticPotential => "symplectic-potential",
            FormKind::Precontact => "precontact",
            FormKind::PresymplecticPotential => "presymplectic-potential",
            FormKind::Irregular => "irregular",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointEvidence {
    pub point: Vec<f64>,
    pub rank: usize,
    /// `None` when α vanishes at the point (not classified).
    pub class: Option<usize>,
    pub case: Option<ClassCase>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationReport {
    /// Common class over the classified samples; `None` if it varies.
    pub class: Option<usize>,
    pub case: Option<ClassCase>,
    pub kind: FormKind,
    pub dim: usize,
    pub mode: EqualityMode,
    pub evidence: Vec<PointEvidence>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleOptions {
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    /// Extra points evaluated in addition to the random samples.
    pub points: Vec<Vec<f64>>,
}

impl Default for SampleOptions {
    fn default() -> Self {
        SampleOptions { samples: 16, seed: 0, tol: 1e-9, points: Vec::new() }
    }
}

impl SampleOptions {
    pub fn only(points: Vec<Vec<f64>>) -> SampleOptions {
        SampleOptions { samples: 0, points, ..SampleOptions::default() }
    }
}

fn kind_of(class: usize, case: ClassCase, dim: usize) -> FormKind {
    match case {
        ClassCase::Closed if dim == 1 => FormKind::Contact,
        ClassCase::Closed => FormKind::Closed,
        ClassCase::Transversal if class == dim => FormKind::Contact,
        ClassCase::Transversal => FormKind::Precontact,
        ClassCase::Contained if class == dim => FormKind::SymplecticPotential,
        ClassCase::Contained => FormKind::PresymplecticPotential,
    }
}

/// Class of a one-form at sample points: rank of `♭_{dα}`, plus one when
/// `α` is transversal to its image.
pub fn characteristic_class(alpha: &GradedExpr, opts: &SampleOptions) -> Result<ClassificationReport, PfaffianError> {
    let chart = alpha.chart().clone();
    let dim = chart.dim();
    let syms = FlatSymbols::new(alpha)?;
    if syms.alpha.is_none() {
        return Err(PfaffianError::FormDegree(1));
    }
    let dalpha = exterior_d(alpha);
    let closed = equal(&dalpha, &GradedExpr::zero(&chart), &EqualPolicy::default().with_seed(opts.seed)).equal;
    let exact = syms.all_polynomial();
    let mut rational = sample_rational_points(&chart, opts.samples, opts.seed);
    let extra_exact: Option<Vec<Vec<BigRational>>> =
        opts.points.iter().map(|p| p.iter().map(|&x| BigRational::from_float(x)).collect()).collect();
    let use_exact = exact && extra_exact.is_some();
    if let Some(extra) = extra_exact {
        rational.extend(extra);
    }
    let evidence: Vec<Result<PointEvidence, PfaffianError>> = rational
        .par_iter()
        .enumerate()
        .map(|(k, rp)| {
            let fp = if k < opts.samples { rational_point_to_f64(rp) } else { opts.points[k - opts.samples].clone() };
            let (rank, aug, vanishing) = if use_exact {
                syms.exact_at(rp).ok_or_else(|| PfaffianError::Evaluation(fp.clone()))?
            } else {
                let fm = syms.at(&fp)?;
                let row = fm.alpha_row.as_ref().expect("one-form");
                let vanishing = row.iter().all(|v| v.abs() <= 1e-14);
                let rank = fm.rank();
                let inside = fm.alpha_in_image(opts.tol).unwrap_or(false);
                (rank, Some(if inside { rank } else { rank + 1 }), vanishing)
            };
            if vanishing {
                return Ok(PointEvidence { point: fp, rank, class: None, case: None });
            }
            let (class, case) = if closed {
                (1, ClassCase::Closed)
            } else if aug == Some(rank) {
                (rank, ClassCase::Contained)
            } else {
                (rank + 1, ClassCase::Transversal)
            };
            Ok(PointEvidence { point: fp, rank, class: Some(class), case: Some(case) })
        })
        .collect();
    let evidence: Vec<PointEvidence> = evidence.into_iter().filter_map(Result::ok).collect();
    let classified: Vec<&PointEvidence> = evidence.iter().filter(|e| e.class.is_some()).collect();
    let Some(first) = classified.first() else {
        return Err(PfaffianError::NoValidSample);
    };
    let uniform = classified.iter().all(|e| e.class == first.class && e.case == first.case);
    let mode = if use_exact { EqualityMode::Exact } else { EqualityMode::Randomized };
    if !uniform {
        return Ok(ClassificationReport { class: None, case: None, kind: FormKind::Irregular, dim, mode, evidence });
    }
    let (class, case) = (first.class.expect("classified"), first.case.expect("classified"));
    Ok(ClassificationReport { class: Some(class), case: Some(case), kind: kind_of(class, case, dim), dim, mode, evidence })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PresymplecticReport {
    /// `(even rank, odd rank)` per point; for even forms the even rank is `2r`.
    pub ranks: Vec<(Vec<f64>, usize, usize)>,
    pub constant: bool,
    /// Two points with different ranks.
    pub witness: Option<(Vec<f64>, Vec<f64>)>,
}

impl PresymplecticReport {
    pub fn rank(&self) -> Option<(usize, usize)> {
        self.ranks.first().filter(|_| self.constant).map(|(_, e, o)| (*e, *o))
    }
}

/// Closedness and rank of a 2-form at the sample points.
pub fn presymplectic_check(omega: &GradedExpr, opts: &SampleOptions) -> Result<PresymplecticReport, PfaffianError> {
    let chart = omega.chart().clone();
    if !omega.has_form_degree(2) {
        return Err(PfaffianError::FormDegree(2));
    }
    let domega = exterior_d(omega);
    if !equal(&domega, &GradedExpr::zero(&chart), &EqualPolicy::default().with_seed(opts.seed)).equal {
        return Err(PfaffianError::NotClosed(domega.to_string()));
    }
    let syms = FlatSymbols::new(omega)?;
    let mut points: Vec<Vec<f64>> =
        sample_rational_points(&chart, opts.samples, opts.seed).iter().map(|p| rational_point_to_f64(p)).collect();
    points.extend(opts.points.iter().cloned());
    let ranks: Vec<(Vec<f64>, usize, usize)> = points
        .par_iter()
        .filter_map(|p| syms.at(p).ok())
        .map(|fm| {
            let (e, o) = fm.block_ranks();
            (fm.point, e, o)
        })
        .collect();
    if ranks.is_empty() {
        return Err(PfaffianError::NoValidSample);
    }
    let first = &ranks[0];
    let witness = ranks.iter().find(|r| (r.1, r.2) != (first.1, first.2)).map(|r| (first.0.clone(), r.0.clone()));
    Ok(PresymplecticReport { constant: witness.is_none(), witness, ranks })
}

/// Reference point for symbolic solves: the first sample point at which
/// `♭` has full rank `expected`, else the centre of the boxes.
fn reference_point(syms: &FlatSymbols, expected: usize, seed: u64) -> Vec<f64> {
    let pts = sample_rational_points(&syms.chart, 16, seed);
    pts.iter()
        .map(|p| rational_point_to_f64(p))
        .find(|p| syms.at(p).map(|fm| fm.rank() == expected).unwrap_or(false))
        .unwrap_or_else(|| syms.chart.boxes().iter().map(|(lo, hi)| (lo + hi) / 2.0).collect())
}

/// The Reeb field: `i_R α = 1`, `i_R dα = 0`.
pub fn reeb(alpha: &GradedExpr, policy: &EqualPolicy) -> Result<VectorField, PfaffianError> {
    let chart = alpha.chart().clone();
    let n = chart.dim();
    let syms = FlatSymbols::new(alpha)?;
    let coeffs = syms.alpha.clone().ok_or(PfaffianError::FormDegree(1))?;
    let parity = alpha.parity().ok_or(PfaffianError::MixedParity)?;
    let a: Vec<Vec<GradedExpr>> = (0..n)
        .map(|i| std::iter::once(coeffs[i].clone()).chain(syms.rows[i].iter().cloned()).collect())
        .collect();
    let mut b = vec![GradedExpr::zero(&chart); n + 1];
    b[0] = GradedExpr::one(&chart);
    let reference = reference_point(&syms, n - 1, policy.seed);
    let sol = solve_left(&a, &b, Some(&reference), policy.seed)?;
    if !sol.nullspace.is_empty() {
        return Err(PfaffianError::NotContact(format!("Reeb equations have {} free directions", sol.nullspace.len())));
    }
    let x = sol.particular.ok_or_else(|| PfaffianError::NotContact("Reeb equations are inconsistent".into()))?;
    let r = VectorField::new(&chart, parity, x)?;
    let one = interior(&r, alpha)?;
    let kernel = interior(&r, &exterior_d(alpha))?;
    if !equal(&one, &GradedExpr::one(&chart), policy).equal || !equal(&kernel, &GradedExpr::zero(&chart), policy).equal {
        return Err(PfaffianError::NotContact("solution fails verification".into()));
    }
    Ok(r)
}

/// The Liouville field of a symplectic potential: `i_X ω = α` with `dα = ω`.
pub fn liouville(omega: &GradedExpr, alpha: &GradedExpr, policy: &EqualPolicy) -> Result<VectorField, PfaffianError> {
    let chart = omega.chart().clone();
    let n = chart.dim();
    let da = exterior_d(alpha);
    if !equal(&da, omega, policy).equal {
        return Err(PfaffianError::NotClosed(format!("dα − ω = {}", &da - omega)));
    }
    let syms = FlatSymbols::new(omega)?;
    let b: Vec<GradedExpr> = (0..n).map(|j| alpha.one_form_coefficient(j)).collect();
    let reference = reference_point(&syms, n, policy.seed);
    let sol = solve_left(&syms.rows, &b, Some(&reference), policy.seed)?;
    if !sol.nullspace.is_empty() {
        return Err(PfaffianError::Degenerate(format!("kernel of dimension {}", sol.nullspace.len())));
    }
    let x = sol.particular.ok_or_else(|| PfaffianError::Degenerate("α is not in the image of ♭".into()))?;
    let parity = alpha.parity().unwrap_or(Parity::Even) + omega.parity().unwrap_or(Parity::Even);
    let field = if x.iter().all(GradedExpr::is_zero) { VectorField::zero(&chart) } else { VectorField::new(&chart, parity, x)? };
    let check = interior(&field, omega)?;
    if !equal(&check, alpha, policy).equal {
        return Err(PfaffianError::Degenerate("solution fails verification".into()));
    }
    Ok(field)
}

/// Generators of `χ(α) = ker α ∩ ker dα` found by symbolic elimination
/// around a reference point.
pub fn characteristic_generators(alpha: &GradedExpr, reference: Option<&[f64]>, seed: u64) -> Result<Vec<VectorField>, PfaffianError> {
    let chart = alpha.chart().clone();
    let n = chart.dim();
    let syms = FlatSymbols::new(alpha)?;
    let coeffs = syms.alpha.clone().ok_or(PfaffianError::FormDegree(1))?;
    let a: Vec<Vec<GradedExpr>> = (0..n)
        .map(|i| std::iter::once(coeffs[i].clone()).chain(syms.rows[i].iter().cloned()).collect())
        .collect();
    let b = vec![GradedExpr::zero(&chart); n + 1];
    let sol = solve_left(&a, &b, reference, seed)?;
    sol.nullspace
        .into_iter()
        .map(|x| VectorField::from_exprs(&chart, x).map_err(PfaffianError::from))
        .collect()
}

/// Exterior algebra on `n` generators, coefficients indexed by bitmask.
struct Exterior<S> {
    n: usize,
    c: Vec<S>,
}

impl<S: Scalar> Exterior<S> {
    fn zero(n: usize) -> Self {
        Exterior { n, c: vec![S::zero(); 1 << n] }
    }

    fn wedge(&self, o: &Self) -> Self {
        let mut out = Exterior::<S>::zero(self.n);
        for (a, x) in self.c.iter().enumerate() {
            if x.is_zero_within(1.0, 0.0) {
                continue;
            }
            for (b, y) in o.c.iter().enumerate() {
                if a & b != 0 || y.is_zero_within(1.0, 0.0) {
                    continue;
                }
                let mut swaps = 0;
                for i in 0..self.n {
                    if b >> i & 1 == 1 {
                        swaps += (a >> (i + 1)).count_ones();
                    }
                }
                let v = x.mul(y);
                let v = if swaps % 2 == 1 { S::zero().sub(&v) } else { v };
                out.c[a | b] = out.c[a | b].add(&v);
            }
        }
        out
    }

    fn is_zero(&self, tol: f64) -> bool {
        let scale = self.c.iter().map(Scalar::magnitude).fold(0.0, f64::max);
        scale == 0.0 || self.c.iter().all(|v| v.is_zero_within(1.0, tol))
    }
}

/// Largest `k` for which the `k`-th term of `α, dα, α∧dα, (dα)², …` is
/// nonzero; `alpha[i]` and `omega[i][j]` (`i < j`) are the coefficients of
/// `d(x^i)` and `d(x^i)∧d(x^j)`.
pub fn wedge_class<S: Scalar>(alpha: &[S], omega: &[Vec<S>], tol: f64) -> usize {
    let n = alpha.len();
    let mut a = Exterior::zero(n);
    for (i, v) in alpha.iter().enumerate() {
        a.c[1 << i] = v.clone();
    }
    let mut w = Exterior::zero(n);
    for i in 0..n {
        for j in i + 1..n {
            w.c[(1 << i) | (1 << j)] = omega[i][j].clone();
        }
    }
    let mut power = Exterior::zero(n);
    power.c[0] = S::one();
    let mut class = 0;
    for s in 0..=n / 2 + 1 {
        if s > 0 {
            power = power.wedge(&w);
            if !power.is_zero(tol) {
                class = 2 * s;
            }
        }
        if !a.wedge(&power).is_zero(tol) {
            class = class.max(2 * s + 1);
        }
    }
    class
}

/// Classical class test on a purely even chart: exact for polynomial data
/// with exact coefficients, floating point otherwise.
pub fn darboux_class_oracle(alpha: &GradedExpr, point: &[f64]) -> Result<usize, PfaffianError> {
    let chart = alpha.chart();
    if chart.odd_dim() > 0 {
        return Err(PfaffianError::OddCoordinates);
    }
    if !alpha.is_zero() && !alpha.has_form_degree(1) {
        return Err(PfaffianError::FormDegree(1));
    }
    let n = chart.dim();
    let da = exterior_d(alpha);
    let comps = da.components();
    let two = |i: usize, j: usize| {
        let mut key = vec![0u32; n];
        key[i] = 1;
        key[j] = 1;
        comps.get(&key).cloned().unwrap_or_else(|| GradedExpr::zero(chart))
    };
    let coeffs: Vec<GradedExpr> = (0..n).map(|i| alpha.one_form_coefficient(i)).collect();
    let pairs: Vec<Vec<GradedExpr>> = (0..n).map(|i| (0..n).map(|j| if i < j { two(i, j) } else { GradedExpr::zero(chart) }).collect()).collect();
    let rp: Option<Vec<BigRational>> = point.iter().map(|&x| BigRational::from_float(x)).collect();
    if let Some(rp) = rp {
        let a: Option<Vec<BigRational>> = coeffs.iter().map(|e| eval_body_exact(e, &rp)).collect();
        let w: Option<Vec<Vec<BigRational>>> =
            pairs.iter().map(|r| r.iter().map(|e| eval_body_exact(e, &rp)).collect()).collect();
        if let (Some(a), Some(w)) = (a, w) {
            return Ok(wedge_class(&a, &w, 0.0));
        }
    }
    let err = |_| PfaffianError::Evaluation(point.to_vec());
    let a: Vec<f64> = coeffs.iter().map(|e| eval_body(e, point)).collect::<Result<_, _>>().map_err(err)?;
    let w: Vec<Vec<f64>> =
        pairs.iter().map(|r| r.iter().map(|e| eval_body(e, point)).collect::<Result<_, _>>()).collect::<Result<_, _>>().map_err(err)?;
    Ok(wedge_class(&a, &w, 1e-9))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grexpr::parse_expr;

    fn cylinder() -> Arc<ChartSpec> {
        ChartSpec::even(&[("z", 0), ("p", 1), ("q", -1)]).with_boxes(vec![(-0.7, 0.7); 3]).unwrap()
    }

    #[test]
    fn flat_examples() {
        let c = ChartSpec::even(&[("z", 0), ("p", 0), ("q", 0)]);
        let p = |s: &str| parse_expr(s, &c).unwrap();
        let fm = flat_matrix(&p("d(p)*d(q)"), &[0.0; 3]).unwrap();
        assert_eq!(fm.rank(), 2);
        assert_eq!(fm.matrix[(1, 2)], 1.0);
        assert_eq!(fm.matrix[(2, 1)], -1.0);
        let fm = flat_matrix(&p("d(z)"), &[0.0; 3]).unwrap();
        assert_eq!(fm.rank(), 0);
        assert_eq!(fm.alpha_row, Some(vec![1.0, 0.0, 0.0]));
        let cyl = cylinder();
        let fm = flat_matrix(&parse_expr("d(z) - p*(2+sin(p*q))*d(q)", &cyl).unwrap(), &[0.0; 3]).unwrap();
        assert_eq!(fm.rank(), 2);
        assert_eq!(fm.alpha_in_image(1e-9), Some(false));
    }

    #[test]
    fn classification_examples() {
        let opts = SampleOptions::default();
        let cyl = cylinder();
        let alpha = parse_expr("d(z) - p*(2+sin(p*q))*d(q)", &cyl).unwrap();
        let r = characteristic_class(&alpha, &opts).unwrap();
        assert_eq!((r.class, r.kind), (Some(3), FormKind::Contact));
        assert_eq!(r.mode, EqualityMode::Randomized);
        for e in &r.evidence {
            assert_eq!(darboux_class_oracle(&alpha, &e.point).unwrap(), 3);
        }
        let c = ChartSpec::even(&[("z", 0), ("p", 0), ("q", 0)]);
        let r = characteristic_class(&parse_expr("d(z)", &c).unwrap(), &opts).unwrap();
        assert_eq!((r.class, r.case, r.kind), (Some(1), Some(ClassCase::Closed), FormKind::Closed));
        let r = characteristic_class(&parse_expr("p*d(q)", &c).unwrap(), &opts).unwrap();
        assert_eq!((r.class, r.kind, r.mode), (Some(2), FormKind::PresymplecticPotential, EqualityMode::Exact));
        let pq = ChartSpec::even(&[("p", 1), ("q", -1)]);
        let r = characteristic_class(&parse_expr("p*d(q)", &pq).unwrap(), &opts).unwrap();
        assert_eq!((r.class, r.kind), (Some(2), FormKind::SymplecticPotential));
    }

    #[test]
    fn oracle_examples() {
        let c = ChartSpec::even(&[("p", 0), ("q", 0)]);
        assert_eq!(darboux_class_oracle(&parse_expr("p*d(q)", &c).unwrap(), &[0.5, 0.1]).unwrap(), 2);
        let c3 = ChartSpec::even(&[("z", 0), ("p", 0), ("q", 0)]);
        assert_eq!(darboux_class_oracle(&parse_expr("d(z)", &c3).unwrap(), &[0.0; 3]).unwrap(), 1);
        assert_eq!(darboux_class_oracle(&parse_expr("d(z) + p*d(q)", &c3).unwrap(), &[0.0; 3]).unwrap(), 3);
        let odd = ChartSpec::from_decls(&[("x", Parity::Even, "0"), ("y", Parity::Odd, "0")]).unwrap();
        assert_eq!(darboux_class_oracle(&parse_expr("d(x)", &odd).unwrap(), &[0.0, 0.0]), Err(PfaffianError::OddCoordinates));
    }

    #[test]
    fn presymplectic_examples() {
        let c = ChartSpec::even(&[("z", 0), ("p", 0), ("q", 0)]);
        let p = |s: &str| parse_expr(s, &c).unwrap();
        let r = presymplectic_check(&p("d(p)*d(q)"), &SampleOptions::default()).unwrap();
        assert_eq!(r.rank(), Some((2, 0)));
        let opts = SampleOptions { points: vec![vec![0.0, 0.0, 0.3]], ..SampleOptions::default() };
        let r = presymplectic_check(&p("p*d(p)*d(q)"), &opts).unwrap();
        assert!(!r.constant && r.witness.is_some());
        assert!(matches!(presymplectic_check(&p("z*d(p)*d(q)"), &opts), Err(PfaffianError::NotClosed(_))));
        let y = ChartSpec::from_decls(&[("y", Parity::Odd, "0")]).unwrap();
        let r = presymplectic_check(&parse_expr("-d(y)*d(y)", &y).unwrap(), &SampleOptions::default()).unwrap();
        assert_eq!(r.rank(), Some((0, 1)));
    }

    #[test]
    fn reeb_and_liouville() {
        let policy = EqualPolicy::default();
        let c = ChartSpec::even(&[("z", 0), ("p", 1), ("q", -1)]);
        let r = reeb(&parse_expr("d(z) + p*d(q)", &c).unwrap(), &policy).unwrap();
        assert_eq!(r, VectorField::coordinate(&c, 0));
        let cyl = cylinder();
        let r = reeb(&parse_expr("d(z) - p*(2+sin(p*q))*d(q)", &cyl).unwrap(), &policy).unwrap();
        assert!(r.equals(&VectorField::coordinate(&cyl, 0), &policy));
        assert!(matches!(reeb(&parse_expr("p*d(q)", &c).unwrap(), &policy), Err(PfaffianError::NotContact(_))));

        let pq = ChartSpec::even(&[("p", 1), ("q", -1)]);
        let p = |s: &str| parse_expr(s, &pq).unwrap();
        let x = liouville(&p("d(p)*d(q)"), &p("p*d(q)"), &policy).unwrap();
        assert_eq!(x, VectorField::parse(&pq, &["p", "0"]).unwrap());
        let x = liouville(&p("d(p)*d(q)"), &p("(p*d(q) - q*d(p))/2"), &policy).unwrap();
        assert_eq!(x, VectorField::parse(&pq, &["p/2", "q/2"]).unwrap());
    }

    #[test]
    fn characteristic_directions() {
        let c = ChartSpec::even(&[("z", 0), ("p", 0), ("q", 0)]);
        let gens = characteristic_generators(&parse_expr("p*d(q)", &c).unwrap(), None, 0).unwrap();
        assert_eq!(gens.len(), 1);
        assert!(gens[0].equals(&VectorField::coordinate(&c, 0), &EqualPolicy::default()));
    }
}
