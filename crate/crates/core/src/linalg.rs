//! Dense linear algebra: numeric and exact ranks, and a symbolic solver for
//! linear systems whose coefficients are superfunctions.

use std::fmt::Debug;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grexpr::{eval_body, gdiv, ChartSpec, EvalPoint, GradedExpr};

/// Field of scalars for the small dense routines that run both in floating
/// point and in exact rational arithmetic.
pub trait Scalar: Clone + Debug + PartialEq + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(n: i64) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn magnitude(&self) -> f64;
    /// Zero test; floats compare against `tol · scale`.
    fn is_zero_within(&self, scale: f64, tol: f64) -> bool;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(n: i64) -> Self {
        n as f64
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn is_zero_within(&self, scale: f64, tol: f64) -> bool {
        self.abs() <= tol * scale.max(1e-300)
    }
}

impl Scalar for BigRational {
    fn zero() -> Self {
        <BigRational as Zero>::zero()
    }
    fn one() -> Self {
        <BigRational as One>::one()
    }
    fn from_i64(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn magnitude(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }
    fn is_zero_within(&self, _scale: f64, _tol: f64) -> bool {
        Zero::is_zero(self)
    }
}

/// Rank by Gaussian elimination with partial pivoting. Exact for rationals;
/// for floats a pivot is zero below `tol` times the largest entry.
pub fn rank_gauss<S: Scalar>(rows: &[Vec<S>], tol: f64) -> usize {
    let mut m: Vec<Vec<S>> = rows.to_vec();
    let n_rows = m.len();
    if n_rows == 0 {
        return 0;
    }
    let n_cols = m[0].len();
    let scale = m.iter().flatten().map(Scalar::magnitude).fold(0.0, f64::max);
    let mut rank = 0;
    for col in 0..n_cols {
        if rank == n_rows {
            break;
        }
        let (best, mag) = (rank..n_rows)
            .map(|r| (r, m[r][col].magnitude()))
            .fold((rank, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if m[best][col].is_zero_within(scale, tol) || mag < 0.0 {
            continue;
        }
        m.swap(rank, best);
        let pivot = m[rank][col].clone();
        for r in rank + 1..n_rows {
            if m[r][col].is_zero_within(scale, 0.0) {
                continue;
            }
            let factor = m[r][col].div(&pivot);
            for c in col..n_cols {
                let v = m[r][c].sub(&factor.mul(&m[rank][c]));
                m[r][c] = v;
            }
        }
        rank += 1;
    }
    rank
}

/// Numeric rank from singular values, relative threshold `tol`.
pub fn rank_svd(m: &DMatrix<f64>, tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * max).count()
}

/// Whether `v` lies in the row space of `m`, by least-squares residual
/// relative to `|v|`.
pub fn in_row_space(m: &DMatrix<f64>, v: &[f64], tol: f64) -> bool {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return true;
    }
    if m.nrows() == 0 {
        return false;
    }
    let a = m.transpose();
    let b = nalgebra::DVector::from_column_slice(v);
    let svd = a.clone().svd(true, true);
    let max_sv = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let Ok(x) = svd.solve(&b, 1e-12 * max_sv.max(1e-300)) else {
        return false;
    };
    let residual = (&a * x - b).norm();
    residual <= tol * norm.max(max_sv * norm)
}

pub fn to_rational(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

/// Best rational approximation with denominator at most `max_den`, by
/// continued fractions.
pub fn rationalize(x: f64, max_den: i64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut r = x;
    for _ in 0..40 {
        let a = r.floor();
        if a.abs() > 1e12 {
            break;
        }
        let a = a as i64;
        let h2 = a.checked_mul(h1)?.checked_add(h0)?;
        let k2 = a.checked_mul(k1)?.checked_add(k0)?;
        if k2 > max_den {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = r - a as f64;
        if frac.abs() < 1e-12 {
            break;
        }
        r = 1.0 / frac;
    }
    if k1 == 0 {
        return None;
    }
    Some(BigRational::new(BigInt::from(h1), BigInt::from(k1)))
}

/// Seeded rational sample points in the chart boxes, on a grid of 64 steps
/// per axis that avoids the box edges. Odd coordinates get 0.
pub fn sample_rational_points(chart: &ChartSpec, n: usize, seed: u64) -> Vec<Vec<BigRational>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            (0..chart.dim())
                .map(|i| {
                    let t: i64 = rng.gen_range(1..64);
                    if chart.parity(i).is_odd() {
                        return <BigRational as Zero>::zero();
                    }
                    let (lo, hi) = chart.boxes()[i];
                    let lo = BigRational::from_float(lo).unwrap_or_default();
                    let hi = BigRational::from_float(hi).unwrap_or_default();
                    &lo + (&hi - &lo) * BigRational::new(t.into(), 64.into())
                })
                .collect()
        })
        .collect()
}

pub fn rational_point_to_f64(p: &[BigRational]) -> Vec<f64> {
    p.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect()
}

/// Solution of `x·A = b` for a row vector of unknown functions.
#[derive(Debug, Clone)]
pub struct SymbolicSolution {
    pub particular: Option<Vec<GradedExpr>>,
    /// Generators of the solutions of `x·A = 0` found by elimination.
    pub nullspace: Vec<Vec<GradedExpr>>,
    pub rank: usize,
}

/// Reference body point for pivot selection plus random Grassmann points
/// for numeric zero tests.
struct Probe {
    reference: Vec<f64>,
    points: Vec<EvalPoint>,
}

impl Probe {
    fn new(chart: &ChartSpec, reference: Option<&[f64]>, seed: u64) -> Probe {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let points: Vec<EvalPoint> = (0..4).map(|_| EvalPoint::random(chart, &mut rng)).collect();
        let reference = match reference {
            Some(r) => r.to_vec(),
            None => points[0].body_values(),
        };
        Probe { reference, points }
    }

    fn body(&self, e: &GradedExpr) -> f64 {
        eval_body(e, &self.reference).unwrap_or(0.0)
    }

    fn is_zero(&self, e: &GradedExpr) -> bool {
        if e.is_zero() {
            return true;
        }
        if e.is_polynomial() && e.is_exact() {
            return false;
        }
        self.points.iter().all(|pt| match crate::grexpr::eval_with_scale(e, pt) {
            Ok((v, s)) => v.max_abs() <= 1e-11 * s.max(1e-300),
            Err(_) => false,
        })
    }
}

fn pivot_score(e: &GradedExpr, body: f64) -> (u8, f64) {
    let kind = if e.as_constant().is_some() {
        3
    } else if e.num_terms() == 1 && !e.has_atoms() {
        2
    } else if e.is_polynomial() {
        1
    } else {
        0
    };
    (kind, body.abs())
}

/// Gauss–Jordan elimination on the equations `Σ_a x_a A[a][j] = b[j]`.
///
/// Unknowns multiply from the left, so equations are combined by right
/// multiplication with functions. Pivots are even entries with nonzero body
/// at the reference point (or at a seeded random point of the chart boxes).
pub fn solve_left(
    a: &[Vec<GradedExpr>],
    b: &[GradedExpr],
    reference: Option<&[f64]>,
    seed: u64,
) -> Result<SymbolicSolution, crate::grexpr::ExprError> {
    let n = a.len();
    let m = b.len();
    let chart = b.first().map(|e| e.chart().clone()).or_else(|| a.first().and_then(|r| r.first()).map(|e| e.chart().clone()));
    let Some(chart) = chart else {
        return Ok(SymbolicSolution { particular: Some(vec![]), nullspace: vec![], rank: 0 });
    };
    let probe = Probe::new(&chart, reference, seed);
    // eqs[j] = (coefficients by unknown, rhs)
    let mut eqs: Vec<(Vec<GradedExpr>, GradedExpr)> =
        (0..m).map(|j| ((0..n).map(|i| a[i][j].clone()).collect(), b[j].clone())).collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut used_eq = vec![false; m];
    let mut used_var = vec![false; n];
    loop {
        let mut best: Option<(usize, usize, (u8, f64))> = None;
        let mut max_body = 0.0f64;
        let mut candidates = Vec::new();
        for (j, (coeffs, _)) in eqs.iter().enumerate() {
            if used_eq[j] {
                continue;
            }
            for (i, c) in coeffs.iter().enumerate() {
                if used_var[i] || c.is_zero() || !c.has_parity(crate::grexpr::Parity::Even) {
                    continue;
                }
                let body = probe.body(c);
                if body.is_finite() && body != 0.0 {
                    max_body = max_body.max(body.abs());
                    candidates.push((j, i, pivot_score(c, body)));
                }
            }
        }
        for (j, i, score) in candidates {
            if score.1 <= 1e-8 * max_body {
                continue;
            }
            let better = match &best {
                None => true,
                Some((_, _, s)) => score.0 > s.0 || (score.0 == s.0 && score.1 > s.1 * 1.5),
            };
            if better {
                best = Some((j, i, score));
            }
        }
        let Some((k, var, _)) = best else { break };
        used_eq[k] = true;
        used_var[var] = true;
        pivots.push((var, k));
        let p = eqs[k].0[var].clone();
        let one = GradedExpr::one(&chart);
        let inv = gdiv(&one, &p)?;
        let (coeffs, rhs) = &eqs[k];
        let coeffs: Vec<GradedExpr> = coeffs.iter().map(|c| clean(&probe, c * &inv)).collect();
        let rhs = clean(&probe, rhs * &inv);
        eqs[k] = (coeffs, rhs);
        for j in 0..m {
            if j == k {
                continue;
            }
            let factor = eqs[j].0[var].clone();
            if factor.is_zero() {
                continue;
            }
            let (pc, pr) = eqs[k].clone();
            let (cj, rj) = &mut eqs[j];
            for i in 0..n {
                let upd = &cj[i] - &(&pc[i] * &factor);
                cj[i] = clean(&probe, upd);
            }
            cj[var] = GradedExpr::zero(&chart);
            *rj = clean(&probe, &*rj - &(&pr * &factor));
        }
    }
    let consistent = (0..m).filter(|&j| !used_eq[j]).all(|j| probe.is_zero(&eqs[j].1));
    let particular = consistent.then(|| {
        let mut x = vec![GradedExpr::zero(&chart); n];
        for &(var, k) in &pivots {
            x[var] = eqs[k].1.clone();
        }
        x
    });
    let mut nullspace = Vec::new();
    for free in (0..n).filter(|&i| !used_var[i]) {
        let mut x = vec![GradedExpr::zero(&chart); n];
        x[free] = GradedExpr::one(&chart);
        for &(var, k) in &pivots {
            x[var] = -&eqs[k].0[free];
        }
        nullspace.push(x);
    }
    Ok(SymbolicSolution { particular, nullspace, rank: pivots.len() })
}

fn clean(probe: &Probe, e: GradedExpr) -> GradedExpr {
    if !e.is_zero() && probe.is_zero(&e) {
        GradedExpr::zero(e.chart())
    } else {
        e
    }
}
