//! Equality of expressions: exact for exact polynomials, randomized
//! identity testing over Grassmann points otherwise.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::eval::{eval_with_scale, EvalPoint};
use super::expr::GradedExpr;

#[derive(Debug, Clone, PartialEq)]
pub struct EqualPolicy {
    pub samples: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for EqualPolicy {
    fn default() -> Self {
        EqualPolicy { samples: 32, tol: 1e-9, seed: 0 }
    }
}

impl EqualPolicy {
    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EqualityMode {
    Exact,
    Randomized,
}

impl fmt::Display for EqualityMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EqualityMode::Exact => write!(f, "exact"),
            EqualityMode::Randomized => write!(f, "randomized"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EqualityReport {
    pub equal: bool,
    pub mode: EqualityMode,
    /// Body coordinates of a point where the two sides differ.
    pub witness: Option<Vec<f64>>,
    /// Largest relative deviation seen over the valid samples.
    pub residual: f64,
    pub samples: usize,
    /// Too few sample points could be evaluated to decide.
    pub indeterminate: bool,
}

/// Compares two expressions over the same chart.
pub fn equal(a: &GradedExpr, b: &GradedExpr, policy: &EqualPolicy) -> EqualityReport {
    let mut report =
        EqualityReport { equal: false, mode: EqualityMode::Exact, witness: None, residual: 0.0, samples: 0, indeterminate: false };
    let Ok(diff) = a.try_sub(b) else {
        return report;
    };
    if diff.is_zero() {
        report.equal = true;
        return report;
    }
    if diff.is_polynomial() && diff.is_exact() {
        report.residual = f64::INFINITY;
        let mut rng = ChaCha8Rng::seed_from_u64(policy.seed);
        report.witness = Some(EvalPoint::random(a.chart(), &mut rng).body_values());
        return report;
    }
    randomized(a, b, policy)
}

/// Randomized identity test only, skipping the exact shortcut.
pub fn equal_randomized(a: &GradedExpr, b: &GradedExpr, policy: &EqualPolicy) -> EqualityReport {
    randomized(a, b, policy)
}

fn randomized(a: &GradedExpr, b: &GradedExpr, policy: &EqualPolicy) -> EqualityReport {
    let mut report = EqualityReport {
        equal: true,
        mode: EqualityMode::Randomized,
        witness: None,
        residual: 0.0,
        samples: 0,
        indeterminate: false,
    };
    let chart = a.chart();
    let ca = a.components();
    let cb = b.components();
    let mut keys: Vec<_> = ca.keys().chain(cb.keys()).cloned().collect();
    keys.sort();
    keys.dedup();
    let zero = GradedExpr::zero(chart);
    let mut rng = ChaCha8Rng::seed_from_u64(policy.seed);
    let mut attempts = 0;
    while report.samples < policy.samples && attempts < 4 * policy.samples.max(1) {
        attempts += 1;
        let point = EvalPoint::random(chart, &mut rng);
        let mut values = Vec::with_capacity(keys.len());
        let mut ok = true;
        for k in &keys {
            let fa = ca.get(k).unwrap_or(&zero);
            let fb = cb.get(k).unwrap_or(&zero);
            match (eval_with_scale(fa, &point), eval_with_scale(fb, &point)) {
                (Ok(va), Ok(vb)) if va.0.is_finite() && vb.0.is_finite() => values.push((va, vb)),
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        report.samples += 1;
        for ((va, sa), (vb, sb)) in values {
            let dev = (&va - &vb).max_abs();
            let scale = sa.max(sb);
            let rel = if dev == 0.0 { 0.0 } else { dev / scale.max(f64::MIN_POSITIVE) };
            if rel > report.residual {
                report.residual = rel;
            }
            if rel > policy.tol && report.witness.is_none() {
                report.equal = false;
                report.witness = Some(point.body_values());
            }
        }
    }
    if report.samples * 2 < policy.samples {
        report.indeterminate = true;
        report.equal = false;
    }
    report
}
