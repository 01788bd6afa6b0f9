//! Simultaneous straightening of commuting vector fields by composing their
//! flows, with a finite-difference certificate.

use std::fmt::Write as _;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::cartan::{lie_bracket, VectorField};
use crate::grexpr::{equal, eval_body, ChartSpec, EqualPolicy};

use super::DarbouxError;

#[derive(Debug, Clone, PartialEq)]
pub struct GridOptions {
    /// Largest RK4 step.
    pub step: f64,
    /// Half-width of the parameter box around the base point.
    pub half_width: f64,
    /// Nodes per axis (at least 2).
    pub nodes: usize,
    /// Central-difference increment.
    pub delta: f64,
    pub tol: f64,
}

impl Default for GridOptions {
    fn default() -> Self {
        GridOptions { step: 1e-3, half_width: 0.5, nodes: 3, delta: 1e-4, tol: 1e-6 }
    }
}

/// Parameters `t` of the new coordinates on a regular grid, the old
/// coordinates `x = Φ(t)` and the Jacobians `∂Φ/∂t` at each node.
#[derive(Debug, Clone, PartialEq)]
pub struct StraighteningGrid {
    pub base: Vec<f64>,
    pub spacing: f64,
    pub step: f64,
    /// Coordinate directions completing the fields to a frame at the base.
    pub slice: Vec<usize>,
    pub params: Vec<Vec<f64>>,
    pub points: Vec<Vec<f64>>,
    pub jacobians: Vec<DMatrix<f64>>,
    /// Max over nodes and fields of `|J⁻¹ X_i − e_i|∞`.
    pub max_error: f64,
    pub certified: bool,
}

struct Field {
    chart: Arc<ChartSpec>,
    coeffs: Vec<crate::grexpr::GradedExpr>,
}

impl Field {
    fn at(&self, x: &[f64]) -> Result<DVector<f64>, DarbouxError> {
        let v: Result<Vec<f64>, _> = self.coeffs.iter().map(|c| eval_body(c, x)).collect();
        Ok(DVector::from_vec(v?))
    }
}

fn in_box(chart: &ChartSpec, x: &[f64]) -> bool {
    x.iter().zip(chart.boxes()).all(|(v, (lo, hi))| v.is_finite() && *v >= lo - 1e-12 && *v <= hi + 1e-12)
}

/// Flow of `f` for time `t`, with equal RK4 steps no longer than `h`.
fn flow(f: &Field, x: &[f64], t: f64, h: f64) -> Result<Vec<f64>, DarbouxError> {
    let steps = (t.abs() / h).ceil().max(1.0) as usize;
    let dt = t / steps as f64;
    let mut y = DVector::from_column_slice(x);
    for _ in 0..steps {
        let k1 = f.at(y.as_slice())?;
        let k2 = f.at((&y + &k1 * (dt / 2.0)).as_slice())?;
        let k3 = f.at((&y + &k2 * (dt / 2.0)).as_slice())?;
        let k4 = f.at((&y + &k3 * dt).as_slice())?;
        y += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
        if !in_box(&f.chart, y.as_slice()) {
            return Err(DarbouxError::LeftBox(y.as_slice().to_vec()));
        }
    }
    Ok(y.as_slice().to_vec())
}

struct Frame<'a> {
    fields: &'a [Field],
    base: &'a [f64],
    slice: &'a [usize],
    step: f64,
}

impl Frame<'_> {
    /// `Φ(t) = Fl¹_{t1} ∘ … ∘ Flᵏ_{tk}(base + Σ_j t_{k+j} e_{slice j})`.
    fn map(&self, t: &[f64]) -> Result<Vec<f64>, DarbouxError> {
        let k = self.fields.len();
        let mut x = self.base.to_vec();
        for (j, &axis) in self.slice.iter().enumerate() {
            x[axis] += t[k + j];
        }
        for i in (0..k).rev() {
            x = flow(&self.fields[i], &x, t[i], self.step)?;
        }
        Ok(x)
    }
}

/// Coordinates `t` in which the given commuting, independent fields read
/// `X_i = ∂/∂t^i`, sampled on a grid around `base`.
pub fn straighten_commuting(fields: &[VectorField], base: &[f64], opts: &GridOptions) -> Result<StraighteningGrid, DarbouxError> {
    let chart = fields.first().map(|f| f.chart().clone()).ok_or(DarbouxError::Singular)?;
    let n = chart.dim();
    if chart.odd_dim() > 0 || fields.iter().any(|f| f.parity().is_odd() || f.chart() != &chart) {
        return Err(DarbouxError::NotEven);
    }
    for i in 0..fields.len() {
        for j in i + 1..fields.len() {
            let b = lie_bracket(&fields[i], &fields[j])?;
            if !b.coeffs().iter().all(|c| equal(c, &crate::grexpr::GradedExpr::zero(&chart), &EqualPolicy::default()).equal) {
                return Err(DarbouxError::NotCommuting(i, j));
            }
        }
    }
    let fs: Vec<Field> = fields.iter().map(|f| Field { chart: chart.clone(), coeffs: f.coeffs().to_vec() }).collect();
    let k = fs.len();
    let at_base: Vec<DVector<f64>> = fs.iter().map(|f| f.at(base)).collect::<Result<_, _>>()?;

    // greedily complete the fields to a frame with coordinate axes
    let mut frame: Vec<DVector<f64>> = at_base.clone();
    let mut slice = Vec::new();
    let rank = |cols: &[DVector<f64>]| crate::linalg::rank_svd(&DMatrix::from_columns(cols), 1e-10);
    if rank(&frame) < k {
        return Err(DarbouxError::Singular);
    }
    for axis in 0..n {
        if frame.len() == n {
            break;
        }
        let mut trial = frame.clone();
        trial.push(DVector::from_fn(n, |r, _| if r == axis { 1.0 } else { 0.0 }));
        if rank(&trial) == trial.len() {
            frame = trial;
            slice.push(axis);
        }
    }

    let axis_values: Vec<f64> = if opts.nodes < 2 {
        vec![0.0]
    } else {
        (0..opts.nodes).map(|i| -opts.half_width + 2.0 * opts.half_width * i as f64 / (opts.nodes - 1) as f64).collect()
    };
    let spacing = if opts.nodes < 2 { 0.0 } else { 2.0 * opts.half_width / (opts.nodes - 1) as f64 };
    let mut params = vec![vec![]];
    for _ in 0..n {
        params = params.into_iter().flat_map(|p: Vec<f64>| axis_values.iter().map(move |&v| [p.clone(), vec![v]].concat())).collect();
    }

    let phi = Frame { fields: &fs, base, slice: &slice, step: opts.step };
    let nodes: Vec<Result<(Vec<f64>, DMatrix<f64>, f64), DarbouxError>> = params
        .par_iter()
        .map(|t| {
            let x = phi.map(t)?;
            let mut jac = DMatrix::zeros(n, n);
            for c in 0..n {
                let mut tp = t.clone();
                let mut tm = t.clone();
                tp[c] += opts.delta;
                tm[c] -= opts.delta;
                let (xp, xm) = (phi.map(&tp)?, phi.map(&tm)?);
                for r in 0..n {
                    jac[(r, c)] = (xp[r] - xm[r]) / (2.0 * opts.delta);
                }
            }
            let lu = jac.clone().lu();
            let mut err: f64 = 0.0;
            for (i, f) in fs.iter().enumerate() {
                let pushed = lu.solve(&f.at(&x)?).ok_or(DarbouxError::Singular)?;
                for r in 0..n {
                    let target = if r == i { 1.0 } else { 0.0 };
                    err = err.max((pushed[r] - target).abs());
                }
            }
            Ok((x, jac, err))
        })
        .collect();
    let mut points = Vec::new();
    let mut jacobians = Vec::new();
    let mut max_error: f64 = 0.0;
    for node in nodes {
        let (x, j, e) = node?;
        points.push(x);
        jacobians.push(j);
        max_error = max_error.max(e);
    }
    Ok(StraighteningGrid {
        base: base.to_vec(),
        spacing,
        step: opts.step,
        slice,
        params,
        points,
        jacobians,
        max_error,
        certified: max_error < opts.tol,
    })
}

impl StraighteningGrid {
    /// One row per node: old coordinates, then the straightened ones.
    pub fn to_csv(&self, chart: &ChartSpec) -> String {
        let mut out = String::new();
        let base: Vec<String> = self.base.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "# base = ({}), spacing = {}, rk4 step = {}", base.join(", "), self.spacing, self.step);
        let names = chart.names();
        let header: Vec<String> =
            names.iter().map(|s| s.to_string()).chain((1..=names.len()).map(|i| format!("t{i}"))).collect();
        let _ = writeln!(out, "{}", header.join(","));
        for (x, t) in self.points.iter().zip(&self.params) {
            let row: Vec<String> = x.iter().chain(t).map(|v| format!("{v:.12e}")).collect();
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }
}
