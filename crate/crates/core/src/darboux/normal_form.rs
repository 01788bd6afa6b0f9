//! Canonical Darboux expressions, the one-form construction on top of a
//! chart in which `dα` is already canonical, and certificate checks for
//! candidate Darboux charts.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::cartan::{exterior_d, pullback, ChartMap};
use crate::grexpr::{
    apply_func, equal, eval_body, partial, substitute, ChartSpec, Coeff, CoordinateDecl, Degree, EqualPolicy,
    EqualityReport, Func, GradedExpr, Parity, Weight,
};
use crate::homogeneity::{degree_of, Tensor, WeightVectorField};
use crate::linalg::rationalize;
use crate::pfaffian::{characteristic_class, flat_matrix, ClassCase, SampleOptions};

use super::poincare::closed_primitive;
use super::DarbouxError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// `dz + Σ p dq + Σ ε y dy`
    Contact,
    /// `dz/z + Σ p dq + Σ ε y dy`
    ContactLog,
    /// `Σ p dq + Σ ε y dy`
    Potential,
    /// The 2-form `Σ dp∧dq + Σ ε dy∧dy`.
    Presymplectic,
}

impl Variant {
    pub fn has_z(self) -> bool {
        matches!(self, Variant::Contact | Variant::ContactLog)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Contact => "contact",
            Variant::ContactLog => "contact-log",
            Variant::Potential => "potential",
            Variant::Presymplectic => "presymplectic",
        })
    }
}

/// Shape of a normal form. Target charts list `q1..qr, p1..pr`, then `z`
/// for the contact variants, then `y1..ys`, then `k` residual coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalFormSpec {
    pub variant: Variant,
    pub r: usize,
    pub s: usize,
    pub eps: Vec<i8>,
    pub k: usize,
}

impl NormalFormSpec {
    pub fn dim(&self) -> usize {
        2 * self.r + usize::from(self.variant.has_z()) + self.s + self.k
    }

    pub fn z_index(&self) -> Option<usize> {
        self.variant.has_z().then_some(2 * self.r)
    }

    pub fn y_index(&self, l: usize) -> usize {
        2 * self.r + usize::from(self.variant.has_z()) + l
    }

    pub fn rest(&self) -> std::ops::Range<usize> {
        self.y_index(self.s)..self.dim()
    }

    pub fn canonical(&self, chart: &Arc<ChartSpec>) -> Result<GradedExpr, DarbouxError> {
        canonical_form(self, chart)
    }
}

impl fmt::Display for NormalFormSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (r = {}, s = {}, eps = {:?}, k = {})", self.variant, self.r, self.s, self.eps, self.k)
    }
}

/// The canonical expression of `spec` in the coordinates of `chart`.
pub fn canonical_form(spec: &NormalFormSpec, chart: &Arc<ChartSpec>) -> Result<GradedExpr, DarbouxError> {
    if chart.dim() != spec.dim() || spec.eps.len() != spec.s {
        return Err(DarbouxError::ChartMismatch(format!("{spec} does not fit a chart of dimension {}", chart.dim())));
    }
    let bad = |i: usize, want: Parity| chart.parity(i) != want;
    if (0..2 * spec.r).any(|i| bad(i, Parity::Even))
        || spec.z_index().is_some_and(|z| bad(z, Parity::Even))
        || (0..spec.s).any(|l| bad(spec.y_index(l), Parity::Odd))
    {
        return Err(DarbouxError::ChartMismatch("q, p and z must be even, y odd".into()));
    }
    let x = |i: usize| GradedExpr::coordinate(chart, i);
    let dx = |i: usize| GradedExpr::differential(chart, i);
    let two_form = spec.variant == Variant::Presymplectic;
    let mut out = GradedExpr::zero(chart);
    for i in 0..spec.r {
        let (q, p) = (i, spec.r + i);
        let term = if two_form { &dx(p) * &dx(q) } else { &x(p) * &dx(q) };
        out = &out + &term;
    }
    for (l, e) in spec.eps.iter().enumerate() {
        let y = spec.y_index(l);
        let term = if two_form { &dx(y) * &dx(y) } else { &x(y) * &dx(y) };
        out = &out + &term.scale(&Coeff::int(*e as i64));
    }
    match (spec.variant, spec.z_index()) {
        (Variant::Contact, Some(z)) => out = &out + &dx(z),
        (Variant::ContactLog, Some(z)) => out = &out + &crate::grexpr::gdiv(&dx(z), &x(z))?,
        _ => {}
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoordinateCheck {
    pub name: String,
    pub declared: Weight,
    pub found: Option<Degree>,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormalFormReport {
    pub passed: bool,
    pub pullback: EqualityReport,
    pub coordinates: Vec<CoordinateCheck>,
    /// Degree of the input form under `∇`.
    pub form_degree: Option<Degree>,
    /// Violations of the weight relations between the new coordinates.
    pub weight_issues: Vec<String>,
}

/// Checks a candidate chart: the canonical form pulls back to `alpha`,
/// every new coordinate is homogeneous of its declared weight, and the
/// declared weights fit the weight of `alpha`.
pub fn verify_normal_form(
    alpha: &GradedExpr,
    phi: &ChartMap,
    spec: &NormalFormSpec,
    nabla: &WeightVectorField,
    policy: &EqualPolicy,
) -> Result<NormalFormReport, DarbouxError> {
    let target = phi.target();
    let canonical = canonical_form(spec, target)?;
    let pulled = pullback(phi, &canonical)?;
    let pb = equal(&pulled, alpha, policy);

    let mut coordinates = Vec::new();
    for (i, img) in phi.images().iter().enumerate() {
        let report = degree_of(&Tensor::Form(img.clone()), nabla, policy)?;
        let declared = target.weight(i).clone();
        let found = report.degree.filter(|_| report.homogeneous);
        let ok = found.as_ref().is_some_and(|d| d.weight == declared && d.parity == target.parity(i));
        coordinates.push(CoordinateCheck { name: target.coord(i).name.clone(), declared, found, ok });
    }

    let form = degree_of(&Tensor::Form(alpha.clone()), nabla, policy)?;
    let form_degree = form.degree.clone().filter(|_| form.homogeneous);
    let mut weight_issues = Vec::new();
    match &form_degree {
        None => weight_issues.push("form is not homogeneous".to_string()),
        Some(d) => {
            let w = &d.weight;
            let name = |i: usize| target.coord(i).name.clone();
            for i in 0..spec.r {
                let sum = target.weight(i) + target.weight(spec.r + i);
                if &sum != w {
                    weight_issues.push(format!("w({}) + w({}) = {sum}, expected {w}", name(spec.r + i), name(i)));
                }
            }
            for l in 0..spec.s {
                let y = spec.y_index(l);
                let twice = target.weight(y) + target.weight(y);
                if &twice != w {
                    weight_issues.push(format!("2 w({}) = {twice}, expected {w}", name(y)));
                }
            }
            match (spec.variant, spec.z_index()) {
                (Variant::Contact, Some(z)) if target.weight(z) != w => {
                    weight_issues.push(format!("w({}) = {}, expected {w}", name(z), target.weight(z)));
                }
                (Variant::ContactLog, _) if !w.is_zero() => weight_issues.push(format!("log-contact form has weight {w}")),
                _ => {}
            }
        }
    }
    let passed = pb.equal && coordinates.iter().all(|c| c.ok) && weight_issues.is_empty();
    Ok(NormalFormReport { passed, pullback: pb, coordinates, form_degree, weight_issues })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DarbouxResult {
    pub map: ChartMap,
    pub spec: NormalFormSpec,
    pub report: NormalFormReport,
}

fn body_of_field(nabla: &WeightVectorField, x0: &[f64]) -> Result<Vec<f64>, DarbouxError> {
    let chart = nabla.chart();
    (0..chart.dim())
        .map(|i| if chart.parity(i).is_odd() { Ok(0.0) } else { Ok(eval_body(nabla.field().coeff(i), x0)?) })
        .collect()
}

/// `Some(∇(x0))` when `∇(x0) ≠ 0` lies in the characteristic distribution
/// of `alpha`, the configuration in which no homogeneous Darboux chart is
/// guaranteed.
pub fn obstruction_at(alpha: &GradedExpr, nabla: &WeightVectorField, x0: &[f64]) -> Result<Option<Vec<f64>>, DarbouxError> {
    let v = body_of_field(nabla, x0)?;
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale < 1e-12 {
        return Ok(None);
    }
    let fm = flat_matrix(alpha, x0)?;
    let row = fm.alpha_row.as_ref().ok_or(DarbouxError::FormDegree(1))?;
    let tol = 1e-9 * scale * fm.matrix.amax().max(row.iter().fold(1.0f64, |m, x| m.max(x.abs())));
    let pairing: f64 = v.iter().zip(row).map(|(a, b)| a * b).sum();
    let flat = DMatrix::from_row_slice(1, v.len(), &v) * &fm.matrix;
    Ok((pairing.abs() <= tol && flat.amax() <= tol).then_some(v))
}

fn to_source(e: &GradedExpr, phi: &ChartMap) -> Result<GradedExpr, DarbouxError> {
    let diffs: Vec<GradedExpr> = phi.images().iter().map(exterior_d).collect();
    Ok(substitute(e, phi.images(), &diffs)?)
}

fn weight_of_value(v: f64) -> Result<Weight, DarbouxError> {
    rationalize(v, 1000)
        .filter(|r| (crate::grexpr::rational_to_f64(r) - v).abs() < 1e-9)
        .map(Weight)
        .ok_or_else(|| DarbouxError::NotConstant(format!("weight {v} is not a small rational")))
}

/// Homogeneous Darboux chart of a regular one-form, given a chart map
/// `presymp` (with normal form `dspec`) in which `dα` is canonical.
pub fn one_form_darboux(
    alpha: &GradedExpr,
    presymp: &ChartMap,
    dspec: &NormalFormSpec,
    nabla: &WeightVectorField,
    x0: &[f64],
    policy: &EqualPolicy,
) -> Result<DarbouxResult, DarbouxError> {
    let chart = alpha.chart().clone();
    let n = chart.dim();
    if !alpha.has_form_degree(1) {
        return Err(DarbouxError::FormDegree(1));
    }
    if alpha.parity() != Some(Parity::Even) {
        return Err(DarbouxError::OddForm);
    }
    if presymp.source() != &chart || dspec.variant != Variant::Presymplectic || dspec.dim() != presymp.target().dim() {
        return Err(DarbouxError::ChartMismatch("expected a presymplectic chart map on the chart of the form".into()));
    }
    let degree = degree_of(&Tensor::Form(alpha.clone()), nabla, policy)?;
    let w = match degree.degree {
        Some(d) if degree.homogeneous => d.weight,
        _ => return Err(DarbouxError::NotHomogeneous),
    };
    if let Some(v) = obstruction_at(alpha, nabla, x0)? {
        return Err(DarbouxError::NoHomogeneousChart(format!("{v:?}")));
    }

    let opts = SampleOptions { samples: policy.samples.min(16), seed: policy.seed, points: vec![x0.to_vec()], ..SampleOptions::default() };
    let class = characteristic_class(alpha, &opts)?;
    let case = match class.evidence.last().and_then(|e| e.case) {
        Some(c) => c,
        None => class.case.ok_or_else(|| DarbouxError::Irregular(class.kind.to_string()))?,
    };

    let images = presymp.images();
    let tw = presymp.target();
    let (r, s) = (dspec.r, dspec.s);
    let mut prime = alpha.clone();
    for i in 0..r {
        prime = &prime - &(&images[r + i] * &exterior_d(&images[i]));
    }
    for (l, e) in dspec.eps.iter().enumerate() {
        let y = &images[2 * r + l];
        prime = &prime - &(y * &exterior_d(y)).scale(&Coeff::int(*e as i64));
    }
    let dprime = exterior_d(&prime);
    if !equal(&dprime, &GradedExpr::zero(&chart), policy).equal {
        return Err(DarbouxError::NotClosed(dprime.to_string()));
    }
    let origin = vec![0.0; n];
    let decl = |i: usize| tw.coord(i).clone();

    let (spec, new_images, decls) = match case {
        ClassCase::Transversal | ClassCase::Closed => {
            let nabla_zero = body_of_field(nabla, x0)?.iter().all(|v| v.abs() < 1e-12);
            let (variant, z, z_weight) = if nabla_zero || !w.is_zero() {
                (Variant::Contact, closed_primitive(&prime, &origin)?, w.clone())
            } else {
                let f = closed_primitive(&prime, x0)?;
                let nf = nabla.field().apply(&f);
                let v = match nf.as_constant() {
                    Some(c) => c.to_f64(),
                    None => eval_body(&nf, x0)?,
                };
                let weight = weight_of_value(v)?;
                if !equal(&nf, &GradedExpr::constant(&chart, Coeff::Exact(weight.0.clone())), policy).equal {
                    return Err(DarbouxError::NotConstant(nf.to_string()));
                }
                (Variant::ContactLog, apply_func(Func::Exp, &f)?, weight)
            };
            // replace the residual coordinate that keeps the Jacobian best conditioned
            let rest: Vec<usize> = (2 * r + s..n).filter(|&i| !tw.parity(i).is_odd()).collect();
            let mut best: Option<(usize, f64)> = None;
            for &cand in &rest {
                let mut imgs: Vec<GradedExpr> = images.to_vec();
                imgs[cand] = z.clone();
                let det = even_jacobian(&imgs, &chart, tw, x0)?.determinant().abs();
                if best.is_none_or(|(_, b)| det > b) {
                    best = Some((cand, det));
                }
            }
            let Some((replaced, _)) = best.filter(|(_, d)| *d > 1e-12) else {
                return Err(DarbouxError::ConstructionFailed("no residual coordinate can be replaced by z".into()));
            };
            let mut imgs = Vec::new();
            let mut decls = Vec::new();
            for i in 0..2 * r {
                imgs.push(images[i].clone());
                decls.push(decl(i));
            }
            let z_name = if tw.coord(replaced).name == "z" || tw.index_of("z").is_none() { "z".to_string() } else { "z_".to_string() };
            imgs.push(z);
            decls.push(CoordinateDecl::new(z_name, Parity::Even, z_weight));
            for i in 2 * r..n {
                if i != replaced {
                    imgs.push(images[i].clone());
                    decls.push(decl(i));
                }
            }
            let spec = NormalFormSpec { variant, r, s, eps: dspec.eps.clone(), k: dspec.k - 1 };
            (spec, imgs, decls)
        }
        ClassCase::Contained => {
            let g = closed_primitive(&prime, &origin)?;
            let mut imgs = images.to_vec();
            if !equal(&g, &GradedExpr::zero(&chart), policy).equal {
                let inverse = presymp.inverse().ok_or_else(|| {
                    DarbouxError::ConstructionFailed("the primitive of α' is nonzero and the chart has no inverse".into())
                })?;
                let inv_d: Vec<GradedExpr> = inverse.iter().map(exterior_d).collect();
                let big_g = substitute(&g, inverse, &inv_d)?;
                if (r..tw.dim()).any(|i| big_g.depends_on(i)) {
                    return Err(DarbouxError::ConstructionFailed(format!("primitive {big_g} of α' depends on more than q")));
                }
                for i in 0..r {
                    let shift = to_source(&partial(&big_g, i), presymp)?;
                    imgs[r + i] = &imgs[r + i] + &shift;
                }
            }
            let decls = (0..n).map(decl).collect();
            let spec = NormalFormSpec { variant: Variant::Potential, r, s, eps: dspec.eps.clone(), k: dspec.k };
            (spec, imgs, decls)
        }
    };
    let target = ChartSpec::new(decls)?;
    let map = ChartMap::new(&chart, &target, new_images, None)?;
    let report = verify_normal_form(alpha, &map, &spec, nabla, policy)?;
    Ok(DarbouxResult { map, spec, report })
}

fn even_jacobian(images: &[GradedExpr], chart: &Arc<ChartSpec>, target: &ChartSpec, x0: &[f64]) -> Result<DMatrix<f64>, DarbouxError> {
    let rows: Vec<usize> = (0..target.dim()).filter(|&i| !target.parity(i).is_odd()).collect();
    let cols: Vec<usize> = (0..chart.dim()).filter(|&j| !chart.parity(j).is_odd()).collect();
    let mut m = DMatrix::zeros(rows.len(), cols.len());
    for (a, &i) in rows.iter().enumerate() {
        for (b, &j) in cols.iter().enumerate() {
            m[(a, b)] = eval_body(&partial(&images[i], j), x0)?;
        }
    }
    Ok(m)
}
