//! Numeric evaluation of superfunctions in a finite Grassmann algebra.

use std::ops::{Add, Mul, Sub};

use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::chart::ChartSpec;
use super::coeff::Coeff;
use super::expr::{Atom, Func, GradedExpr, Monomial, Terms};
use super::ExprError;

/// Element of the exterior algebra on `m` generators θ_1..θ_m, stored by
/// blade bitmask.
#[derive(Debug, Clone, PartialEq)]
pub struct GrassmannValue {
    generators: usize,
    coeffs: Vec<f64>,
}

fn blade_sign(a: usize, b: usize) -> f64 {
    // Number of transpositions to merge blade a followed by blade b.
    let mut swaps = 0u32;
    let mut rest = a >> 1;
    while rest != 0 {
        swaps += (rest & b).count_ones();
        rest >>= 1;
    }
    if swaps.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

impl GrassmannValue {
    pub fn zero(generators: usize) -> GrassmannValue {
        GrassmannValue { generators, coeffs: vec![0.0; 1 << generators] }
    }

    pub fn scalar(generators: usize, v: f64) -> GrassmannValue {
        let mut g = GrassmannValue::zero(generators);
        g.coeffs[0] = v;
        g
    }

    pub fn generator(generators: usize, k: usize, scale: f64) -> GrassmannValue {
        let mut g = GrassmannValue::zero(generators);
        g.coeffs[1 << k] = scale;
        g
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    /// Coefficients indexed by blade bitmask (bit k set ⇔ θ_{k+1} present).
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, blade: usize) -> f64 {
        self.coeffs[blade]
    }

    pub fn body(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn soul(&self) -> GrassmannValue {
        let mut s = self.clone();
        s.coeffs[0] = 0.0;
        s
    }

    pub fn scale(&self, c: f64) -> GrassmannValue {
        GrassmannValue { generators: self.generators, coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|x| x.is_finite())
    }

    /// Σ_k c_k s^k for the nilpotent soul `s`, where `c_k` is supplied by
    /// `taylor(k)` (already divided by k!).
    fn series(&self, taylor: impl Fn(usize) -> f64) -> GrassmannValue {
        let soul = self.soul();
        let mut acc = GrassmannValue::scalar(self.generators, taylor(0));
        let mut power = GrassmannValue::scalar(self.generators, 1.0);
        for k in 1..=self.generators {
            power = &power * &soul;
            if power.max_abs() == 0.0 {
                break;
            }
            acc = &acc + &power.scale(taylor(k));
        }
        acc
    }

    pub fn inv(&self) -> Result<GrassmannValue, ExprError> {
        let b = self.body();
        if b == 0.0 || !b.is_finite() {
            return Err(ExprError::ZeroBody);
        }
        Ok(self.series(|k| if k % 2 == 0 { 1.0 } else { -1.0 } / b.powi(k as i32 + 1)))
    }

    pub fn powi(&self, k: i32) -> Result<GrassmannValue, ExprError> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut acc = GrassmannValue::scalar(self.generators, 1.0);
        for _ in 0..k.unsigned_abs() {
            acc = &acc * &base;
        }
        Ok(acc)
    }

    pub fn apply(&self, f: Func) -> Result<GrassmannValue, ExprError> {
        let b = self.body();
        let fact = |k: usize| (1..=k).map(|i| i as f64).product::<f64>();
        Ok(match f {
            Func::Sin => self.series(|k| (b + k as f64 * std::f64::consts::FRAC_PI_2).sin() / fact(k)),
            Func::Cos => self.series(|k| (b + k as f64 * std::f64::consts::FRAC_PI_2).cos() / fact(k)),
            Func::Exp => self.series(|k| b.exp() / fact(k)),
            Func::Sinh => self.series(|k| if k % 2 == 0 { b.sinh() } else { b.cosh() } / fact(k)),
            Func::Cosh => self.series(|k| if k % 2 == 0 { b.cosh() } else { b.sinh() } / fact(k)),
            Func::Log => {
                if b <= 0.0 {
                    return Err(ExprError::LogNonPositive);
                }
                self.series(|k| {
                    if k == 0 {
                        b.ln()
                    } else {
                        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                        sign / (k as f64 * b.powi(k as i32))
                    }
                })
            }
        })
    }
}

impl Add for &GrassmannValue {
    type Output = GrassmannValue;
    fn add(self, rhs: &GrassmannValue) -> GrassmannValue {
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect();
        GrassmannValue { generators: self.generators, coeffs }
    }
}

impl Sub for &GrassmannValue {
    type Output = GrassmannValue;
    fn sub(self, rhs: &GrassmannValue) -> GrassmannValue {
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect();
        GrassmannValue { generators: self.generators, coeffs }
    }
}

impl Mul for &GrassmannValue {
    type Output = GrassmannValue;
    fn mul(self, rhs: &GrassmannValue) -> GrassmannValue {
        let mut out = GrassmannValue::zero(self.generators);
        for (a, &x) in self.coeffs.iter().enumerate() {
            if x == 0.0 {
                continue;
            }
            for (b, &y) in rhs.coeffs.iter().enumerate() {
                if y == 0.0 || a & b != 0 {
                    continue;
                }
                out.coeffs[a | b] += blade_sign(a, b) * x * y;
            }
        }
        out
    }
}

/// Values for every coordinate of a chart; odd coordinates carry odd
/// Grassmann elements.
#[derive(Debug, Clone)]
pub struct EvalPoint {
    pub values: Vec<GrassmannValue>,
}

impl EvalPoint {
    /// Body point: even coordinates take the given reals (indexed by chart
    /// position), odd coordinates are zero.
    pub fn body(chart: &ChartSpec, values: &[f64]) -> EvalPoint {
        let m = chart.odd_dim();
        let values = (0..chart.dim())
            .map(|i| {
                if chart.parity(i).is_odd() {
                    GrassmannValue::zero(m)
                } else {
                    GrassmannValue::scalar(m, values[i])
                }
            })
            .collect();
        EvalPoint { values }
    }

    /// Even coordinates uniform in the chart boxes; the k-th odd coordinate
    /// is mapped to `c_k θ_k` with `c_k` uniform in [0.5, 1.5].
    pub fn random(chart: &ChartSpec, rng: &mut impl Rng) -> EvalPoint {
        let m = chart.odd_dim();
        let values = (0..chart.dim())
            .map(|i| match chart.odd_slot(i) {
                Some(k) => GrassmannValue::generator(m, k, rng.gen_range(0.5..1.5)),
                None => {
                    let (lo, hi) = chart.boxes()[i];
                    let v = if lo < hi { rng.gen_range(lo..hi) } else { lo };
                    GrassmannValue::scalar(m, v)
                }
            })
            .collect();
        EvalPoint { values }
    }

    pub fn seeded(chart: &ChartSpec, seed: u64) -> EvalPoint {
        EvalPoint::random(chart, &mut ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn body_values(&self) -> Vec<f64> {
        self.values.iter().map(GrassmannValue::body).collect()
    }
}

struct Evaluator<'a> {
    point: &'a EvalPoint,
    m: usize,
    cache: Vec<(&'a Atom, GrassmannValue)>,
}

impl<'a> Evaluator<'a> {
    fn terms(&mut self, terms: &'a Terms) -> Result<GrassmannValue, ExprError> {
        let mut acc = GrassmannValue::zero(self.m);
        for (mono, c) in terms {
            let v = self.term(mono, c)?;
            acc = &acc + &v;
        }
        Ok(acc)
    }

    fn term(&mut self, mono: &'a Monomial, c: &Coeff) -> Result<GrassmannValue, ExprError> {
        if mono.diffs.iter().any(|&d| d != 0) {
            return Err(ExprError::NotAFunction);
        }
        let mut v = GrassmannValue::scalar(self.m, c.to_f64());
        for (atom, e) in &mono.atoms {
            let a = self.atom(atom)?;
            v = &v * &a.powi(*e)?;
        }
        for (i, &p) in mono.powers.iter().enumerate() {
            if p != 0 {
                v = &v * &self.point.values[i].powi(p)?;
            }
        }
        Ok(v)
    }

    fn atom(&mut self, atom: &'a Atom) -> Result<GrassmannValue, ExprError> {
        if let Some((_, v)) = self.cache.iter().find(|(a, _)| *a == atom) {
            return Ok(v.clone());
        }
        let v = match atom {
            Atom::Func(f, t) => self.terms(t)?.apply(*f)?,
            Atom::Group(t) => self.terms(t)?,
        };
        self.cache.push((atom, v.clone()));
        Ok(v)
    }
}

/// Evaluates a function (form degree 0) at a Grassmann point.
pub fn eval_numeric(a: &GradedExpr, point: &EvalPoint) -> Result<GrassmannValue, ExprError> {
    let m = point.values.first().map_or(0, GrassmannValue::generators);
    let mut ev = Evaluator { point, m, cache: Vec::new() };
    ev.terms(a.terms())
}

/// Value together with the magnitude scale Σ |term value|, used for
/// relative comparisons that survive cancellation.
pub(crate) fn eval_with_scale(a: &GradedExpr, point: &EvalPoint) -> Result<(GrassmannValue, f64), ExprError> {
    let m = point.values.first().map_or(0, GrassmannValue::generators);
    let mut ev = Evaluator { point, m, cache: Vec::new() };
    let mut acc = GrassmannValue::zero(m);
    let mut scale = 0.0;
    for (mono, c) in a.terms() {
        let v = ev.term(mono, c)?;
        scale += v.max_abs();
        acc = &acc + &v;
    }
    Ok((acc, scale))
}

/// Exact body value of a Laurent polynomial with rational coefficients at a
/// rational point. `None` for transcendental or float data, or a pole.
pub fn eval_body_exact(a: &GradedExpr, values: &[BigRational]) -> Option<BigRational> {
    let chart = a.chart();
    let mut acc = BigRational::zero();
    'term: for (mono, c) in a.terms() {
        if !mono.atoms.is_empty() || mono.diffs.iter().any(|&d| d != 0) {
            return None;
        }
        let mut v = c.as_exact()?.clone();
        for (i, &p) in mono.powers.iter().enumerate() {
            if p == 0 {
                continue;
            }
            if chart.parity(i).is_odd() {
                continue 'term;
            }
            if p < 0 && values[i].is_zero() {
                return None;
            }
            v *= num_traits::pow::Pow::pow(&values[i], p);
        }
        acc += v;
    }
    Some(acc)
}

/// Body value of a function at a body point (odd coordinates set to zero).
pub fn eval_body(a: &GradedExpr, values: &[f64]) -> Result<f64, ExprError> {
    fn terms(chart: &ChartSpec, t: &Terms, values: &[f64]) -> Result<f64, ExprError> {
        let mut acc = 0.0;
        'term: for (mono, c) in t {
            if mono.diffs.iter().any(|&d| d != 0) {
                return Err(ExprError::NotAFunction);
            }
            let mut v = c.to_f64();
            for (i, &p) in mono.powers.iter().enumerate() {
                if p == 0 {
                    continue;
                }
                if chart.parity(i).is_odd() {
                    continue 'term;
                }
                if p < 0 && values[i] == 0.0 {
                    return Err(ExprError::ZeroBody);
                }
                v *= values[i].powi(p);
            }
            for (atom, e) in &mono.atoms {
                let x = match atom {
                    Atom::Func(f, u) => {
                        let arg = terms(chart, u, values)?;
                        if *f == Func::Log && arg <= 0.0 {
                            return Err(ExprError::LogNonPositive);
                        }
                        f.eval(arg)
                    }
                    Atom::Group(u) => terms(chart, u, values)?,
                };
                if *e < 0 && x == 0.0 {
                    return Err(ExprError::ZeroBody);
                }
                v *= x.powi(*e);
            }
            acc += v;
        }
        Ok(acc)
    }
    terms(a.chart(), a.terms(), values)
}
