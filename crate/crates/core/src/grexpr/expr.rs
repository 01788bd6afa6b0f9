//! Canonical sums of monomials in the bigraded algebra generated by the
//! coordinates of a chart and their differentials.
//!
//! Every generator carries a bidegree `(form degree, parity)`:
//!
//! | generator | bidegree |
//! |-----------|----------|
//! | even `x`  | (0, 0)   |
//! | odd `ξ`   | (0, 1)   |
//! | `d(x)`    | (1, 0)   |
//! | `d(ξ)`    | (1, 1)   |
//!
//! and swapping adjacent factors of bidegrees `(p, σ)` and `(q, τ)` costs the
//! sign `(-1)^(pq + στ)`. A monomial stores its factors in the fixed order
//! `atoms · x_1^a_1 ⋯ x_n^a_n · d(x_1)^b_1 ⋯ d(x_n)^b_n`; transcendental atoms
//! are even functions, so they commute with everything. Generators that
//! anticommute with themselves (odd coordinates, differentials of even
//! coordinates) appear at most once.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use super::chart::{ChartSpec, Parity};
use super::coeff::Coeff;
use super::ExprError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sinh,
    Cosh,
}

impl Func {
    pub const ALL: [Func; 6] = [Func::Sin, Func::Cos, Func::Exp, Func::Log, Func::Sinh, Func::Cosh];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    pub fn eval(self, x: f64) -> f64 {
        match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Exp => x.exp(),
            Func::Log => x.ln(),
            Func::Sinh => x.sinh(),
            Func::Cosh => x.cosh(),
        }
    }
}

pub(crate) type Terms = BTreeMap<Monomial, Coeff>;

/// Even, form-degree-0 factor that is not a coordinate power.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum Atom {
    Func(Func, Terms),
    /// A parenthesized sum; only ever stored with a negative exponent
    /// (positive powers are expanded).
    Group(Terms),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) struct Monomial {
    pub diffs: Vec<u32>,
    pub powers: Vec<i32>,
    pub atoms: Vec<(Atom, i32)>,
}

impl Monomial {
    pub fn one(n: usize) -> Monomial {
        Monomial { diffs: vec![0; n], powers: vec![0; n], atoms: Vec::new() }
    }

    pub fn form_degree(&self) -> u32 {
        self.diffs.iter().sum()
    }

    pub fn parity(&self, chart: &ChartSpec) -> Parity {
        let mut bit = 0u32;
        for i in 0..self.powers.len() {
            if chart.parity(i).is_odd() {
                bit += self.powers[i].unsigned_abs() + self.diffs[i];
            }
        }
        Parity::from_bit(bit)
    }

    pub fn is_polynomial(&self) -> bool {
        self.atoms.is_empty() && self.powers.iter().all(|&p| p >= 0)
    }

    pub fn is_unit(&self) -> bool {
        self.atoms.is_empty() && self.powers.iter().all(|&p| p == 0) && self.diffs.iter().all(|&d| d == 0)
    }

    /// Bidegree of the factor block at canonical position `pos`
    /// (coordinates occupy `0..n`, differentials `n..2n`).
    fn block_bidegree(&self, chart: &ChartSpec, pos: usize) -> (u32, u32) {
        let n = self.powers.len();
        if pos < n {
            let sigma = chart.parity(pos).bit();
            (0, (self.powers[pos].rem_euclid(2) as u32) * sigma)
        } else {
            let i = pos - n;
            let b = self.diffs[i];
            (b, b * chart.parity(i).bit())
        }
    }

    pub fn bidegree(&self, chart: &ChartSpec) -> (u32, u32) {
        let mut p = 0;
        let mut s = 0;
        for pos in 0..2 * self.powers.len() {
            let (bp, bs) = self.block_bidegree(chart, pos);
            p += bp;
            s += bs;
        }
        (p, s % 2)
    }
}

fn merge_atoms(a: &[(Atom, i32)], b: &[(Atom, i32)]) -> Vec<(Atom, i32)> {
    let mut out: Vec<(Atom, i32)> = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i].clone());
            i += 1;
        } else if take_b {
            out.push(b[j].clone());
            j += 1;
        } else {
            let e = a[i].1 + b[j].1;
            if e != 0 {
                out.push((a[i].0.clone(), e));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Product of two monomials. Returns `None` when a square-zero generator
/// repeats; otherwise the canonical monomial and whether the Koszul
/// reordering sign is negative.
pub(crate) fn mul_monomials(chart: &ChartSpec, a: &Monomial, b: &Monomial) -> Option<(Monomial, bool)> {
    let n = chart.dim();
    // Suffix sums over a's blocks of form degree and parity (mod 2).
    let mut suffix_p = vec![0u32; 2 * n + 1];
    let mut suffix_s = vec![0u32; 2 * n + 1];
    for pos in (0..2 * n).rev() {
        let (p, s) = a.block_bidegree(chart, pos);
        suffix_p[pos] = (suffix_p[pos + 1] + p) % 2;
        suffix_s[pos] = (suffix_s[pos + 1] + s) % 2;
    }
    let mut exponent = 0u32;
    for pos in 0..2 * n {
        let (p, s) = b.block_bidegree(chart, pos);
        if p == 0 && s == 0 {
            continue;
        }
        exponent += p * suffix_p[pos + 1] + s * suffix_s[pos + 1];
    }

    let mut powers = vec![0i32; n];
    let mut diffs = vec![0u32; n];
    for i in 0..n {
        let odd = chart.parity(i).is_odd();
        powers[i] = a.powers[i] + b.powers[i];
        if odd && powers[i] >= 2 {
            return None;
        }
        diffs[i] = a.diffs[i] + b.diffs[i];
        if !odd && diffs[i] >= 2 {
            return None;
        }
    }
    let atoms = if b.atoms.is_empty() {
        a.atoms.clone()
    } else if a.atoms.is_empty() {
        b.atoms.clone()
    } else {
        merge_atoms(&a.atoms, &b.atoms)
    };
    Some((Monomial { diffs, powers, atoms }, exponent % 2 == 1))
}

pub(crate) fn add_term(terms: &mut Terms, mono: Monomial, coeff: Coeff) {
    if coeff.is_zero() {
        return;
    }
    match terms.get_mut(&mono) {
        Some(existing) => {
            let sum = existing.add(&coeff);
            if sum.is_zero() {
                terms.remove(&mono);
            } else {
                *existing = sum;
            }
        }
        None => {
            terms.insert(mono, coeff);
        }
    }
}

/// An element of the bigraded algebra over a chart, kept in canonical form.
#[derive(Clone)]
pub struct GradedExpr {
    chart: Arc<ChartSpec>,
    terms: Terms,
}

impl std::fmt::Debug for GradedExpr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "GradedExpr({self})")
    }
}

impl PartialEq for GradedExpr {
    /// Structural equality of canonical forms; see [`super::equal`] for
    /// equality as functions.
    fn eq(&self, other: &Self) -> bool {
        self.same_chart(other) && self.terms == other.terms
    }
}

impl GradedExpr {
    pub(crate) fn from_terms(chart: Arc<ChartSpec>, terms: Terms) -> GradedExpr {
        let terms = terms.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        GradedExpr { chart, terms }
    }

    pub(crate) fn single(chart: &Arc<ChartSpec>, mono: Monomial, coeff: Coeff) -> GradedExpr {
        let mut terms = Terms::new();
        add_term(&mut terms, mono, coeff);
        GradedExpr { chart: chart.clone(), terms }
    }

    pub fn zero(chart: &Arc<ChartSpec>) -> GradedExpr {
        GradedExpr { chart: chart.clone(), terms: Terms::new() }
    }

    pub fn one(chart: &Arc<ChartSpec>) -> GradedExpr {
        GradedExpr::constant(chart, Coeff::one())
    }

    pub fn constant(chart: &Arc<ChartSpec>, c: impl Into<Coeff>) -> GradedExpr {
        GradedExpr::single(chart, Monomial::one(chart.dim()), c.into())
    }

    pub fn coordinate(chart: &Arc<ChartSpec>, i: usize) -> GradedExpr {
        let mut m = Monomial::one(chart.dim());
        m.powers[i] = 1;
        GradedExpr::single(chart, m, Coeff::one())
    }

    pub fn differential(chart: &Arc<ChartSpec>, i: usize) -> GradedExpr {
        let mut m = Monomial::one(chart.dim());
        m.diffs[i] = 1;
        GradedExpr::single(chart, m, Coeff::one())
    }

    pub fn coord(chart: &Arc<ChartSpec>, name: &str) -> Result<GradedExpr, ExprError> {
        let i = chart.index_of(name).ok_or_else(|| ExprError::UnknownIdentifier { name: name.into(), pos: 0 })?;
        Ok(GradedExpr::coordinate(chart, i))
    }

    pub fn diff(chart: &Arc<ChartSpec>, name: &str) -> Result<GradedExpr, ExprError> {
        let i = chart.index_of(name).ok_or_else(|| ExprError::UnknownDifferential { name: name.into(), pos: 0 })?;
        Ok(GradedExpr::differential(chart, i))
    }

    pub fn chart(&self) -> &Arc<ChartSpec> {
        &self.chart
    }

    pub(crate) fn terms(&self) -> &Terms {
        &self.terms
    }

    /// Common bidegree `(form degree, parity bit)` of the terms, if any.
    pub fn bidegree(&self) -> Option<(u32, u32)> {
        let mut it = self.terms.keys().map(|m| m.bidegree(&self.chart));
        let first = it.next()?;
        it.all(|b| b == first).then_some(first)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn same_chart(&self, other: &GradedExpr) -> bool {
        Arc::ptr_eq(&self.chart, &other.chart) || *self.chart == *other.chart
    }

    pub(crate) fn check_chart(&self, other: &GradedExpr) -> Result<(), ExprError> {
        if self.same_chart(other) {
            Ok(())
        } else {
            Err(ExprError::MixedCharts)
        }
    }

    /// Re-labels the expression onto an equal chart (e.g. one carrying
    /// different sampling boxes).
    pub fn on_chart(&self, chart: &Arc<ChartSpec>) -> Result<GradedExpr, ExprError> {
        if *self.chart != **chart {
            return Err(ExprError::MixedCharts);
        }
        Ok(GradedExpr { chart: chart.clone(), terms: self.terms.clone() })
    }

    /// Parity of a nonzero expression whose terms all share one parity.
    pub fn parity(&self) -> Option<Parity> {
        let mut it = self.terms.keys().map(|m| m.parity(&self.chart));
        let first = it.next()?;
        it.all(|p| p == first).then_some(first)
    }

    /// True when every term has parity `p` (vacuously for zero).
    pub fn has_parity(&self, p: Parity) -> bool {
        self.terms.keys().all(|m| m.parity(&self.chart) == p)
    }

    /// Form degree of a nonzero expression whose terms all share one degree.
    pub fn form_degree(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(|m| m.form_degree() as usize);
        let first = it.next()?;
        it.all(|p| p == first).then_some(first)
    }

    pub fn has_form_degree(&self, p: usize) -> bool {
        self.terms.keys().all(|m| m.form_degree() as usize == p)
    }

    pub fn is_function(&self) -> bool {
        self.has_form_degree(0)
    }

    pub fn is_even_function(&self) -> bool {
        self.is_function() && self.has_parity(Parity::Even)
    }

    /// No transcendental atoms, quotients or negative powers.
    pub fn is_polynomial(&self) -> bool {
        self.terms.keys().all(Monomial::is_polynomial)
    }

    /// No float coefficients anywhere, including inside atoms.
    pub fn is_exact(&self) -> bool {
        fn exact(terms: &Terms) -> bool {
            terms.iter().all(|(m, c)| {
                c.is_exact()
                    && m.atoms.iter().all(|(a, _)| match a {
                        Atom::Func(_, t) | Atom::Group(t) => exact(t),
                    })
            })
        }
        exact(&self.terms)
    }

    pub fn has_atoms(&self) -> bool {
        self.terms.keys().any(|m| !m.atoms.is_empty())
    }

    /// The value when the expression is a constant (zero included).
    pub fn as_constant(&self) -> Option<Coeff> {
        match self.terms.len() {
            0 => Some(Coeff::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_unit().then(|| c.clone())
            }
            _ => None,
        }
    }

    /// Whether the coordinate with index `i` occurs anywhere, including inside
    /// atom arguments and as a differential.
    pub fn depends_on(&self, i: usize) -> bool {
        fn dep(terms: &Terms, i: usize) -> bool {
            terms.keys().any(|m| {
                m.powers[i] != 0
                    || m.diffs[i] != 0
                    || m.atoms.iter().any(|(a, _)| match a {
                        Atom::Func(_, t) | Atom::Group(t) => dep(t, i),
                    })
            })
        }
        dep(&self.terms, i)
    }

    pub fn scale(&self, c: &Coeff) -> GradedExpr {
        if c.is_zero() {
            return GradedExpr::zero(&self.chart);
        }
        let terms = self.terms.iter().map(|(m, k)| (m.clone(), k.mul(c))).collect();
        GradedExpr::from_terms(self.chart.clone(), terms)
    }

    pub fn try_add(&self, other: &GradedExpr) -> Result<GradedExpr, ExprError> {
        self.check_chart(other)?;
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            add_term(&mut terms, m.clone(), c.clone());
        }
        Ok(GradedExpr { chart: self.chart.clone(), terms })
    }

    pub fn try_sub(&self, other: &GradedExpr) -> Result<GradedExpr, ExprError> {
        self.try_add(&-other)
    }

    /// Graded product; the wedge product when both factors carry differentials.
    pub fn try_mul(&self, other: &GradedExpr) -> Result<GradedExpr, ExprError> {
        self.check_chart(other)?;
        let mut terms = Terms::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some((m, negative)) = mul_monomials(&self.chart, ma, mb) {
                    let c = ca.mul(cb);
                    add_term(&mut terms, m, if negative { c.neg() } else { c });
                }
            }
        }
        Ok(GradedExpr { chart: self.chart.clone(), terms })
    }

    /// Integer power; negative exponents divide (the base must then be an
    /// even function).
    pub fn pow(&self, k: i32) -> Result<GradedExpr, ExprError> {
        if k < 0 {
            let positive = self.pow(-k)?;
            return super::gdiv(&GradedExpr::one(&self.chart), &positive);
        }
        let mut acc = GradedExpr::one(&self.chart);
        let mut base = self.clone();
        let mut e = k as u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Ok(acc)
    }

    /// Splits a form into its coefficient functions, keyed by the exponent
    /// vector of differentials. Each coefficient stands to the left of its
    /// differential monomial.
    pub fn components(&self) -> BTreeMap<Vec<u32>, GradedExpr> {
        let mut out: BTreeMap<Vec<u32>, Terms> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut f = m.clone();
            let key = std::mem::replace(&mut f.diffs, vec![0; m.diffs.len()]);
            add_term(out.entry(key).or_default(), f, c.clone());
        }
        out.into_iter().map(|(k, t)| (k, GradedExpr::from_terms(self.chart.clone(), t))).collect()
    }

    /// The differential monomial with the given exponents and coefficient 1.
    pub fn differential_monomial(chart: &Arc<ChartSpec>, diffs: &[u32]) -> GradedExpr {
        let mut m = Monomial::one(chart.dim());
        m.diffs = diffs.to_vec();
        GradedExpr::single(chart, m, Coeff::one())
    }

    /// Coefficient of `d(x_i)` in a one-form (left convention).
    pub fn one_form_coefficient(&self, i: usize) -> GradedExpr {
        let mut key = vec![0; self.chart.dim()];
        key[i] = 1;
        self.components().remove(&key).unwrap_or_else(|| GradedExpr::zero(&self.chart))
    }

    /// Maps every coefficient through `f` (used to drop float noise).
    pub fn map_coeffs(&self, f: impl Fn(&Coeff) -> Coeff) -> GradedExpr {
        let terms = self.terms.iter().map(|(m, c)| (m.clone(), f(c))).collect();
        GradedExpr::from_terms(self.chart.clone(), terms)
    }

    /// Largest absolute coefficient (0 for the zero expression).
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.to_f64().abs()).fold(0.0, f64::max)
    }
}

impl Add for &GradedExpr {
    type Output = GradedExpr;
    /// Panics on mixed charts; use [`GradedExpr::try_add`] to get an error instead.
    fn add(self, rhs: &GradedExpr) -> GradedExpr {
        self.try_add(rhs).expect("expressions on different charts")
    }
}

impl Sub for &GradedExpr {
    type Output = GradedExpr;
    fn sub(self, rhs: &GradedExpr) -> GradedExpr {
        self.try_sub(rhs).expect("expressions on different charts")
    }
}

impl Mul for &GradedExpr {
    type Output = GradedExpr;
    fn mul(self, rhs: &GradedExpr) -> GradedExpr {
        self.try_mul(rhs).expect("expressions on different charts")
    }
}

impl Neg for &GradedExpr {
    type Output = GradedExpr;
    fn neg(self) -> GradedExpr {
        self.scale(&Coeff::int(-1))
    }
}

macro_rules! owned_ops {
    ($tr:ident, $m:ident) => {
        impl $tr for GradedExpr {
            type Output = GradedExpr;
            fn $m(self, rhs: GradedExpr) -> GradedExpr {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&GradedExpr> for GradedExpr {
            type Output = GradedExpr;
            fn $m(self, rhs: &GradedExpr) -> GradedExpr {
                (&self).$m(rhs)
            }
        }
        impl $tr<GradedExpr> for &GradedExpr {
            type Output = GradedExpr;
            fn $m(self, rhs: GradedExpr) -> GradedExpr {
                self.$m(&rhs)
            }
        }
    };
}

owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

impl Neg for GradedExpr {
    type Output = GradedExpr;
    fn neg(self) -> GradedExpr {
        -&self
    }
}

/// Graded product with chart checking.
pub fn gmul(a: &GradedExpr, b: &GradedExpr) -> Result<GradedExpr, ExprError> {
    a.try_mul(b)
}

/// Applies a transcendental function to an even function, folding the
/// trivial constant arguments (`sin(0) = 0`, `log(1) = 0`, ...).
pub fn apply_func(f: Func, arg: &GradedExpr) -> Result<GradedExpr, ExprError> {
    if !arg.is_even_function() {
        return Err(ExprError::InvalidAtomArgument { func: f.name().into() });
    }
    let chart = arg.chart();
    if arg.is_zero() {
        return match f {
            Func::Sin | Func::Sinh => Ok(GradedExpr::zero(chart)),
            Func::Cos | Func::Cosh | Func::Exp => Ok(GradedExpr::one(chart)),
            Func::Log => Err(ExprError::LogNonPositive),
        };
    }
    if f == Func::Log && arg.as_constant().is_some_and(|c| c.is_one()) {
        return Ok(GradedExpr::zero(chart));
    }
    let mut m = Monomial::one(chart.dim());
    m.atoms.push((Atom::Func(f, arg.terms.clone()), 1));
    Ok(GradedExpr::single(chart, m, Coeff::one()))
}

/// Inverse of a single term `c·m`, when `m` is invertible (no odd
/// coordinates, no differentials).
fn invert_term(chart: &Arc<ChartSpec>, m: &Monomial, c: &Coeff) -> Result<GradedExpr, ExprError> {
    if m.diffs.iter().any(|&d| d != 0) {
        return Err(ExprError::InvalidDenominator);
    }
    if (0..chart.dim()).any(|i| chart.parity(i).is_odd() && m.powers[i] != 0) {
        return Err(ExprError::NilpotentDenominator);
    }
    let inv_c = c.inv().ok_or(ExprError::DivisionByZero)?;
    let mut inv = Monomial::one(chart.dim());
    inv.powers = m.powers.iter().map(|p| -p).collect();
    let mut expand = GradedExpr::one(chart);
    for (atom, e) in &m.atoms {
        match atom {
            Atom::Group(t) if -e > 0 => {
                let g = GradedExpr::from_terms(chart.clone(), t.clone());
                expand = &expand * &g.pow(-e)?;
            }
            _ => inv.atoms.push((atom.clone(), -e)),
        }
    }
    Ok(&GradedExpr::single(chart, inv, inv_c) * &expand)
}

/// Exact division of polynomials when the divisor is an even commutative
/// polynomial (even coordinates only). Returns `None` if it does not divide.
fn exact_poly_division(a: &GradedExpr, b: &GradedExpr) -> Option<GradedExpr> {
    let chart = a.chart();
    let n = chart.dim();
    if b.terms.keys().any(|m| (0..n).any(|i| chart.parity(i).is_odd() && m.powers[i] != 0)) {
        return None;
    }
    let (lt_b, lc_b) = b.terms.iter().next_back()?;
    let inv_lc = lc_b.inv()?;
    let mut rem = a.clone();
    let mut quot = GradedExpr::zero(chart);
    for _ in 0..10_000 {
        let Some((lt_r, lc_r)) = rem.terms.iter().next_back() else {
            return Some(quot);
        };
        let mut t = lt_r.clone();
        for i in 0..n {
            t.powers[i] -= lt_b.powers[i];
            if t.powers[i] < 0 {
                return None;
            }
        }
        let term = GradedExpr::single(chart, t, lc_r.mul(&inv_lc));
        rem = &rem - &(&term * b);
        quot = &quot + &term;
    }
    None
}

/// Quotient `a / b` for an even, form-degree-0 denominator.
///
/// Monomial denominators become negative powers; polynomial denominators
/// that divide exactly are cancelled; anything else is kept as a quotient
/// node whose body must be nonzero wherever the expression is evaluated.
pub fn gdiv(a: &GradedExpr, b: &GradedExpr) -> Result<GradedExpr, ExprError> {
    a.check_chart(b)?;
    if !b.is_even_function() {
        return Err(ExprError::InvalidDenominator);
    }
    if b.is_zero() {
        return Err(ExprError::DivisionByZero);
    }
    let chart = a.chart().clone();
    if b.terms.len() == 1 {
        let (m, c) = b.terms.iter().next().unwrap();
        return Ok(a * &invert_term(&chart, m, c)?);
    }
    if a.is_polynomial() && b.is_polynomial() && a.is_exact() && b.is_exact() {
        if let Some(q) = exact_poly_division(a, b) {
            return Ok(q);
        }
    }
    let (_, lc) = b.terms.iter().next_back().unwrap();
    let inv_lc = lc.inv().ok_or(ExprError::DivisionByZero)?;
    let normalized = b.scale(&inv_lc);
    let mut m = Monomial::one(chart.dim());
    m.atoms.push((Atom::Group(normalized.terms), -1));
    Ok(a * &GradedExpr::single(&chart, m, inv_lc))
}

#[cfg(test)]
mod tests {
    use super::super::parse_expr;
    use super::*;

    fn chart22() -> Arc<ChartSpec> {
        ChartSpec::from_decls(&[
            ("x", Parity::Even, "1"),
            ("y", Parity::Even, "-1"),
            ("xi", Parity::Odd, "1"),
            ("eta", Parity::Odd, "0"),
        ])
        .unwrap()
    }

    #[test]
    fn even_differential_squares_to_zero() {
        let c = chart22();
        let dx = GradedExpr::diff(&c, "x").unwrap();
        assert!((&dx * &dx).is_zero());
    }

    #[test]
    fn odd_differential_square_is_nonzero_and_symmetric() {
        let c = chart22();
        let dxi = GradedExpr::diff(&c, "xi").unwrap();
        let sq = &dxi * &dxi;
        assert!(!sq.is_zero());
        assert_eq!(sq.form_degree(), Some(2));
        assert_eq!(sq.parity(), Some(Parity::Even));
    }

    #[test]
    fn swap_of_one_forms_flips_sign() {
        let c = ChartSpec::even(&[("p", 1), ("q", -1)]);
        let a = parse_expr("p*d(q)", &c).unwrap();
        let b = parse_expr("d(p)", &c).unwrap();
        assert_eq!(&a * &b, -(&b * &a));
    }

    #[test]
    fn odd_coordinates_anticommute() {
        let c = chart22();
        let xi = GradedExpr::coord(&c, "xi").unwrap();
        let eta = GradedExpr::coord(&c, "eta").unwrap();
        assert!((&(&xi * &eta) + &(&eta * &xi)).is_zero());
        assert!((&xi * &xi).is_zero());
    }

    #[test]
    fn like_terms_merge() {
        let c = chart22();
        let e = parse_expr("x*y + y*x", &c).unwrap();
        assert_eq!(e, parse_expr("2*x*y", &c).unwrap());
        let f = parse_expr("d(x)*d(y) + d(y)*d(x)", &c).unwrap();
        assert!(f.is_zero());
    }

    #[test]
    fn division_by_monomial_cancels() {
        let c = chart22();
        let q = gdiv(&parse_expr("x^2*y", &c).unwrap(), &parse_expr("x*y", &c).unwrap()).unwrap();
        assert_eq!(q, parse_expr("x", &c).unwrap());
    }

    #[test]
    fn exact_polynomial_division() {
        let c = chart22();
        let q = gdiv(&parse_expr("x^2 - y^2", &c).unwrap(), &parse_expr("x + y", &c).unwrap()).unwrap();
        assert_eq!(q, parse_expr("x - y", &c).unwrap());
        let kept = gdiv(&parse_expr("x", &c).unwrap(), &parse_expr("1 + y", &c).unwrap()).unwrap();
        assert!(kept.has_atoms());
    }

    #[test]
    fn invalid_denominators() {
        let c = chart22();
        let one = GradedExpr::one(&c);
        assert_eq!(gdiv(&one, &GradedExpr::zero(&c)), Err(ExprError::DivisionByZero));
        assert_eq!(gdiv(&one, &parse_expr("xi", &c).unwrap()), Err(ExprError::InvalidDenominator));
        assert_eq!(gdiv(&one, &parse_expr("d(x)", &c).unwrap()), Err(ExprError::InvalidDenominator));
        assert_eq!(gdiv(&one, &parse_expr("xi*eta", &c).unwrap()), Err(ExprError::NilpotentDenominator));
        assert!(gdiv(&one, &parse_expr("1 + xi*eta", &c).unwrap()).is_ok());
    }

    #[test]
    fn trivial_atoms_fold() {
        let c = chart22();
        let zero = GradedExpr::zero(&c);
        assert_eq!(apply_func(Func::Cos, &zero).unwrap(), GradedExpr::one(&c));
        assert!(apply_func(Func::Sinh, &zero).unwrap().is_zero());
        assert!(apply_func(Func::Log, &GradedExpr::one(&c)).unwrap().is_zero());
        assert!(apply_func(Func::Sin, &parse_expr("xi", &c).unwrap()).is_err());
    }
}
