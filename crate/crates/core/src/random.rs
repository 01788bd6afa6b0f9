//! Seeded random polynomial functions, forms and vector fields for property
//! tests and benchmarks.

use std::sync::Arc;

use rand::Rng;

use crate::cartan::VectorField;
use crate::grexpr::{ChartSpec, Coeff, CoordinateDecl, GradedExpr, Parity, Weight};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shape {
    /// Maximal total polynomial degree of a term.
    pub max_degree: u32,
    /// Number of random terms drawn before parity filtering.
    pub terms: usize,
    /// Coefficients are drawn from `-max_coeff..=max_coeff`.
    pub max_coeff: i64,
}

impl Default for Shape {
    fn default() -> Self {
        Shape { max_degree: 3, terms: 4, max_coeff: 3 }
    }
}

fn monomial(chart: &Arc<ChartSpec>, form_degree: usize, shape: &Shape, rng: &mut impl Rng) -> (GradedExpr, u32, Weight) {
    let n = chart.dim();
    let mut out = GradedExpr::constant(chart, Coeff::int(rng.gen_range(-shape.max_coeff..=shape.max_coeff)));
    let mut bit = 0;
    let mut weight = Weight::zero();
    let degree = rng.gen_range(0..=shape.max_degree);
    let mut used_odd = vec![false; n];
    for _ in 0..degree {
        let i = rng.gen_range(0..n);
        if chart.parity(i).is_odd() {
            if used_odd[i] {
                continue;
            }
            used_odd[i] = true;
            bit += 1;
        }
        weight = &weight + chart.weight(i);
        out = &out * &GradedExpr::coordinate(chart, i);
    }
    for _ in 0..form_degree {
        let i = rng.gen_range(0..n);
        bit += chart.parity(i).bit();
        weight = &weight + chart.weight(i);
        out = &out * &GradedExpr::differential(chart, i);
    }
    (out, bit % 2, weight)
}

/// Random polynomial form of the given form degree; terms of the wrong
/// parity are dropped when `parity` is set.
pub fn random_form(chart: &Arc<ChartSpec>, form_degree: usize, parity: Option<Parity>, shape: &Shape, rng: &mut impl Rng) -> GradedExpr {
    let mut out = GradedExpr::zero(chart);
    for _ in 0..shape.terms {
        let (m, bit, _) = monomial(chart, form_degree, shape, rng);
        if parity.is_none_or(|p| p.bit() == bit) {
            out = &out + &m;
        }
    }
    out
}

/// Random polynomial form all of whose terms have the given parity and
/// weight; may be zero when few monomials qualify.
pub fn random_homogeneous_form(
    chart: &Arc<ChartSpec>,
    form_degree: usize,
    parity: Parity,
    weight: &Weight,
    shape: &Shape,
    rng: &mut impl Rng,
) -> GradedExpr {
    let mut out = GradedExpr::zero(chart);
    let mut found = 0;
    for _ in 0..shape.terms * 50 {
        if found == shape.terms {
            break;
        }
        let (m, bit, w) = monomial(chart, form_degree, shape, rng);
        if bit == parity.bit() && &w == weight && !m.is_zero() {
            out = &out + &m;
            found += 1;
        }
    }
    out
}

pub fn random_function(chart: &Arc<ChartSpec>, parity: Option<Parity>, shape: &Shape, rng: &mut impl Rng) -> GradedExpr {
    random_form(chart, 0, parity, shape, rng)
}

/// Random polynomial vector field of the given parity.
pub fn random_field(chart: &Arc<ChartSpec>, parity: Parity, shape: &Shape, rng: &mut impl Rng) -> VectorField {
    let coeffs = (0..chart.dim())
        .map(|j| random_function(chart, Some(Parity::from_bit(parity.bit() + chart.parity(j).bit())), shape, rng))
        .collect();
    VectorField::new(chart, parity, coeffs).expect("coefficients have matching parity")
}

/// A chart of `even|odd` coordinates `x1.., a1..` with random small
/// integer weights.
pub fn random_chart(even: usize, odd: usize, rng: &mut impl Rng) -> Arc<ChartSpec> {
    let mut decls = Vec::new();
    for i in 0..even {
        decls.push(CoordinateDecl::new(format!("x{}", i + 1), Parity::Even, Weight::from_int(rng.gen_range(-2..=2))));
    }
    for i in 0..odd {
        decls.push(CoordinateDecl::new(format!("a{}", i + 1), Parity::Odd, Weight::from_int(rng.gen_range(-2..=2))));
    }
    ChartSpec::new(decls).expect("distinct names")
}
