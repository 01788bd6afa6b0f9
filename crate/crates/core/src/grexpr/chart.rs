//! Coordinates, parities, weights and charts.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::ExprError;

/// Z2 grading of coordinates, functions, forms and fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn from_bit(bit: u32) -> Parity {
        if bit.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn bit(self) -> u32 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }

    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }
}

impl Add for Parity {
    type Output = Parity;
    fn add(self, rhs: Parity) -> Parity {
        Parity::from_bit(self.bit() + rhs.bit())
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Parity::Even => write!(f, "even"),
            Parity::Odd => write!(f, "odd"),
        }
    }
}

impl FromStr for Parity {
    type Err = ExprError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "even" | "0" => Ok(Parity::Even),
            "odd" | "1" => Ok(Parity::Odd),
            other => Err(ExprError::InvalidDeclaration(format!("unknown parity '{other}'"))),
        }
    }
}

/// Exact rational weight of a homogeneous object.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Weight(pub BigRational);

impl Weight {
    pub fn zero() -> Weight {
        Weight(BigRational::zero())
    }

    pub fn from_int(n: i64) -> Weight {
        Weight(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_ratio(num: i64, den: i64) -> Weight {
        Weight(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Parses `"3"`, `"-1/2"` or a terminating decimal such as `"0.25"`.
    ///
    /// Anything else (symbolic constants, exponents) is rejected: weights are
    /// kept rational so that degree arithmetic stays exact.
    pub fn parse(text: &str) -> Result<Weight, ExprError> {
        parse_rational(text)
            .map(Weight)
            .ok_or_else(|| ExprError::InvalidDeclaration(format!("weight '{text}' is not a rational number")))
    }
}

impl Add for &Weight {
    type Output = Weight;
    fn add(self, rhs: &Weight) -> Weight {
        Weight(&self.0 + &rhs.0)
    }
}

impl Sub for &Weight {
    type Output = Weight;
    fn sub(self, rhs: &Weight) -> Weight {
        Weight(&self.0 - &rhs.0)
    }
}

impl Neg for &Weight {
    type Output = Weight;
    fn neg(self) -> Weight {
        Weight(-&self.0)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_rational(f, &self.0)
    }
}

pub(crate) fn write_rational(f: &mut fmt::Formatter<'_>, r: &BigRational) -> fmt::Result {
    if r.denom().is_one() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

/// Parses an integer, a ratio `a/b` or a terminating decimal into an exact rational.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    if let Some((num, den)) = text.split_once('/') {
        let num = parse_decimal(num.trim())?;
        let den = parse_decimal(den.trim())?;
        if den.is_zero() {
            return None;
        }
        return Some(num / den);
    }
    parse_decimal(text)
}

fn parse_decimal(text: &str) -> Option<BigRational> {
    let (negative, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text.strip_prefix('+').unwrap_or(text)),
    };
    if body.is_empty() {
        return None;
    }
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
    let denom = num_traits::pow(BigInt::from(10u32), frac_part.len());
    let value = BigRational::new(numer, denom);
    Some(if negative { -value } else { value })
}

/// Parity plus weight of a homogeneous tensor.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Degree {
    pub parity: Parity,
    pub weight: Weight,
}

impl Degree {
    pub fn new(parity: Parity, weight: Weight) -> Degree {
        Degree { parity, weight }
    }
}

impl Add for &Degree {
    type Output = Degree;
    fn add(self, rhs: &Degree) -> Degree {
        Degree { parity: self.parity + rhs.parity, weight: &self.weight + &rhs.weight }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.parity, self.weight)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CoordinateDecl {
    pub name: String,
    pub parity: Parity,
    pub weight: Weight,
}

impl CoordinateDecl {
    pub fn new(name: impl Into<String>, parity: Parity, weight: Weight) -> CoordinateDecl {
        CoordinateDecl { name: name.into(), parity, weight }
    }
}

/// Ordered coordinate declarations. The order fixes the canonical generator
/// order of every expression built over the chart.
#[derive(Debug, Clone)]
pub struct ChartSpec {
    coords: Vec<CoordinateDecl>,
    boxes: Vec<(f64, f64)>,
}

pub const DEFAULT_BOX: (f64, f64) = (-1.0, 1.0);

impl PartialEq for ChartSpec {
    fn eq(&self, other: &Self) -> bool {
        self.coords == other.coords
    }
}

impl Eq for ChartSpec {}

impl ChartSpec {
    pub fn new(coords: Vec<CoordinateDecl>) -> Result<Arc<ChartSpec>, ExprError> {
        if coords.is_empty() {
            return Err(ExprError::InvalidDeclaration("a chart needs at least one coordinate".into()));
        }
        for (i, c) in coords.iter().enumerate() {
            if !is_identifier(&c.name) {
                return Err(ExprError::InvalidDeclaration(format!("'{}' is not a valid coordinate name", c.name)));
            }
            if is_reserved(&c.name) {
                return Err(ExprError::InvalidDeclaration(format!("'{}' is a reserved function name", c.name)));
            }
            if coords[..i].iter().any(|o| o.name == c.name) {
                return Err(ExprError::InvalidDeclaration(format!("duplicate coordinate '{}'", c.name)));
            }
        }
        let boxes = vec![DEFAULT_BOX; coords.len()];
        Ok(Arc::new(ChartSpec { coords, boxes }))
    }

    /// Shorthand for tests and examples: `&[("x", Parity::Even, "1"), ...]`.
    pub fn from_decls(decls: &[(&str, Parity, &str)]) -> Result<Arc<ChartSpec>, ExprError> {
        let coords = decls
            .iter()
            .map(|(n, p, w)| Ok(CoordinateDecl::new(*n, *p, Weight::parse(w)?)))
            .collect::<Result<Vec<_>, ExprError>>()?;
        ChartSpec::new(coords)
    }

    /// Purely even chart with integer weights.
    pub fn even(decls: &[(&str, i64)]) -> Arc<ChartSpec> {
        let coords = decls.iter().map(|(n, w)| CoordinateDecl::new(*n, Parity::Even, Weight::from_int(*w))).collect();
        ChartSpec::new(coords).expect("valid even chart")
    }

    /// Returns a copy with per-coordinate sampling boxes.
    pub fn with_boxes(&self, boxes: Vec<(f64, f64)>) -> Result<Arc<ChartSpec>, ExprError> {
        if boxes.len() != self.coords.len() {
            return Err(ExprError::InvalidDeclaration("one sampling box per coordinate expected".into()));
        }
        if boxes.iter().any(|(lo, hi)| !(lo.is_finite() && hi.is_finite() && lo <= hi)) {
            return Err(ExprError::InvalidDeclaration("sampling boxes must be finite intervals".into()));
        }
        Ok(Arc::new(ChartSpec { coords: self.coords.clone(), boxes }))
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn even_dim(&self) -> usize {
        self.coords.iter().filter(|c| c.parity == Parity::Even).count()
    }

    pub fn odd_dim(&self) -> usize {
        self.dim() - self.even_dim()
    }

    pub fn coords(&self) -> &[CoordinateDecl] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> &CoordinateDecl {
        &self.coords[i]
    }

    pub fn parity(&self, i: usize) -> Parity {
        self.coords[i].parity
    }

    pub fn weight(&self, i: usize) -> &Weight {
        &self.coords[i].weight
    }

    pub fn boxes(&self) -> &[(f64, f64)] {
        &self.boxes
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.coords.iter().position(|c| c.name == name)
    }

    /// Position of an odd coordinate among the odd coordinates; this is the
    /// index of the Grassmann generator it is mapped to during evaluation.
    pub fn odd_slot(&self, i: usize) -> Option<usize> {
        if self.coords[i].parity != Parity::Odd {
            return None;
        }
        Some(self.coords[..i].iter().filter(|c| c.parity == Parity::Odd).count())
    }

    /// The multiset of weights split by parity: (even weights, odd weights).
    pub fn weight_set(&self) -> (Vec<Weight>, Vec<Weight>) {
        let mut even = Vec::new();
        let mut odd = Vec::new();
        for c in &self.coords {
            match c.parity {
                Parity::Even => even.push(c.weight.clone()),
                Parity::Odd => odd.push(c.weight.clone()),
            }
        }
        even.sort();
        odd.sort();
        (even, odd)
    }

    pub fn names(&self) -> Vec<&str> {
        self.coords.iter().map(|c| c.name.as_str()).collect()
    }

    /// Whether the canonical weight field of the chart is zero.
    pub fn all_weights_zero(&self) -> bool {
        self.coords.iter().all(|c| c.weight.is_zero())
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub(crate) fn is_reserved(s: &str) -> bool {
    matches!(s, "sin" | "cos" | "exp" | "log" | "sinh" | "cosh")
}

pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    match r.to_f64() {
        Some(v) => v,
        None => {
            if r.is_negative() {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("3"), Some(BigRational::from_integer(3.into())));
        assert_eq!(parse_rational("-1/2"), Some(BigRational::new((-1).into(), 2.into())));
        assert_eq!(parse_rational("0.25"), Some(BigRational::new(1.into(), 4.into())));
        assert_eq!(parse_rational(".5"), Some(BigRational::new(1.into(), 2.into())));
        assert_eq!(parse_rational("pi"), None);
        assert_eq!(parse_rational("1/0"), None);
        assert!(Weight::parse("sqrt(2)").is_err());
    }

    #[test]
    fn chart_validation() {
        assert!(ChartSpec::from_decls(&[]).is_err());
        assert!(ChartSpec::from_decls(&[("x", Parity::Even, "1"), ("x", Parity::Odd, "0")]).is_err());
        assert!(ChartSpec::from_decls(&[("sin", Parity::Even, "1")]).is_err());
        let c = ChartSpec::from_decls(&[("x", Parity::Even, "1"), ("xi", Parity::Odd, "1/2"), ("eta", Parity::Odd, "0")])
            .unwrap();
        assert_eq!(c.even_dim(), 1);
        assert_eq!(c.odd_dim(), 2);
        assert_eq!(c.odd_slot(2), Some(1));
        assert_eq!(c.odd_slot(0), None);
        let (even, odd) = c.weight_set();
        assert_eq!(even, vec![Weight::from_int(1)]);
        assert_eq!(odd, vec![Weight::zero(), Weight::from_ratio(1, 2)]);
    }

    #[test]
    fn parity_arithmetic() {
        assert_eq!(Parity::Odd + Parity::Odd, Parity::Even);
        assert_eq!(Parity::Odd + Parity::Even, Parity::Odd);
    }
}
