use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::chart::rational_to_f64;

/// Monomial coefficient: exact rational, or a float once any numeric step
/// (square roots, eigenvectors) has entered the expression.
#[derive(Debug, Clone)]
pub enum Coeff {
    Exact(BigRational),
    Float(f64),
}

impl Coeff {
    pub fn zero() -> Coeff {
        Coeff::Exact(BigRational::zero())
    }

    pub fn one() -> Coeff {
        Coeff::Exact(BigRational::one())
    }

    pub fn int(n: i64) -> Coeff {
        Coeff::Exact(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(num: i64, den: i64) -> Coeff {
        Coeff::Exact(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coeff::Exact(r) => r.is_zero(),
            Coeff::Float(f) => *f == 0.0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Coeff::Exact(r) => r.is_one(),
            Coeff::Float(f) => *f == 1.0,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Coeff::Exact(_))
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Coeff::Exact(r) => r.is_negative(),
            Coeff::Float(f) => *f < 0.0,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Coeff::Exact(r) => rational_to_f64(r),
            Coeff::Float(f) => *f,
        }
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Coeff::Exact(r) => Some(r),
            Coeff::Float(_) => None,
        }
    }

    pub fn add(&self, other: &Coeff) -> Coeff {
        match (self, other) {
            (Coeff::Exact(a), Coeff::Exact(b)) => Coeff::Exact(a + b),
            _ => Coeff::Float(self.to_f64() + other.to_f64()),
        }
    }

    pub fn mul(&self, other: &Coeff) -> Coeff {
        match (self, other) {
            (Coeff::Exact(a), Coeff::Exact(b)) => Coeff::Exact(a * b),
            _ => Coeff::Float(self.to_f64() * other.to_f64()),
        }
    }

    pub fn neg(&self) -> Coeff {
        match self {
            Coeff::Exact(a) => Coeff::Exact(-a),
            Coeff::Float(f) => Coeff::Float(-f),
        }
    }

    pub fn abs(&self) -> Coeff {
        if self.is_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn inv(&self) -> Option<Coeff> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Coeff::Exact(a) => Coeff::Exact(a.recip()),
            Coeff::Float(f) => Coeff::Float(1.0 / f),
        })
    }

    pub fn pow(&self, k: i32) -> Option<Coeff> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut acc = Coeff::one();
        for _ in 0..k.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Some(acc)
    }
}

impl From<BigRational> for Coeff {
    fn from(r: BigRational) -> Coeff {
        Coeff::Exact(r)
    }
}

impl From<i64> for Coeff {
    fn from(n: i64) -> Coeff {
        Coeff::int(n)
    }
}

impl From<f64> for Coeff {
    fn from(f: f64) -> Coeff {
        Coeff::Float(f)
    }
}

impl PartialEq for Coeff {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Coeff {}

impl PartialOrd for Coeff {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

// Total order used only for canonical storage; exact values sort before floats.
impl Ord for Coeff {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Coeff::Exact(a), Coeff::Exact(b)) => a.cmp(b),
            (Coeff::Float(a), Coeff::Float(b)) => a.total_cmp(b),
            (Coeff::Exact(_), Coeff::Float(_)) => Ordering::Less,
            (Coeff::Float(_), Coeff::Exact(_)) => Ordering::Greater,
        }
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coeff::Exact(r) => super::chart::write_rational(f, r),
            Coeff::Float(x) => write!(f, "{x}"),
        }
    }
}
