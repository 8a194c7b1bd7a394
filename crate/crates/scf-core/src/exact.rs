//! Exact arithmetic over `Q` and real quadratic fields `Q(sqrt(d))`.
//!
//! Every SCF branch map, dual branch map, and geodesic return word is an
//! integer Möbius map, so orbits of rationals and quadratic surds stay in
//! the same field. This module is the oracle substrate for the exact
//! identity tests and the periodic-orbit fixtures.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::scalar::{rational_to_f64, Scalar};

/// A number `a + b*sqrt(d)` with rational `a`, `b`.
///
/// Pure rationals carry `d = 0`. Arithmetic between two surds requires the
/// same discriminant; mixing fields is a usage error for the exact
/// comparisons, and ordering falls back to `f64` in that case (the crate
/// never relies on mixed-field comparisons).
#[derive(Clone)]
pub struct Exact {
    a: BigRational,
    b: BigRational,
    d: u64,
}

impl Exact {
    pub fn new(a: BigRational, b: BigRational, d: u64) -> Exact {
        let mut v = Exact { a, b, d };
        v.normalize();
        v
    }

    pub fn from_rational(a: BigRational) -> Exact {
        Exact {
            a,
            b: BigRational::zero(),
            d: 0,
        }
    }

    pub fn ratio(num: i64, den: i64) -> Exact {
        Exact::from_rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// Lift a finite float to the exact rational it represents.
    pub fn from_f64(x: f64) -> Option<Exact> {
        BigRational::from_float(x).map(Exact::from_rational)
    }

    /// `sqrt(d)` as an exact value; `d` must not be a perfect square.
    pub fn sqrt(d: u64) -> Exact {
        debug_assert!(!is_square(d), "sqrt({d}) is rational");
        Exact {
            a: BigRational::zero(),
            b: BigRational::one(),
            d,
        }
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn surd_part(&self) -> (&BigRational, u64) {
        (&self.b, self.d)
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    fn normalize(&mut self) {
        if self.b.is_zero() {
            self.d = 0;
        }
    }

    /// Sign of the value: -1, 0, or +1.
    pub fn sign(&self) -> i8 {
        let sa = rational_sign(&self.a);
        if self.b.is_zero() {
            return sa;
        }
        let sb = rational_sign(&self.b);
        if sa == sb || sa == 0 {
            return sb;
        }
        if sb == 0 {
            return sa;
        }
        // a and b*sqrt(d) have opposite signs: compare a^2 with b^2*d
        let a2 = &self.a * &self.a;
        let b2d = &self.b * &self.b * BigRational::from_integer(BigInt::from(self.d));
        match a2.cmp(&b2d) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    fn same_field(&self, rhs: &Exact) -> Option<u64> {
        match (self.b.is_zero(), rhs.b.is_zero()) {
            (true, _) => Some(rhs.d),
            (_, true) => Some(self.d),
            _ if self.d == rhs.d => Some(self.d),
            _ => None,
        }
    }
}

fn rational_sign(r: &BigRational) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

fn is_square(d: u64) -> bool {
    if d == 0 {
        return true;
    }
    let s = (d as f64).sqrt() as u64;
    (s.saturating_sub(1)..=s + 1).any(|k| k * k == d)
}

impl PartialEq for Exact {
    fn eq(&self, other: &Exact) -> bool {
        self.a == other.a && self.b == other.b && (self.b.is_zero() || self.d == other.d)
    }
}

impl fmt::Debug for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else {
            write!(f, "{} + {}*sqrt({})", self.a, self.b, self.d)
        }
    }
}

impl Add for Exact {
    type Output = Exact;
    fn add(self, rhs: Exact) -> Exact {
        let d = self
            .same_field(&rhs)
            .unwrap_or_else(|| panic!("adding values from Q(sqrt{}) and Q(sqrt{})", self.d, rhs.d));
        Exact::new(self.a + rhs.a, self.b + rhs.b, d)
    }
}

impl Sub for Exact {
    type Output = Exact;
    fn sub(self, rhs: Exact) -> Exact {
        self + (-rhs)
    }
}

impl Neg for Exact {
    type Output = Exact;
    fn neg(self) -> Exact {
        Exact {
            a: -self.a,
            b: -self.b,
            d: self.d,
        }
    }
}

impl Mul for Exact {
    type Output = Exact;
    fn mul(self, rhs: Exact) -> Exact {
        let d = self
            .same_field(&rhs)
            .unwrap_or_else(|| panic!("multiplying values from Q(sqrt{}) and Q(sqrt{})", self.d, rhs.d));
        let disc = BigRational::from_integer(BigInt::from(d));
        let a = &self.a * &rhs.a + &self.b * &rhs.b * disc;
        let b = &self.a * &rhs.b + &self.b * &rhs.a;
        Exact::new(a, b, d)
    }
}

impl Div for Exact {
    type Output = Exact;
    fn div(self, rhs: Exact) -> Exact {
        let d = self
            .same_field(&rhs)
            .unwrap_or_else(|| panic!("dividing values from Q(sqrt{}) and Q(sqrt{})", self.d, rhs.d));
        // 1/(a + b*sqrt(d)) = (a - b*sqrt(d)) / (a^2 - b^2 d)
        let disc = BigRational::from_integer(BigInt::from(rhs.d));
        let denom = &rhs.a * &rhs.a - &rhs.b * &rhs.b * disc;
        assert!(!denom.is_zero(), "division by zero Exact value");
        let conj = Exact {
            a: &rhs.a / &denom,
            b: -(&rhs.b / &denom),
            d: rhs.d,
        };
        let num = Exact {
            a: self.a,
            b: self.b,
            d,
        };
        num * conj
    }
}

impl Scalar for Exact {
    const EXACT: bool = true;

    fn from_ratio(num: i64, den: i64) -> Self {
        Exact::ratio(num, den)
    }

    fn from_bigint_ratio(num: &BigInt, den: &BigInt) -> Self {
        Exact::from_rational(BigRational::new(num.clone(), den.clone()))
    }

    fn sqrt3() -> Self {
        Exact::sqrt(3)
    }

    fn cmp_ratio(&self, num: i64, den: i64) -> Ordering {
        let diff = self.clone() - Exact::ratio(num, den);
        match diff.sign() {
            -1 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        }
    }

    fn cmp_scalar(&self, rhs: &Self) -> Ordering {
        if self.same_field(rhs).is_none() {
            // mixed quadratic fields: approximate comparison
            return self.to_f64().total_cmp(&rhs.to_f64());
        }
        let diff = self.clone() - rhs.clone();
        match diff.sign() {
            -1 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        }
    }

    fn to_f64(&self) -> f64 {
        let mut v = rational_to_f64(&self.a);
        if !self.b.is_zero() {
            v += rational_to_f64(&self.b) * (self.d as f64).sqrt();
        }
        v
    }

    fn as_rational(&self) -> Option<BigRational> {
        self.is_rational().then(|| self.a.clone())
    }
}
