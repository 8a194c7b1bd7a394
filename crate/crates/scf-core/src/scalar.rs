use std::cmp::Ordering;
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

/// Numeric substrate for the interval maps.
///
/// Every branch map in this crate is an integer Möbius map, so the
/// operations below are all that is needed to run the dynamics either in
/// floating point (`f64`) or exactly ([`crate::exact::Exact`], closed under
/// the branch maps on rationals and quadratic surds). Comparisons against
/// rationals and against `sqrt(3)`-expressions decide branch membership;
/// exact implementations must make them exact.
pub trait Scalar:
    Clone
    + PartialEq
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Whether comparisons and arithmetic are exact (no absorption or
    /// escape-detection tolerance bands are applied in exact mode).
    const EXACT: bool;

    fn from_ratio(num: i64, den: i64) -> Self;

    fn from_bigint_ratio(num: &BigInt, den: &BigInt) -> Self;

    fn sqrt3() -> Self;

    /// Three-way comparison with the rational `num/den`.
    fn cmp_ratio(&self, num: i64, den: i64) -> Ordering;

    /// Three-way comparison with another scalar.
    fn cmp_scalar(&self, rhs: &Self) -> Ordering;

    fn to_f64(&self) -> f64;

    /// Exact rational content, when the value is a rational number.
    fn as_rational(&self) -> Option<BigRational>;

    fn int(n: i64) -> Self {
        Self::from_ratio(n, 1)
    }

    fn zero() -> Self {
        Self::int(0)
    }

    fn one() -> Self {
        Self::int(1)
    }

    fn recip(&self) -> Self {
        Self::one() / self.clone()
    }

    fn is_negative(&self) -> bool {
        self.cmp_ratio(0, 1) == Ordering::Less
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn from_bigint_ratio(num: &BigInt, den: &BigInt) -> Self {
        let r = BigRational::new(num.clone(), den.clone());
        rational_to_f64(&r)
    }

    fn sqrt3() -> Self {
        crate::SQRT3
    }

    fn cmp_ratio(&self, num: i64, den: i64) -> Ordering {
        self.total_cmp(&(num as f64 / den as f64))
    }

    fn cmp_scalar(&self, rhs: &Self) -> Ordering {
        self.total_cmp(rhs)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn as_rational(&self) -> Option<BigRational> {
        None
    }
}

/// Convert a big rational to `f64`, scaling through when the parts exceed
/// the `f64` range.
pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // numer/denom too large for direct conversion: shift both down
    let bits = r.numer().bits().max(r.denom().bits());
    let shift = bits.saturating_sub(900);
    let n = r.numer() >> shift;
    let d = r.denom() >> shift;
    n.to_f64().unwrap_or(f64::NAN) / d.to_f64().unwrap_or(f64::NAN)
}
