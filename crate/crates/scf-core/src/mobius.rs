use std::fmt;
use std::ops::Mul;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::digit::{Digit, Parity};
use crate::scalar::Scalar;

/// An integer 2x2 matrix `((a, b), (c, d))` acting on the boundary line by
/// the fractional linear map `z -> (a z + b)/(c z + d)`.
///
/// Digit matrices have determinant `-eps`; group words built from the theta
/// group generators have determinant ±1. Entries are arbitrary precision:
/// convergent denominators grow like `exp(C*/2 · n)`.
#[derive(Clone, PartialEq, Eq)]
pub struct MobiusMap {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    d: BigInt,
}

impl MobiusMap {
    pub fn new(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> MobiusMap {
        MobiusMap { a, b, c, d }
    }

    pub fn from_i64(a: i64, b: i64, c: i64, d: i64) -> MobiusMap {
        MobiusMap::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn identity() -> MobiusMap {
        MobiusMap::from_i64(1, 0, 0, 1)
    }

    /// The translation `tau^n : z -> z + 2n`.
    pub fn tau_pow(n: i64) -> MobiusMap {
        MobiusMap::from_i64(1, 2 * n, 0, 1)
    }

    /// The inversion `sigma : z -> -1/z`.
    pub fn sigma() -> MobiusMap {
        MobiusMap::from_i64(0, -1, 1, 0)
    }

    /// Matrix of the inverse branch `h_{(a,eps)_s}`.
    pub fn digit_matrix(d: Digit) -> MobiusMap {
        let a = BigInt::from(d.a());
        let eps = BigInt::from(d.eps());
        match d.parity() {
            Parity::E => MobiusMap::new(BigInt::zero(), BigInt::one(), eps, 2 * a),
            Parity::O => {
                let u = a - BigInt::from(d.eps_bar());
                MobiusMap::new(
                    u.clone(),
                    &u + &eps,
                    &u + 1,
                    u + eps + 1,
                )
            }
        }
    }

    pub fn entries(&self) -> (&BigInt, &BigInt, &BigInt, &BigInt) {
        (&self.a, &self.b, &self.c, &self.d)
    }

    pub fn det(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn transpose(&self) -> MobiusMap {
        MobiusMap::new(self.a.clone(), self.c.clone(), self.b.clone(), self.d.clone())
    }

    /// Conjugation by `diag(1, -1)`, i.e. the matrix of `z -> -m(-z)`.
    pub fn mirror(&self) -> MobiusMap {
        MobiusMap::new(self.a.clone(), -&self.b, -&self.c, self.d.clone())
    }

    /// Fractional linear action on a scalar.
    ///
    /// Exact scalars evaluate exactly; floats are lifted through rational
    /// arithmetic (every float is a rational) and rounded once, so the
    /// action never suffers the cancellation of `a x + b` at large
    /// entries.
    pub fn apply<S: Scalar>(&self, x: &S) -> S {
        if !S::EXACT {
            if let Some(r) = num_rational::BigRational::from_float(x.to_f64()) {
                let num = &self.a * r.numer() + &self.b * r.denom();
                let den = &self.c * r.numer() + &self.d * r.denom();
                if !num_traits::Zero::is_zero(&den) {
                    return S::from_bigint_ratio(&num, &den);
                }
            }
        }
        let a = S::from_bigint_ratio(&self.a, &BigInt::one());
        let b = S::from_bigint_ratio(&self.b, &BigInt::one());
        let c = S::from_bigint_ratio(&self.c, &BigInt::one());
        let d = S::from_bigint_ratio(&self.d, &BigInt::one());
        (a * x.clone() + b) / (c * x.clone() + d)
    }

    /// Action on the extended line; `f64::INFINITY` maps to `a/c`.
    pub fn apply_extended(&self, x: f64) -> f64 {
        let (a, b, c, d) = (
            big_to_f64(&self.a),
            big_to_f64(&self.b),
            big_to_f64(&self.c),
            big_to_f64(&self.d),
        );
        if x.is_infinite() {
            if c == 0.0 {
                return f64::INFINITY;
            }
            return a / c;
        }
        let den = c * x + d;
        if den == 0.0 {
            return f64::INFINITY;
        }
        (a * x + b) / den
    }

    pub fn is_identity(&self) -> bool {
        (self.a == self.d && self.b.is_zero() && self.c.is_zero() && !self.a.is_zero())
            && (self.a.abs() == BigInt::one())
    }
}

fn big_to_f64(n: &BigInt) -> f64 {
    use num_traits::ToPrimitive;
    n.to_f64().unwrap_or(f64::NAN)
}

impl Mul for &MobiusMap {
    type Output = MobiusMap;
    fn mul(self, rhs: &MobiusMap) -> MobiusMap {
        MobiusMap::new(
            &self.a * &rhs.a + &self.b * &rhs.c,
            &self.a * &rhs.b + &self.b * &rhs.d,
            &self.c * &rhs.a + &self.d * &rhs.c,
            &self.c * &rhs.b + &self.d * &rhs.d,
        )
    }
}

impl Mul for MobiusMap {
    type Output = MobiusMap;
    fn mul(self, rhs: MobiusMap) -> MobiusMap {
        &self * &rhs
    }
}

impl fmt::Debug for MobiusMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}
