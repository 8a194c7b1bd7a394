//! The dual SCF map on `[sqrt(3)-2, sqrt(3)]`.
//!
//! The dual inverse branches record reversed digit history; composing them
//! from any seed generates the domain, whose branch intervals have
//! endpoints of the form `±1/(2b+c+sqrt(3))` and
//! `(2b+c+sqrt(3))/(2b+c'+sqrt(3))`.
//!
//! The printed branch intervals are closed and share endpoints; this
//! implementation resolves every tie toward the interval having that point
//! as its left endpoint (so all intervals are closed-left, open-right),
//! except the domain maximum `sqrt(3)`, which is assigned to `(2,-1)_o`,
//! the digit fixing it.

use std::cmp::Ordering;

use crate::digit::{Digit, Parity};
use crate::error::{Result, ScfError};
use crate::scalar::Scalar;
use crate::scf::{Expansion, DEFAULT_A_MAX};

/// Absorption band around the dual fixed points 0 and 1 in float mode.
pub const DUAL_ABSORPTION_TOL: f64 = 1e-14;

fn sqrt3_minus_2<S: Scalar>() -> S {
    S::sqrt3() - S::int(2)
}

/// `(m + sqrt(3)) / (n + sqrt(3))`.
fn frac_sqrt3<S: Scalar>(m: i64, n: i64) -> S {
    (S::int(m) + S::sqrt3()) / (S::int(n) + S::sqrt3())
}

/// `sign / (m + sqrt(3))`.
fn inv_sqrt3<S: Scalar>(sign: i64, m: i64) -> S {
    S::int(sign) / (S::int(m) + S::sqrt3())
}

fn check_dual_domain<S: Scalar>(y: &S) -> Result<()> {
    let lo = sqrt3_minus_2::<S>();
    let hi = S::sqrt3();
    if y.cmp_scalar(&lo) == Ordering::Less || y.cmp_scalar(&hi) == Ordering::Greater {
        return Err(ScfError::OutsideDualDomain(y.to_f64()));
    }
    Ok(())
}

/// True when the dual orbit reached a fixed endpoint 0 or 1.
pub fn dual_is_absorbed<S: Scalar>(y: &S) -> bool {
    if S::EXACT {
        y.cmp_ratio(0, 1) == Ordering::Equal || y.cmp_ratio(1, 1) == Ordering::Equal
    } else {
        let v = y.to_f64();
        v.abs() < DUAL_ABSORPTION_TOL || (v - 1.0).abs() < DUAL_ABSORPTION_TOL
    }
}

/// Left and right endpoints of the dual branch interval of `d`.
pub fn dual_interval<S: Scalar>(d: Digit) -> (S, S) {
    let b = d.a() as i64;
    match (d.parity(), d.eps()) {
        (Parity::E, -1) => (inv_sqrt3(-1, 2 * b - 2), inv_sqrt3(-1, 2 * b)),
        (Parity::E, _) => (inv_sqrt3(1, 2 * b), inv_sqrt3(1, 2 * b - 2)),
        (Parity::O, 1) => (frac_sqrt3(2 * b - 3, 2 * b - 1), frac_sqrt3(2 * b - 1, 2 * b + 1)),
        (Parity::O, _) => (frac_sqrt3(2 * b + 1, 2 * b - 1), frac_sqrt3(2 * b - 1, 2 * b - 3)),
    }
}

fn in_dual_interval<S: Scalar>(y: &S, d: Digit) -> bool {
    let (lo, hi) = dual_interval::<S>(d);
    y.cmp_scalar(&lo) != Ordering::Less && y.cmp_scalar(&hi) == Ordering::Less
}

/// The digit of the dual branch interval containing `y`.
pub fn dual_classify<S: Scalar>(y: &S) -> Result<Digit> {
    dual_classify_capped(y, DEFAULT_A_MAX)
}

pub fn dual_classify_capped<S: Scalar>(y: &S, a_max: u64) -> Result<Digit> {
    check_dual_domain(y)?;
    if dual_is_absorbed(y) {
        return Err(ScfError::Terminated);
    }
    let v = y.to_f64();
    let sqrt3 = crate::SQRT3;

    // the domain maximum belongs to the digit fixing it
    if y.cmp_scalar(&S::sqrt3()) == Ordering::Equal {
        return Digit::new(2, -1, Parity::O);
    }

    let (eps, parity, guess, b_min): (i8, Parity, f64, i64) = if v < 0.0 {
        (-1, Parity::E, (1.0 / -v - sqrt3) / 2.0 + 1.0, 2)
    } else if y.cmp_scalar(&S::sqrt3().recip()) == Ordering::Less {
        (1, Parity::E, (1.0 / v - sqrt3) / 2.0 + 1.0, 1)
    } else if v < 1.0 {
        (1, Parity::O, (2.0 / (1.0 - v) + 1.0 - sqrt3) / 2.0, 2)
    } else {
        (-1, Parity::O, (2.0 / (v - 1.0) + 1.0 - sqrt3) / 2.0, 2)
    };

    if !guess.is_finite() || guess > a_max as f64 + 2.0 {
        return Err(ScfError::DigitCapExceeded { cap: a_max });
    }
    let guess = guess.round() as i64;
    for b in (guess - 2).max(b_min)..=guess + 2 {
        // the unit digit only exists with eps = +1, parity e
        let Ok(d) = Digit::new(b as u64, eps, parity) else {
            continue;
        };
        if in_dual_interval(y, d) {
            if b as u64 > a_max {
                return Err(ScfError::DigitCapExceeded { cap: a_max });
            }
            return Ok(d);
        }
    }
    Err(ScfError::InvalidParameter(format!(
        "dual digit bracketing failed at y = {v}"
    )))
}

fn clamp_dual<S: Scalar>(y: S) -> S {
    if S::EXACT {
        return y;
    }
    let lo = sqrt3_minus_2::<S>();
    let hi = S::sqrt3();
    if y.cmp_scalar(&lo) == Ordering::Less {
        lo
    } else if y.cmp_scalar(&hi) == Ordering::Greater {
        hi
    } else {
        y
    }
}

/// Apply the dual branch selected by `d` to `y`.
pub fn dual_branch_map<S: Scalar>(d: Digit, y: &S) -> S {
    let k = d.a() as i64;
    let out = match (d.parity(), d.eps()) {
        (Parity::E, -1) => -y.recip() - S::int(2 * k),
        (Parity::E, _) => y.recip() - S::int(2 * k),
        // (k,+1)_o : (k - (k+1)y)/(ky - (k-1))
        (Parity::O, 1) => {
            (S::int(k) - S::int(k + 1) * y.clone()) / (S::int(k) * y.clone() - S::int(k - 1))
        }
        // (k,-1)_o : (ky - (k+1))/(k - (k-1)y)
        (Parity::O, _) => {
            (S::int(k) * y.clone() - S::int(k + 1)) / (S::int(k) - S::int(k - 1) * y.clone())
        }
    };
    clamp_dual(out)
}

/// One step of the dual map: the digit of `y` together with its image.
pub fn dual_step<S: Scalar>(y: &S) -> Result<(Digit, S)> {
    let d = dual_classify(y)?;
    Ok((d, dual_branch_map(d, y)))
}

/// Expand `y` into dual digits, stopping early at 0 or 1.
pub fn dual_expand<S: Scalar>(y: &S, depth: usize) -> Result<Expansion> {
    check_dual_domain(y)?;
    let mut digits = Vec::with_capacity(depth.min(1024));
    let mut cur = y.clone();
    let mut terminated = false;
    for _ in 0..depth {
        if dual_is_absorbed(&cur) {
            terminated = true;
            break;
        }
        let (d, next) = dual_step(&cur)?;
        digits.push(d);
        cur = next;
    }
    if !terminated && dual_is_absorbed(&cur) {
        terminated = true;
    }
    Ok(Expansion { digits, terminated })
}

/// The dual inverse branch `h̄_{(b,eta)_t}`; maps the whole dual domain
/// into its branch interval.
pub fn dual_inverse_branch<S: Scalar>(d: Digit, y: &S) -> S {
    let b = d.a() as i64;
    let eta = d.eps() as i64;
    let out = match d.parity() {
        Parity::E => S::int(eta) / (S::int(2 * b) + y.clone()),
        Parity::O => {
            // transpose of the digit matrix: ((u, u+1), (u+eta, u+eta+1))
            let u = b - d.eps_bar() as i64;
            (S::int(u) * y.clone() + S::int(u + 1))
                / (S::int(u + eta) * y.clone() + S::int(u + eta + 1))
        }
    };
    clamp_dual(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Exact;
    use num_rational::BigRational;

    /// y† = (-9 + 4 sqrt(3)) / 11, periodic with digits (2,-1)_e, (3,-1)_o.
    fn y_dagger() -> Exact {
        Exact::new(
            BigRational::new((-9).into(), 11.into()),
            BigRational::new(4.into(), 11.into()),
            3,
        )
    }

    #[test]
    fn dual_classify_example() {
        let d = dual_classify(&y_dagger()).unwrap();
        assert_eq!(d, Digit::new(2, -1, Parity::E).unwrap());
        let d = dual_classify(&y_dagger().to_f64()).unwrap();
        assert_eq!(d, Digit::new(2, -1, Parity::E).unwrap());
    }

    #[test]
    fn dual_period_two() {
        let (d1, y1) = dual_step(&y_dagger()).unwrap();
        assert_eq!(d1, Digit::new(2, -1, Parity::E).unwrap());
        let (d2, y2) = dual_step(&y1).unwrap();
        assert_eq!(d2, Digit::new(3, -1, Parity::O).unwrap());
        assert_eq!(y2, y_dagger());
    }

    #[test]
    fn sqrt3_is_fixed_by_2m1o() {
        let s3 = Exact::sqrt(3);
        let d = dual_classify(&s3).unwrap();
        assert_eq!(d, Digit::new(2, -1, Parity::O).unwrap());
        let (_, next) = dual_step(&s3).unwrap();
        assert_eq!(next, s3);
        // the inverse branch fixes it as well
        assert_eq!(dual_inverse_branch(d, &s3), s3);
    }

    #[test]
    fn domain_min_is_limit_of_2m1e() {
        let d = Digit::new(2, -1, Parity::E).unwrap();
        let mut y = 0.0_f64;
        for _ in 0..60 {
            y = dual_inverse_branch(d, &y);
        }
        assert!((y - (crate::SQRT3 - 2.0)).abs() < 1e-12);
    }

    #[test]
    fn dual_inverse_branch_examples() {
        let d = Digit::new(2, -1, Parity::E).unwrap();
        assert_eq!(dual_inverse_branch(d, &Exact::ratio(0, 1)), Exact::ratio(-1, 4));
        assert!((dual_inverse_branch(Digit::unit(), &0.0f64) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn dual_domain_errors() {
        assert!(matches!(
            dual_classify(&-0.5f64),
            Err(ScfError::OutsideDualDomain(_))
        ));
        assert!(matches!(
            dual_classify(&1.8f64),
            Err(ScfError::OutsideDualDomain(_))
        ));
        assert!(matches!(dual_classify(&0.0f64), Err(ScfError::Terminated)));
        assert!(matches!(dual_classify(&1.0f64), Err(ScfError::Terminated)));
    }

    #[test]
    fn dual_domain_closure_at_endpoints() {
        // h̄_d maps [sqrt3-2, sqrt3] into itself for all digits a <= 100,
        // checked exactly at both endpoints
        let lo = Exact::sqrt(3) - Exact::ratio(2, 1);
        let hi = Exact::sqrt(3);
        for a in 1..=100u64 {
            for &eps in &[1i8, -1] {
                for &parity in &[Parity::E, Parity::O] {
                    let Ok(d) = Digit::new(a, eps, parity) else {
                        continue;
                    };
                    for y in [lo.clone(), hi.clone()] {
                        let img = dual_inverse_branch(d, &y);
                        assert_ne!(img.cmp_scalar(&lo), std::cmp::Ordering::Less, "{d}");
                        assert_ne!(img.cmp_scalar(&hi), std::cmp::Ordering::Greater, "{d}");
                    }
                }
            }
        }
    }

    #[test]
    fn inverse_branch_image_lands_in_its_interval() {
        let mut lcg = 42u64;
        let mut rand01 = move || {
            lcg = lcg.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (lcg >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..2000 {
            let a = 1 + (rand01() * 40.0) as u64;
            let eps = if rand01() < 0.5 { 1 } else { -1 };
            let parity = if rand01() < 0.5 { Parity::E } else { Parity::O };
            let Ok(d) = Digit::new(a, eps, parity) else {
                continue;
            };
            let y = (crate::SQRT3 - 2.0) + rand01() * 2.0;
            let img = dual_inverse_branch(d, &y);
            match dual_classify(&img) {
                Ok(back) => assert_eq!(back, d, "image of {d} classified as {back}"),
                // the image can only fail to classify at interval
                // endpoints, where float ties are legitimate
                Err(e) => panic!("classification failed for {d}: {e}"),
            }
            // T̂ inverts the branch
            let back = dual_branch_map(d, &img);
            assert!((back - y).abs() < 1e-9, "dual branch inversion for {d}");
        }
    }

    #[test]
    fn dual_partition_of_domain() {
        let mut lcg = 977u64;
        let mut rand01 = move || {
            lcg = lcg.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (lcg >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..10_000 {
            let y = (crate::SQRT3 - 2.0) + rand01() * 2.0;
            if dual_is_absorbed(&y) {
                continue;
            }
            let d = dual_classify(&y).unwrap();
            assert!(in_dual_interval(&y, d));
        }
    }
}
