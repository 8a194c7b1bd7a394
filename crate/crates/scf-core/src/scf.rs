//! The spliced continued fraction map `T` and its expansion machinery.
//!
//! `T` acts on `(0, 1)` by `1/x - 2k` or `2k - 1/x` on the even side
//! `(0, 1/2]` and by `(kx - (k-1))/(k - (k+1)x)` or its reciprocal on the
//! odd side `(1/2, 1)`. Interval conventions: the e-type branch intervals
//! are closed on the left, the o-type intervals closed on the right, with
//! `I_{(1,+1)_e} = [1/3, 1/2]`.

use std::cmp::Ordering;

use num_integer::Integer;
use num_traits::{One, Signed};

use crate::digit::{Digit, Parity};
use crate::error::{Result, ScfError};
use crate::scalar::Scalar;

/// Default cap on partial quotients in float mode: classification of
/// digits beyond this size loses float precision near 0 and 1.
pub const DEFAULT_A_MAX: u64 = 1_000_000_000;

/// Absorption band around the fixed endpoints 0 and 1 in float mode.
pub const ABSORPTION_TOL: f64 = 1e-14;

/// A finite SCF expansion prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expansion {
    pub digits: Vec<Digit>,
    /// True when the orbit reached 0 or 1 before the requested depth.
    pub terminated: bool,
}

/// True when the orbit should be treated as having reached 0 or 1.
pub fn is_absorbed<S: Scalar>(x: &S) -> bool {
    if S::EXACT {
        x.cmp_ratio(0, 1) == Ordering::Equal || x.cmp_ratio(1, 1) == Ordering::Equal
    } else {
        let v = x.to_f64();
        v.abs() < ABSORPTION_TOL || (v - 1.0).abs() < ABSORPTION_TOL
    }
}

fn check_domain<S: Scalar>(x: &S) -> Result<()> {
    if x.cmp_ratio(0, 1) != Ordering::Greater || x.cmp_ratio(1, 1) != Ordering::Less {
        return Err(ScfError::OutsideUnitInterval(x.to_f64()));
    }
    Ok(())
}

/// The digit `(k, eps)_s` of the branch interval containing `x`.
pub fn classify<S: Scalar>(x: &S) -> Result<Digit> {
    classify_capped(x, DEFAULT_A_MAX)
}

/// As [`classify`] with an explicit cap on the partial quotient.
pub fn classify_capped<S: Scalar>(x: &S, a_max: u64) -> Result<Digit> {
    check_domain(x)?;
    if x.cmp_ratio(1, 2) != Ordering::Greater {
        classify_even(x, a_max)
    } else {
        classify_odd(x, a_max)
    }
}

/// Even side `x ∈ (0, 1/2]`:
/// `[1/(2k+1), 1/(2k))` carries `(k,+1)_e`, `[1/(2k), 1/(2k-1))` carries
/// `(k,-1)_e`, and `[1/3, 1/2]` carries `(1,+1)_e`.
fn classify_even<S: Scalar>(x: &S, a_max: u64) -> Result<Digit> {
    if x.cmp_ratio(1, 3) != Ordering::Less {
        return Digit::new(1, 1, Parity::E);
    }
    let t = 1.0 / x.to_f64();
    if t > 2.0 * a_max as f64 + 1.0 {
        return Err(ScfError::DigitCapExceeded { cap: a_max });
    }
    let guess = (t / 2.0).round() as i64;
    for k in (guess - 2).max(2)..=guess + 2 {
        // x ∈ [1/(2k+1), 1/(2k))  =>  (k, +1)_e
        if x.cmp_ratio(1, 2 * k + 1) != Ordering::Less && x.cmp_ratio(1, 2 * k) == Ordering::Less {
            return Digit::new(k as u64, 1, Parity::E);
        }
        // x ∈ [1/(2k), 1/(2k-1))  =>  (k, -1)_e
        if x.cmp_ratio(1, 2 * k) != Ordering::Less && x.cmp_ratio(1, 2 * k - 1) == Ordering::Less {
            return Digit::new(k as u64, -1, Parity::E);
        }
    }
    Err(ScfError::InvalidParameter(format!(
        "even-side digit bracketing failed at x = {}",
        x.to_f64()
    )))
}

/// Odd side `x ∈ (1/2, 1)`:
/// `((k-1)/k, (2k-1)/(2k+1)]` carries `(k,-1)_o`,
/// `((2k-1)/(2k+1), k/(k+1)]` carries `(k,+1)_o`.
fn classify_odd<S: Scalar>(x: &S, a_max: u64) -> Result<Digit> {
    let w = 1.0 / (1.0 - x.to_f64());
    if w > a_max as f64 + 1.0 {
        return Err(ScfError::DigitCapExceeded { cap: a_max });
    }
    let guess = w.floor() as i64;
    for k in (guess - 2).max(2)..=guess + 2 {
        // x ∈ ((k-1)/k, (2k-1)/(2k+1)]  =>  (k, -1)_o
        if x.cmp_ratio(k - 1, k) == Ordering::Greater
            && x.cmp_ratio(2 * k - 1, 2 * k + 1) != Ordering::Greater
        {
            return Digit::new(k as u64, -1, Parity::O);
        }
        // x ∈ ((2k-1)/(2k+1), k/(k+1)]  =>  (k, +1)_o
        if x.cmp_ratio(2 * k - 1, 2 * k + 1) == Ordering::Greater
            && x.cmp_ratio(k, k + 1) != Ordering::Greater
        {
            return Digit::new(k as u64, 1, Parity::O);
        }
    }
    Err(ScfError::InvalidParameter(format!(
        "odd-side digit bracketing failed at x = {}",
        x.to_f64()
    )))
}

/// Keep float iterates inside `[0, 1]` against rounding.
fn clamp_unit<S: Scalar>(x: S) -> S {
    if S::EXACT {
        return x;
    }
    if x.cmp_ratio(0, 1) == Ordering::Less {
        S::zero()
    } else if x.cmp_ratio(1, 1) == Ordering::Greater {
        S::one()
    } else {
        x
    }
}

/// Apply the branch of `T` selected by `d` to `x`.
pub fn branch_map<S: Scalar>(d: Digit, x: &S) -> S {
    let a = d.a() as i64;
    let out = match (d.parity(), d.eps()) {
        (Parity::E, 1) => x.recip() - S::int(2 * a),
        (Parity::E, _) => S::int(2 * a) - x.recip(),
        // (k,-1)_o : (kx - (k-1)) / (k - (k+1)x)
        (Parity::O, -1) => {
            (S::int(a) * x.clone() - S::int(a - 1)) / (S::int(a) - S::int(a + 1) * x.clone())
        }
        // (k,+1)_o : (k - (k+1)x) / (kx - (k-1))
        (Parity::O, _) => {
            (S::int(a) - S::int(a + 1) * x.clone()) / (S::int(a) * x.clone() - S::int(a - 1))
        }
    };
    clamp_unit(out)
}

/// One step of the SCF map: the digit of `x` together with `T(x)`.
pub fn step<S: Scalar>(x: &S) -> Result<(Digit, S)> {
    let d = classify(x)?;
    Ok((d, branch_map(d, x)))
}

/// Expand `x` to at most `depth` digits, stopping early when the orbit is
/// absorbed at 0 or 1.
pub fn expand<S: Scalar>(x: &S, depth: usize) -> Result<Expansion> {
    check_domain(x)?;
    let mut digits = Vec::with_capacity(depth.min(1024));
    let mut cur = x.clone();
    let mut terminated = false;
    for _ in 0..depth {
        if is_absorbed(&cur) {
            terminated = true;
            break;
        }
        let (d, next) = step(&cur)?;
        digits.push(d);
        cur = next;
    }
    if !terminated && is_absorbed(&cur) {
        terminated = true;
    }
    Ok(Expansion { digits, terminated })
}

/// The inverse branch `h_{(a,eps)_s}` evaluated at `t ∈ [0, 1]`.
///
/// `h_{(a,eps)_e}(t) = 1/(2a + eps t)`; the o-type branch is the Möbius
/// action of `((u, u+eps), (u+1, u+eps+1))` with `u = a - max(0, eps)`.
pub fn inverse_branch<S: Scalar>(d: Digit, t: &S) -> S {
    let a = d.a() as i64;
    let eps = d.eps() as i64;
    match d.parity() {
        Parity::E => (S::int(2 * a) + S::int(eps) * t.clone()).recip(),
        Parity::O => {
            let u = a - d.eps_bar() as i64;
            (S::int(u) * t.clone() + S::int(u + eps))
                / (S::int(u + 1) * t.clone() + S::int(u + eps + 1))
        }
    }
}

/// Left-to-right composition of inverse branches applied to `tail`; with
/// `tail = T^n x` this recovers `x`.
pub fn reconstruct<S: Scalar>(digits: &[Digit], tail: &S) -> S {
    digits
        .iter()
        .rev()
        .fold(tail.clone(), |acc, &d| inverse_branch(d, &acc))
}

/// The involution `ι(x) = (1 - x)/(1 + x)`; conjugates `T` to itself and
/// substitutes every digit by [`Digit::substitute`].
pub fn involution<S: Scalar>(x: &S) -> S {
    (S::one() - x.clone()) / (S::one() + x.clone())
}

/// Whether `x` is an endpoint of some branch interval (equivalently,
/// `1/x` lies in the escape set of the geodesic return map). Exact inputs
/// are tested exactly, floats within `rel_tol` relative distance.
pub fn is_branch_endpoint<S: Scalar>(x: &S, rel_tol: f64) -> bool {
    if let Some(r) = x.as_rational() {
        if r.is_negative() || r > num_rational::BigRational::one() {
            return false;
        }
        let p = r.numer();
        let q = r.denom();
        // 1/m family (all e-side endpoints), (k-1)/k and (2k-1)/(2k+1)
        // families (o-side endpoints)
        return p.is_one()
            || (q - p).is_one()
            || (q - p == 2.into() && Integer::is_odd(p) && Integer::is_odd(q));
    }
    let v = x.to_f64();
    if !(0.0..=1.0).contains(&v) {
        return false;
    }
    let near = |target: f64| (v - target).abs() <= rel_tol * target.abs().max(v.abs());
    // 1/m
    let m = (1.0 / v).round();
    if m >= 2.0 && near(1.0 / m) {
        return true;
    }
    // (k-1)/k
    let k = (1.0 / (1.0 - v)).round();
    if k >= 2.0 && near((k - 1.0) / k) {
        return true;
    }
    // (2k-1)/(2k+1)
    let k = ((1.0 + v) / (2.0 * (1.0 - v))).round();
    if k >= 2.0 && near((2.0 * k - 1.0) / (2.0 * k + 1.0)) {
        return true;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Exact;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn rat(num: i64, den: i64) -> Exact {
        Exact::ratio(num, den)
    }

    /// x* = (-1 + sqrt(13/5))/2 = (-5 + sqrt(65))/10, the fixed point of
    /// h_{(2,-1)_e} ∘ h_{(3,+1)_o}.
    fn x_star() -> Exact {
        Exact::new(
            BigRational::new((-1).into(), 2.into()),
            BigRational::new(1.into(), 10.into()),
            65,
        )
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(&0.4).unwrap(), Digit::unit());
        assert_eq!(
            classify(&0.75).unwrap(),
            Digit::new(3, 1, Parity::O).unwrap()
        );
        assert_eq!(
            classify(&x_star()).unwrap(),
            Digit::new(2, -1, Parity::E).unwrap()
        );
        // float route agrees
        assert_eq!(
            classify(&x_star().to_f64()).unwrap(),
            Digit::new(2, -1, Parity::E).unwrap()
        );
    }

    #[test]
    fn classify_domain_errors() {
        assert!(matches!(
            classify(&0.0),
            Err(ScfError::OutsideUnitInterval(_))
        ));
        assert!(matches!(
            classify(&1.0),
            Err(ScfError::OutsideUnitInterval(_))
        ));
        assert!(matches!(
            classify(&-0.25),
            Err(ScfError::OutsideUnitInterval(_))
        ));
        assert!(matches!(
            classify(&1e-12),
            Err(ScfError::DigitCapExceeded { .. })
        ));
    }

    #[test]
    fn half_open_conventions_at_boundaries() {
        // 1/2 and 1/3 belong to (1,+1)_e; 1/4 starts (2,-1)_e; 1/5 starts (2,+1)_e
        assert_eq!(classify(&rat(1, 2)).unwrap(), Digit::unit());
        assert_eq!(classify(&rat(1, 3)).unwrap(), Digit::unit());
        assert_eq!(
            classify(&rat(1, 4)).unwrap(),
            Digit::new(2, -1, Parity::E).unwrap()
        );
        assert_eq!(
            classify(&rat(1, 5)).unwrap(),
            Digit::new(2, 1, Parity::E).unwrap()
        );
        // o-side: intervals closed on the right
        assert_eq!(
            classify(&rat(3, 5)).unwrap(),
            Digit::new(2, -1, Parity::O).unwrap()
        );
        assert_eq!(
            classify(&rat(2, 3)).unwrap(),
            Digit::new(2, 1, Parity::O).unwrap()
        );
        assert_eq!(
            classify(&rat(3, 4)).unwrap(),
            Digit::new(3, 1, Parity::O).unwrap()
        );
    }

    #[test]
    fn step_examples() {
        let (d, t) = step(&0.4).unwrap();
        assert_eq!(d, Digit::unit());
        assert!((t - 0.5).abs() < 1e-15);

        let (d, t) = step(&rat(3, 4)).unwrap();
        assert_eq!(d, Digit::new(3, 1, Parity::O).unwrap());
        assert_eq!(t, rat(0, 1));

        // T(x*) = 4 - 1/x* = (11 - sqrt(65))/4, exactly
        let (d, t) = step(&x_star()).unwrap();
        assert_eq!(d, Digit::new(2, -1, Parity::E).unwrap());
        let expected = Exact::new(
            BigRational::new(11.into(), 4.into()),
            BigRational::new(BigInt::from(-1), 4.into()),
            65,
        );
        assert_eq!(t, expected);
        assert!((t.to_f64() - 0.7344356).abs() < 1e-6);
    }

    #[test]
    fn expand_periodic_and_terminating() {
        let e = expand(&x_star(), 4).unwrap();
        let d2me = Digit::new(2, -1, Parity::E).unwrap();
        let d3po = Digit::new(3, 1, Parity::O).unwrap();
        assert_eq!(e.digits, vec![d2me, d3po, d2me, d3po]);
        assert!(!e.terminated);

        let e = expand(&rat(3, 4), 4).unwrap();
        assert_eq!(e.digits, vec![d3po]);
        assert!(e.terminated);

        // sqrt(2) - 1 is fixed by (1,+1)_e
        let s2m1 = Exact::new(
            BigRational::from_integer((-1).into()),
            BigRational::from_integer(1.into()),
            2,
        );
        let e = expand(&s2m1, 3).unwrap();
        assert_eq!(e.digits, vec![Digit::unit(); 3]);
    }

    #[test]
    fn inverse_branch_examples() {
        assert!((inverse_branch(Digit::unit(), &0.0) - 0.5).abs() < 1e-15);
        let d = Digit::new(2, -1, Parity::E).unwrap();
        let x = inverse_branch(d, &0.7344356);
        assert!((x - 0.3062258).abs() < 1e-6);
        let d = Digit::new(3, 1, Parity::O).unwrap();
        assert_eq!(inverse_branch(d, &rat(0, 1)), rat(3, 4));
    }

    #[test]
    fn inverse_branch_inverts_t() {
        let mut lcg = 123456789u64;
        let mut rand01 = move || {
            lcg = lcg.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (lcg >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..1000 {
            let a = 2 + (rand01() * 99.0) as u64;
            let eps = if rand01() < 0.5 { 1 } else { -1 };
            let parity = if rand01() < 0.5 { Parity::E } else { Parity::O };
            let Ok(d) = Digit::new(a, eps, parity) else {
                continue;
            };
            let t = rand01();
            let x = inverse_branch(d, &t);
            assert_eq!(classify(&x).unwrap(), d, "digit mismatch for {d} at t={t}");
            let (_, back) = step(&x).unwrap();
            // float conditioning of the o-branches grows like a^2 eps
            let tol = if a <= 40 { 1e-12 } else { 5e-12 };
            assert!((back - t).abs() < tol, "T(h_d(t)) != t for {d}");
            // and the identity is exact in exact arithmetic
            let te = Exact::from_f64(t).unwrap();
            let xe = inverse_branch(d, &te);
            let (_, back_e) = step(&xe).unwrap();
            assert_eq!(back_e, te, "exact branch inversion failed for {d}");
        }
    }

    #[test]
    fn reconstruct_examples() {
        assert!((reconstruct(&[Digit::unit()], &0.0) - 0.5).abs() < 1e-15);
        assert_eq!(
            reconstruct(&[Digit::new(3, 1, Parity::O).unwrap()], &rat(0, 1)),
            rat(3, 4)
        );
        // contraction toward the periodic point
        let d2me = Digit::new(2, -1, Parity::E).unwrap();
        let d3po = Digit::new(3, 1, Parity::O).unwrap();
        let word: Vec<Digit> = std::iter::repeat([d2me, d3po]).take(10).flatten().collect();
        let x = reconstruct(&word, &0.3);
        assert!((x - x_star().to_f64()).abs() < 1e-10);
    }

    #[test]
    fn round_trip_float_and_exact() {
        for &x in &[0.1234567891, 0.3062257748, 0.5730298, 0.9417362] {
            let e = expand(&x, 30).unwrap();
            let mut t = x;
            for _ in 0..e.digits.len() {
                t = step(&t).unwrap().1;
            }
            let back = reconstruct(&e.digits, &t);
            assert!((back - x).abs() < 1e-10, "round trip failed at {x}");
        }
        // exact rationals reconstruct exactly
        let x = rat(355, 1130);
        let e = expand(&x, 30).unwrap();
        assert!(e.terminated);
        let mut t = x.clone();
        for _ in 0..e.digits.len() {
            t = step(&t).unwrap().1;
        }
        assert_eq!(reconstruct(&e.digits, &t), x);
    }

    #[test]
    fn involution_and_substitution() {
        assert_eq!(involution(&rat(1, 3)), rat(1, 2));
        let x = 0.2873612;
        assert!((involution(&involution(&x)) - x).abs() < 1e-15);

        // digits(iota x*) = phi(digits(x*))
        let ix = involution(&x_star());
        let e = expand(&ix, 2).unwrap();
        assert_eq!(
            e.digits,
            vec![
                Digit::new(2, -1, Parity::O).unwrap(),
                Digit::new(3, 1, Parity::E).unwrap()
            ]
        );
    }

    #[test]
    fn conjugacy_exact_on_rationals() {
        let mut lcg = 99999u64;
        let mut next = move || {
            lcg = lcg.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            lcg >> 16
        };
        for _ in 0..200 {
            let q = 1_000_000_007u64;
            let p = next() % (q - 2) + 1;
            let x = Exact::from_bigint_ratio(&BigInt::from(p), &BigInt::from(q));
            let ex = expand(&x, 30).unwrap();
            let eix = expand(&involution(&x), 30).unwrap();
            let phi: Vec<Digit> = ex.digits.iter().map(|d| d.substitute()).collect();
            assert_eq!(eix.digits, phi);
            assert_eq!(eix.terminated, ex.terminated);
        }
    }

    #[test]
    fn branch_endpoint_detection() {
        assert!(is_branch_endpoint(&rat(1, 4), 0.0));
        assert!(is_branch_endpoint(&rat(2, 3), 0.0));
        assert!(is_branch_endpoint(&rat(5, 7), 0.0));
        assert!(!is_branch_endpoint(&rat(2, 7), 0.0));
        assert!(is_branch_endpoint(&0.25, 1e-12));
        assert!(is_branch_endpoint(&(5.0 / 7.0), 1e-12));
        assert!(!is_branch_endpoint(&0.2873, 1e-12));
        assert!(!is_branch_endpoint(&x_star(), 0.0));
    }

    #[test]
    fn partition_property() {
        // every point of (0,1) gets exactly one digit whose interval
        // contains it (membership recomputed from endpoint formulas)
        let mut lcg = 7u64;
        let mut rand01 = move || {
            lcg = lcg.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (lcg >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..10_000 {
            let x = rand01();
            if x <= 0.0 || x >= 1.0 {
                continue;
            }
            let d = classify(&x).unwrap();
            let a = d.a() as f64;
            let (lo, hi, lo_closed, hi_closed) = match (d.parity(), d.eps()) {
                (Parity::E, 1) if d.a() == 1 => (1.0 / 3.0, 0.5, true, true),
                (Parity::E, 1) => (1.0 / (2.0 * a + 1.0), 1.0 / (2.0 * a), true, false),
                (Parity::E, _) => (1.0 / (2.0 * a), 1.0 / (2.0 * a - 1.0), true, false),
                (Parity::O, -1) => ((a - 1.0) / a, (2.0 * a - 1.0) / (2.0 * a + 1.0), false, true),
                (Parity::O, _) => ((2.0 * a - 1.0) / (2.0 * a + 1.0), a / (a + 1.0), false, true),
            };
            let in_lo = if lo_closed { x >= lo } else { x > lo };
            let in_hi = if hi_closed { x <= hi } else { x < hi };
            assert!(in_lo && in_hi, "x={x} not inside its interval for {d}");
        }
    }
}
