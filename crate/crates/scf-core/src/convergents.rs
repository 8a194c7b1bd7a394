//! Exact integer convergent matrices `M_n = M_{A_1} ... M_{A_n}` and the
//! parity-substituted products `M̂_n`, with the column identities relating
//! the two and the `R_N` selector used by the excursion-product bounds.

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::digit::{Digit, Parity};
use crate::error::{Result, ScfError};
use crate::mobius::MobiusMap;

/// Running product of digit matrices together with the substituted
/// product. The previous-step matrices are carried for the O(1) column
/// identity check, and the `Q` column history for `R_N`.
#[derive(Clone, Debug)]
pub struct ConvergentState {
    m: MobiusMap,
    m_hat: MobiusMap,
    prev: (MobiusMap, MobiusMap),
    digits: Vec<Digit>,
    q_history: Vec<BigInt>,
}

/// The `(1,1), (1,2), (2,1), (2,2)` entries of `M_n`, read as
/// `U_n, P_n, V_n, Q_n` so that `M_n · 0 = P_n / Q_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvergentColumns {
    pub u: BigInt,
    pub p: BigInt,
    pub v: BigInt,
    pub q: BigInt,
}

fn columns(m: &MobiusMap) -> ConvergentColumns {
    let (a, b, c, d) = m.entries();
    ConvergentColumns {
        u: a.clone(),
        p: b.clone(),
        v: c.clone(),
        q: d.clone(),
    }
}

impl Default for ConvergentState {
    fn default() -> Self {
        Self::new()
    }
}

impl ConvergentState {
    /// Empty product: the identity matrix, `P_0/Q_0 = 0/1`.
    pub fn new() -> ConvergentState {
        ConvergentState {
            m: MobiusMap::identity(),
            m_hat: MobiusMap::identity(),
            prev: (MobiusMap::identity(), MobiusMap::identity()),
            digits: Vec::new(),
            q_history: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn digits(&self) -> &[Digit] {
        &self.digits
    }

    pub fn matrix(&self) -> &MobiusMap {
        &self.m
    }

    pub fn matrix_hat(&self) -> &MobiusMap {
        &self.m_hat
    }

    pub fn cols(&self) -> ConvergentColumns {
        columns(&self.m)
    }

    pub fn cols_hat(&self) -> ConvergentColumns {
        columns(&self.m_hat)
    }

    /// Right-multiply by the digit matrix of `d` (and its substitution).
    pub fn accumulate(&mut self, d: Digit) {
        self.prev = (self.m.clone(), self.m_hat.clone());
        self.m = &self.m * &MobiusMap::digit_matrix(d);
        self.m_hat = &self.m_hat * &MobiusMap::digit_matrix(d.substitute());
        self.digits.push(d);
        self.q_history.push(self.cols().q);
    }

    /// `P_n / Q_n` as an exact pair.
    pub fn convergent(&self) -> (BigInt, BigInt) {
        let c = self.cols();
        (c.p, c.q)
    }

    /// `Q_n` after `n` digits (1-based); `n = 0` gives `Q_0 = 1`.
    pub fn q_at(&self, n: usize) -> Result<BigInt> {
        if n == 0 {
            return Ok(BigInt::one());
        }
        self.q_history
            .get(n - 1)
            .cloned()
            .ok_or_else(|| ScfError::InvalidParameter(format!("Q_{n} not accumulated")))
    }

    /// The exact column identity tying hatted to unhatted convergents at
    /// the last accumulated digit:
    ///
    /// for `s_j = e`:  `2 P̂_j = eps_j (Q_{j-1} - P_{j-1}) + (Q_j - P_j)` and
    /// `2 Q̂_j = eps_j (Q_{j-1} + P_{j-1}) + (Q_j + P_j)`; for `s_j = o` the
    /// same identity holds with hatted and unhatted columns exchanged.
    pub fn hat_identity_holds(&self) -> bool {
        let Some(&last) = self.digits.last() else {
            return true;
        };
        let eps = BigInt::from(last.eps());
        let cur = self.cols();
        let cur_hat = self.cols_hat();
        let old = columns(&self.prev.0);
        let old_hat = columns(&self.prev.1);
        let (lhs, plain, plain_prev) = match last.parity() {
            Parity::E => (cur_hat, cur, old),
            Parity::O => (cur, cur_hat, old_hat),
        };
        let two = BigInt::from(2);
        let p_ok = &two * &lhs.p == &eps * (&plain_prev.q - &plain_prev.p) + (&plain.q - &plain.p);
        let q_ok = &two * &lhs.q == &eps * (&plain_prev.q + &plain_prev.p) + (&plain.q + &plain.p);
        p_ok && q_ok
    }

    /// `R_N`: `Q_{N+1}` when digits `N` and `N+1` share a parity tag,
    /// otherwise `Q_N` (1-based `n`).
    pub fn r_selector(&self, n: usize) -> Result<BigInt> {
        if n == 0 || n + 1 > self.digits.len() {
            return Err(ScfError::InvalidParameter(format!(
                "R_{n} requires {} accumulated digits, have {}",
                n + 1,
                self.digits.len()
            )));
        }
        if self.digits[n - 1].parity() == self.digits[n].parity() {
            self.q_at(n + 1)
        } else {
            self.q_at(n)
        }
    }

    /// `det M_n`; equals the product of `-eps_i` exactly.
    pub fn det(&self) -> BigInt {
        self.m.det()
    }
}

/// Natural logarithm of a positive big integer.
pub fn ln_bigint(n: &BigInt) -> f64 {
    use num_traits::ToPrimitive;
    assert!(n.is_positive(), "ln of non-positive integer");
    let bits = n.bits();
    if bits <= 53 {
        return n.to_f64().unwrap().ln();
    }
    let shift = bits - 53;
    let top = (n >> shift).to_f64().unwrap();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scf;
    use num_traits::Zero;

    fn digit(a: u64, eps: i8, parity: Parity) -> Digit {
        Digit::new(a, eps, parity).unwrap()
    }

    fn state_from(digits: &[Digit]) -> ConvergentState {
        let mut s = ConvergentState::new();
        for &d in digits {
            s.accumulate(d);
        }
        s
    }

    fn random_digit(rand01: &mut impl FnMut() -> f64) -> Digit {
        loop {
            let a = 1 + (rand01() * 12.0) as u64;
            let eps = if rand01() < 0.5 { 1 } else { -1 };
            let parity = if rand01() < 0.5 { Parity::E } else { Parity::O };
            if let Ok(d) = Digit::new(a, eps, parity) {
                return d;
            }
        }
    }

    fn lcg(seed: u64) -> impl FnMut() -> f64 {
        let mut s = seed;
        move || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64
        }
    }

    #[test]
    fn unit_digit_q_sequence() {
        let s = state_from(&[Digit::unit(); 3]);
        assert_eq!(s.q_at(1).unwrap(), BigInt::from(2));
        assert_eq!(s.q_at(2).unwrap(), BigInt::from(5));
        assert_eq!(s.q_at(3).unwrap(), BigInt::from(12));
        let (p, q) = s.convergent();
        assert_eq!((p, q), (BigInt::from(5), BigInt::from(12)));
    }

    #[test]
    fn empty_product_is_identity() {
        let s = ConvergentState::new();
        assert!(s.matrix().is_identity());
        let (p, q) = s.convergent();
        assert_eq!((p, q), (BigInt::zero(), BigInt::one()));
    }

    #[test]
    fn x_star_second_convergent_close() {
        let s = state_from(&[digit(2, -1, Parity::E), digit(3, 1, Parity::O)]);
        let (p, q) = s.convergent();
        let x_star = 0.30622577482985491;
        let approx = p.to_string().parse::<f64>().unwrap() / q.to_string().parse::<f64>().unwrap();
        let q_f = q.to_string().parse::<f64>().unwrap();
        assert!((x_star - approx).abs() < 1.0 / q_f);
    }

    #[test]
    fn hat_identity_spec_examples() {
        let s = state_from(&[Digit::unit()]);
        let hat = s.cols_hat();
        assert_eq!((hat.p, hat.q), (BigInt::one(), BigInt::from(2)));
        assert!(s.hat_identity_holds());

        let s = state_from(&[digit(2, -1, Parity::O)]);
        assert!(s.hat_identity_holds());
    }

    #[test]
    fn hat_identity_and_det_on_random_strings() {
        let mut rand01 = lcg(314159);
        for _ in 0..1000 {
            let len = 1 + (rand01() * 49.0) as usize;
            let mut s = ConvergentState::new();
            let mut det_expected = BigInt::one();
            for _ in 0..len {
                let d = random_digit(&mut rand01);
                s.accumulate(d);
                det_expected *= BigInt::from(-d.eps());
                assert!(s.hat_identity_holds(), "identity failed at {:?}", s.digits());
            }
            assert_eq!(s.det(), det_expected);
        }
    }

    #[test]
    fn q_strictly_increasing_and_growth_floor() {
        let mut rand01 = lcg(2718);
        for _ in 0..300 {
            let len = 2 + (rand01() * 98.0) as usize;
            let mut s = ConvergentState::new();
            let mut prev_q = BigInt::one();
            for _ in 0..len {
                s.accumulate(random_digit(&mut rand01));
                let c = s.cols();
                assert!(c.q > prev_q, "Q not strictly increasing");
                assert!(&c.q + &c.v >= BigInt::from(3), "Q_n + V_n < 3");
                prev_q = c.q;
            }
        }
    }

    #[test]
    fn r_selector_examples() {
        let s = state_from(&[Digit::unit(), Digit::unit()]);
        assert_eq!(s.r_selector(1).unwrap(), BigInt::from(5));

        let s = state_from(&[digit(2, -1, Parity::E), digit(3, 1, Parity::O)]);
        assert_eq!(s.r_selector(1).unwrap(), s.q_at(1).unwrap());

        let s = state_from(&[digit(2, -1, Parity::O), digit(2, -1, Parity::O)]);
        assert_eq!(s.r_selector(1).unwrap(), s.q_at(2).unwrap());

        assert!(state_from(&[Digit::unit()]).r_selector(1).is_err());
    }

    #[test]
    fn q_hat_comparability_bounded() {
        let mut rand01 = lcg(11235);
        let mut worst: f64 = 1.0;
        for _ in 0..300 {
            let mut s = ConvergentState::new();
            for _ in 0..60 {
                s.accumulate(random_digit(&mut rand01));
            }
            let q = ln_bigint(&s.cols().q);
            let qh = ln_bigint(&s.cols_hat().q);
            worst = worst.max((q - qh).abs().exp());
        }
        // boundedness per the comparability lemma; the constant is
        // empirical, not asserted by theory
        assert!(worst < 50.0, "empirical max ratio {worst}");
    }

    #[test]
    fn transpose_action_reproduces_dual_iteration() {
        // beta_{n+1} = M_n^t . beta_1, matching dual inverse branches
        // applied in reversed prefix order
        let mut rand01 = lcg(5551);
        for _ in 0..50 {
            let x0 = rand01();
            let beta1 = (crate::SQRT3 - 2.0) + rand01() * 2.0;
            let Ok(e) = scf::expand(&x0, 25) else { continue };
            if e.digits.len() < 25 {
                continue;
            }
            let mut s = ConvergentState::new();
            let mut beta = beta1;
            for &d in &e.digits {
                s.accumulate(d);
                beta = crate::dual::dual_inverse_branch(d, &beta);
            }
            let via_transpose = s.matrix().transpose().apply(&beta1);
            assert!(
                (via_transpose - beta).abs() < 1e-12,
                "transpose action mismatch: {via_transpose} vs {beta}"
            );
        }
    }

    #[test]
    fn convergence_to_expanded_point() {
        let mut rand01 = lcg(909);
        for _ in 0..50 {
            let x = rand01();
            let Ok(e) = scf::expand(&x, 20) else { continue };
            if e.digits.len() < 20 {
                continue;
            }
            let mut s = ConvergentState::new();
            let mut prev_err = f64::INFINITY;
            for &d in &e.digits {
                s.accumulate(d);
                let approx = s.matrix().apply(&0.0f64);
                let err = (x - approx).abs();
                assert!(err < prev_err.max(1e-15) * 1.01);
                prev_err = err;
            }
            assert!(prev_err < 1e-10);
        }
    }

    #[test]
    fn ln_bigint_matches_f64() {
        let n = BigInt::from(123456789u64);
        assert!((ln_bigint(&n) - 123456789f64.ln()).abs() < 1e-12);
        let big = BigInt::from(10u8).pow(200);
        assert!((ln_bigint(&big) - 200.0 * 10f64.ln()).abs() < 1e-9);
    }
}
