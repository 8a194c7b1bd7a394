//! Planar natural extension on `Ω = [0,1] × [sqrt(3)-2, sqrt(3)]`, its
//! double cover with the orientation sign, and the invariant densities.
//!
//! The extension acts by `(x, y) -> (T x, h̄_{A(x)} y)`; the invariant
//! probability density on `Ω` is `1 / (log(2+sqrt3) (1+xy)^2)`, whose
//! marginal in `x` is the invariant density of the interval map. Box
//! measures of the density have a closed form in the four corner factors
//! `log(1 + x_i y_j)`, which keeps the measure-invariance check free of
//! quadrature.

use serde::{Deserialize, Serialize};

use crate::digit::{Digit, Parity};
use crate::dual;
use crate::error::{Result, ScfError};
use crate::scf;
use crate::{C0, LOG_2_PLUS_SQRT3, SQRT3};

/// A point of the double-cover domain `Ω^±`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NatExtPoint {
    pub x: f64,
    pub y: f64,
    pub j: i8,
}

impl NatExtPoint {
    pub fn new(x: f64, y: f64, j: i8) -> Result<NatExtPoint> {
        if !(0.0..=1.0).contains(&x) {
            return Err(ScfError::OutsideUnitInterval(x));
        }
        if !(SQRT3 - 2.0..=SQRT3).contains(&y) {
            return Err(ScfError::OutsideDualDomain(y));
        }
        if j != 1 && j != -1 {
            return Err(ScfError::InvalidParameter(format!("sign must be ±1, got {j}")));
        }
        Ok(NatExtPoint { x, y, j })
    }
}

/// One step of the natural extension.
pub fn nat_step(x: f64, y: f64) -> Result<(Digit, f64, f64)> {
    let (d, tx) = scf::step(&x)?;
    Ok((d, tx, dual::dual_inverse_branch(d, &y)))
}

/// One step of the double cover: the natural extension plus the sign flip
/// `j -> -eps_1 j`.
pub fn double_cover_step(p: NatExtPoint) -> Result<NatExtPoint> {
    let (d, x, y) = nat_step(p.x, p.y)?;
    Ok(NatExtPoint {
        x,
        y,
        j: -d.eps() * p.j,
    })
}

/// Invariant probability density of the interval map on `[0, 1]`.
pub fn density_mu(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(ScfError::OutsideUnitInterval(x));
    }
    Ok(C0 / ((1.0 - (2.0 - SQRT3) * x) * (1.0 + SQRT3 * x)))
}

/// Invariant probability density of the natural extension on `Ω`.
pub fn density_mu_bar(x: f64, y: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(ScfError::OutsideUnitInterval(x));
    }
    if !(SQRT3 - 2.0..=SQRT3).contains(&y) {
        return Err(ScfError::OutsideDualDomain(y));
    }
    let u = 1.0 + x * y;
    Ok(1.0 / (LOG_2_PLUS_SQRT3 * u * u))
}

/// Unnormalized double-cover density `1/(1+xy)^2` (counting measure in the
/// sign); total mass `2 log(2 + sqrt(3))`.
pub fn density_mu_tilde(x: f64, y: f64, j: i8) -> Result<f64> {
    if j != 1 && j != -1 {
        return Err(ScfError::InvalidParameter(format!("sign must be ±1, got {j}")));
    }
    Ok(density_mu_bar(x, y)? * LOG_2_PLUS_SQRT3)
}

/// Closed-form `μ` measure of `[x0, x1] ⊆ [0, 1]`.
pub fn mu_interval(x0: f64, x1: f64) -> f64 {
    mu_antiderivative(x1) - mu_antiderivative(x0)
}

fn mu_antiderivative(x: f64) -> f64 {
    0.5 * C0 * ((SQRT3 * x).ln_1p() - (-(2.0 - SQRT3) * x).ln_1p())
}

/// Closed-form `μ̄` measure of the box `[x0,x1] × [y0,y1]`: differences of
/// the four corner logarithms, no quadrature.
pub fn box_measure_mu_bar(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<f64> {
    if !(0.0 <= x0 && x0 <= x1 && x1 <= 1.0) {
        return Err(ScfError::InvalidParameter(format!(
            "bad x-range [{x0}, {x1}]"
        )));
    }
    if !(SQRT3 - 2.0 - 1e-12 <= y0 && y0 <= y1 && y1 <= SQRT3 + 1e-12) {
        return Err(ScfError::InvalidParameter(format!(
            "bad y-range [{y0}, {y1}]"
        )));
    }
    let dy = y1 - y0;
    let g = |x: f64| (x * dy / (1.0 + x * y0)).ln_1p();
    Ok((g(x1) - g(x0)) / LOG_2_PLUS_SQRT3)
}

/// `μ̄(T̄^{-1} B)` for a box `B`, with a certified enclosure of the
/// infinite branch sum.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PreimageMeasure {
    pub value: f64,
    /// Half-width of the enclosure from the branch tails beyond the
    /// direct-summation cutoff (plus endpoint nudges).
    pub uncertainty: f64,
}

/// The four dual-interval families in increasing-`y` order. `ENeg` and
/// `OPos` run with increasing branch index `b`; `EPos` and `ONeg` approach
/// their accumulation point as `b` grows, so they appear in decreasing-`b`
/// order along the domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Family {
    ENeg,
    EPos,
    OPos,
    ONeg,
}

const FAMILIES: [Family; 4] = [Family::ENeg, Family::EPos, Family::OPos, Family::ONeg];

impl Family {
    fn of(d: Digit) -> Family {
        match (d.parity(), d.eps()) {
            (Parity::E, -1) => Family::ENeg,
            (Parity::E, _) => Family::EPos,
            (Parity::O, 1) => Family::OPos,
            (Parity::O, _) => Family::ONeg,
        }
    }

    fn position(self) -> usize {
        match self {
            Family::ENeg => 0,
            Family::EPos => 1,
            Family::OPos => 2,
            Family::ONeg => 3,
        }
    }

    fn min_b(self) -> u64 {
        match self {
            Family::EPos => 1,
            _ => 2,
        }
    }

    /// Whether the family index increases along increasing `y`.
    fn ascending(self) -> bool {
        matches!(self, Family::ENeg | Family::OPos)
    }

    #[cfg(test)]
    fn digit(self, b: u64) -> Digit {
        let (eps, parity) = match self {
            Family::ENeg => (-1, Parity::E),
            Family::EPos => (1, Parity::E),
            Family::OPos => (1, Parity::O),
            Family::ONeg => (-1, Parity::O),
        };
        Digit::new(b, eps, parity).expect("family digit")
    }
}

/// `μ(h_{(b, fam)}([x0, x1]))` as `(C0/2) Σ σ_i ln(m_i b + n_i)`, exposing
/// the affine-log structure so the branch tail has a closed-form integral.
struct FamilyTerm {
    sigma: [f64; 4],
    m: [f64; 4],
    n: [f64; 4],
}

impl FamilyTerm {
    fn new(fam: Family, x0: f64, x1: f64) -> FamilyTerm {
        // log arguments of the marginal antiderivative composed with the
        // inverse branch: A(h_b(s)) = (C0/2)[ln(m1 b + n1) - ln(m2 b + n2)]
        let pair = |fam: Family, s: f64| -> ([f64; 2], [f64; 2]) {
            match fam {
                Family::EPos => ([2.0, s + SQRT3], [2.0, s - 2.0 + SQRT3]),
                Family::ENeg => ([2.0, -s + SQRT3], [2.0, -s - 2.0 + SQRT3]),
                Family::OPos => (
                    [(1.0 + SQRT3) * (s + 1.0), 1.0 - SQRT3 * s],
                    [(SQRT3 - 1.0) * (s + 1.0), 1.0 + (2.0 - SQRT3) * s],
                ),
                Family::ONeg => (
                    [(1.0 + SQRT3) * (s + 1.0), s - SQRT3],
                    [(SQRT3 - 1.0) * (s + 1.0), s + 2.0 - SQRT3],
                ),
            }
        };
        // orientation: h increasing in s for ENeg/ONeg, decreasing for
        // EPos/OPos; μ(h([x0,x1])) = A(h(upper)) - A(h(lower))
        let (s_hi, s_lo) = match fam {
            Family::ENeg | Family::ONeg => (x1, x0),
            Family::EPos | Family::OPos => (x0, x1),
        };
        let (hi1, hi2) = pair(fam, s_hi);
        let (lo1, lo2) = pair(fam, s_lo);
        FamilyTerm {
            sigma: [1.0, -1.0, -1.0, 1.0],
            m: [hi1[0], hi2[0], lo1[0], lo2[0]],
            n: [hi1[1], hi2[1], lo1[1], lo2[1]],
        }
    }

    fn eval(&self, b: f64) -> f64 {
        let mut s = 0.0;
        for i in 0..4 {
            s += self.sigma[i] * (self.m[i] * b + self.n[i]).ln();
        }
        0.5 * C0 * s
    }

    /// `∫_B^∞ eval(b) db`, exact: the divergent parts cancel because
    /// `Σ σ_i = Σ σ_i n_i / m_i = 0`.
    fn integral_tail(&self, b_start: f64) -> f64 {
        let mut s = 0.0;
        for i in 0..4 {
            let nu = self.n[i] / self.m[i];
            let psi = (b_start + nu) * ((self.m[i] * b_start + self.n[i]).ln() - 1.0);
            s += self.sigma[i] * (nu * self.m[i].ln() - psi);
        }
        0.5 * C0 * s
    }

    /// `Σ_{b=lo}^{∞} eval(b)` with an integral-test enclosure beyond
    /// `lo + direct`: value plus half-width.
    fn tail_sum(&self, lo: u64, direct: u64) -> (f64, f64) {
        let switch = lo + direct;
        let mut s = 0.0;
        // ascending-b summation: terms decrease, so this accumulates the
        // large terms first; the total is O(1) and 64-bit adds are fine
        for b in lo..switch {
            s += self.eval(b as f64);
        }
        let head = self.eval(switch as f64);
        let integral = self.integral_tail(switch as f64);
        (s + integral + 0.5 * head, 0.5 * head)
    }

    fn range_sum(&self, lo: u64, hi: Option<u64>, direct: u64) -> (f64, f64) {
        match hi {
            None => self.tail_sum(lo, direct),
            Some(h) if h < lo => (0.0, 0.0),
            Some(h) if h - lo < direct => {
                let mut s = 0.0;
                for b in lo..=h {
                    s += self.eval(b as f64);
                }
                (s, 0.0)
            }
            Some(h) => {
                let (a, ua) = self.tail_sum(lo, direct);
                let (b, ub) = self.tail_sum(h + 1, direct);
                (a - b, ua + ub)
            }
        }
    }
}

/// Contribution of one branch whose dual interval only partially overlaps
/// the `y`-range: a rectangle in both coordinates.
fn partial_contribution(d: Digit, x0: f64, x1: f64, ylo: f64, yhi: f64) -> Result<f64> {
    let (ilo, ihi) = dual::dual_interval::<f64>(d);
    let clip_lo = ylo.max(ilo);
    let clip_hi = yhi.min(ihi);
    if clip_hi <= clip_lo {
        return Ok(0.0);
    }
    let mut ya = dual::dual_branch_map(d, &clip_lo);
    let mut yb = dual::dual_branch_map(d, &clip_hi);
    if ya > yb {
        std::mem::swap(&mut ya, &mut yb);
    }
    let mut xa = scf::inverse_branch(d, &x0);
    let mut xb = scf::inverse_branch(d, &x1);
    if xa > xb {
        std::mem::swap(&mut xa, &mut xb);
    }
    box_measure_mu_bar(xa.clamp(0.0, 1.0), xb.clamp(0.0, 1.0), ya, yb)
}

fn classify_with_nudge(y: f64, inward: f64) -> Result<(Digit, f64)> {
    match dual::dual_classify(&y) {
        Ok(d) => Ok((d, 0.0)),
        Err(ScfError::Terminated) => {
            let shift = 4.0 * dual::DUAL_ABSORPTION_TOL * inward.signum();
            let d = dual::dual_classify(&(y + shift))?;
            Ok((d, shift.abs()))
        }
        Err(e) => Err(e),
    }
}

/// Measure of the preimage `T̄^{-1}([x0,x1] × [y0,y1])` under `μ̄`.
///
/// Branches are enumerated directly up to `direct` indices beyond each
/// range start; the infinite tails toward the accumulation points 0 and 1
/// of the dual partition are enclosed by the integral test on the
/// closed-form branch terms. Equality with `μ̄(B)` within the returned
/// uncertainty is the measure-invariance statement.
pub fn preimage_box_measure_mu_bar(
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    direct: u64,
) -> Result<PreimageMeasure> {
    if !(0.0 <= x0 && x0 <= x1 && x1 <= 1.0) {
        return Err(ScfError::InvalidParameter(format!(
            "bad x-range [{x0}, {x1}]"
        )));
    }
    if !(SQRT3 - 2.0 <= y0 && y0 <= y1 && y1 <= SQRT3) {
        return Err(ScfError::InvalidParameter(format!(
            "bad y-range [{y0}, {y1}]"
        )));
    }
    let direct = direct.max(16);
    let (d_lo, nudge_lo) = classify_with_nudge(y0, 1.0)?;
    let (d_hi, nudge_hi) = classify_with_nudge(y1, -1.0)?;
    // a nudged endpoint moves the box boundary by at most the shift; the
    // integrand is bounded by the sup of the density
    let mut uncertainty = (nudge_lo + nudge_hi) * 2.0;

    if d_lo == d_hi {
        let value = partial_contribution(d_lo, x0, x1, y0, y1)?;
        return Ok(PreimageMeasure { value, uncertainty });
    }

    let mut value = partial_contribution(d_lo, x0, x1, y0, SQRT3)?
        + partial_contribution(d_hi, x0, x1, SQRT3 - 2.0, y1)?;

    let (f_lo, b_lo) = (Family::of(d_lo), d_lo.a());
    let (f_hi, b_hi) = (Family::of(d_hi), d_hi.a());
    let (p_lo, p_hi) = (f_lo.position(), f_hi.position());

    for fam in FAMILIES {
        let ft = FamilyTerm::new(fam, x0, x1);
        let p = fam.position();
        // b-range of branches whose dual interval lies strictly inside
        // (y0, y1); `None` upper bound marks the infinite accumulation tail
        let range: Option<(u64, Option<u64>)> = if p == p_lo && p == p_hi {
            if fam.ascending() {
                Some((b_lo + 1, Some(b_hi.saturating_sub(1))))
            } else {
                Some((b_hi + 1, Some(b_lo.saturating_sub(1))))
            }
        } else if p == p_lo {
            if fam.ascending() {
                Some((b_lo + 1, None))
            } else {
                Some((fam.min_b(), Some(b_lo.saturating_sub(1))))
            }
        } else if p == p_hi {
            if fam.ascending() {
                Some((fam.min_b(), Some(b_hi.saturating_sub(1))))
            } else {
                Some((b_hi + 1, None))
            }
        } else if p_lo < p && p < p_hi {
            Some((fam.min_b(), None))
        } else {
            None
        };
        if let Some((lo, hi)) = range {
            let (v, u) = ft.range_sum(lo, hi, direct);
            value += v;
            uncertainty += u;
        }
    }

    Ok(PreimageMeasure { value, uncertainty })
}
