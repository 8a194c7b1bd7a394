//! Geodesics on the theta-group surface: lift normalization into the
//! cross-section parameter set, the first-return map `rho`, excursion
//! lengths and heights, tessellation crossing counts, and the average
//! excursion-time estimators.
//!
//! The cross section is parametrized by endpoint pairs in
//! `I_+ = (1, ∞) × [-sqrt3, -sqrt3 + 2)` and
//! `I_- = (-∞, -1) × (sqrt3 - 2, sqrt3]`; the return map is conjugate to the
//! double cover of the natural extension via
//! `J(γ) = (1/γ_∞, -γ_{-∞}, +1)` on `I_+` and `(-1/γ_∞, γ_{-∞}, -1)` on
//! `I_-`. Geodesics whose forward endpoint modulus lies in
//! `E = {k, k/(k-1), (2k+1)/(2k-1)}` escape to a cusp instead of returning.

use serde::Serialize;

use crate::digit::{Digit, Parity};
use crate::error::{Result, ScfError};
use crate::mobius::MobiusMap;
use crate::natext::{double_cover_step, NatExtPoint};
use crate::scalar::Scalar;
use crate::scf;
use crate::SQRT3;

/// Relative tolerance for float escape-set membership.
pub const ESCAPE_REL_TOL: f64 = 1e-12;

/// Oriented endpoint pair `(γ_∞, γ_{-∞})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeodesicEnds {
    pub forward: f64,
    pub backward: f64,
}

impl GeodesicEnds {
    pub fn new(forward: f64, backward: f64) -> GeodesicEnds {
        GeodesicEnds { forward, backward }
    }

    pub fn sign(&self) -> i8 {
        if self.forward >= 0.0 {
            1
        } else {
            -1
        }
    }

    pub fn in_cross_section(&self) -> bool {
        let (f, b) = (self.forward, self.backward);
        (f > 1.0 && (-SQRT3..2.0 - SQRT3).contains(&b))
            || (f < -1.0 && b > SQRT3 - 2.0 && b <= SQRT3)
    }
}

/// `J`: cross-section endpoint pairs to double-cover coordinates.
pub fn geodesic_to_point(g: GeodesicEnds) -> Result<NatExtPoint> {
    if !g.in_cross_section() {
        return Err(ScfError::InvalidParameter(format!(
            "({}, {}) is not in the cross-section parameter set",
            g.forward, g.backward
        )));
    }
    if g.forward > 0.0 {
        NatExtPoint::new(1.0 / g.forward, -g.backward, 1)
    } else {
        NatExtPoint::new(-1.0 / g.forward, g.backward, -1)
    }
}

/// `J^{-1}`: double-cover coordinates to endpoint pairs.
pub fn point_to_geodesic(p: &NatExtPoint) -> GeodesicEnds {
    if p.j > 0 {
        GeodesicEnds::new(1.0 / p.x, -p.y)
    } else {
        GeodesicEnds::new(-1.0 / p.x, p.y)
    }
}

/// Whether `|γ_∞|` lies in the escape set `E` (exactly for exact scalars,
/// within `rel_tol` for floats). Equivalent to `1/|γ_∞|` being a branch
/// interval endpoint.
pub fn escape_set_contains<S: Scalar>(abs_forward: &S, rel_tol: f64) -> bool {
    if abs_forward.cmp_ratio(1, 1) != std::cmp::Ordering::Greater {
        return false;
    }
    scf::is_branch_endpoint(&abs_forward.recip(), rel_tol)
}

/// `(sigma tau^{-j})^k`, the parabolic word fixing `j·1`.
fn parabolic_pow(j: i64, k: u64) -> MobiusMap {
    let k = k as i64;
    if j > 0 {
        MobiusMap::from_i64(k - 1, -k, k, -(k + 1))
    } else {
        MobiusMap::from_i64(-(k - 1), -k, k, k + 1)
    }
}

/// The group word applied by the return map for a digit `(k, eps)_s` and
/// forward sign `j`.
fn return_word(d: Digit, j: i64) -> MobiusMap {
    let k = d.a();
    match (d.parity(), d.eps()) {
        // sigma tau^{-jk}
        (Parity::E, _) => MobiusMap::from_i64(0, -1, 1, -2 * j * k as i64),
        // tau^{-j} (sigma tau^{-j})^{k-1}
        (Parity::O, -1) => MobiusMap::tau_pow(-j) * parabolic_pow(j, k - 1),
        // (sigma tau^{-j})^k
        (Parity::O, _) => parabolic_pow(j, k),
    }
}

/// The return map on endpoint pairs: applies the case-selected group word
/// to both endpoints and reports the word.
pub fn rho_endpoints<S: Scalar>(forward: &S, backward: &S) -> Result<(S, S, MobiusMap)> {
    let j: i64 = if forward.is_negative() { -1 } else { 1 };
    let abs_f = if j > 0 {
        forward.clone()
    } else {
        -forward.clone()
    };
    if abs_f.cmp_ratio(1, 1) != std::cmp::Ordering::Greater {
        return Err(ScfError::InvalidParameter(format!(
            "forward endpoint modulus must exceed 1, got {}",
            abs_f.to_f64()
        )));
    }
    if escape_set_contains(&abs_f, ESCAPE_REL_TOL) {
        return Err(ScfError::Escape(forward.to_f64()));
    }
    let x = abs_f.recip();
    let d = scf::classify(&x)?;
    let word = return_word(d, j);
    Ok((word.apply(forward), word.apply(backward), word))
}

/// Convenience wrapper of [`rho_endpoints`] on f64 pairs.
pub fn rho(g: GeodesicEnds) -> Result<(GeodesicEnds, MobiusMap)> {
    let (f, b, w) = rho_endpoints(&g.forward, &g.backward)?;
    Ok((GeodesicEnds::new(f, b), w))
}

/// Verify `J ∘ rho ∘ J^{-1} = T̃` at `p` within `tol`, with both routes
/// evaluated in exact arithmetic on the float coordinates (the group-word
/// action on the endpoints versus the branch map with the dual inverse
/// branch). Points whose `x` coordinate is a branch endpoint must raise
/// the escape error on the `rho` side; consistency then means both routes
/// refuse.
pub fn correspondence_check(p: &NatExtPoint, tol: f64) -> Result<bool> {
    use crate::exact::Exact;
    let (Some(xe), Some(ye)) = (Exact::from_f64(p.x), Exact::from_f64(p.y)) else {
        return Err(ScfError::InvalidParameter("non-finite point".into()));
    };
    // route 1: the return map on endpoint pairs, through the group word
    let (fe, be) = if p.j > 0 {
        (xe.recip(), -ye.clone())
    } else {
        (-xe.recip(), ye.clone())
    };
    let rho_result = rho_endpoints(&fe, &be);
    if scf::is_branch_endpoint(&xe, ESCAPE_REL_TOL) {
        return Ok(matches!(rho_result, Err(ScfError::Escape(_))));
    }
    let (rf, rb, _) = rho_result?;
    let j_rho: i8 = if rf.is_negative() { -1 } else { 1 };
    let (x_rho, y_rho) = if j_rho > 0 {
        (rf.recip(), -rb)
    } else {
        (-rf.recip(), rb)
    };

    // route 2: the double cover of the natural extension
    let d = scf::classify(&xe)?;
    let x_ext = scf::branch_map(d, &xe);
    let y_ext = crate::dual::dual_inverse_branch(d, &ye);
    let j_ext = -d.eps() * p.j;

    Ok((x_rho.to_f64() - x_ext.to_f64()).abs() <= tol
        && (y_rho.to_f64() - y_ext.to_f64()).abs() <= tol
        && j_rho == j_ext)
}

// ---------------------------------------------------------------------------
// lift normalization
// ---------------------------------------------------------------------------

fn reduction_plus(f: f64, b: f64) -> MobiusMap {
    debug_assert!(f > b);
    if f > 1.0 {
        if (2.0 - SQRT3..1.0).contains(&b) && f <= 3.0 {
            // iterate the contraction tau sigma : z -> 2 - 1/z until the
            // backward endpoint drops below 2 - sqrt(3); closed-form count
            let u = 1.0 - b;
            let k = ((1.0 / u - (SQRT3 + 1.0) / 2.0).floor() + 1.0).max(1.0) as u64;
            let k = k as i64;
            return MobiusMap::from_i64(k + 1, -k, k, -(k - 1));
        }
        // translate the backward endpoint into [-sqrt3, 2 - sqrt3)
        let n = ((-SQRT3 - b) / 2.0).ceil() as i64;
        return MobiusMap::tau_pow(n);
    }
    // f <= 1: translate the forward endpoint into (1, 3]
    let n = ((1.0 - f) / 2.0).ceil() as i64;
    MobiusMap::tau_pow(n.max(1))
}

/// Find a theta-group word moving the endpoint pair into the
/// cross-section parameter set, returning the normalized pair and the
/// word. Endpoints in the cusp orbits (rationals and `∞`) may never land
/// in the set; the iteration cap reports them.
pub fn normalize_lift(forward: f64, backward: f64) -> Result<(GeodesicEnds, MobiusMap)> {
    if forward == backward || forward.is_nan() || backward.is_nan() {
        return Err(ScfError::DegenerateGeodesic);
    }
    let mut f = forward;
    let mut b = backward;
    let mut word = MobiusMap::identity();
    const CAP: usize = 256;
    for _ in 0..CAP {
        let g = GeodesicEnds::new(f, b);
        if g.in_cross_section() {
            return Ok((g, word));
        }
        let step = if f.is_infinite() || b.is_infinite() {
            MobiusMap::sigma()
        } else if f.abs() <= 1.0 && b.abs() <= 1.0 {
            MobiusMap::sigma()
        } else if f > b {
            reduction_plus(f, b)
        } else {
            reduction_plus(-f, -b).mirror()
        };
        let nf = step.apply_extended(f);
        let nb = step.apply_extended(b);
        word = &step * &word;
        f = nf;
        b = nb;
    }
    Err(ScfError::LiftDidNotTerminate {
        forward: f,
        backward: b,
        steps: CAP,
    })
}

// ---------------------------------------------------------------------------
// excursion times and heights
// ---------------------------------------------------------------------------

/// The involution `ι̃(z) = (z + 1)/(z - 1)` on boundary points; swaps the
/// two cusps and conjugates o-type data to e-type.
pub fn iota_tilde<S: Scalar>(z: &S) -> S {
    (z.clone() + S::one()) / (z.clone() - S::one())
}

/// Cross-ratio factor `L(α, β)` whose half-log is the excursion time; the
/// digit `(a_1, eps_1)` is read from `1/α`, which must be e-type (starred
/// coordinates). Returns the digit together with `L`.
pub fn excursion_cross_ratio<S: Scalar>(alpha_star: &S, beta_star: &S) -> Result<(Digit, S)> {
    if alpha_star.cmp_ratio(1, 1) != std::cmp::Ordering::Greater {
        return Err(ScfError::InvalidParameter(
            "alpha_star must exceed 1".into(),
        ));
    }
    let x = alpha_star.recip();
    if scf::is_branch_endpoint(&x, ESCAPE_REL_TOL) {
        return Err(ScfError::Escape(alpha_star.to_f64()));
    }
    let d = scf::classify(&x)?;
    if d.parity() != Parity::E {
        return Err(ScfError::InvalidParameter(
            "alpha_star must carry an e-type leading digit; apply the involution transform first"
                .into(),
        ));
    }
    let two_a = S::int(2 * d.a() as i64);
    let two_a_eps = S::int(2 * d.a() as i64 + d.eps() as i64);
    let num = (alpha_star.clone() - S::one())
        * (beta_star.clone() + two_a.clone())
        * (beta_star.clone() + two_a_eps.clone());
    let den = -((alpha_star.clone() - two_a) * (alpha_star.clone() - two_a_eps))
        * (beta_star.clone() + S::one());
    Ok((d, num / den))
}

/// Excursion time `r = (1/2) log L(α*, β*)`.
///
/// The cross-ratio is evaluated in exact rational arithmetic on the float
/// inputs, so near-pole samples (digits close to escape) lose no precision
/// before the single final logarithm.
pub fn excursion_time_formula(alpha_star: f64, beta_star: f64) -> Result<f64> {
    let (Some(a), Some(b)) = (
        crate::exact::Exact::from_f64(alpha_star),
        crate::exact::Exact::from_f64(beta_star),
    ) else {
        return Err(ScfError::InvalidParameter("non-finite input".into()));
    };
    let (_, l) = excursion_cross_ratio(&a, &b).map_err(|e| match e {
        ScfError::Escape(_) => ScfError::Escape(alpha_star),
        other => other,
    })?;
    Ok(0.5 * l.to_f64().ln())
}

/// j-reduce and, for o-type leading digits, conjugate by the involution so
/// the excursion surrounds the width-2 cusp. Returns the transformed pair
/// and its (e-type) digit.
fn starred_pair(g: GeodesicEnds) -> Result<(f64, f64, Digit)> {
    let (mut f, mut b) = (g.forward, g.backward);
    if f < 0.0 {
        f = -f;
        b = -b;
    }
    if f <= 1.0 {
        return Err(ScfError::InvalidParameter(format!(
            "forward endpoint modulus must exceed 1, got {f}"
        )));
    }
    if escape_set_contains(&f, ESCAPE_REL_TOL) {
        return Err(ScfError::Escape(g.forward));
    }
    let d = scf::classify(&(1.0 / f))?;
    if d.parity() == Parity::O {
        f = iota_tilde(&f);
        b = iota_tilde(&b);
    }
    let d_star = scf::classify(&(1.0 / f))?;
    debug_assert_eq!(d_star.a(), d.a());
    debug_assert_eq!(d_star.eps(), d.eps());
    Ok((f, b, d_star))
}

/// Excursion time from the endpoint geometry: the segment runs from `ξ` on
/// the vertical `Re z = j` to `η` on the arc over `[2a, 2a+eps]`, and the
/// distance is the half-log cross ratio in the real parts. `Re η` comes
/// from the closed-form circle intersection, evaluated exactly on the
/// float endpoints.
pub fn excursion_time_direct(g: GeodesicEnds) -> Result<f64> {
    use crate::exact::Exact;
    let (mut f, mut b) = (g.forward, g.backward);
    if f < 0.0 {
        f = -f;
        b = -b;
    }
    if f <= 1.0 {
        return Err(ScfError::InvalidParameter(format!(
            "forward endpoint modulus must exceed 1, got {f}"
        )));
    }
    if escape_set_contains(&f, ESCAPE_REL_TOL) {
        return Err(ScfError::Escape(g.forward));
    }
    let (Some(mut fe), Some(mut be)) = (Exact::from_f64(f), Exact::from_f64(b)) else {
        return Err(ScfError::InvalidParameter("non-finite endpoint".into()));
    };
    let d = scf::classify(&fe.recip())?;
    if d.parity() == Parity::O {
        fe = iota_tilde(&fe);
        be = iota_tilde(&be);
    }
    let a = d.a() as i64;
    let eps = d.eps() as i64;
    let two_a = Exact::int(2 * a);
    let two_a_eps = Exact::int(2 * a + eps);
    let one = Exact::one();
    let re_eta = (fe.clone() * be.clone() - two_a.clone() * two_a_eps.clone())
        / (fe.clone() + be.clone() - Exact::int(4 * a + eps));
    let val = ((fe.clone() - one.clone()) * (re_eta.clone() - be.clone()))
        / ((one - be.clone()) * (fe - re_eta));
    Ok(0.5 * val.to_f64().ln())
}

/// The two intersection points `ξ` and `η` of the (starred) excursion as
/// complex points `(re, im)`; exposed for the geometric oracles.
pub fn excursion_segment_points(g: GeodesicEnds) -> Result<([f64; 2], [f64; 2])> {
    let (f, b, d) = starred_pair(g)?;
    let a = d.a() as f64;
    let eps = d.eps() as f64;
    let c = 0.5 * (f + b);
    let r = 0.5 * (f - b);
    let xi_im = (r * r - (1.0 - c) * (1.0 - c)).sqrt();
    let re_eta = (f * b - 2.0 * a * (2.0 * a + eps)) / ((f + b) - (4.0 * a + eps));
    let eta_im = (r * r - (re_eta - c) * (re_eta - c)).sqrt();
    Ok(([1.0, xi_im], [re_eta, eta_im]))
}

/// Height of the (starred) excursion: log of the Euclidean radius of the
/// modified half-circle.
pub fn excursion_height(alpha_star: f64, beta_star: f64) -> f64 {
    (0.5 * (alpha_star + beta_star)).ln()
}

/// Number of tessellation quadrilaterals crossed by the first excursion,
/// counted by direct intersection tests: vertical lines `Re z = 2i+1` for
/// e-type digits, arcs from `1` to `(i+1)/i` for o-type. Equals the first
/// partial quotient.
pub fn crossing_count(g: GeodesicEnds) -> Result<u64> {
    let (mut f, mut b) = (g.forward, g.backward);
    if f < 0.0 {
        f = -f;
        b = -b;
    }
    if f <= 1.0 {
        return Err(ScfError::InvalidParameter(format!(
            "forward endpoint modulus must exceed 1, got {f}"
        )));
    }
    if escape_set_contains(&f, ESCAPE_REL_TOL) {
        return Err(ScfError::Escape(g.forward));
    }
    let d = scf::classify(&(1.0 / f))?;
    // real part of the intersection of the geodesic over (b, f) with the
    // arc over (p, q)
    let arc_x = |p: f64, q: f64| (f * b - p * q) / ((f + b) - (p + q));
    let on_geodesic = |x: f64| (x - b) * (f - x) > 0.0;
    match d.parity() {
        Parity::E => {
            let a = d.a() as f64;
            let eps = d.eps() as f64;
            let eta_x = arc_x(2.0 * a, 2.0 * a + eps);
            let mut count = 1;
            let mut i = 1u64;
            loop {
                let m = (2 * i + 1) as f64;
                if m < eta_x && m > 1.0 && on_geodesic(m) {
                    count += 1;
                    i += 1;
                } else {
                    break;
                }
                if i > d.a() + 16 {
                    return Err(ScfError::InvalidParameter(
                        "crossing enumeration overran the digit bound".into(),
                    ));
                }
            }
            Ok(count)
        }
        Parity::O => {
            let (p, q) = match d.eps() {
                // C_(k,-1)_o spans [(2k+1)/(2k-1), k/(k-1)]
                -1 => {
                    let k = d.a() as f64;
                    ((2.0 * k + 1.0) / (2.0 * k - 1.0), k / (k - 1.0))
                }
                // C_(k,+1)_o spans [(k+1)/k, (2k+1)/(2k-1)]
                _ => {
                    let k = d.a() as f64;
                    ((k + 1.0) / k, (2.0 * k + 1.0) / (2.0 * k - 1.0))
                }
            };
            let eta_x = arc_x(p, q);
            let mut count = 1;
            let mut i = 1u64;
            loop {
                let qi = (i as f64 + 1.0) / i as f64;
                let x = arc_x(1.0, qi);
                if x > 1.0 && x < qi && x < eta_x && on_geodesic(x) {
                    count += 1;
                    i += 1;
                } else {
                    break;
                }
                if i > d.a() + 16 {
                    return Err(ScfError::InvalidParameter(
                        "crossing enumeration overran the digit bound".into(),
                    ));
                }
            }
            Ok(count)
        }
    }
}

// ---------------------------------------------------------------------------
// excursion traces
// ---------------------------------------------------------------------------

/// One excursion of a cross-section orbit.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ExcursionRecord {
    pub n: usize,
    pub digit: Digit,
    /// Hyperbolic length of the excursion segment.
    pub r: f64,
    /// Cumulative return time.
    pub t: f64,
    /// Height of the excursion (log Euclidean radius of the modified
    /// half-circle).
    pub h: f64,
    pub alpha_star: f64,
    pub beta_star: f64,
}

/// Iterator over the excursions of the orbit starting at `(x, y, j)`.
pub struct ExcursionIter {
    x: f64,
    y: f64,
    j: i8,
    n: usize,
    t: f64,
    done: bool,
}

impl ExcursionIter {
    pub fn new(p: NatExtPoint) -> ExcursionIter {
        ExcursionIter {
            x: p.x,
            y: p.y,
            j: p.j,
            n: 0,
            t: 0.0,
            done: false,
        }
    }

    pub fn state(&self) -> NatExtPoint {
        NatExtPoint {
            x: self.x,
            y: self.y,
            j: self.j,
        }
    }
}

/// Compute one excursion from double-cover coordinates.
pub fn excursion_from_coords(x: f64, y: f64) -> Result<(Digit, f64, f64, f64, f64)> {
    if scf::is_branch_endpoint(&x, ESCAPE_REL_TOL) {
        return Err(ScfError::Escape(1.0 / x));
    }
    let d = scf::classify(&x)?;
    let alpha = 1.0 / x;
    let beta = y;
    let (astar, bstar) = match d.parity() {
        Parity::E => (alpha, beta),
        Parity::O => (iota_tilde(&alpha), (1.0 - beta) / (1.0 + beta)),
    };
    let (_, l) = excursion_cross_ratio(&astar, &bstar)?;
    Ok((d, 0.5 * l.ln(), excursion_height(astar, bstar), astar, bstar))
}

impl Iterator for ExcursionIter {
    type Item = Result<ExcursionRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let rec = match excursion_from_coords(self.x, self.y) {
            Ok((d, r, h, astar, bstar)) => {
                self.n += 1;
                self.t += r;
                let rec = ExcursionRecord {
                    n: self.n,
                    digit: d,
                    r,
                    t: self.t,
                    h,
                    alpha_star: astar,
                    beta_star: bstar,
                };
                match double_cover_step(self.state()) {
                    Ok(p) => {
                        self.x = p.x;
                        self.y = p.y;
                        self.j = p.j;
                    }
                    Err(e) => {
                        self.done = true;
                        return Some(Err(e));
                    }
                }
                rec
            }
            Err(e) => {
                self.done = true;
                return Some(Err(e));
            }
        };
        Some(Ok(rec))
    }
}

// ---------------------------------------------------------------------------
// average excursion time
// ---------------------------------------------------------------------------

/// `log f` of the excursion-time observable: the four-case function of the
/// current half and the image half.
pub fn log_f(x: f64) -> Result<f64> {
    let (d, tx) = scf::step(&x)?;
    if scf::is_absorbed(&tx) {
        return Err(ScfError::Terminated);
    }
    let even_side = d.parity() == Parity::E;
    let image_even = tx <= 0.5;
    Ok(match (even_side, image_even) {
        (true, true) => -2.0 * tx.ln(),
        (true, false) => std::f64::consts::LN_2 - 2.0 * (1.0 - tx).ln(),
        (false, false) => 2.0 * ((1.0 + tx).ln() - (1.0 - tx).ln()),
        (false, true) => 2.0 * (1.0 + tx).ln() - std::f64::consts::LN_2 - 2.0 * tx.ln(),
    })
}

/// Running state of the two average-excursion-time estimators along a
/// pseudo-orbit: the convergent growth `2 log Q_n / n` (tracked through
/// the normalized column recurrence) and the Birkhoff sum of `log f`.
///
/// Float orbits occasionally die near the endpoints (absorption or digit
/// cap); the accumulator lets a harness continue on a fresh point, which
/// leaves both Birkhoff limits unchanged.
#[derive(Debug, Clone, Default)]
pub struct CstarAccumulator {
    log_q: f64,
    /// `V_n / Q_n ∈ (-1, 1]`.
    w: f64,
    sum_log_f: f64,
    steps: usize,
}

impl CstarAccumulator {
    pub fn new() -> CstarAccumulator {
        CstarAccumulator::default()
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// `(2 log Q_n / n, (1/n) Σ log f)` over the accumulated steps.
    pub fn estimates(&self) -> (f64, f64) {
        let n = self.steps.max(1) as f64;
        (2.0 * self.log_q / n, self.sum_log_f / n)
    }

    /// Advance up to `budget` steps along the orbit of `x0`; returns the
    /// continuation point, or `None` if the orbit died first.
    pub fn drive(&mut self, x0: f64, budget: usize) -> Option<f64> {
        let mut x = x0;
        for _ in 0..budget {
            if scf::is_absorbed(&x) {
                return None;
            }
            let Ok((d, tx)) = scf::step(&x) else {
                return None;
            };
            if scf::is_absorbed(&tx) {
                return None;
            }
            let even_side = d.parity() == Parity::E;
            let image_even = tx <= 0.5;
            self.sum_log_f += match (even_side, image_even) {
                (true, true) => -2.0 * tx.ln(),
                (true, false) => std::f64::consts::LN_2 - 2.0 * (1.0 - tx).ln(),
                (false, false) => 2.0 * ((1.0 + tx).ln() - (1.0 - tx).ln()),
                (false, true) => {
                    2.0 * (1.0 + tx).ln() - std::f64::consts::LN_2 - 2.0 * tx.ln()
                }
            };
            let a = d.a() as f64;
            match d.parity() {
                Parity::E => {
                    let ratio = 2.0 * a + self.w;
                    self.log_q += ratio.ln();
                    self.w = d.eps() as f64 / ratio;
                }
                Parity::O => {
                    let u = a - d.eps_bar() as f64;
                    let ratio = (u + d.eps() as f64) * (1.0 + self.w) + 1.0;
                    self.log_q += ratio.ln();
                    self.w = (u * (1.0 + self.w) + 1.0) / ratio;
                }
            }
            self.steps += 1;
            x = tx;
        }
        Some(x)
    }
}

/// The two almost-sure estimators of the average excursion time from one
/// orbit of length `n`: `(2 log Q_n / n, (1/n) Σ log f(T^{k-1} x))`.
/// Errors if the orbit terminates before `n` steps.
pub fn cstar_estimators(x0: f64, n: usize) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(ScfError::InvalidParameter("orbit length must be positive".into()));
    }
    let mut acc = CstarAccumulator::new();
    if acc.drive(x0, n).is_none() {
        return Err(ScfError::Terminated);
    }
    Ok(acc.estimates())
}
