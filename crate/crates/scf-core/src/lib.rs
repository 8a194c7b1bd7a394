//! Dynamics of the spliced continued fraction (SCF) on the theta-group
//! surface.
//!
//! The SCF interval map splices the even continued fraction on `(0, 1/2]`
//! with the odd-odd continued fraction on `(1/2, 1)`, producing digits
//! `(a, eps)_s` with `a >= 1`, `eps = ±1` and a parity tag `s ∈ {e, o}`.
//! This crate implements the map and its dual, exact integer convergent
//! matrices, the planar natural extension and its invariant densities, a
//! discretized transfer operator, the geodesic first-return map on the
//! cross section of the theta-group surface, and a Monte Carlo harness for
//! the Galambos-type extreme value laws of the digit and height maxima.
//!
//! Floating point is the default substrate; [`exact::Exact`] provides
//! rational and quadratic-surd arithmetic for the identity tests and
//! periodic-orbit oracles, since every branch map is an integer Möbius map.

pub mod convergents;
pub mod digit;
pub mod dual;
pub mod error;
pub mod evt;
pub mod exact;
pub mod geodesic;
pub mod mobius;
pub mod natext;
pub mod quad;
pub mod scalar;
pub mod scf;
pub mod transfer;

pub use digit::{Digit, Parity};
pub use error::{Result, ScfError};
pub use exact::Exact;
pub use mobius::MobiusMap;
pub use scalar::Scalar;

/// `sqrt(3)`; the dual domain is `[sqrt(3) - 2, sqrt(3)]`.
pub const SQRT3: f64 = 1.7320508075688772;

/// `log(2 + sqrt(3))`, the normalizing constant of the invariant measures.
pub const LOG_2_PLUS_SQRT3: f64 = 1.3169578969248166;

/// `C0 = 2 / log(2 + sqrt(3))`, the digit-law scaling constant.
pub const C0: f64 = 2.0 / LOG_2_PLUS_SQRT3;

/// The almost-sure average excursion time `C* = ∫ log f dμ`, equal to the
/// Lyapunov exponent of the SCF map. Pinned by the per-cylinder quadrature
/// oracle (three independent routes agree to the digits shown: the
/// observable integral, `∫ log |T'| dμ`, and the convergent growth rate
/// `2 log Q_N / N`).
pub const C_STAR: f64 = 3.7471224;
