use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScfError {
    #[error("input {0} lies outside the open unit interval")]
    OutsideUnitInterval(f64),

    #[error("input {0} lies outside the dual domain [sqrt(3)-2, sqrt(3)]")]
    OutsideDualDomain(f64),

    /// The orbit reached a fixed endpoint (0 or 1) and the expansion stops.
    #[error("orbit terminated at 0 or 1")]
    Terminated,

    /// Classification near 0 or 1 would produce a partial quotient beyond
    /// the configured cap; in float mode such digits are unreliable.
    #[error("partial quotient exceeds cap {cap}")]
    DigitCapExceeded { cap: u64 },

    /// The forward endpoint lies in the escape set `E`; the geodesic leaves
    /// to a cusp without returning to the cross section.
    #[error("forward endpoint {0} lies in the escape set")]
    Escape(f64),

    #[error("geodesic endpoints coincide")]
    DegenerateGeodesic,

    /// Lift normalization hit its iteration cap; the endpoints belong to
    /// the measure-zero exceptional set (cusp orbits). The payload reports
    /// the state at which the reduction stalled.
    #[error("lift normalization stalled at ({forward}, {backward}) after {steps} steps")]
    LiftDidNotTerminate {
        forward: f64,
        backward: f64,
        steps: usize,
    },

    #[error("power iteration did not converge: residual {residual:.3e} after {iterations} iterations")]
    NoConvergence { residual: f64, iterations: usize },

    #[error("rejection sampler exceeded {0} attempts")]
    RejectionCapExceeded(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, ScfError>;
