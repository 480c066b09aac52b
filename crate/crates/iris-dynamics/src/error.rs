use crate::params::RegimeLabel;
use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum IrisError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("argument outside domain: {0}")]
    OutsideDomain(String),

    /// The requested computation needs a strictly stable limit cycle and the
    /// given parameters do not produce one.
    #[error("no stable limit cycle at lambda={lambda}, a={a} (regime: {regime})")]
    NoStableCycle {
        lambda: f64,
        a: f64,
        regime: RegimeLabel,
    },

    #[error("start point ({x}, {y}) lies outside every large square")]
    OutsideSystem { x: f64, y: f64 },

    /// The point sits on or below the stable manifold of its square's saddle
    /// and never reaches the outflow edge.
    #[error("trajectory never exits: unstable coordinate {u} is not positive")]
    InfiniteDwell { u: f64 },

    /// A perturbed point escaped the basin of attraction, so no phase shift
    /// can be measured for it.
    #[error("perturbed point left the basin of the stable cycle")]
    LeftBasin,

    #[error("entry positions did not converge within {max_cycles} cycles")]
    NoConvergence { max_cycles: usize },

    #[error("no closed orbit: {0}")]
    NoSmoothCycle(String),

    #[error("root search did not converge: {0}")]
    SearchFailed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
