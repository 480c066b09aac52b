use crate::error::IrisError;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Parameters of the nondimensionalized iris system.
///
/// `lambda` is the saddle ratio (magnitude of the stable eigenvalue over the
/// unstable one, identical in all four squares) and `a` is the offset between
/// neighboring squares in units of the square half-side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IrisParams {
    lambda: f64,
    a: f64,
}

impl IrisParams {
    pub fn new(lambda: f64, a: f64) -> Result<Self, IrisError> {
        if !lambda.is_finite() || lambda <= 0.0 {
            return Err(IrisError::InvalidParameter(format!(
                "lambda must be positive and finite, got {lambda}"
            )));
        }
        if !a.is_finite() || !(0.0..1.0).contains(&a) {
            return Err(IrisError::InvalidParameter(format!(
                "offset a must lie in [0, 1), got {a}"
            )));
        }
        // Offsets below the double-precision floor behave like a = 0 in every
        // formula while claiming to be positive; reject them outright.
        if a > 0.0 && a < 1e-300 {
            return Err(IrisError::InvalidParameter(format!(
                "offset a = {a} underflows double precision; use a = 0 or a >= 1e-300"
            )));
        }
        Ok(Self { lambda, a })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    /// Half-side of the bounding box of the four large squares.
    ///
    /// Square centers sit at distance `1 + a/2` along one axis and `1 - a/2`
    /// along the other, and each square has half-side 1.
    pub fn half_extent(&self) -> f64 {
        2.0 + 0.5 * self.a
    }
}

/// Qualitative regime of the two-parameter family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegimeLabel {
    /// Two hyperbolic limit cycles, the outer stable and the inner unstable.
    StableAndUnstableCycle,
    /// The two cycles have merged into a single semi-stable cycle.
    FoldPoint,
    /// No cycle; trajectories spiral into the absorbing center.
    NoCycleSpiral,
    /// `a = 0` with `lambda > 1`: an attracting heteroclinic loop.
    HeteroclinicBoundary,
    /// `a = 0` with `lambda = 1`: a continuum of neutrally stable orbits.
    NeutralOrbits,
}

impl RegimeLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            RegimeLabel::StableAndUnstableCycle => "stable-and-unstable-cycle",
            RegimeLabel::FoldPoint => "fold-point",
            RegimeLabel::NoCycleSpiral => "no-cycle-spiral",
            RegimeLabel::HeteroclinicBoundary => "heteroclinic-boundary",
            RegimeLabel::NeutralOrbits => "neutral-orbits",
        }
    }
}

impl fmt::Display for RegimeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}
