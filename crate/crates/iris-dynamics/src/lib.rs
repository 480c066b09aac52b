//! Exact dynamics near a heteroclinic cycle, in two model systems.
//!
//! The centerpiece is the *iris* system: four unit-half-side squares arranged
//! in a pinwheel with offset `a`, each carrying the linear saddle flow
//! `ds/dt = -lambda s`, `du/dt = u` in local coordinates. Because the flow is
//! linear inside every square, the return map, the limit cycles, the
//! infinitesimal phase response curves, and the asymptotic phase function all
//! have closed forms, and this crate computes them exactly rather than by
//! generic numerical continuation:
//!
//! - [`cycle`]: entry-map roots `u_dag`/`u_ddag`, existence and fold of the
//!   stable cycle, period, contraction rate, regime classification.
//! - [`prc`]: analytic infinitesimal phase response curves, their per-quarter
//!   kernel, normalization identities, and the homoclinic (single-saddle)
//!   comparison formulas.
//! - [`sim`]: event-driven exact simulation (no ODE stepping), asymptotic
//!   phase of arbitrary points, direct numerical PRCs, and isochron grids.
//! - [`smooth`]: a smooth companion vector field on the torus with the same
//!   four-saddle heteroclinic skeleton, integrated with fixed-step RK4, plus
//!   numerically measured PRCs for it.
//! - [`geometry`]: square frames, local/global coordinate changes, and the
//!   quarter-turn symmetry.
//! - [`output`]: CSV/JSON/binary serialization of everything above.
//!
//! Angle-like phases run over `[0, 4)`, one unit per square, so a quarter of
//! the cycle is one unit of phase.

pub mod cycle;
pub mod error;
pub mod geometry;
pub mod output;
pub mod params;
pub mod prc;
pub mod quad;
pub mod sim;
pub mod smooth;

pub use cycle::{
    classify_regime, existence_test, fold_offset, stability_derivative, ClosestSlowest, IrisCycle,
};
pub use error::IrisError;
pub use geometry::SquareFrame;
pub use params::{IrisParams, RegimeLabel};
pub use prc::{PerturbDirection, Phase, PrcSample};
pub use sim::{
    asymptotic_phase, isochron_field, numeric_iprc, simulate, IsochronField, NoPhaseReason,
    PhaseResult, StartPoint, Termination, Trajectory,
};
pub use smooth::{find_cycle, numeric_iprc_smooth, SmoothCycle, SmoothParams};

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, IrisError>;
