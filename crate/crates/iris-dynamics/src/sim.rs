//! Event-exact simulation of the four-square system.
//!
//! The flow is linear inside each square, so a trajectory is advanced by
//! closed-form dwell times and boundary hand-offs; there is no time stepper
//! and no discretization error anywhere in this module. On top of the
//! simulator sit asymptotic phase measurement, finite-perturbation response
//! estimates, and isochron fields over a global grid.

use rayon::prelude::*;

use crate::cycle::{find_roots, IrisCycle};
use crate::error::IrisError;
use crate::geometry::{frames, locate, point_in_polygon, SquareFrame};
use crate::params::IrisParams;
use crate::prc::{PerturbDirection, Phase};

/// Entry positions within this distance of the cycle's fixed point count as
/// converged.
pub const CONVERGENCE_TOL: f64 = 1e-10;

/// Cycles of four squares to attempt before declaring non-convergence.
/// Contraction can be arbitrarily weak near the fold.
pub const MAX_CYCLES: usize = 10_000;

/// Exact flow inside one square for time `dt`.
pub fn flow_in_square(local: (f64, f64), dt: f64, p: &IrisParams) -> (f64, f64) {
    let (s, u) = local;
    (s * (-p.lambda() * dt).exp(), u * dt.exp())
}

/// Time for the state to reach the outflow edge `u = 1`: `log(1/u)`.
pub fn time_to_exit(local: (f64, f64)) -> Result<f64, IrisError> {
    let (_, u) = local;
    if u > 0.0 {
        Ok((1.0 / u).ln())
    } else {
        Err(IrisError::InfiniteDwell { u })
    }
}

/// Initial condition for a simulation, either global or square-local.
#[derive(Debug, Clone, Copy)]
pub enum StartPoint {
    Global { x: f64, y: f64 },
    Local { square: usize, s: f64, u: f64 },
}

/// How a trajectory ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// Entry positions settled onto the stable cycle.
    Converged,
    /// The exit point landed past the shared edge, into an absorbing small
    /// square.
    Absorbed,
    /// Time budget exhausted.
    MaxTime,
    /// Crossed the outer edge `u = -1` and left the four-square region.
    LeftSystem,
}

/// One dwell inside a single square, with exact entry and exit events.
#[derive(Debug, Clone, Copy)]
pub struct Segment {
    pub square: usize,
    pub entry_local: (f64, f64),
    pub entry_time: f64,
    pub exit_local: (f64, f64),
    pub exit_time: f64,
}

impl Segment {
    /// State at absolute time `t` within this segment.
    pub fn state_at(&self, t: f64, p: &IrisParams) -> (f64, f64) {
        flow_in_square(self.entry_local, t - self.entry_time, p)
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub segments: Vec<Segment>,
    pub termination: Termination,
}

impl Trajectory {
    pub fn total_time(&self) -> f64 {
        self.segments.last().map_or(0.0, |s| s.exit_time)
    }

    /// Unstable coordinates at successive square entries, skipping the first
    /// segment when it starts mid-square.
    pub fn entry_positions(&self) -> impl Iterator<Item = f64> + '_ {
        self.segments
            .iter()
            .filter(|s| s.entry_local.0 == 1.0)
            .map(|s| s.entry_local.1)
    }
}

fn resolve_start(start: StartPoint, p: &IrisParams) -> Result<(usize, (f64, f64)), IrisError> {
    match start {
        StartPoint::Global { x, y } => {
            locate(x, y, p).ok_or(IrisError::OutsideSystem { x, y })
        }
        StartPoint::Local { square, s, u } => {
            if !(1..=4).contains(&square) {
                return Err(IrisError::InvalidParameter(format!(
                    "square index must be 1..=4, got {square}"
                )));
            }
            if !SquareFrame::contains_local(s, u) {
                return Err(IrisError::OutsideDomain(format!(
                    "local point ({s}, {u}) outside the unit square"
                )));
            }
            Ok((square, (s, u)))
        }
    }
}

/// Advances the state by exact per-square flow until it converges onto the
/// stable cycle, gets absorbed, leaves the system, or runs out the clock.
pub fn simulate(
    start: StartPoint,
    max_time: f64,
    p: &IrisParams,
) -> Result<Trajectory, IrisError> {
    if !max_time.is_finite() || max_time <= 0.0 {
        return Err(IrisError::InvalidParameter(format!(
            "max_time must be positive and finite, got {max_time}"
        )));
    }
    let (mut square, (mut s, mut u)) = resolve_start(start, p)?;
    let u_dag = find_roots(p).map(|(u_dag, _)| u_dag);
    let mut segments: Vec<Segment> = Vec::new();
    let mut t = 0.0;

    loop {
        if u == 0.0 {
            // rides the stable manifold into the saddle
            let exit = flow_in_square((s, u), max_time - t, p);
            segments.push(Segment {
                square,
                entry_local: (s, u),
                entry_time: t,
                exit_local: exit,
                exit_time: max_time,
            });
            return Ok(Trajectory {
                segments,
                termination: Termination::MaxTime,
            });
        }
        let dwell = (1.0 / u.abs()).ln();
        if t + dwell > max_time {
            let exit = flow_in_square((s, u), max_time - t, p);
            segments.push(Segment {
                square,
                entry_local: (s, u),
                entry_time: t,
                exit_local: exit,
                exit_time: max_time,
            });
            return Ok(Trajectory {
                segments,
                termination: Termination::MaxTime,
            });
        }
        let s_exit = s * u.abs().powf(p.lambda());
        let edge = if u > 0.0 { 1.0 } else { -1.0 };
        segments.push(Segment {
            square,
            entry_local: (s, u),
            entry_time: t,
            exit_local: (s_exit, edge),
            exit_time: t + dwell,
        });
        t += dwell;
        if u < 0.0 {
            return Ok(Trajectory {
                segments,
                termination: Termination::LeftSystem,
            });
        }
        if s_exit > 1.0 - p.a() {
            return Ok(Trajectory {
                segments,
                termination: Termination::Absorbed,
            });
        }
        square = square % 4 + 1;
        s = 1.0;
        u = s_exit + p.a();
        if let Some(u_dag) = u_dag {
            // cycle detection waits for one full lap so a start on the cycle
            // still traces a full period
            if segments.len() >= 4 && (u - u_dag).abs() < CONVERGENCE_TOL {
                return Ok(Trajectory {
                    segments,
                    termination: Termination::Converged,
                });
            }
        }
        if segments.len() >= 4 * MAX_CYCLES {
            return Ok(Trajectory {
                segments,
                termination: Termination::MaxTime,
            });
        }
    }
}

/// Why a start point has no asymptotic phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoPhaseReason {
    /// Absorbed into a small square.
    Absorbed,
    /// Escaped through an outer edge.
    LeftSystem,
    /// Starts exactly on a stable manifold and flows into a saddle.
    StableManifold,
    /// Entry positions failed to reach the cycle within [`MAX_CYCLES`].
    NoConvergence,
}

/// Outcome of an asymptotic phase query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhaseResult {
    Phase(f64),
    NoPhase(NoPhaseReason),
}

impl PhaseResult {
    pub fn phase(self) -> Option<f64> {
        match self {
            PhaseResult::Phase(v) => Some(v),
            PhaseResult::NoPhase(_) => None,
        }
    }
}

/// Asymptotic phase of a start point relative to the cycle's first entry
/// into square 1, in units of quarters, `theta` in `[0, 4)`.
///
/// The trajectory is advanced until an entry position lands within
/// [`CONVERGENCE_TOL`] of the fixed point; the remaining infinite tail of
/// dwell-time corrections is summed in closed form from the linearized
/// entry map, which is exact to leading order in the residual.
pub fn asymptotic_phase(
    start: StartPoint,
    p: &IrisParams,
    cycle: &IrisCycle,
) -> Result<PhaseResult, IrisError> {
    let kappa = cycle.contraction(p);
    if !(kappa < 1.0) {
        return Err(IrisError::NoStableCycle {
            lambda: p.lambda(),
            a: p.a(),
            regime: crate::cycle::classify_regime(p),
        });
    }
    let (k0, (s0, u0)) = resolve_start(start, p)?;
    if u0 == 0.0 {
        return Ok(PhaseResult::NoPhase(NoPhaseReason::StableManifold));
    }
    if u0 < 0.0 {
        return Ok(PhaseResult::NoPhase(NoPhaseReason::LeftSystem));
    }
    let u_dag = cycle.u_dag;
    // phase rate is (4 / period) = 1 / quarter
    let quarter = cycle.quarter();
    // scale of the closed-form dwell tail: u_dag (1 - kappa)
    let tail_scale = u_dag - p.lambda() * cycle.s_dag;

    let mut t = (1.0 / u0).ln();
    let mut s_exit = s0 * u0.powf(p.lambda());
    let mut square = k0;
    for _ in 0..4 * MAX_CYCLES {
        if s_exit > 1.0 - p.a() {
            return Ok(PhaseResult::NoPhase(NoPhaseReason::Absorbed));
        }
        let u_entry = s_exit + p.a();
        square = square % 4 + 1;
        if u_entry == 0.0 {
            return Ok(PhaseResult::NoPhase(NoPhaseReason::StableManifold));
        }
        if u_entry < 0.0 {
            return Ok(PhaseResult::NoPhase(NoPhaseReason::LeftSystem));
        }
        if (u_entry - u_dag).abs() < CONVERGENCE_TOL {
            let tail = -(u_entry - u_dag) / tail_scale;
            let theta = ((square - 1) as f64 - (t + tail) / quarter).rem_euclid(4.0);
            return Ok(PhaseResult::Phase(if theta >= 4.0 { 0.0 } else { theta }));
        }
        t += (1.0 / u_entry).ln();
        s_exit = u_entry.powf(p.lambda());
    }
    Ok(PhaseResult::NoPhase(NoPhaseReason::NoConvergence))
}

/// Finite-perturbation estimate of the phase response: displaces the state
/// at phase `theta` on the cycle by `r` times the global direction `eta` and
/// measures the asymptotic phase shift per unit `r`. Positive means advance.
pub fn numeric_iprc(
    eta: PerturbDirection,
    theta: Phase,
    r: f64,
    p: &IrisParams,
) -> Result<f64, IrisError> {
    if !(r.is_finite() && r > 0.0) {
        return Err(IrisError::InvalidParameter(format!(
            "perturbation size must be positive, got {r}"
        )));
    }
    let cycle = IrisCycle::stable(p)?;
    let frame = SquareFrame::new(theta.square_offset() + 1, p);
    let (s, u) = cycle.point_at_phi(theta.phi(), p);
    let (x, y) = frame.to_global(s, u);
    let base = match asymptotic_phase(StartPoint::Global { x, y }, p, &cycle)? {
        PhaseResult::Phase(v) => v,
        PhaseResult::NoPhase(_) => {
            return Err(IrisError::OutsideDomain(
                "reference cycle point failed to phase-lock".into(),
            ))
        }
    };
    let (ex, ey) = eta.components();
    let perturbed = StartPoint::Global {
        x: x + r * ex,
        y: y + r * ey,
    };
    let shifted = match asymptotic_phase(perturbed, p, &cycle) {
        Ok(PhaseResult::Phase(v)) => v,
        Ok(PhaseResult::NoPhase(_)) | Err(IrisError::OutsideSystem { .. }) => {
            return Err(IrisError::LeftBasin)
        }
        Err(e) => return Err(e),
    };
    let delta = (shifted - base + 2.0).rem_euclid(4.0) - 2.0;
    Ok(delta / r)
}

/// Closed polyline of the periodic orbit through entry position `u_entry`,
/// sampled `samples_per_square` times per square, in global coordinates.
pub fn cycle_polyline(
    u_entry: f64,
    samples_per_square: usize,
    p: &IrisParams,
) -> Result<Vec<(f64, f64)>, IrisError> {
    if !(u_entry > 0.0 && u_entry < 1.0) {
        return Err(IrisError::OutsideDomain(format!(
            "entry position must lie in (0,1), got {u_entry}"
        )));
    }
    let m = samples_per_square.max(2);
    let dwell = (1.0 / u_entry).ln();
    let mut poly = Vec::with_capacity(4 * m);
    for frame in frames(p) {
        for i in 0..m {
            let tau = dwell * i as f64 / m as f64;
            let local = flow_in_square((1.0, u_entry), tau, p);
            poly.push(frame.to_global(local.0, local.1));
        }
    }
    Ok(poly)
}

/// Geometry of the unstable cycle: its entry position and global polyline.
/// At the fold it coincides with the semistable cycle.
pub fn unstable_cycle(
    samples_per_square: usize,
    p: &IrisParams,
) -> Result<(f64, Vec<(f64, f64)>), IrisError> {
    let cycle = IrisCycle::from_params(p)?;
    let poly = cycle_polyline(cycle.u_ddag, samples_per_square, p)?;
    Ok((cycle.u_ddag, poly))
}

/// Asymptotic phase sampled over a square grid of cell centers covering the
/// whole system; cells without a phase (absorbed, escaped, other basin of
/// nothing at all) hold NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct IsochronField {
    grid_n: usize,
    half_extent: f64,
    lambda: f64,
    a: f64,
    theta: Vec<f64>,
}

impl IsochronField {
    /// Reassembles a field from its serialized parts.
    pub fn from_raw(
        grid_n: usize,
        half_extent: f64,
        lambda: f64,
        a: f64,
        theta: Vec<f64>,
    ) -> Result<Self, IrisError> {
        if theta.len() != grid_n * grid_n {
            return Err(IrisError::InvalidParameter(format!(
                "theta length {} does not match grid {}x{}",
                theta.len(),
                grid_n,
                grid_n
            )));
        }
        Ok(IsochronField {
            grid_n,
            half_extent,
            lambda,
            a,
            theta,
        })
    }

    pub fn grid_n(&self) -> usize {
        self.grid_n
    }

    pub fn half_extent(&self) -> f64 {
        self.half_extent
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    /// Row-major phases, row = y index from -half_extent upward.
    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    /// Center coordinate along either axis for index `i`; the grid is
    /// symmetric under negation and quarter turns map centers to centers.
    pub fn coord(&self, i: usize) -> f64 {
        (2 * i as i64 + 1 - self.grid_n as i64) as f64 * (self.half_extent / self.grid_n as f64)
    }

    pub fn cell_center(&self, col: usize, row: usize) -> (f64, f64) {
        (self.coord(col), self.coord(row))
    }

    pub fn get(&self, col: usize, row: usize) -> f64 {
        self.theta[row * self.grid_n + col]
    }
}

/// Computes the asymptotic phase of every grid cell center by direct
/// simulation. Cells well inside the unstable cycle are pre-classified as
/// phaseless; everything else is simulated. Rows are processed in parallel
/// and the result is deterministic.
pub fn isochron_field(grid_n: usize, p: &IrisParams) -> Result<IsochronField, IrisError> {
    if grid_n < 2 {
        return Err(IrisError::InvalidParameter(format!(
            "grid must be at least 2x2, got {grid_n}"
        )));
    }
    let cycle = IrisCycle::stable(p)?;
    let half_extent = p.half_extent();
    let step = half_extent / grid_n as f64;
    let coord =
        |i: usize| (2 * i as i64 + 1 - grid_n as i64) as f64 * step;

    let (_, hole) = unstable_cycle(256, p)?;
    // conservative margin: polygon pre-classification only beyond the
    // polyline's own sampling gap plus one cell diagonal
    let max_gap = hole
        .windows(2)
        .map(|w| ((w[1].0 - w[0].0).powi(2) + (w[1].1 - w[0].1).powi(2)).sqrt())
        .fold(0.0, f64::max);
    let margin = 2.0 * step * std::f64::consts::SQRT_2 + max_gap;
    let margin_sq = margin * margin;

    let mut theta = vec![f64::NAN; grid_n * grid_n];
    theta
        .par_chunks_mut(grid_n)
        .enumerate()
        .for_each(|(row, out)| {
            let y = coord(row);
            for (col, slot) in out.iter_mut().enumerate() {
                let x = coord(col);
                let near_hole = hole
                    .iter()
                    .any(|&(hx, hy)| (hx - x).powi(2) + (hy - y).powi(2) < margin_sq);
                if !near_hole && point_in_polygon(x, y, &hole) {
                    continue; // interior of the unstable cycle never phase-locks
                }
                if let Ok(PhaseResult::Phase(v)) =
                    asymptotic_phase(StartPoint::Global { x, y }, p, &cycle)
                {
                    *slot = v;
                }
            }
        });
    Ok(IsochronField {
        grid_n,
        half_extent,
        lambda: p.lambda(),
        a: p.a(),
        theta,
    })
}
