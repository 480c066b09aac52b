//! Smooth companion oscillator on the 2-torus.
//!
//! The field couples a gradient-like part `f, g` with a rotational part so
//! that four saddles at `{pi/2, 3pi/2}^2` ring an unstable spiral at
//! `(pi, pi)`. For `0 < mu < 2 alpha` a stable limit cycle threads the
//! saddles; as `mu -> 0+` it approaches the heteroclinic contour and its
//! period diverges, mirroring the piecewise-linear system, and at
//! `mu = 2 alpha` it collapses in a Hopf bifurcation.
//!
//! Everything here is numerical: fixed-step RK4 with cubic Hermite dense
//! output, a Poincare section for cycle location, and finite-perturbation
//! phase response measurements by crossing-time comparison.

use rayon::prelude::*;

use crate::error::IrisError;

const TAU: f64 = 2.0 * std::f64::consts::PI;
const PI: f64 = std::f64::consts::PI;

/// Default integrator step.
pub const DEFAULT_STEP: f64 = 1e-3;
/// Successive section crossings closer than this settle the cycle hunt.
pub const CYCLE_TOL: f64 = 1e-10;
/// Crossing-time offsets are considered settled below this.
pub const OFFSET_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothParams {
    alpha: f64,
    mu: f64,
}

impl SmoothParams {
    pub fn new(alpha: f64, mu: f64) -> Result<Self, IrisError> {
        if !alpha.is_finite() || !(0.0 < alpha && alpha < 0.5) {
            return Err(IrisError::InvalidParameter(format!(
                "alpha must lie in (0, 1/2), got {alpha}"
            )));
        }
        if !mu.is_finite() || !(0.0..1.0).contains(&mu) {
            return Err(IrisError::InvalidParameter(format!(
                "mu must lie in [0, 1), got {mu}"
            )));
        }
        Ok(SmoothParams { alpha, mu })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// The cycle exists for `mu` strictly below this Hopf value `2 alpha`.
    pub fn hopf_mu(&self) -> f64 {
        2.0 * self.alpha
    }

    /// Unstable saddle eigenvalue at `mu = 0`: `1 - 2 alpha`.
    pub fn eigen_unstable(&self) -> f64 {
        1.0 - 2.0 * self.alpha
    }

    /// Stable saddle eigenvalue at `mu = 0`: `-1 - 2 alpha`.
    pub fn eigen_stable(&self) -> f64 {
        -1.0 - 2.0 * self.alpha
    }

    /// Saddle value `((1+2a)/(1-2a))^4`; above 1 the heteroclinic contour
    /// attracts.
    pub fn saddle_value(&self) -> f64 {
        ((1.0 + 2.0 * self.alpha) / (1.0 - 2.0 * self.alpha)).powi(4)
    }
}

/// Field value at `(y1, y2)`: `(f + mu g, g - mu f)`.
pub fn vector_field(y1: f64, y2: f64, p: &SmoothParams) -> (f64, f64) {
    let f = y1.cos() * y2.sin() + p.alpha * (2.0 * y1).sin();
    let g = -y1.sin() * y2.cos() + p.alpha * (2.0 * y2).sin();
    (f + p.mu * g, g - p.mu * f)
}

/// Jacobian of the full field, rows `d(dy1)/d(y1,y2)` and `d(dy2)/d(y1,y2)`.
pub fn field_jacobian(y1: f64, y2: f64, p: &SmoothParams) -> [[f64; 2]; 2] {
    let fx = -y1.sin() * y2.sin() + 2.0 * p.alpha * (2.0 * y1).cos();
    let fy = y1.cos() * y2.cos();
    let gx = -y1.cos() * y2.cos();
    let gy = y1.sin() * y2.sin() + 2.0 * p.alpha * (2.0 * y2).cos();
    [
        [fx + p.mu * gx, fy + p.mu * gy],
        [gx - p.mu * fx, gy - p.mu * fy],
    ]
}

/// Newton refinement of an equilibrium from `guess`, wrapped to `[0, 2pi)`.
pub fn find_saddle(guess: (f64, f64), p: &SmoothParams) -> Result<(f64, f64), IrisError> {
    let (mut y1, mut y2) = guess;
    for _ in 0..60 {
        let (f1, f2) = vector_field(y1, y2, p);
        if f1.abs().max(f2.abs()) < 1e-13 {
            return Ok((y1.rem_euclid(TAU), y2.rem_euclid(TAU)));
        }
        let j = field_jacobian(y1, y2, p);
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det.abs() < 1e-14 {
            break;
        }
        y1 -= (f1 * j[1][1] - f2 * j[0][1]) / det;
        y2 -= (f2 * j[0][0] - f1 * j[1][0]) / det;
    }
    Err(IrisError::SearchFailed(format!(
        "equilibrium hunt stalled near ({y1}, {y2})"
    )))
}

/// One RK4 step of size `h` (no wrapping; the field is periodic).
pub fn rk4_step(y: (f64, f64), h: f64, p: &SmoothParams) -> (f64, f64) {
    let k1 = vector_field(y.0, y.1, p);
    let k2 = vector_field(y.0 + 0.5 * h * k1.0, y.1 + 0.5 * h * k1.1, p);
    let k3 = vector_field(y.0 + 0.5 * h * k2.0, y.1 + 0.5 * h * k2.1, p);
    let k4 = vector_field(y.0 + h * k3.0, y.1 + h * k3.1, p);
    (
        y.0 + h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
        y.1 + h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathPoint {
    pub t: f64,
    pub y1: f64,
    pub y2: f64,
}

fn wrap(y: (f64, f64)) -> (f64, f64) {
    (y.0.rem_euclid(TAU), y.1.rem_euclid(TAU))
}

/// Fixed-step RK4 path from `start` to `t_end`, coordinates wrapped to
/// `[0, 2pi)`, final point exactly at `t_end`.
pub fn integrate(
    start: (f64, f64),
    t_end: f64,
    h: f64,
    p: &SmoothParams,
) -> Result<Vec<PathPoint>, IrisError> {
    if !(h > 0.0 && h.is_finite() && t_end > 0.0 && t_end.is_finite()) {
        return Err(IrisError::InvalidParameter(format!(
            "need positive finite t_end ({t_end}) and step ({h})"
        )));
    }
    let n = (t_end / h).floor() as usize;
    let mut out = Vec::with_capacity(n + 2);
    let mut y = wrap(start);
    let mut t = 0.0;
    out.push(PathPoint { t, y1: y.0, y2: y.1 });
    for _ in 0..n {
        y = wrap(rk4_step(y, h, p));
        t += h;
        out.push(PathPoint { t, y1: y.0, y2: y.1 });
    }
    if t < t_end {
        y = wrap(rk4_step(y, t_end - t, p));
        out.push(PathPoint { t: t_end, y1: y.0, y2: y.1 });
    }
    Ok(out)
}

/// Cubic Hermite value on a step `[0, h]` given endpoint values and slopes,
/// unwrapping a possible `2 pi` jump between the endpoints.
fn hermite(a: f64, da: f64, mut b: f64, db: f64, h: f64, xi: f64) -> f64 {
    if b - a > PI {
        b -= TAU;
    } else if a - b > PI {
        b += TAU;
    }
    let x2 = xi * xi;
    let x3 = x2 * xi;
    (2.0 * x3 - 3.0 * x2 + 1.0) * a
        + (x3 - 2.0 * x2 + xi) * h * da
        + (-2.0 * x3 + 3.0 * x2) * b
        + (x3 - x2) * h * db
}

/// Downward crossing of the section `y2 = pi`, `y1 in (pi, 2 pi)`, within
/// one step from `a` to `b`; returns `(tau, y1_at_crossing)` relative to the
/// start of the step.
fn section_crossing(
    a: (f64, f64),
    b: (f64, f64),
    h: f64,
    p: &SmoothParams,
) -> Option<(f64, f64)> {
    if !(a.1 >= PI && b.1 < PI && a.1 - b.1 < PI) {
        return None;
    }
    let fa = vector_field(a.0, a.1, p);
    let fb = vector_field(b.0, b.1, p);
    let y2_at = |xi: f64| hermite(a.1, fa.1, b.1, fb.1, h, xi) - PI;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    // versus time tolerance 1e-12: |hi-lo|*h < 1e-12
    while (hi - lo) * h > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if y2_at(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let xi = 0.5 * (lo + hi);
    let y1 = hermite(a.0, fa.0, b.0, fb.0, h, xi).rem_euclid(TAU);
    if y1 > PI && y1 < TAU {
        Some((xi * h, y1))
    } else {
        None
    }
}

/// The settled limit cycle: section anchor, period, and one sampled lap.
#[derive(Debug, Clone)]
pub struct SmoothCycle {
    pub anchor: (f64, f64),
    pub period: f64,
    /// Samples covering slightly more than one period from the anchor.
    pub orbit: Vec<PathPoint>,
    /// Step the orbit was sampled with.
    pub h: f64,
}

impl SmoothCycle {
    /// Point on the cycle at time `tau` past the anchor, Hermite-interpolated
    /// between orbit samples.
    pub fn point_at_time(&self, tau: f64, p: &SmoothParams) -> (f64, f64) {
        let tau = tau.rem_euclid(self.period);
        let idx = ((tau / self.h) as usize).min(self.orbit.len() - 2);
        let a = self.orbit[idx];
        let b = self.orbit[idx + 1];
        let step = b.t - a.t;
        let xi = ((tau - a.t) / step).clamp(0.0, 1.0);
        let fa = vector_field(a.y1, a.y2, p);
        let fb = vector_field(b.y1, b.y2, p);
        (
            hermite(a.y1, fa.0, b.y1, fb.0, step, xi).rem_euclid(TAU),
            hermite(a.y2, fa.1, b.y2, fb.1, step, xi).rem_euclid(TAU),
        )
    }

    /// Fraction of the lap spent below `frac` of the top speed.
    pub fn dwell_fraction(&self, frac: f64, p: &SmoothParams) -> f64 {
        let speeds: Vec<f64> = self
            .orbit
            .iter()
            .map(|pt| {
                let (v1, v2) = vector_field(pt.y1, pt.y2, p);
                v1.hypot(v2)
            })
            .collect();
        let top = speeds.iter().cloned().fold(0.0, f64::max);
        let slow = speeds.iter().filter(|&&s| s < frac * top).count();
        slow as f64 / speeds.len() as f64
    }
}

/// Locates the stable cycle by driving the Poincare map of the section
/// `y2 = pi`, `y1 in (pi, 2 pi)` to a fixed point.
pub fn find_cycle(p: &SmoothParams) -> Result<SmoothCycle, IrisError> {
    find_cycle_with_step(DEFAULT_STEP, p)
}

pub fn find_cycle_with_step(h: f64, p: &SmoothParams) -> Result<SmoothCycle, IrisError> {
    if !(p.mu > 0.0 && p.mu < p.hopf_mu()) {
        return Err(IrisError::NoSmoothCycle(format!(
            "cycle exists only for 0 < mu < 2 alpha = {}, got mu = {}",
            p.hopf_mu(),
            p.mu
        )));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(IrisError::InvalidParameter(format!(
            "step must be positive, got {h}"
        )));
    }
    let mut y = (PI + 0.5, PI);
    let mut t = 0.0;
    let mut last: Option<(f64, f64)> = None; // (crossing time, y1)
    let t_cap = 5e4;
    while t < t_cap {
        let prev = y;
        y = wrap(rk4_step(y, h, p));
        t += h;
        if let Some((tau, y1)) = section_crossing(prev, y, h, p) {
            let t_cross = t - h + tau;
            if t_cross <= 0.0 {
                continue;
            }
            if let Some((t_prev, y1_prev)) = last {
                if (y1 - y1_prev).abs() < CYCLE_TOL {
                    if (y1 - PI).abs() < 1e-2 {
                        return Err(IrisError::NoSmoothCycle(
                            "section iterates collapsed toward the spiral point".into(),
                        ));
                    }
                    let period = t_cross - t_prev;
                    let anchor = (y1, PI);
                    let orbit = integrate(anchor, period + 2.0 * h, h, p)?;
                    return Ok(SmoothCycle {
                        anchor,
                        period,
                        orbit,
                        h,
                    });
                }
            }
            last = Some((t_cross, y1));
        }
    }
    Err(IrisError::NoSmoothCycle(format!(
        "section iterates did not settle within t = {t_cap}"
    )))
}

/// Section crossing times of the trajectory from `start`, skipping the
/// departure crossing at `t < t_min`, at most `max_crossings` of them,
/// giving up beyond `t_cap`.
fn crossing_times(
    start: (f64, f64),
    t_min: f64,
    max_crossings: usize,
    t_cap: f64,
    h: f64,
    p: &SmoothParams,
) -> Vec<f64> {
    let mut times = Vec::with_capacity(max_crossings);
    let mut y = wrap(start);
    let mut t = 0.0;
    while t < t_cap && times.len() < max_crossings {
        let prev = y;
        y = wrap(rk4_step(y, h, p));
        t += h;
        if let Some((tau, _)) = section_crossing(prev, y, h, p) {
            let tc = t - h + tau;
            if tc > t_min {
                times.push(tc);
            }
        }
    }
    times
}

/// Finite-perturbation phase response of the smooth cycle at phase `theta`
/// (quarters, `[0,4)`): displaces by `r` times the L2-normalized `eta` and
/// compares section crossing times against the unperturbed trajectory until
/// the offset settles. Positive means advance.
pub fn numeric_iprc_smooth(
    eta: (f64, f64),
    theta: f64,
    r: f64,
    p: &SmoothParams,
) -> Result<f64, IrisError> {
    let cycle = find_cycle(p)?;
    numeric_iprc_smooth_with(&cycle, eta, theta, r, p)
}

/// Same as [`numeric_iprc_smooth`] against an already-located cycle.
pub fn numeric_iprc_smooth_with(
    cycle: &SmoothCycle,
    eta: (f64, f64),
    theta: f64,
    r: f64,
    p: &SmoothParams,
) -> Result<f64, IrisError> {
    if !(r.is_finite() && r > 0.0) {
        return Err(IrisError::InvalidParameter(format!(
            "perturbation size must be positive, got {r}"
        )));
    }
    let norm = eta.0.hypot(eta.1);
    if !(norm.is_finite() && norm > 0.0) {
        return Err(IrisError::InvalidParameter(
            "perturbation direction must be finite and nonzero".into(),
        ));
    }
    let eta = (eta.0 / norm, eta.1 / norm);
    let theta = theta.rem_euclid(4.0);
    let period = cycle.period;
    let base_pt = cycle.point_at_time(theta / 4.0 * period, p);
    let pert_pt = (base_pt.0 + r * eta.0, base_pt.1 + r * eta.1);

    // skip the departure crossing; the inter-crossing gap is one period
    let t_min = 0.35 * period;
    let max_cross = 30;
    let t_cap = 32.0 * period;
    let h = cycle.h;
    let base = crossing_times(base_pt, t_min, max_cross, t_cap, h, p);
    let pert = crossing_times(pert_pt, t_min, max_cross, t_cap, h, p);
    if pert.len() < 5 {
        return Err(IrisError::LeftBasin);
    }
    let n = base.len().min(pert.len());
    let wrap_offset = |d: f64| (d + 0.5 * period).rem_euclid(period) - 0.5 * period;
    let mut delta = wrap_offset(pert[0] - base[0]);
    let mut settled = 0;
    let mut spent = 0.0;
    for i in 1..n {
        let next = wrap_offset(pert[i] - base[i]);
        if (next - delta).abs() < OFFSET_TOL {
            settled += 1;
        } else {
            settled = 0;
        }
        delta = next;
        spent = base[i];
        // hold out to the horizon even after settling, unless clearly locked
        if settled >= 3 && (spent >= 20.0 * period || settled >= 8) {
            break;
        }
    }
    if settled < 3 && spent < 20.0 * period {
        return Err(IrisError::SearchFailed(format!(
            "crossing offsets still moving after {n} laps"
        )));
    }
    Ok(-4.0 * delta / period / r)
}

/// `(theta, Z_x, Z_y)` over a uniform midpoint phase grid, phases evaluated
/// in parallel.
pub fn smooth_prc_sweep(
    n_phases: usize,
    r: f64,
    p: &SmoothParams,
) -> Result<Vec<(f64, f64, f64)>, IrisError> {
    if n_phases < 4 {
        return Err(IrisError::InvalidParameter(format!(
            "need at least 4 phases, got {n_phases}"
        )));
    }
    let cycle = find_cycle(p)?;
    (0..n_phases)
        .into_par_iter()
        .map(|j| {
            let theta = (j as f64 + 0.5) * 4.0 / n_phases as f64;
            let zx = numeric_iprc_smooth_with(&cycle, (1.0, 0.0), theta, r, p)?;
            let zy = numeric_iprc_smooth_with(&cycle, (0.0, 1.0), theta, r, p)?;
            Ok((theta, zx, zy))
        })
        .collect()
}

/// Time series along the settled cycle, for dwell/shape plots.
pub fn timeplot(t_end: f64, h: f64, p: &SmoothParams) -> Result<Vec<PathPoint>, IrisError> {
    let cycle = find_cycle_with_step(h, p)?;
    integrate(cycle.anchor, t_end, h, p)
}
