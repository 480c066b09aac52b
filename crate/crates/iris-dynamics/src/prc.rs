//! Closed-form infinitesimal phase response of the stable iris cycle.
//!
//! Inside one square the response to a perturbation `eta` applied at cycle
//! fraction `phi` is `eta · beta(phi) / D` with
//! `beta(phi) = (s_dag^(1-phi), u_dag^phi)` and
//! `D = log(1/u_dag) (u_dag - lambda s_dag)`. The fourfold symmetry extends
//! this over the whole cycle: at phase `theta = k + phi` the direction is
//! first rotated into the occupied square by `R^k`, `R = [[0,-1],[1,0]]`.
//!
//! Sign convention: positive response means phase advance, i.e. boundary
//! crossings happen earlier after the perturbation.

use crate::cycle::IrisCycle;
use crate::error::IrisError;
use crate::params::IrisParams;
use crate::quad::adaptive_simpson;

/// Perturbation direction, stored unit length in the L1 norm.
///
/// Components are along the stable/unstable axes of square 1, which coincide
/// with global `x`/`y`. [`iprc`] rotates the vector into the square occupied
/// at the requested phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbDirection {
    eta_s: f64,
    eta_u: f64,
}

impl PerturbDirection {
    /// Normalizes `(eta_s, eta_u)` to unit L1 length.
    pub fn new(eta_s: f64, eta_u: f64) -> Result<PerturbDirection, IrisError> {
        if !eta_s.is_finite() || !eta_u.is_finite() {
            return Err(IrisError::InvalidParameter(
                "perturbation direction must be finite".into(),
            ));
        }
        let norm = eta_s.abs() + eta_u.abs();
        if norm == 0.0 {
            return Err(IrisError::InvalidParameter(
                "perturbation direction must be nonzero".into(),
            ));
        }
        Ok(PerturbDirection {
            eta_s: eta_s / norm,
            eta_u: eta_u / norm,
        })
    }

    pub fn global_x() -> PerturbDirection {
        PerturbDirection { eta_s: 1.0, eta_u: 0.0 }
    }

    pub fn global_y() -> PerturbDirection {
        PerturbDirection { eta_s: 0.0, eta_u: 1.0 }
    }

    pub fn eta_s(&self) -> f64 {
        self.eta_s
    }

    pub fn eta_u(&self) -> f64 {
        self.eta_u
    }

    /// Global unit vector (square-1 frame equals the global frame).
    pub fn components(&self) -> (f64, f64) {
        (self.eta_s, self.eta_u)
    }
}

/// A point on the phase circle, `theta` in `[0, 4)`.
///
/// `k = floor(theta)` names the square the cycle occupies (offset from
/// square 1) and `phi = theta - k` the fraction of the dwell in it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Phase {
    theta: f64,
}

impl Phase {
    pub fn new(theta: f64) -> Result<Phase, IrisError> {
        if !theta.is_finite() || !(0.0..4.0).contains(&theta) {
            return Err(IrisError::OutsideDomain(format!(
                "phase must lie in [0,4), got {theta}"
            )));
        }
        Ok(Phase { theta })
    }

    /// Wraps an arbitrary finite value into `[0, 4)`.
    pub fn wrapped(theta: f64) -> Phase {
        let mut t = theta.rem_euclid(4.0);
        if t >= 4.0 {
            // rem_euclid of a tiny negative rounds up to the period itself
            t = 0.0;
        }
        Phase { theta: t }
    }

    pub fn theta(self) -> f64 {
        self.theta
    }

    /// Square offset `k` in `{0,1,2,3}`.
    pub fn square_offset(self) -> usize {
        (self.theta.floor() as usize).min(3)
    }

    pub fn phi(self) -> f64 {
        self.theta - self.theta.floor()
    }
}

/// One row of a sampled response curve: all four components at one phase.
#[derive(Debug, Clone, Copy)]
pub struct PrcSample {
    pub theta: f64,
    /// Response to a unit global-x perturbation.
    pub z_x: f64,
    /// Response to a unit global-y perturbation.
    pub z_y: f64,
    /// Response along the stable axis of the occupied square.
    pub z_s: f64,
    /// Response along the unstable axis of the occupied square.
    pub z_u: f64,
}

/// Response kernel inside one square: `(s_dag^(1-phi), u_dag^phi)`.
pub fn beta(phi: f64, cycle: &IrisCycle) -> Result<(f64, f64), IrisError> {
    if !phi.is_finite() || !(0.0..1.0).contains(&phi) {
        return Err(IrisError::OutsideDomain(format!(
            "beta is defined for phi in [0,1), got {phi}"
        )));
    }
    Ok((cycle.s_dag.powf(1.0 - phi), cycle.u_dag.powf(phi)))
}

/// Shared denominator `log(1/u_dag) (u_dag - lambda s_dag)` of the response.
///
/// Positive exactly when the cycle is strictly stable, so a fold cycle is
/// rejected rather than returning an infinite response.
pub fn response_denominator(cycle: &IrisCycle, p: &IrisParams) -> Result<f64, IrisError> {
    let d = cycle.quarter() * (cycle.u_dag - p.lambda() * cycle.s_dag);
    if d <= 0.0 {
        return Err(IrisError::NoStableCycle {
            lambda: p.lambda(),
            a: p.a(),
            regime: crate::cycle::classify_regime(p),
        });
    }
    Ok(d)
}

fn rotate_quarters(v: (f64, f64), k: usize) -> (f64, f64) {
    // R = [[0,-1],[1,0]] applied k times
    match k % 4 {
        0 => v,
        1 => (-v.1, v.0),
        2 => (-v.0, -v.1),
        3 => (v.1, -v.0),
        _ => unreachable!(),
    }
}

/// Infinitesimal phase response to `eta` applied at `theta`.
///
/// Perturbations exactly at integer phases are evaluated in the square being
/// entered, so the returned value is the right-hand limit across the jump.
pub fn iprc(
    eta: PerturbDirection,
    theta: Phase,
    cycle: &IrisCycle,
    p: &IrisParams,
) -> Result<f64, IrisError> {
    let d = response_denominator(cycle, p)?;
    let (bs, bu) = beta(theta.phi(), cycle)?;
    let (es, eu) = rotate_quarters(eta.components(), theta.square_offset());
    Ok((es * bs + eu * bu) / d)
}

/// Kernel components in the global frame at `theta`, i.e. `D` times the
/// response to unit global-x and global-y perturbations.
pub fn beta_global(theta: Phase, cycle: &IrisCycle) -> Result<(f64, f64), IrisError> {
    let (bs, bu) = beta(theta.phi(), cycle)?;
    // components of the local kernel seen from the global frame: the frame
    // of square k+1 is square 1 rotated clockwise by k quarters
    Ok(match theta.square_offset() {
        0 => (bs, bu),
        1 => (bu, -bs),
        2 => (-bs, -bu),
        3 => (-bu, bs),
        _ => unreachable!(),
    })
}

/// Samples all four response components on a uniform `theta` grid over `[0,4)`.
pub fn prc_curve(
    n_samples: usize,
    cycle: &IrisCycle,
    p: &IrisParams,
) -> Result<Vec<PrcSample>, IrisError> {
    if n_samples < 4 {
        return Err(IrisError::InvalidParameter(format!(
            "need at least 4 samples, got {n_samples}"
        )));
    }
    let d = response_denominator(cycle, p)?;
    let step = 4.0 / n_samples as f64;
    let mut out = Vec::with_capacity(n_samples);
    for j in 0..n_samples {
        let theta = Phase::wrapped(j as f64 * step);
        let (bs, bu) = beta(theta.phi(), cycle)?;
        let (bx, by) = beta_global(theta, cycle)?;
        out.push(PrcSample {
            theta: theta.theta(),
            z_x: bx / d,
            z_y: by / d,
            z_s: bs / d,
            z_u: bu / d,
        });
    }
    Ok(out)
}

/// Area under one strictly positive lobe of a global response component:
/// `(1 + lambda - lambda u_dag - u_dag^lambda) / (lambda log(1/u_dag))`.
pub fn v_integral(cycle: &IrisCycle, p: &IrisParams) -> Result<f64, IrisError> {
    response_denominator(cycle, p)?;
    let lambda = p.lambda();
    Ok((1.0 + lambda - lambda * cycle.u_dag - cycle.s_dag) / (lambda * cycle.quarter()))
}

/// Unit-area response shape `alpha(theta) = beta_global(theta) / V`.
pub fn alpha(theta: Phase, cycle: &IrisCycle, p: &IrisParams) -> Result<(f64, f64), IrisError> {
    let v = v_integral(cycle, p)?;
    let (bx, by) = beta_global(theta, cycle)?;
    Ok((bx / v, by / v))
}

/// Overall response magnitude `M = V / (log(1/u_dag) (u_dag - lambda s_dag))`,
/// the factor in `Z = (eta . alpha) M`.
pub fn magnitude_m(cycle: &IrisCycle, p: &IrisParams) -> Result<f64, IrisError> {
    let d = response_denominator(cycle, p)?;
    Ok(v_integral(cycle, p)? / d)
}

/// Cycle fraction `1 - 1/lambda` separating bounded from divergent response
/// to stable-axis perturbations as the cycle approaches the heteroclinic.
pub fn critical_phase(lambda: f64) -> Result<f64, IrisError> {
    if !lambda.is_finite() || lambda <= 1.0 {
        return Err(IrisError::InvalidParameter(format!(
            "critical phase needs lambda > 1, got {lambda}"
        )));
    }
    Ok(1.0 - 1.0 / lambda)
}

/// Axis of the applied perturbation for [`asymptotic_class`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigDirection {
    Stable,
    Unstable,
}

/// Fate of the response at fixed cycle fraction as `a -> 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AsymptoticClass {
    Diverges,
    ConvergesToZero,
}

/// Classifies the small-offset limit of the response at fraction `phi`:
/// unstable-axis perturbations always diverge, stable-axis ones diverge only
/// past the critical fraction `1 - 1/lambda`.
pub fn asymptotic_class(direction: EigDirection, phi: f64, lambda: f64) -> AsymptoticClass {
    debug_assert!((0.0..1.0).contains(&phi) && lambda > 1.0);
    match direction {
        EigDirection::Unstable => AsymptoticClass::Diverges,
        EigDirection::Stable => {
            if phi <= 1.0 - 1.0 / lambda {
                AsymptoticClass::ConvergesToZero
            } else {
                AsymptoticClass::Diverges
            }
        }
    }
}

/// Entry position at small offset together with its relative deviation from
/// `a` itself: returns `(u_dag, (u_dag - a)/a)`. The deviation is `o(1)`.
pub fn u_dag_small_a(a: f64, lambda: f64) -> Result<(f64, f64), IrisError> {
    let p = IrisParams::new(lambda, a)?;
    let cycle = IrisCycle::from_params(&p)?;
    Ok((cycle.u_dag, (cycle.u_dag - a) / a))
}

/// Saddle-loop comparison system: a single square of size `big_delta`
/// re-entered at height `epsilon_reinject`, with voltage projection `nu_x`.
#[derive(Debug, Clone, Copy)]
pub struct HomoclinicParams {
    nu_x: f64,
    big_delta: f64,
    epsilon_reinject: f64,
}

impl HomoclinicParams {
    pub fn new(nu_x: f64, big_delta: f64, epsilon_reinject: f64) -> Result<Self, IrisError> {
        if !nu_x.is_finite() || !big_delta.is_finite() || !epsilon_reinject.is_finite() {
            return Err(IrisError::InvalidParameter(
                "homoclinic parameters must be finite".into(),
            ));
        }
        if !(big_delta > 0.0 && epsilon_reinject > 0.0 && epsilon_reinject < big_delta) {
            return Err(IrisError::InvalidParameter(format!(
                "need 0 < epsilon ({epsilon_reinject}) < big_delta ({big_delta})"
            )));
        }
        Ok(HomoclinicParams {
            nu_x,
            big_delta,
            epsilon_reinject,
        })
    }

    pub fn nu_x(&self) -> f64 {
        self.nu_x
    }

    /// Scaled reinjection height `u = epsilon / big_delta`.
    pub fn u_entry(&self) -> f64 {
        self.epsilon_reinject / self.big_delta
    }
}

/// Response of the homoclinic loop at fraction `phi`, as `(Z_u, Z_s)`:
/// `Z_u = (nu_x / big_delta) u^phi / (u log(1/u))` and `Z_s = 0` identically.
pub fn homoclinic_iprc(phi: f64, hp: &HomoclinicParams) -> Result<(f64, f64), IrisError> {
    if !phi.is_finite() || !(0.0..=1.0).contains(&phi) {
        return Err(IrisError::OutsideDomain(format!(
            "homoclinic response is defined for phi in [0,1], got {phi}"
        )));
    }
    let u = hp.u_entry();
    let z_u = (hp.nu_x / hp.big_delta) * u.powf(phi) / (u * (1.0 / u).ln());
    Ok((z_u, 0.0))
}

/// Iris response row evaluated at an arbitrary entry height `u`, as
/// `(Z_u, Z_s)` with `s = u^lambda`. For large `lambda` the `Z_u` component
/// coincides with the homoclinic row at the same `u` (unit projection).
pub fn iris_entry_iprc(phi: f64, u: f64, lambda: f64) -> Result<(f64, f64), IrisError> {
    if !phi.is_finite() || !(0.0..=1.0).contains(&phi) {
        return Err(IrisError::OutsideDomain(format!(
            "iris entry response is defined for phi in [0,1], got {phi}"
        )));
    }
    if !(u > 0.0 && u < 1.0) || !(lambda > 1.0) {
        return Err(IrisError::InvalidParameter(format!(
            "need 0 < u < 1 and lambda > 1, got u={u}, lambda={lambda}"
        )));
    }
    let s = u.powf(lambda);
    let denom = (u - lambda * s) * (1.0 / u).ln();
    Ok((u.powf(phi) / denom, s.powf(1.0 - phi) / denom))
}

/// Quadrature of the L1 magnitude of `alpha` over the full phase circle.
/// Equals 4 for every stable cycle.
pub fn alpha_l1_mass(cycle: &IrisCycle, p: &IrisParams) -> Result<f64, IrisError> {
    let v = v_integral(cycle, p)?;
    // within one square |alpha_x| + |alpha_y| = (beta_s + beta_u)/V, smooth
    // on the closed quarter (the kernel extends continuously to phi = 1)
    let (s_dag, u_dag) = (cycle.s_dag, cycle.u_dag);
    let lobe = adaptive_simpson(
        &|phi| s_dag.powf(1.0 - phi) + u_dag.powf(phi),
        0.0,
        1.0,
        1e-12,
    );
    Ok(4.0 * lobe / v)
}

#[cfg(test)]
mod tests {
    use super::*;

    const U_DAG: f64 = 0.276_393_202_250_021_03;
    const S_DAG: f64 = 0.076_393_202_250_021_03;

    fn setup() -> (IrisParams, IrisCycle) {
        let p = IrisParams::new(2.0, 0.2).unwrap();
        let c = IrisCycle::stable(&p).unwrap();
        (p, c)
    }

    #[test]
    fn beta_matches_closed_form() {
        let (_, c) = setup();
        let (bs, bu) = beta(0.0, &c).unwrap();
        assert!((bs - S_DAG).abs() < 1e-14);
        assert_eq!(bu, 1.0);
        let (bs, bu) = beta(0.5, &c).unwrap();
        assert!((bs - 0.276_393_202_250_021_03).abs() < 1e-14);
        assert!((bu - 0.525_731_112_119_133_6).abs() < 1e-14);
        let (bs, bu) = beta(1.0 - 1e-12, &c).unwrap();
        assert!((bs - 1.0).abs() < 1e-10 && (bu - U_DAG).abs() < 1e-10);
        assert!(beta(1.0, &c).is_err());
        assert!(beta(-0.1, &c).is_err());
    }

    #[test]
    fn iprc_at_phase_zero_matches_frozen_values() {
        let (p, c) = setup();
        let z_u = iprc(PerturbDirection::new(0.0, 1.0).unwrap(), Phase::new(0.0).unwrap(), &c, &p)
            .unwrap();
        assert!((z_u - 6.291_295_038_227_228).abs() < 1e-10, "z_u = {z_u}");
        let z_s = iprc(PerturbDirection::new(1.0, 0.0).unwrap(), Phase::new(0.0).unwrap(), &c, &p)
            .unwrap();
        assert!((z_s - 0.480_612_174_269_846_44).abs() < 1e-12, "z_s = {z_s}");
    }

    #[test]
    fn antisymmetry_across_half_cycle() {
        let (p, c) = setup();
        for dir in [PerturbDirection::global_x(), PerturbDirection::global_y()] {
            // dyadic phases survive the +2 shift bitwise, so the half-turn
            // sign flip is exact there
            for theta in [0.0, 0.25, 0.75, 1.5, 1.875] {
                let z0 = iprc(dir, Phase::new(theta).unwrap(), &c, &p).unwrap();
                let z2 = iprc(dir, Phase::new(theta + 2.0).unwrap(), &c, &p).unwrap();
                assert_eq!(z0, -z2, "theta={theta}");
            }
            for theta in [0.3, 0.7, 1.9] {
                let z0 = iprc(dir, Phase::new(theta).unwrap(), &c, &p).unwrap();
                let z2 = iprc(dir, Phase::new(theta + 2.0).unwrap(), &c, &p).unwrap();
                assert!((z0 + z2).abs() < 1e-12 * z0.abs().max(1.0), "theta={theta}");
            }
        }
    }

    #[test]
    fn component_table_reindexing() {
        let (p, c) = setup();
        let curve = prc_curve(64, &c, &p).unwrap();
        for s in &curve {
            let k = s.theta.floor() as usize;
            let (ex_x, ex_y) = match k {
                0 => (s.z_s, s.z_u),
                1 => (s.z_u, -s.z_s),
                2 => (-s.z_s, -s.z_u),
                3 => (-s.z_u, s.z_s),
                _ => unreachable!(),
            };
            assert_eq!(s.z_x, ex_x);
            assert_eq!(s.z_y, ex_y);
        }
    }

    #[test]
    fn jump_scaled_by_denominator_is_entry_sum() {
        let (p, c) = setup();
        let d = response_denominator(&c, &p).unwrap();
        // left limit of z_x at theta -> 2- is u_dag/D, right value is -s_dag/D
        let left = beta(1.0 - 1e-13, &c).unwrap().1 / d;
        let right = beta_global(Phase::new(2.0).unwrap(), &c).unwrap().0 / d;
        let jump = (left - right).abs();
        assert!((jump * d - (U_DAG + S_DAG)).abs() < 1e-10);
        assert!((jump - 2.219_483_356_185_138_6).abs() < 1e-9);
    }

    #[test]
    fn v_matches_closed_form_and_quadrature() {
        let (p, c) = setup();
        let v = v_integral(&c, &p).unwrap();
        assert!((v - 0.921_830_485_656_553_2).abs() < 1e-12);
        let quad = adaptive_simpson(&|ph| beta(ph, &c).unwrap().0, 0.0, 1.0 - 1e-14, 1e-12)
            + adaptive_simpson(&|ph| beta(ph, &c).unwrap().1, 0.0, 1.0 - 1e-14, 1e-12);
        assert!((v - quad).abs() < 1e-10, "v={v} quad={quad}");
    }

    #[test]
    fn alpha_mass_is_four() {
        for (lambda, a) in [(2.0, 0.2), (2.0, 0.1), (3.0, 0.1), (1.5, 0.05)] {
            let p = IrisParams::new(lambda, a).unwrap();
            let c = IrisCycle::stable(&p).unwrap();
            let mass = alpha_l1_mass(&c, &p).unwrap();
            assert!((mass - 4.0).abs() < 1e-8, "mass={mass} at ({lambda},{a})");
        }
    }

    #[test]
    fn magnitude_factorization() {
        let (p, c) = setup();
        let m = magnitude_m(&c, &p).unwrap();
        assert!((m - 5.799_507_560_497_669).abs() < 1e-10);
        let eta = PerturbDirection::new(0.4, -0.6).unwrap();
        for theta in [0.15, 1.4, 2.75, 3.9] {
            let ph = Phase::new(theta).unwrap();
            let z = iprc(eta, ph, &c, &p).unwrap();
            let al = alpha(ph, &c, &p).unwrap();
            let (ex, ey) = eta.components();
            let reconstructed = (ex * al.0 + ey * al.1) * m;
            assert!((z - reconstructed).abs() < 1e-12);
        }
    }

    #[test]
    fn critical_phase_values() {
        assert_eq!(critical_phase(2.0).unwrap(), 0.5);
        let golden = 0.5 * (1.0 + 5f64.sqrt());
        let crit = critical_phase(golden).unwrap();
        assert!((crit - 1.0 / (golden + 1.0)).abs() < 1e-15);
        assert!(critical_phase(1.0).is_err());
    }

    #[test]
    fn asymptotic_classes() {
        use AsymptoticClass::*;
        use EigDirection::*;
        assert_eq!(asymptotic_class(Unstable, 0.3, 2.0), Diverges);
        assert_eq!(asymptotic_class(Stable, 0.3, 2.0), ConvergesToZero);
        assert_eq!(asymptotic_class(Stable, 0.5, 2.0), ConvergesToZero);
        assert_eq!(asymptotic_class(Stable, 0.7, 2.0), Diverges);
    }

    #[test]
    fn small_offset_entry_scaling() {
        let (u, dev) = u_dag_small_a(1e-3, 2.0).unwrap();
        assert!((u - 1.001_002_005_014_042_1e-3).abs() < 1e-15);
        assert!((dev - 1.002_005e-3).abs() < 1e-8);
        let (_, dev) = u_dag_small_a(1e-6, 2.0).unwrap();
        assert!((dev - 1.000_002e-6).abs() < 1e-11);
    }

    #[test]
    fn monotone_trends_as_offset_shrinks() {
        let mut z_u_prev = 0.0;
        let mut z_s_prev = f64::INFINITY;
        for a in [1e-2, 1e-3, 1e-4] {
            let p = IrisParams::new(2.0, a).unwrap();
            let c = IrisCycle::stable(&p).unwrap();
            let z_u = iprc(
                PerturbDirection::new(0.0, 1.0).unwrap(),
                Phase::new(0.0).unwrap(),
                &c,
                &p,
            )
            .unwrap();
            let z_s = iprc(
                PerturbDirection::new(1.0, 0.0).unwrap(),
                Phase::new(0.25).unwrap(),
                &c,
                &p,
            )
            .unwrap();
            assert!(z_u > z_u_prev, "unstable-axis response must grow");
            assert!(z_s < z_s_prev, "pre-critical stable-axis response must shrink");
            z_u_prev = z_u;
            z_s_prev = z_s;
        }
    }

    #[test]
    fn homoclinic_row() {
        let hp = HomoclinicParams::new(1.0, 1.0, 0.1).unwrap();
        let (z_u, z_s) = homoclinic_iprc(0.0, &hp).unwrap();
        assert_eq!(z_s, 0.0);
        assert!((z_u - 4.342_944_819_032_518).abs() < 1e-12);
        assert!(HomoclinicParams::new(1.0, 0.5, 0.6).is_err());
    }

    #[test]
    fn large_lambda_coincides_with_homoclinic() {
        let hp = HomoclinicParams::new(1.0, 1.0, 0.1).unwrap();
        for phi in [0.0, 0.25, 0.5, 0.9, 1.0] {
            let (hz, _) = homoclinic_iprc(phi, &hp).unwrap();
            let (iz, _) = iris_entry_iprc(phi, 0.1, 50.0).unwrap();
            assert!(((iz - hz) / hz).abs() < 1e-6, "phi={phi}");
        }
    }

    #[test]
    fn fold_cycle_has_no_response() {
        let p = IrisParams::new(2.0, 0.25).unwrap();
        let c = IrisCycle::from_params(&p).unwrap();
        assert!(response_denominator(&c, &p).is_err());
    }

    #[test]
    fn phase_decomposition() {
        let ph = Phase::new(2.75).unwrap();
        assert_eq!(ph.square_offset(), 2);
        assert!((ph.phi() - 0.75).abs() < 1e-15);
        assert!(Phase::new(4.0).is_err());
        assert_eq!(Phase::wrapped(4.0).theta(), 0.0);
        assert_eq!(Phase::wrapped(-0.5).theta(), 3.5);
        assert_eq!(Phase::wrapped(-1e-18).theta(), 0.0);
    }
}
