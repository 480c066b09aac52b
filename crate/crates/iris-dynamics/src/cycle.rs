//! Scalar analysis of the square-to-square entry map.
//!
//! A trajectory entering a square at local position `(1, u)` exits at
//! `(u^lambda, 1)` after time `log(1/u)` and enters the next square at
//! `u' = u^lambda + a`. Limit cycles of the full system are fixed points of
//! that one-dimensional map, i.e. roots of `rho(u) = u^lambda - u + a`.

use crate::error::IrisError;
use crate::params::{IrisParams, RegimeLabel};
use serde::{Deserialize, Serialize};

/// Residual of the entry-map fixed-point equation, `u^lambda - u + a`.
pub fn rho(u: f64, p: &IrisParams) -> Result<f64, IrisError> {
    check_unit_open(u)?;
    Ok(rho_raw(u, p.lambda(), p.a()))
}

fn rho_raw(u: f64, lambda: f64, a: f64) -> f64 {
    u.powf(lambda) - u + a
}

/// Location of the minimum of `rho` on (0,1): `lambda^(1/(1-lambda))`.
pub fn u_min(lambda: f64) -> f64 {
    lambda.powf(1.0 / (1.0 - lambda))
}

/// True iff `rho` has roots in (0,1): `lambda > 1` and the value of `rho` at
/// its minimum (with the `-u + a` part folded in) is non-positive.
pub fn existence_test(p: &IrisParams) -> bool {
    let (lambda, a) = (p.lambda(), p.a());
    if lambda <= 1.0 {
        return false;
    }
    lambda.powf(lambda / (1.0 - lambda)) - lambda.powf(1.0 / (1.0 - lambda)) + a <= 0.0
}

/// Offset at which the stable and unstable cycles collide and vanish.
pub fn fold_offset(lambda: f64) -> Result<f64, IrisError> {
    if !(lambda > 1.0) {
        return Err(IrisError::OutsideDomain(format!(
            "fold offset is defined for lambda > 1, got {lambda}"
        )));
    }
    Ok(lambda.powf(1.0 / (1.0 - lambda)) - lambda.powf(lambda / (1.0 - lambda)))
}

/// Offsets within this distance of the fold curve are classified `FoldPoint`.
pub const FOLD_TOLERANCE: f64 = 1e-9;

pub fn classify_regime(p: &IrisParams) -> RegimeLabel {
    let (lambda, a) = (p.lambda(), p.a());
    if a == 0.0 {
        return if lambda == 1.0 {
            RegimeLabel::NeutralOrbits
        } else if lambda > 1.0 {
            RegimeLabel::HeteroclinicBoundary
        } else {
            RegimeLabel::NoCycleSpiral
        };
    }
    if lambda <= 1.0 {
        return RegimeLabel::NoCycleSpiral;
    }
    let fold = fold_offset(lambda).expect("lambda > 1");
    if (a - fold).abs() < FOLD_TOLERANCE {
        RegimeLabel::FoldPoint
    } else if a < fold {
        RegimeLabel::StableAndUnstableCycle
    } else {
        RegimeLabel::NoCycleSpiral
    }
}

/// Derivative of the entry map, `lambda * u^(lambda-1)`. Values below 1 mean
/// the fixed point at `u` is stable, above 1 unstable.
pub fn stability_derivative(u: f64, p: &IrisParams) -> Result<f64, IrisError> {
    check_unit_open(u)?;
    Ok(p.lambda() * u.powf(p.lambda() - 1.0))
}

/// One-square transit: exit coordinate `u^lambda` and transit time `log(1/u)`.
pub fn map_fl(u_entry: f64, p: &IrisParams) -> Result<(f64, f64), IrisError> {
    check_unit_open(u_entry)?;
    Ok((u_entry.powf(p.lambda()), (1.0 / u_entry).ln()))
}

/// Full square-to-square entry map `h(u) = u^lambda + a`.
pub fn map_h(u_entry: f64, p: &IrisParams) -> Result<f64, IrisError> {
    check_unit_open(u_entry)?;
    Ok(u_entry.powf(p.lambda()) + p.a())
}

fn check_unit_open(u: f64) -> Result<(), IrisError> {
    if !u.is_finite() || u <= 0.0 || u >= 1.0 {
        return Err(IrisError::OutsideDomain(format!(
            "entry position must lie in (0, 1), got {u}"
        )));
    }
    Ok(())
}

/// Where a transit starting at `(1, u)` passes closest to the saddle and where
/// it moves slowest, in transit time and as a fraction of the transit.
#[derive(Debug, Clone, Copy)]
pub struct ClosestSlowest {
    pub t_closest: f64,
    pub t_slowest: f64,
    /// `t_closest` over the transit time `log(1/u)`.
    pub phi_closest: f64,
    pub phi_slowest: f64,
    /// Local `(s, u)` at the closest approach; lies on the line `u = sqrt(lambda) * s`.
    pub closest_point: (f64, f64),
    /// Local `(s, u)` at the slowest point; lies on the line `u = lambda^(3/2) * s`.
    pub slowest_point: (f64, f64),
}

pub fn closest_slowest(u_entry: f64, p: &IrisParams) -> Result<ClosestSlowest, IrisError> {
    check_unit_open(u_entry)?;
    let lambda = p.lambda();
    let log_lambda = lambda.ln();
    let log_u = u_entry.ln();
    let transit = -log_u;
    let t_closest = (log_lambda - 2.0 * log_u) / (2.0 * (lambda + 1.0));
    let t_slowest = (3.0 * log_lambda - 2.0 * log_u) / (2.0 * (lambda + 1.0));
    let at = |t: f64| ((-lambda * t).exp(), u_entry * t.exp());
    Ok(ClosestSlowest {
        t_closest,
        t_slowest,
        phi_closest: t_closest / transit,
        phi_slowest: t_slowest / transit,
        closest_point: at(t_closest),
        slowest_point: at(t_slowest),
    })
}

/// Entry positions and derived constants of the limit cycles.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct IrisCycle {
    /// Entry position of the stable cycle (lower root of `rho`).
    pub u_dag: f64,
    /// Entry position of the unstable cycle (upper root).
    pub u_ddag: f64,
    /// Exit coordinate of the stable cycle, `u_dag^lambda`.
    pub s_dag: f64,
    /// Period of the stable cycle, `4 log(1/u_dag)`.
    pub period: f64,
}

impl IrisCycle {
    /// Cycle data for any regime that has cycles (including the fold, where
    /// the two entry positions coincide).
    pub fn from_params(p: &IrisParams) -> Result<Self, IrisError> {
        match find_roots(p) {
            Some((u_dag, u_ddag)) => {
                let s_dag = u_dag.powf(p.lambda());
                Ok(IrisCycle {
                    u_dag,
                    u_ddag,
                    s_dag,
                    period: 4.0 * (1.0 / u_dag).ln(),
                })
            }
            None => Err(IrisError::NoStableCycle {
                lambda: p.lambda(),
                a: p.a(),
                regime: classify_regime(p),
            }),
        }
    }

    /// Like [`from_params`](Self::from_params) but insists on strict
    /// hyperbolic stability, which the phase response formulas need.
    pub fn stable(p: &IrisParams) -> Result<Self, IrisError> {
        let regime = classify_regime(p);
        if regime != RegimeLabel::StableAndUnstableCycle {
            return Err(IrisError::NoStableCycle {
                lambda: p.lambda(),
                a: p.a(),
                regime,
            });
        }
        Self::from_params(p)
    }

    /// Quarter period `log(1/u_dag)`, the transit time of one square.
    pub fn quarter(&self) -> f64 {
        0.25 * self.period
    }

    /// Contraction factor of the entry map at the stable cycle,
    /// `lambda * u_dag^(lambda-1)`.
    pub fn contraction(&self, p: &IrisParams) -> f64 {
        p.lambda() * self.u_dag.powf(p.lambda() - 1.0)
    }

    /// Point of the stable cycle within a square, in local coordinates, at
    /// fractional phase `phi` of the transit: `(u_dag^(lambda phi), u_dag^(1-phi))`.
    pub fn point_at_phi(&self, phi: f64, p: &IrisParams) -> (f64, f64) {
        (
            self.u_dag.powf(p.lambda() * phi),
            self.u_dag.powf(1.0 - phi),
        )
    }
}

/// Both roots of `rho` in (0,1) when they exist; `(u_min, u_min)` within
/// [`FOLD_TOLERANCE`] of the fold; `None` otherwise (including the
/// heteroclinic boundary `a = 0`, which has no isolated cycle).
pub fn find_roots(p: &IrisParams) -> Option<(f64, f64)> {
    match classify_regime(p) {
        RegimeLabel::StableAndUnstableCycle => {
            let (lambda, a) = (p.lambda(), p.a());
            let split = u_min(lambda);
            let lower = refine_root(lambda, a, 1e-280, split);
            let upper = refine_root(lambda, a, split, 1.0 - f64::EPSILON);
            Some((lower, upper))
        }
        RegimeLabel::FoldPoint => {
            let m = u_min(p.lambda());
            Some((m, m))
        }
        _ => None,
    }
}

/// Bisection to a 1e-6 bracket followed by Newton polish on `rho`.
/// The bracket endpoints must straddle the root.
fn refine_root(lambda: f64, a: f64, mut lo: f64, mut hi: f64) -> f64 {
    let f = |u: f64| rho_raw(u, lambda, a);
    let mut flo = f(lo);
    if flo == 0.0 {
        return lo;
    }
    if (flo > 0.0) == (f(hi) > 0.0) {
        // No sign change: the root is closer to the endpoint than one ulp
        // (only reachable for offsets near the double-precision floor).
        return hi;
    }
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }

    // Newton to the floating-point noise floor: quadratic convergence makes
    // the residual stall after a few steps, at which point `u` is the best
    // representable root.
    let mut u = 0.5 * (lo + hi);
    let mut best = u;
    let mut best_res = f64::INFINITY;
    for _ in 0..64 {
        let fu = f(u);
        if fu == 0.0 {
            return u;
        }
        if fu.abs() < best_res {
            best_res = fu.abs();
            best = u;
        }
        // Keep the bracket current so Newton can fall back on it.
        if (fu > 0.0) == (flo > 0.0) {
            lo = u;
        } else {
            hi = u;
        }
        let df = lambda * u.powf(lambda - 1.0) - 1.0;
        let next = if df != 0.0 { u - fu / df } else { f64::NAN };
        let next = if next.is_finite() && next > lo && next < hi {
            next
        } else {
            0.5 * (lo + hi)
        };
        if next == u {
            break;
        }
        u = next;
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(lambda: f64, a: f64) -> IrisParams {
        IrisParams::new(lambda, a).unwrap()
    }

    // Closed-form roots of u^2 - u + a for lambda = 2.
    fn quadratic_roots(a: f64) -> (f64, f64) {
        let d = (1.0 - 4.0 * a).sqrt();
        (0.5 * (1.0 - d), 0.5 * (1.0 + d))
    }

    #[test]
    fn rho_values() {
        assert_eq!(rho(0.5, &params(2.0, 0.25)).unwrap(), 0.0);
        let r = rho(0.2763932, &params(2.0, 0.2)).unwrap();
        assert!(r.abs() < 1e-7, "rho near the stable root: {r}");
        assert_relative_eq!(rho(0.5, &params(1.0, 0.1)).unwrap(), 0.1);
        assert!(rho(0.0, &params(2.0, 0.2)).is_err());
        assert!(rho(1.0, &params(2.0, 0.2)).is_err());
    }

    #[test]
    fn existence_and_fold() {
        assert!(existence_test(&params(2.0, 0.2)));
        assert!(!existence_test(&params(2.0, 0.255)));
        assert!(!existence_test(&params(1.0, 0.1)));
        assert_eq!(fold_offset(2.0).unwrap(), 0.25);
        assert!(fold_offset(1.0).is_err());
        // fold offset vanishes as lambda -> 1+
        assert!(fold_offset(1.0 + 1e-6).unwrap() < 1e-5);
        // frozen closed-form values
        assert_relative_eq!(fold_offset(1.5).unwrap(), 0.14814814814814815, epsilon = 1e-15);
        assert_relative_eq!(fold_offset(3.0).unwrap(), 0.3849001794597505, epsilon = 1e-15);
        assert_relative_eq!(fold_offset(5.0).unwrap(), 0.5349922439811376, epsilon = 1e-15);
    }

    #[test]
    fn roots_match_quadratic_formula() {
        for a in [0.2, 0.1, 0.24, 1e-3, 1e-6] {
            let (lo_exp, hi_exp) = quadratic_roots(a);
            let (lo, hi) = find_roots(&params(2.0, a)).unwrap();
            assert_relative_eq!(lo, lo_exp, epsilon = 1e-12);
            assert_relative_eq!(hi, hi_exp, epsilon = 1e-12);
        }
        let (lo, hi) = find_roots(&params(2.0, 0.2)).unwrap();
        assert_relative_eq!(lo, 0.27639320225002103, epsilon = 1e-13);
        assert_relative_eq!(hi, 0.7236067977499790, epsilon = 1e-13);
    }

    #[test]
    fn roots_absent_when_no_cycle() {
        assert!(find_roots(&params(2.0, 0.3)).is_none());
        assert!(find_roots(&params(0.8, 0.1)).is_none());
        // a = 0 is the heteroclinic boundary, not a pair of isolated roots
        assert!(find_roots(&params(2.0, 0.0)).is_none());
    }

    #[test]
    fn roots_at_fold_collapse() {
        let (lo, hi) = find_roots(&params(2.0, 0.25)).unwrap();
        assert_eq!(lo, hi);
        assert_relative_eq!(lo, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn regime_labels() {
        assert_eq!(
            classify_regime(&params(2.0, 0.05)),
            RegimeLabel::StableAndUnstableCycle
        );
        assert_eq!(
            classify_regime(&params(2.0, 0.0)),
            RegimeLabel::HeteroclinicBoundary
        );
        assert_eq!(classify_regime(&params(0.8, 0.1)), RegimeLabel::NoCycleSpiral);
        assert_eq!(classify_regime(&params(1.0, 0.0)), RegimeLabel::NeutralOrbits);
        assert_eq!(classify_regime(&params(2.0, 0.25)), RegimeLabel::FoldPoint);
        assert_eq!(classify_regime(&params(2.0, 0.26)), RegimeLabel::NoCycleSpiral);
        assert_eq!(classify_regime(&params(1.0, 0.1)), RegimeLabel::NoCycleSpiral);
    }

    #[test]
    fn stability_derivative_values() {
        let p = params(2.0, 0.2);
        let (u_dag, u_ddag) = find_roots(&p).unwrap();
        assert_relative_eq!(
            stability_derivative(u_dag, &p).unwrap(),
            0.5527864045000421,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            stability_derivative(u_ddag, &p).unwrap(),
            1.4472135954999579,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            stability_derivative(u_min(2.0), &p).unwrap(),
            1.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn transit_map_values() {
        let p = params(2.0, 0.2);
        let (s_f, t) = map_fl(0.5, &p).unwrap();
        assert_eq!(s_f, 0.25);
        assert_relative_eq!(t, std::f64::consts::LN_2, epsilon = 1e-15);
        // entry near the corner exits almost immediately
        let (s_f, t) = map_fl(1.0 - 1e-9, &p).unwrap();
        assert!(s_f > 1.0 - 3e-9 && t < 3e-9);
        // limit-cycle self-consistency
        let cycle = IrisCycle::from_params(&p).unwrap();
        let (s_f, t) = map_fl(cycle.u_dag, &p).unwrap();
        assert_relative_eq!(s_f, cycle.s_dag, epsilon = 1e-14);
        assert_relative_eq!(t, cycle.quarter(), epsilon = 1e-14);
        assert!(map_fl(0.0, &p).is_err());
    }

    #[test]
    fn entry_map_values() {
        let p = params(2.0, 0.2);
        assert_relative_eq!(map_h(0.5, &p).unwrap(), 0.45, epsilon = 1e-15);
        let u_dag = find_roots(&p).unwrap().0;
        assert!((map_h(u_dag, &p).unwrap() - u_dag).abs() < 1e-12);
        // lambda = 1, a = 0 makes h the identity
        let neutral = params(1.0, 0.0);
        assert_relative_eq!(map_h(0.37, &neutral).unwrap(), 0.37, epsilon = 1e-15);
    }

    #[test]
    fn closest_and_slowest_approach() {
        let p = params(2.0, 0.2);
        let u_dag = find_roots(&p).unwrap().0;
        let cs = closest_slowest(u_dag, &p).unwrap();
        assert_relative_eq!(cs.phi_closest, 0.4231706183376110, epsilon = 1e-12);
        assert_relative_eq!(cs.t_closest, 0.5441681238522088, epsilon = 1e-12);
        // the characteristic lines through the closest and slowest points
        let (s, u) = cs.closest_point;
        assert_relative_eq!(u, 2.0_f64.sqrt() * s, epsilon = 1e-12);
        let (s, u) = cs.slowest_point;
        assert_relative_eq!(u, 2.0_f64.powf(1.5) * s, epsilon = 1e-12);
        // both fractions tend to 1/(lambda+1) as the cycle nears the
        // heteroclinic boundary
        let tight = params(2.0, 1e-8);
        let u_dag = find_roots(&tight).unwrap().0;
        let cs = closest_slowest(u_dag, &tight).unwrap();
        assert!((cs.phi_closest - 1.0 / 3.0).abs() < 0.02);
        assert!((cs.phi_slowest - 1.0 / 3.0).abs() < 0.05);
        assert!(cs.phi_slowest > cs.phi_closest);
    }

    #[test]
    fn cycle_struct_consistency() {
        let p = params(2.0, 0.2);
        let c = IrisCycle::from_params(&p).unwrap();
        assert_relative_eq!(c.period, 5.143723125106615, epsilon = 1e-12);
        assert_relative_eq!(c.s_dag, c.u_dag * c.u_dag, epsilon = 1e-15);
        assert!(c.u_dag - 2.0 * c.s_dag > 0.0);
        assert!(IrisCycle::stable(&params(2.0, 0.25)).is_err());
        assert!(IrisCycle::stable(&params(2.0, 0.3)).is_err());
        let (s, u) = c.point_at_phi(0.0, &p);
        assert_relative_eq!(s, 1.0, epsilon = 1e-15);
        assert_relative_eq!(u, c.u_dag, epsilon = 1e-15);
        let (s, u) = c.point_at_phi(1.0, &p);
        assert_relative_eq!(s, c.s_dag, epsilon = 1e-15);
        assert_relative_eq!(u, 1.0, epsilon = 1e-15);
    }
}
