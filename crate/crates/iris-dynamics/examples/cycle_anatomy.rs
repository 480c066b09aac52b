//! Closed-form anatomy of the stable and unstable limit cycles for a few
//! offsets: entry-map roots, period, contraction, and the closest/slowest
//! points of the passage by the saddle.

use iris_dynamics::cycle::{self, IrisCycle};
use iris_dynamics::params::IrisParams;

fn main() {
    let lambda = 2.0;
    println!("lambda = {lambda}, fold at a = {}", cycle::fold_offset(lambda).unwrap());
    println!();
    println!(
        "{:>6} {:>12} {:>12} {:>12} {:>10} {:>10}",
        "a", "u_dag", "u_ddag", "period", "kappa", "phi_close"
    );
    for a in [1e-3, 0.1, 0.2, 0.24, 0.2499] {
        let p = IrisParams::new(lambda, a).unwrap();
        let c = IrisCycle::stable(&p).unwrap();
        let cs = cycle::closest_slowest(c.u_dag, &p).unwrap();
        println!(
            "{:>6} {:>12.8} {:>12.8} {:>12.8} {:>10.6} {:>10.6}",
            a,
            c.u_dag,
            c.u_ddag,
            c.period,
            c.contraction(&p),
            cs.phi_closest,
        );
    }

    println!();
    println!("regimes across the fold (lambda = {lambda}):");
    for a in [0.2, 0.25, 0.26] {
        let p = IrisParams::new(lambda, a).unwrap();
        println!("  a = {a:<5} -> {}", cycle::classify_regime(&p));
    }

    // as the offset shrinks the stable cycle hugs the heteroclinic contour:
    // u_dag -> a and the period diverges like 4 log(1/a)
    println!();
    println!("heteroclinic limit:");
    for a in [1e-2, 1e-4, 1e-6, 1e-8] {
        let p = IrisParams::new(lambda, a).unwrap();
        let c = IrisCycle::stable(&p).unwrap();
        println!(
            "  a = {a:<6.0e}  u_dag/a - 1 = {:>10.3e}   period/4log(1/a) = {:.6}",
            c.u_dag / a - 1.0,
            c.period / (4.0 * (1.0 / a).ln())
        );
    }
}
