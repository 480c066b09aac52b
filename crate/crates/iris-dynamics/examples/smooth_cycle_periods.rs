//! The smooth torus companion: as the twist mu shrinks toward zero the limit
//! cycle spends almost all its time creeping past the four saddles, so the
//! period grows and the slow fraction approaches one.

use iris_dynamics::smooth::{self, SmoothParams};

fn main() {
    let alpha = 7.0 / 30.0;
    let p0 = SmoothParams::new(alpha, 0.1).unwrap();
    println!(
        "alpha = {alpha:.6}: saddle eigenvalues at mu=0 are ({}, {}), saddle value {:.4}",
        p0.eigen_unstable(),
        p0.eigen_stable(),
        p0.saddle_value()
    );
    println!("Hopf at mu = 2 alpha = {:.6}; cycles exist for 0 < mu < 2 alpha", p0.hopf_mu());
    println!();

    println!("{:>8} {:>12} {:>18}", "mu", "period", "slow fraction");
    for mu in [1e-3, 1e-2, 0.1, 0.3, 0.45] {
        let p = SmoothParams::new(alpha, mu).unwrap();
        let c = smooth::find_cycle(&p).unwrap();
        // fraction of the lap below a tenth of the peak speed
        println!("{mu:>8} {:>12.6} {:>18.3}", c.period, c.dwell_fraction(0.1, &p));
    }

    println!();
    let p = SmoothParams::new(alpha, 0.48).unwrap();
    match smooth::find_cycle(&p) {
        Err(e) => println!("mu = 0.48 (past the Hopf): {e}"),
        Ok(_) => unreachable!("no cycle exists past the Hopf point"),
    }
}
