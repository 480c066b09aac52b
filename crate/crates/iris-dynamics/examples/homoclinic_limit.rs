//! For stiff contraction the iris entry response collapses onto the
//! single-saddle homoclinic formula: the unstable-direction curves agree to
//! machine precision, while the stable-direction response is exponentially
//! small except near the end of the passage.

use iris_dynamics::prc::{self, HomoclinicParams};

fn main() {
    let (lambda, u) = (50.0, 0.1);
    let hp = HomoclinicParams::new(1.0, 1.0, u).unwrap();
    println!("iris at lambda={lambda} vs homoclinic reinjection, entry u={u}");
    println!(
        "{:>6} {:>16} {:>16} {:>12} {:>12}",
        "phi", "Z_u iris", "Z_u homoclinic", "rel diff", "Z_s iris"
    );
    for j in 0..=10 {
        let phi = 0.095 * j as f64;
        let (zu_i, zs_i) = prc::iris_entry_iprc(phi, u, lambda).unwrap();
        let (zu_h, _) = prc::homoclinic_iprc(phi, &hp).unwrap();
        println!(
            "{phi:>6.3} {zu_i:>16.10} {zu_h:>16.10} {:>12.2e} {zs_i:>12.2e}",
            (zu_i / zu_h - 1.0).abs()
        );
    }

    println!();
    println!("the stable-direction response decays like u^(lambda(1-phi)):");
    for lambda in [5.0, 10.0, 25.0, 50.0] {
        let (_, zs) = prc::iris_entry_iprc(0.5, u, lambda).unwrap();
        println!("  lambda = {lambda:<4} Z_s(0.5) = {zs:.3e}");
    }
}
