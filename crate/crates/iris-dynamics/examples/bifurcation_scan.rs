//! Two-parameter regime scan: how the (lambda, a) plane splits into
//! cycle-bearing and spiraling regions, bounded by the fold curve.

use iris_dynamics::cycle;
use iris_dynamics::params::{IrisParams, RegimeLabel};

fn main() {
    let (n_lambda, n_a) = (11usize, 56usize);
    println!("regime map: rows lambda in [1.1, 6], columns a in [0, 0.55]");
    println!("  o stable+unstable cycles, * fold, . no cycle (spiral to the hub)");
    println!();
    for i in 0..n_lambda {
        let lambda = 1.1 + (6.0 - 1.1) * i as f64 / (n_lambda - 1) as f64;
        let mut row = String::new();
        for j in 0..n_a {
            let a = 0.55 * j as f64 / (n_a - 1) as f64;
            let mark = match cycle::classify_regime(&IrisParams::new(lambda, a).unwrap()) {
                RegimeLabel::StableAndUnstableCycle => 'o',
                RegimeLabel::FoldPoint => '*',
                RegimeLabel::HeteroclinicBoundary => 'h',
                RegimeLabel::NeutralOrbits => 'n',
                RegimeLabel::NoCycleSpiral => '.',
            };
            row.push(mark);
        }
        println!("  lambda {lambda:>4.2} |{row}|");
    }

    println!();
    println!("fold curve a_fold(lambda) = lambda^(1/(1-lambda)) - lambda^(lambda/(1-lambda)):");
    for lambda in [1.5, 2.0, 3.0, 5.0, 10.0, 50.0] {
        println!("  lambda = {lambda:<5} a_fold = {:.12}", cycle::fold_offset(lambda).unwrap());
    }
}
