//! Event-exact trajectories: convergence onto the stable cycle, absorption
//! into a corner past the unstable cycle, and escape below the stable
//! manifold. No ODE stepping, every square passage is one closed-form hop.

use iris_dynamics::cycle::IrisCycle;
use iris_dynamics::params::IrisParams;
use iris_dynamics::sim::{self, PhaseResult, StartPoint};

fn show(label: &str, start: StartPoint, p: &IrisParams) {
    let traj = sim::simulate(start, 200.0, p).unwrap();
    let entries: Vec<String> = traj
        .entry_positions()
        .take(7)
        .map(|u| format!("{u:.6}"))
        .collect();
    println!(
        "{label:<28} {:>12} after {:>2} squares | entries: {}",
        format!("{:?}", traj.termination),
        traj.segments.len(),
        entries.join(" -> ")
    );
}

fn main() {
    let p = IrisParams::new(2.0, 0.2).unwrap();
    let c = IrisCycle::stable(&p).unwrap();
    println!("lambda=2 a=0.2: u_dag={:.6} u_ddag={:.6}", c.u_dag, c.u_ddag);
    println!();

    show("on the cycle", StartPoint::Local { square: 1, s: 1.0, u: c.u_dag }, &p);
    show("inside the basin", StartPoint::Local { square: 1, s: 1.0, u: 0.5 }, &p);
    show("barely inside", StartPoint::Local { square: 1, s: 1.0, u: 0.72 }, &p);
    show("past the unstable cycle", StartPoint::Local { square: 1, s: 1.0, u: 0.75 }, &p);
    show("below the stable manifold", StartPoint::Local { square: 1, s: 1.0, u: -0.1 }, &p);
    show("global start", StartPoint::Global { x: -0.3, y: -0.9 }, &p);

    // asymptotic phase tags every basin point with where it lands on the cycle
    println!();
    for (x, y) in [(-0.3, -1.2), (1.2, 0.3), (0.10, -0.82)] {
        match sim::asymptotic_phase(StartPoint::Global { x, y }, &p, &c).unwrap() {
            PhaseResult::Phase(theta) => println!("theta({x:>5}, {y:>5}) = {theta:.9}"),
            PhaseResult::NoPhase(reason) => println!("theta({x:>5}, {y:>5}) undefined: {reason:?}"),
        }
    }
    match sim::asymptotic_phase(StartPoint::Global { x: 0.0, y: 0.1 }, &p, &c).unwrap() {
        PhaseResult::NoPhase(reason) => println!("theta(  0.0,   0.1) undefined: {reason:?}"),
        PhaseResult::Phase(t) => println!("theta(  0.0,   0.1) = {t:.9}"),
    }
}
