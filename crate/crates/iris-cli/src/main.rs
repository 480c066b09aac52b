//! `iris`: command-line access to the iris and smooth-torus systems.
//!
//! Every subcommand writes CSV (one `#` parameter line, a column row, data)
//! or a JSON mirror of the same content to stdout or `--out`. Output is
//! byte-identical across runs. Exit codes: 0 success, 2 invalid parameters,
//! 3 for parameter regimes without the requested cycle.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use iris_dynamics::cycle::{self, IrisCycle};
use iris_dynamics::error::IrisError;
use iris_dynamics::geometry::SquareFrame;
use iris_dynamics::output;
use iris_dynamics::params::IrisParams;
use iris_dynamics::prc::{self, PerturbDirection, Phase};
use iris_dynamics::sim::{self, StartPoint};
use iris_dynamics::smooth::{self, SmoothParams};

#[derive(Parser)]
#[command(
    name = "iris",
    version,
    about = "Limit cycles, phase response curves, and isochrons near a heteroclinic cycle"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Csv,
    Json,
    /// Compact little-endian grid; only the isochrons subcommand writes it.
    Binary,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Mode {
    Analytic,
    Numeric,
    Both,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Direction {
    /// Global x (equals the local stable axis of square 1).
    X,
    /// Global y (equals the local unstable axis of square 1).
    Y,
    /// Local stable axis of whichever square holds the phase point.
    S,
    /// Local unstable axis of whichever square holds the phase point.
    U,
}

#[derive(Subcommand)]
enum Cmd {
    /// Regime map over (lambda, a) plus the analytic fold curve.
    Bifurcation {
        #[arg(long, default_value_t = 1.05)]
        lambda_min: f64,
        #[arg(long, default_value_t = 6.0)]
        lambda_max: f64,
        #[arg(long, default_value_t = 0.0)]
        a_min: f64,
        #[arg(long, default_value_t = 0.6)]
        a_max: f64,
        /// Grid resolution per axis.
        #[arg(long, default_value_t = 40)]
        grid: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Limit-cycle anatomy: JSON summary or CSV polylines of both cycles.
    Cycle {
        #[arg(long, default_value_t = 2.0)]
        lambda: f64,
        #[arg(long, default_value_t = 0.2)]
        a: f64,
        /// Polyline samples per square in CSV mode.
        #[arg(long, default_value_t = 128)]
        samples: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Infinitesimal phase response curves, analytic and/or measured.
    Prc {
        #[arg(long, default_value_t = 2.0)]
        lambda: f64,
        #[arg(long, default_value_t = 0.2)]
        a: f64,
        #[arg(long, value_enum, default_value_t = Direction::X)]
        direction: Direction,
        /// Phase samples over [0,4). Analytic curves sample from 0 and show
        /// the jumps; numeric and overlay modes sample cell midpoints, where
        /// both one-sided limits agree.
        #[arg(long, default_value_t = 64)]
        samples: usize,
        #[arg(long, value_enum, default_value_t = Mode::Analytic)]
        mode: Mode,
        /// Perturbation size for the measured curve.
        #[arg(long, default_value_t = 1e-4)]
        r: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Asymptotic-phase field over the full square arrangement.
    Isochrons {
        #[arg(long, default_value_t = 2.0)]
        lambda: f64,
        #[arg(long, default_value_t = 0.2)]
        a: f64,
        /// Cells per axis.
        #[arg(long, default_value_t = 100)]
        grid: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Event-exact trajectory from a chosen start point.
    Trajectory {
        #[arg(long, default_value_t = 2.0)]
        lambda: f64,
        #[arg(long, default_value_t = 0.2)]
        a: f64,
        /// Start square (1..=4).
        #[arg(long, default_value_t = 1)]
        square: usize,
        /// Start stable coordinate in the square frame.
        #[arg(long, default_value_t = 1.0)]
        s: f64,
        /// Start unstable coordinate in the square frame.
        #[arg(long, default_value_t = 0.5)]
        u: f64,
        #[arg(long, default_value_t = 40.0)]
        max_time: f64,
        /// Interior points written per square visit.
        #[arg(long, default_value_t = 24)]
        samples: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Smooth-torus limit cycle: JSON summary or CSV time series of one lap.
    SmoothCycle {
        #[arg(long, default_value_t = 7.0 / 30.0)]
        alpha: f64,
        #[arg(long, default_value_t = 1e-3)]
        mu: f64,
        /// RK4 step.
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        /// CSV time horizon; defaults to one period.
        #[arg(long)]
        t_end: Option<f64>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Measured phase response curves of the smooth-torus cycle.
    SmoothPrc {
        #[arg(long, default_value_t = 7.0 / 30.0)]
        alpha: f64,
        #[arg(long, default_value_t = 0.3)]
        mu: f64,
        /// Phase samples (cell midpoints over [0,4)).
        #[arg(long, default_value_t = 64)]
        samples: usize,
        /// Perturbation size.
        #[arg(long, default_value_t = 1e-4)]
        r: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fixed-step RK4 path of the smooth system from a chosen start.
    SmoothTrajectory {
        #[arg(long, default_value_t = 7.0 / 30.0)]
        alpha: f64,
        #[arg(long, default_value_t = 1e-3)]
        mu: f64,
        #[arg(long, default_value_t = PI + 0.5)]
        y1: f64,
        #[arg(long, default_value_t = PI)]
        y2: f64,
        #[arg(long, default_value_t = 200.0)]
        t_end: f64,
        /// RK4 step.
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        /// Thin the output to every n-th step.
        #[arg(long, default_value_t = 20)]
        stride: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli.cmd) {
        eprintln!("error: {e}");
        std::process::exit(match e {
            IrisError::InvalidParameter(_)
            | IrisError::OutsideDomain(_)
            | IrisError::OutsideSystem { .. }
            | IrisError::InfiniteDwell { .. } => 2,
            IrisError::NoStableCycle { .. } | IrisError::NoSmoothCycle(_) => 3,
            _ => 1,
        });
    }
}

fn writer(out: &Option<PathBuf>) -> Result<Box<dyn Write>, IrisError> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn need(format: Format, allowed: &[Format]) -> Result<(), IrisError> {
    if allowed.contains(&format) {
        Ok(())
    } else {
        Err(IrisError::InvalidParameter(
            "binary output is only available for the isochrons subcommand".into(),
        ))
    }
}

fn run(cmd: Cmd) -> Result<(), IrisError> {
    match cmd {
        Cmd::Bifurcation { lambda_min, lambda_max, a_min, a_max, grid, format, out } => {
            need(format, &[Format::Csv, Format::Json])?;
            cmd_bifurcation(lambda_min, lambda_max, a_min, a_max, grid, format, &out)
        }
        Cmd::Cycle { lambda, a, samples, format, out } => {
            need(format, &[Format::Csv, Format::Json])?;
            cmd_cycle(lambda, a, samples, format, &out)
        }
        Cmd::Prc { lambda, a, direction, samples, mode, r, format, out } => {
            need(format, &[Format::Csv, Format::Json])?;
            cmd_prc(lambda, a, direction, samples, mode, r, format, &out)
        }
        Cmd::Isochrons { lambda, a, grid, format, out } => {
            cmd_isochrons(lambda, a, grid, format, &out)
        }
        Cmd::Trajectory { lambda, a, square, s, u, max_time, samples, format, out } => {
            need(format, &[Format::Csv, Format::Json])?;
            cmd_trajectory(lambda, a, square, s, u, max_time, samples, format, &out)
        }
        Cmd::SmoothCycle { alpha, mu, step, t_end, format, out } => {
            need(format, &[Format::Csv, Format::Json])?;
            cmd_smooth_cycle(alpha, mu, step, t_end, format, &out)
        }
        Cmd::SmoothPrc { alpha, mu, samples, r, format, out } => {
            need(format, &[Format::Csv, Format::Json])?;
            cmd_smooth_prc(alpha, mu, samples, r, format, &out)
        }
        Cmd::SmoothTrajectory { alpha, mu, y1, y2, t_end, step, stride, format, out } => {
            need(format, &[Format::Csv, Format::Json])?;
            cmd_smooth_trajectory(alpha, mu, y1, y2, t_end, step, stride, format, &out)
        }
    }
}

fn cmd_bifurcation(
    lambda_min: f64,
    lambda_max: f64,
    a_min: f64,
    a_max: f64,
    grid: usize,
    format: Format,
    out: &Option<PathBuf>,
) -> Result<(), IrisError> {
    if !(lambda_min > 1.0 && lambda_max > lambda_min && a_min >= 0.0 && a_max > a_min && a_max < 1.0)
    {
        return Err(IrisError::InvalidParameter(format!(
            "need 1 < lambda_min < lambda_max and 0 <= a_min < a_max < 1, got \
             lambda in [{lambda_min}, {lambda_max}], a in [{a_min}, {a_max}]"
        )));
    }
    if grid < 2 {
        return Err(IrisError::InvalidParameter(format!(
            "grid must be at least 2, got {grid}"
        )));
    }
    let coord = |lo: f64, hi: f64, i: usize| lo + (hi - lo) * i as f64 / (grid - 1) as f64;
    let mut rows: Vec<(f64, f64, &'static str, &'static str)> = Vec::new();
    for i in 0..grid {
        let lambda = coord(lambda_min, lambda_max, i);
        for j in 0..grid {
            let a = coord(a_min, a_max, j);
            let regime = cycle::classify_regime(&IrisParams::new(lambda, a)?);
            rows.push((lambda, a, regime.as_str(), "grid"));
        }
    }
    // the fold curve, densely sampled as its own series
    let fold_n = 4 * grid;
    let mut fold: Vec<(f64, f64)> = Vec::new();
    for i in 0..fold_n {
        let lambda = lambda_min + (lambda_max - lambda_min) * i as f64 / (fold_n - 1) as f64;
        fold.push((lambda, cycle::fold_offset(lambda)?));
    }
    let comment = format!(
        "bifurcation lambda=[{lambda_min},{lambda_max}] a=[{a_min},{a_max}] grid={grid}"
    );

    let mut w = writer(out)?;
    match format {
        Format::Csv => {
            writeln!(w, "# {comment}")?;
            writeln!(w, "lambda,a,regime,series")?;
            for (lambda, a, regime, series) in &rows {
                writeln!(w, "{lambda},{a},{regime},{series}")?;
            }
            for (lambda, a) in &fold {
                writeln!(w, "{lambda},{a},fold-point,fold")?;
            }
        }
        _ => {
            let grid_json: Vec<serde_json::Value> = rows
                .iter()
                .map(|(l, a, r, _)| serde_json::json!({ "lambda": l, "a": a, "regime": r }))
                .collect();
            let fold_json: Vec<serde_json::Value> = fold
                .iter()
                .map(|(l, a)| serde_json::json!({ "lambda": l, "a": a }))
                .collect();
            let doc = serde_json::json!({
                "lambda_min": lambda_min, "lambda_max": lambda_max,
                "a_min": a_min, "a_max": a_max, "grid": grid,
                "regimes": grid_json,
                "fold_curve": fold_json,
            });
            writeln!(w, "{doc:#}")?;
        }
    }
    Ok(())
}

fn cmd_cycle(
    lambda: f64,
    a: f64,
    samples: usize,
    format: Format,
    out: &Option<PathBuf>,
) -> Result<(), IrisError> {
    let p = IrisParams::new(lambda, a)?;
    let regime = cycle::classify_regime(&p);
    let c = IrisCycle::from_params(&p)?;
    let comment = format!("cycle lambda={lambda} a={a} regime={regime}");
    let mut w = writer(out)?;
    match format {
        Format::Csv => {
            let stable = sim::cycle_polyline(c.u_dag, samples, &p)?;
            let (_, unstable) = sim::unstable_cycle(samples, &p)?;
            writeln!(w, "# {comment}")?;
            writeln!(w, "series,x,y")?;
            for (x, y) in &stable {
                writeln!(w, "stable,{x},{y}")?;
            }
            for (x, y) in &unstable {
                writeln!(w, "unstable,{x},{y}")?;
            }
        }
        _ => {
            let cs = cycle::closest_slowest(c.u_dag, &p)?;
            let doc = serde_json::json!({
                "lambda": lambda,
                "a": a,
                "regime": regime.as_str(),
                "u_dag": c.u_dag,
                "u_ddag": c.u_ddag,
                "s_dag": c.s_dag,
                "period": c.period,
                "quarter": c.quarter(),
                "contraction": c.contraction(&p),
                "response_denominator": prc::response_denominator(&c, &p).ok(),
                "v_integral": prc::v_integral(&c, &p)?,
                "closest_point": cs.closest_point,
                "slowest_point": cs.slowest_point,
                "phi_closest": cs.phi_closest,
                "phi_slowest": cs.phi_slowest,
            });
            writeln!(w, "{doc:#}")?;
        }
    }
    Ok(())
}

/// Phase grid for PRC sweeps: from zero in analytic mode (jumps visible),
/// cell midpoints when a measured curve is involved.
fn phase_grid(samples: usize, midpoint: bool) -> Vec<f64> {
    let offset = if midpoint { 0.5 } else { 0.0 };
    (0..samples)
        .map(|j| (j as f64 + offset) * 4.0 / samples as f64)
        .collect()
}

fn analytic_z(
    direction: Direction,
    theta: Phase,
    c: &IrisCycle,
    p: &IrisParams,
) -> Result<f64, IrisError> {
    let sample_d = prc::response_denominator(c, p)?;
    let (bs, bu) = prc::beta(theta.phi(), c)?;
    Ok(match direction {
        Direction::X => prc::iprc(PerturbDirection::global_x(), theta, c, p)?,
        Direction::Y => prc::iprc(PerturbDirection::global_y(), theta, c, p)?,
        Direction::S => bs / sample_d,
        Direction::U => bu / sample_d,
    })
}

fn numeric_eta(direction: Direction, theta: Phase, p: &IrisParams) -> PerturbDirection {
    match direction {
        Direction::X => PerturbDirection::global_x(),
        Direction::Y => PerturbDirection::global_y(),
        Direction::S | Direction::U => {
            // unit kick along the local axis of the square holding the
            // phase point, expressed in the global frame
            let frame = SquareFrame::new(theta.square_offset() + 1, p);
            let local = if direction == Direction::S { (1.0, 0.0) } else { (0.0, 1.0) };
            let (gx, gy) = frame.direction_to_global(local.0, local.1);
            PerturbDirection::new(gx, gy).expect("unit axis is a valid direction")
        }
    }
}

fn direction_name(d: Direction) -> &'static str {
    match d {
        Direction::X => "x",
        Direction::Y => "y",
        Direction::S => "s",
        Direction::U => "u",
    }
}

fn cmd_prc(
    lambda: f64,
    a: f64,
    direction: Direction,
    samples: usize,
    mode: Mode,
    r: f64,
    format: Format,
    out: &Option<PathBuf>,
) -> Result<(), IrisError> {
    if samples < 4 {
        return Err(IrisError::InvalidParameter(format!(
            "need at least 4 samples, got {samples}"
        )));
    }
    let p = IrisParams::new(lambda, a)?;
    let c = IrisCycle::stable(&p)?;
    let thetas = phase_grid(samples, mode != Mode::Analytic);
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(samples);
    for &theta in &thetas {
        let ph = Phase::new(theta)?;
        let mut row = vec![theta];
        if mode != Mode::Numeric {
            row.push(analytic_z(direction, ph, &c, &p)?);
        }
        if mode != Mode::Analytic {
            row.push(sim::numeric_iprc(numeric_eta(direction, ph, &p), ph, r, &p)?);
        }
        rows.push(row);
    }
    let dname = direction_name(direction);
    let mode_name = match mode {
        Mode::Analytic => "analytic",
        Mode::Numeric => "numeric",
        Mode::Both => "both",
    };
    let comment =
        format!("prc lambda={lambda} a={a} direction={dname} mode={mode_name} samples={samples} r={r}");
    let columns: Vec<&str> = match mode {
        Mode::Analytic => vec!["theta", "z"],
        Mode::Numeric => vec!["theta", "z_numeric"],
        Mode::Both => vec!["theta", "z_analytic", "z_numeric"],
    };
    let mut w = writer(out)?;
    match format {
        Format::Csv => output::write_table_csv(&mut w, &comment, &columns, &rows)?,
        _ => {
            let recs: Vec<serde_json::Value> = rows
                .iter()
                .map(|row| {
                    let mut obj = serde_json::Map::new();
                    for (name, v) in columns.iter().zip(row) {
                        obj.insert((*name).into(), serde_json::json!(v));
                    }
                    serde_json::Value::Object(obj)
                })
                .collect();
            let doc = serde_json::json!({
                "lambda": lambda, "a": a, "direction": dname,
                "mode": mode_name, "samples": samples, "r": r,
                "curve": recs,
            });
            writeln!(w, "{doc:#}")?;
        }
    }
    Ok(())
}

fn cmd_isochrons(
    lambda: f64,
    a: f64,
    grid: usize,
    format: Format,
    out: &Option<PathBuf>,
) -> Result<(), IrisError> {
    let p = IrisParams::new(lambda, a)?;
    let field = sim::isochron_field(grid, &p)?;
    let comment = format!(
        "isochrons lambda={lambda} a={a} grid={grid} half_extent={}",
        field.half_extent()
    );
    let mut w = writer(out)?;
    match format {
        Format::Csv => output::write_isochron_csv(&mut w, &comment, &field)?,
        Format::Json => {
            let doc = output::isochron_to_json(&field);
            writeln!(w, "{doc:#}")?;
        }
        Format::Binary => output::write_isochron_binary(&mut w, &field)?,
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_trajectory(
    lambda: f64,
    a: f64,
    square: usize,
    s: f64,
    u: f64,
    max_time: f64,
    samples: usize,
    format: Format,
    out: &Option<PathBuf>,
) -> Result<(), IrisError> {
    let p = IrisParams::new(lambda, a)?;
    let start = StartPoint::Local { square, s, u };
    let traj = sim::simulate(start, max_time, &p)?;
    let comment = format!(
        "trajectory lambda={lambda} a={a} square={square} s={s} u={u} max_time={max_time} \
         termination={:?}",
        traj.termination
    );
    let mut w = writer(out)?;
    match format {
        Format::Csv => output::write_trajectory_csv(&mut w, &comment, &traj, samples, &p)?,
        _ => {
            let doc = output::trajectory_to_json(&traj, samples, &p);
            writeln!(w, "{doc:#}")?;
        }
    }
    Ok(())
}

fn cmd_smooth_cycle(
    alpha: f64,
    mu: f64,
    step: f64,
    t_end: Option<f64>,
    format: Format,
    out: &Option<PathBuf>,
) -> Result<(), IrisError> {
    let p = SmoothParams::new(alpha, mu)?;
    let c = smooth::find_cycle_with_step(step, &p)?;
    let mut w = writer(out)?;
    match format {
        Format::Csv => {
            let horizon = t_end.unwrap_or(c.period);
            let path = smooth::integrate(c.anchor, horizon, step, &p)?;
            let comment = format!(
                "smooth-cycle alpha={alpha} mu={mu} step={step} period={} t_end={horizon}",
                c.period
            );
            output::write_path_csv(&mut w, &comment, &path)?;
        }
        _ => {
            let doc = serde_json::json!({
                "alpha": alpha,
                "mu": mu,
                "step": step,
                "period": c.period,
                "anchor": c.anchor,
                "hopf_mu": p.hopf_mu(),
                "saddle_value": p.saddle_value(),
            });
            writeln!(w, "{doc:#}")?;
        }
    }
    Ok(())
}

fn cmd_smooth_prc(
    alpha: f64,
    mu: f64,
    samples: usize,
    r: f64,
    format: Format,
    out: &Option<PathBuf>,
) -> Result<(), IrisError> {
    let p = SmoothParams::new(alpha, mu)?;
    let sweep = smooth::smooth_prc_sweep(samples, r, &p)?;
    let comment = format!("smooth-prc alpha={alpha} mu={mu} samples={samples} r={r}");
    let mut w = writer(out)?;
    match format {
        Format::Csv => {
            let rows: Vec<Vec<f64>> = sweep.iter().map(|&(t, zx, zy)| vec![t, zx, zy]).collect();
            output::write_table_csv(&mut w, &comment, &["theta", "z_y1", "z_y2"], &rows)?;
        }
        _ => {
            let recs: Vec<serde_json::Value> = sweep
                .iter()
                .map(|&(t, zx, zy)| serde_json::json!({ "theta": t, "z_y1": zx, "z_y2": zy }))
                .collect();
            let doc = serde_json::json!({
                "alpha": alpha, "mu": mu, "samples": samples, "r": r, "curve": recs,
            });
            writeln!(w, "{doc:#}")?;
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_smooth_trajectory(
    alpha: f64,
    mu: f64,
    y1: f64,
    y2: f64,
    t_end: f64,
    step: f64,
    stride: usize,
    format: Format,
    out: &Option<PathBuf>,
) -> Result<(), IrisError> {
    if stride == 0 {
        return Err(IrisError::InvalidParameter("stride must be positive".into()));
    }
    let p = SmoothParams::new(alpha, mu)?;
    let path = smooth::integrate((y1, y2), t_end, step, &p)?;
    let thinned: Vec<_> = path
        .iter()
        .enumerate()
        .filter(|(i, _)| i % stride == 0 || *i == path.len() - 1)
        .map(|(_, pt)| *pt)
        .collect();
    let comment = format!(
        "smooth-trajectory alpha={alpha} mu={mu} y1={y1} y2={y2} t_end={t_end} step={step} \
         stride={stride}"
    );
    let mut w = writer(out)?;
    match format {
        Format::Csv => output::write_path_csv(&mut w, &comment, &thinned)?,
        _ => {
            let doc = serde_json::json!({
                "alpha": alpha, "mu": mu, "y1": y1, "y2": y2,
                "t_end": t_end, "step": step, "stride": stride,
                "path": output::path_to_json(&thinned),
            });
            writeln!(w, "{doc:#}")?;
        }
    }
    Ok(())
}
