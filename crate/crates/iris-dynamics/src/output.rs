//! Serialization of trajectories, response curves, and isochron fields.
//!
//! CSV files open with a single `#` comment line carrying the parameter set,
//! then a column-name row, then data. Floats are written with the shortest
//! round-trip formatting, so identical inputs produce byte-identical files.
//! Isochron fields also serialize to a compact little-endian binary grid.

use std::io::{Read, Write};

use crate::error::IrisError;
use crate::params::IrisParams;
use crate::sim::{IsochronField, Trajectory};
use crate::smooth::PathPoint;

/// Magic tag opening the binary isochron format.
pub const ISOCHRON_MAGIC: &[u8; 8] = b"IRISISO1";

fn write_header<W: Write>(w: &mut W, comment: &str, columns: &[&str]) -> Result<(), IrisError> {
    writeln!(w, "# {comment}")?;
    writeln!(w, "{}", columns.join(","))?;
    Ok(())
}

/// Generic numeric table with a comment line and named columns.
pub fn write_table_csv<W: Write>(
    w: &mut W,
    comment: &str,
    columns: &[&str],
    rows: &[Vec<f64>],
) -> Result<(), IrisError> {
    write_header(w, comment, columns)?;
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(())
}

/// Time-stamped global-coordinate samples of an iris trajectory:
/// per segment its entry point, `samples_per_segment` interior points, and
/// its exit point.
pub fn trajectory_rows(
    traj: &Trajectory,
    samples_per_segment: usize,
    p: &IrisParams,
) -> Vec<(f64, f64, f64, usize)> {
    let mut rows = Vec::new();
    for seg in &traj.segments {
        let frame = crate::geometry::SquareFrame::new(seg.square, p);
        let span = seg.exit_time - seg.entry_time;
        let n = samples_per_segment + 1;
        for i in 0..=n {
            let t = seg.entry_time + span * i as f64 / n as f64;
            let (s, u) = seg.state_at(t, p);
            let (x, y) = frame.to_global(s, u);
            rows.push((t, x, y, seg.square));
        }
    }
    rows
}

/// CSV `t,x,y,square` for an iris trajectory.
pub fn write_trajectory_csv<W: Write>(
    w: &mut W,
    comment: &str,
    traj: &Trajectory,
    samples_per_segment: usize,
    p: &IrisParams,
) -> Result<(), IrisError> {
    write_header(w, comment, &["t", "x", "y", "square"])?;
    for (t, x, y, square) in trajectory_rows(traj, samples_per_segment, p) {
        writeln!(w, "{t},{x},{y},{square}")?;
    }
    Ok(())
}

/// JSON mirror of [`write_trajectory_csv`].
pub fn trajectory_to_json(
    traj: &Trajectory,
    samples_per_segment: usize,
    p: &IrisParams,
) -> serde_json::Value {
    let rows: Vec<serde_json::Value> = trajectory_rows(traj, samples_per_segment, p)
        .into_iter()
        .map(|(t, x, y, square)| {
            serde_json::json!({ "t": t, "x": x, "y": y, "square": square })
        })
        .collect();
    serde_json::json!({
        "lambda": p.lambda(),
        "a": p.a(),
        "termination": format!("{:?}", traj.termination),
        "points": rows,
    })
}

/// CSV `t,y1,y2` for a smooth-system path.
pub fn write_path_csv<W: Write>(
    w: &mut W,
    comment: &str,
    path: &[PathPoint],
) -> Result<(), IrisError> {
    write_header(w, comment, &["t", "y1", "y2"])?;
    for pt in path {
        writeln!(w, "{},{},{}", pt.t, pt.y1, pt.y2)?;
    }
    Ok(())
}

/// JSON mirror of [`write_path_csv`].
pub fn path_to_json(path: &[PathPoint]) -> serde_json::Value {
    serde_json::Value::Array(
        path.iter()
            .map(|pt| serde_json::json!({ "t": pt.t, "y1": pt.y1, "y2": pt.y2 }))
            .collect(),
    )
}

/// CSV `x,y,theta` over the grid; phaseless cells print as `NaN`.
pub fn write_isochron_csv<W: Write>(
    w: &mut W,
    comment: &str,
    field: &IsochronField,
) -> Result<(), IrisError> {
    write_header(w, comment, &["x", "y", "theta"])?;
    let n = field.grid_n();
    for row in 0..n {
        for col in 0..n {
            let (x, y) = field.cell_center(col, row);
            writeln!(w, "{x},{y},{}", field.get(col, row))?;
        }
    }
    Ok(())
}

/// JSON mirror of the isochron field: parameters plus the row-major grid
/// with `null` marking phaseless cells.
pub fn isochron_to_json(field: &IsochronField) -> serde_json::Value {
    let theta: Vec<serde_json::Value> = field
        .theta()
        .iter()
        .map(|v| {
            if v.is_nan() {
                serde_json::Value::Null
            } else {
                serde_json::json!(v)
            }
        })
        .collect();
    serde_json::json!({
        "grid_n": field.grid_n(),
        "half_extent": field.half_extent(),
        "lambda": field.lambda(),
        "a": field.a(),
        "theta": theta,
    })
}

/// Binary isochron grid: magic, u64 grid size, three f64 parameters
/// (half extent, lambda, a), then row-major f64 phases, all little-endian.
pub fn write_isochron_binary<W: Write>(
    w: &mut W,
    field: &IsochronField,
) -> Result<(), IrisError> {
    w.write_all(ISOCHRON_MAGIC)?;
    w.write_all(&(field.grid_n() as u64).to_le_bytes())?;
    w.write_all(&field.half_extent().to_le_bytes())?;
    w.write_all(&field.lambda().to_le_bytes())?;
    w.write_all(&field.a().to_le_bytes())?;
    for v in field.theta() {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

/// Reads a field written by [`write_isochron_binary`].
pub fn read_isochron_binary<R: Read>(r: &mut R) -> Result<IsochronField, IrisError> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != ISOCHRON_MAGIC {
        return Err(IrisError::InvalidParameter(
            "not an isochron grid file (bad magic)".into(),
        ));
    }
    let mut buf8 = [0u8; 8];
    r.read_exact(&mut buf8)?;
    let grid_n = u64::from_le_bytes(buf8) as usize;
    if grid_n == 0 || grid_n > 1 << 20 {
        return Err(IrisError::InvalidParameter(format!(
            "implausible grid size {grid_n}"
        )));
    }
    let read_f64 = |r: &mut R| -> Result<f64, IrisError> {
        let mut b = [0u8; 8];
        r.read_exact(&mut b)?;
        Ok(f64::from_le_bytes(b))
    };
    let half_extent = read_f64(r)?;
    let lambda = read_f64(r)?;
    let a = read_f64(r)?;
    let mut theta = Vec::with_capacity(grid_n * grid_n);
    for _ in 0..grid_n * grid_n {
        theta.push(read_f64(r)?);
    }
    IsochronField::from_raw(grid_n, half_extent, lambda, a, theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{simulate, StartPoint};
    use std::io::Cursor;

    #[test]
    fn trajectory_csv_shape() {
        let p = IrisParams::new(2.0, 0.2).unwrap();
        let traj = simulate(
            StartPoint::Local { square: 1, s: 1.0, u: 0.5 },
            3.0,
            &p,
        )
        .unwrap();
        let mut buf = Vec::new();
        write_trajectory_csv(&mut buf, "lambda=2 a=0.2", &traj, 3, &p).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "# lambda=2 a=0.2");
        assert_eq!(lines.next().unwrap(), "t,x,y,square");
        let data: Vec<&str> = lines.collect();
        assert_eq!(data.len(), traj.segments.len() * 5);
        assert!(data[0].starts_with("0,"));
    }

    #[test]
    fn trajectory_rows_are_continuous_across_handoff() {
        let p = IrisParams::new(2.0, 0.2).unwrap();
        let traj = simulate(
            StartPoint::Local { square: 1, s: 1.0, u: 0.5 },
            50.0,
            &p,
        )
        .unwrap();
        let rows = trajectory_rows(&traj, 0, &p);
        // exit of one segment and entry of the next are the same global point
        for pair in rows.windows(2) {
            let dt = pair[1].0 - pair[0].0;
            if dt == 0.0 {
                let dx = (pair[1].1 - pair[0].1).abs();
                let dy = (pair[1].2 - pair[0].2).abs();
                assert!(dx < 1e-12 && dy < 1e-12, "jump at t={}", pair[0].0);
            }
        }
    }

    #[test]
    fn isochron_binary_round_trip() {
        let p = IrisParams::new(2.0, 0.2).unwrap();
        let field = crate::sim::isochron_field(12, &p).unwrap();
        let mut buf = Vec::new();
        write_isochron_binary(&mut buf, &field).unwrap();
        assert_eq!(buf.len(), 8 + 8 + 3 * 8 + 12 * 12 * 8);
        let back = read_isochron_binary(&mut Cursor::new(&buf)).unwrap();
        assert_eq!(back.grid_n(), field.grid_n());
        assert_eq!(back.half_extent(), field.half_extent());
        // NaN cells stay NaN, phased cells stay bit-identical
        for (a, b) in field.theta().iter().zip(back.theta()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        let mut junk = Cursor::new(b"NOTAFILE0000".to_vec());
        assert!(read_isochron_binary(&mut junk).is_err());
    }

    #[test]
    fn isochron_csv_marks_phaseless_cells() {
        let p = IrisParams::new(2.0, 0.2).unwrap();
        let field = crate::sim::isochron_field(8, &p).unwrap();
        let mut buf = Vec::new();
        write_isochron_csv(&mut buf, "test", &field).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("NaN"));
        assert_eq!(text.lines().count(), 2 + 64);
    }

    #[test]
    fn table_csv_formatting() {
        let mut buf = Vec::new();
        write_table_csv(
            &mut buf,
            "k=1",
            &["theta", "z"],
            &[vec![0.0, 1.5], vec![0.25, -2.0]],
        )
        .unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "# k=1\ntheta,z\n0,1.5\n0.25,-2\n"
        );
    }
}
