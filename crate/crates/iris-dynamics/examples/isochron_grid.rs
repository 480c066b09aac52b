//! Asymptotic-phase field over the whole arrangement, written as CSV and as
//! the compact binary grid, plus a coarse console rendering.

use iris_dynamics::output;
use iris_dynamics::params::IrisParams;
use iris_dynamics::sim;
use std::fs::File;
use std::io::BufWriter;

fn main() {
    let p = IrisParams::new(2.0, 0.2).unwrap();
    let n = 64;
    let field = sim::isochron_field(n, &p).unwrap();

    let phased = field.theta().iter().filter(|v| !v.is_nan()).count();
    println!(
        "{n}x{n} grid over [-{e}, {e}]^2: {phased} cells carry a phase, {} do not",
        n * n - phased,
        e = field.half_extent()
    );

    // quarter-phase bands render as a pinwheel; the hole is the unstable
    // cycle interior plus the exterior spillways
    println!();
    for row in (0..n).step_by(2).rev() {
        let mut line = String::new();
        for col in 0..n {
            let v = field.get(col, row);
            line.push(if v.is_nan() { ' ' } else { char::from(b'0' + (v as u8 & 3)) });
        }
        println!("  {line}");
    }

    let dir = std::env::temp_dir();
    let csv_path = dir.join("iris_isochrons.csv");
    let bin_path = dir.join("iris_isochrons.bin");
    let comment = format!("isochrons lambda=2 a=0.2 grid={n}");
    output::write_isochron_csv(&mut BufWriter::new(File::create(&csv_path).unwrap()), &comment, &field)
        .unwrap();
    output::write_isochron_binary(&mut BufWriter::new(File::create(&bin_path).unwrap()), &field)
        .unwrap();
    let back = output::read_isochron_binary(&mut File::open(&bin_path).unwrap()).unwrap();
    // Bit patterns, not float equality: empty cells hold NaN.
    assert!(back.theta().iter().map(|t| t.to_bits()).eq(field.theta().iter().map(|t| t.to_bits())));
    assert_eq!((back.grid_n(), back.half_extent()), (field.grid_n(), field.half_extent()));

    println!();
    println!("wrote {} and {} (round-trip verified)", csv_path.display(), bin_path.display());
}
