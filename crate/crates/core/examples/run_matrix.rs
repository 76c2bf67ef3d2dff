// Runs the full pipeline matrix and prints the rendered tables.
//
//     cargo run --release --example run_matrix -- [n] [size] [output_dir]

use std::path::PathBuf;
use std::time::Instant;

use clash_core::harness::{render_tables, run_matrix, ExperimentReport, MatrixConfig};

pub fn run_example(
    n: usize,
    size: u32,
    out: Option<PathBuf>,
) -> clash_core::Result<ExperimentReport> {
    let mut cfg = MatrixConfig::desk(2026);
    cfg.n = n;
    cfg.size = size;
    cfg.output_dir = out;

    let start = Instant::now();
    let report = run_matrix(&cfg)?;
    println!("{}", render_tables(&report)?.markdown);
    println!(
        "{} assets audited in {:.1}s, {} deviations",
        report.reports.len(),
        start.elapsed().as_secs_f64(),
        report.deviations.len()
    );
    Ok(report)
}

#[allow(dead_code)]
fn main() -> clash_core::Result<()> {
    let mut args = std::env::args().skip(1);
    let n = args
        .next()
        .map_or(50, |s| s.parse().expect("n must be an integer"));
    let size = args
        .next()
        .map_or(512, |s| s.parse().expect("size must be an integer"));
    run_example(n, size, args.next().map(Into::into)).map(drop)
}
