//! Run a benchmark sweep from a JSON config and write report.json / report.csv.
//!
//! cargo run --release --example benchmark_sweep -- examples/configs/graph5_noise.json out/

use std::path::PathBuf;

use tefs::evaluation::{run_benchmark, write_reports, BenchmarkConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let config = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/configs/graph3.json").into());
    let out = args.next().map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("tefs-bench"));

    let cfg: BenchmarkConfig = serde_json::from_str(&std::fs::read_to_string(&config)?)?;
    let reports = run_benchmark(&cfg)?;
    write_reports(&reports, &out)?;
    for r in &reports {
        println!("{:<28} TPR {:.2}  FPR {:.2}  R2 test {:.3}", r.label, r.tpr, r.fpr, r.r2_test);
    }
    println!("reports in {}", out.display());
    Ok(())
}
