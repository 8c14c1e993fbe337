//! Run every bound verifier and print a per-check summary.
//!
//! `cargo run --release --example bounds_report -- [small|full]`

use skqd::bounds::{verify_all, Grid};

fn main() -> skqd::Result<()> {
    let grid: Grid = std::env::args()
        .nth(1)
        .as_deref()
        .unwrap_or("small")
        .parse()?;
    let start = std::time::Instant::now();
    let report = verify_all(grid, 2024)?;
    for (check, count, violations) in report.summary() {
        println!("{check:<26} {count:>6} checks  {violations} violations");
    }
    println!(
        "total {} checks, {} violations, {:.1?}",
        report.checks,
        report.violations,
        start.elapsed()
    );
    for r in report.records.iter().filter(|r| !r.pass).take(5) {
        println!("violation: {}", serde_json::to_string(r)?);
    }
    Ok(())
}
