//! One seeded snapshot: all schemes, their exposure maps and the summary table.

use emfbeam::experiments::{run_snapshot, ExperimentConfig};

fn main() -> emfbeam::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let snap = run_snapshot(&ExperimentConfig::default(), seed)?;
    print!("{}", snap.report);
    for row in &snap.rows {
        println!("{}: {} grid points flagged", row.scheme, row.map.flagged);
    }
    Ok(())
}
