//! A short Monte-Carlo campaign and a few points of each CDF.
//! Usage: `monte_carlo [samples]`.

use emfbeam::experiments::{run_monte_carlo, ExperimentConfig, Metric};
use emfbeam::schemes::Scheme;

fn main() -> emfbeam::Result<()> {
    let n = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(100);
    let cfg = ExperimentConfig { n_samples: n, ..Default::default() };
    let workers = std::thread::available_parallelism().map(|w| w.get()).unwrap_or(1);
    let result = run_monte_carlo(&cfg, workers)?;

    for metric in Metric::ALL {
        println!("{}", metric.name());
        for s in Scheme::ALL {
            let c = result.cdf(metric, s).expect("all schemes requested");
            println!(
                "  {:<10} p10 {:>9.4}  median {:>9.4}  p90 {:>9.4}",
                s.name(),
                c.quantile(0.1),
                c.quantile(0.5),
                c.quantile(0.9)
            );
        }
    }
    let capped = result.samples.iter().filter(|s| s.power_cap_hit).count();
    println!("boost loop hit the power cap on {capped}/{n} samples");
    Ok(())
}
