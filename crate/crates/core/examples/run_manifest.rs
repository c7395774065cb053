//! Loads a config, writes a run directory with a manifest and checks it.
//! Usage: `run_manifest [config.json] [out-dir]`.

use std::path::PathBuf;

use emfbeam::experiments::run_monte_carlo;
use emfbeam::io::csv::samples_csv;
use emfbeam::io::manifest::write_run;
use emfbeam::io::{load_experiment_config, parse_experiment_config, RunManifest};

fn main() -> emfbeam::Result<()> {
    let mut args = std::env::args().skip(1);
    let config = match args.next() {
        Some(path) => load_experiment_config(path)?,
        None => parse_experiment_config(r#"{"M": 16, "R": 200, "square_half_width": 250, "n_samples": 8}"#)?,
    };
    let dir = args.next().map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("emfbeam-manifest-demo"));

    let result = run_monte_carlo(&config, 1)?;
    let files = vec![("samples.csv".to_string(), samples_csv(&result.samples, &config.schemes).into_bytes())];
    let manifest = write_run(&dir, RunManifest::new("example", config.scenario.seed, &config), &files)?;
    for f in &manifest.files {
        println!("{} {:>8} bytes  {}", f.sha256, f.bytes, f.name);
    }
    let stale = RunManifest::read(&dir)?.verify(&dir)?;
    println!("{} stale files in {}", stale.len(), dir.display());
    Ok(())
}
