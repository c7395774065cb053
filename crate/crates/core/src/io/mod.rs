//! Configuration loading, CSV tables, heatmap images, run manifests and the
//! command-line front end.

pub mod cli;
pub mod config;
pub mod csv;
pub mod heatmap;
pub mod manifest;

pub use config::{load_experiment_config, parse_experiment_config};
pub use manifest::{ManifestEntry, RunManifest};
