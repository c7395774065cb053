//! Snapshot and Monte-Carlo experiments.
//!
//! A snapshot runs the four schemes on one channel draw and keeps the
//! exposure maps. A Monte-Carlo run draws `n_samples` independent channels
//! (sample `i` is seeded by [`sample_seed`]`(seed, i)`) and keeps the
//! per-scheme metrics, from which empirical CDFs are built.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{channels, ChannelRow};
use crate::codebook::BeamFrame;
use crate::error::{Error, Result};
use crate::exposure::{AreaProbe, ExposureMap};
use crate::scenario::{build_scenario, sample_seed, Scenario, ScenarioConfig};
use crate::schemes::{compute_schemes, BoostOrder, Precoder, Scheme, SchemeSet};
use crate::to_db;

fn default_samples() -> usize {
    1000
}

fn default_schemes() -> Vec<Scheme> {
    Scheme::ALL.to_vec()
}

/// Scenario parameters plus the experiment knobs, as one flat JSON object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(flatten)]
    pub scenario: ScenarioConfig,
    #[serde(default = "default_samples")]
    pub n_samples: usize,
    #[serde(default = "default_schemes")]
    pub schemes: Vec<Scheme>,
    #[serde(default)]
    pub boost_order: BoostOrder,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<std::path::PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            scenario: ScenarioConfig::default(),
            n_samples: default_samples(),
            schemes: default_schemes(),
            boost_order: BoostOrder::default(),
            out_dir: None,
        }
    }
}

impl ExperimentConfig {
    /// Field names accepted in a config file.
    pub const FIELDS: &'static [&'static str] = &[
        "M",
        "N",
        "K",
        "P",
        "R",
        "element_spacing",
        "omega_thresh_db",
        "square_half_width",
        "sector_half_angle",
        "circle_samples",
        "grid_step",
        "seed",
        "ris_axis_angle",
        "n_samples",
        "schemes",
        "boost_order",
        "out_dir",
    ];

    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        if self.n_samples == 0 {
            return Err(Error::InvalidConfig("n_samples must be >= 1".into()));
        }
        if self.schemes.is_empty() {
            return Err(Error::InvalidConfig("at least one scheme is required".into()));
        }
        Ok(())
    }
}

/// Geometry-only state shared by every draw: codebook, beam arcs and the
/// cached near-field rows of the circle and area probes.
pub struct SimContext {
    pub frame: BeamFrame,
    pub area: AreaProbe,
    pub omega_thresh: f64,
}

impl SimContext {
    pub fn new(config: &ScenarioConfig) -> Result<Self> {
        let geometry = build_scenario(config)?;
        Ok(Self {
            frame: BeamFrame::for_scenario(&geometry)?,
            area: AreaProbe::for_scenario(&geometry)?,
            omega_thresh: config.omega_thresh(),
        })
    }
}

/// Result of one scheme on one draw.
#[derive(Debug, Clone)]
pub struct SchemeOutcome {
    pub precoder: Precoder,
    /// Received power at the target, linear.
    pub rho: f64,
    pub violation_pct: f64,
    pub flags: Vec<&'static str>,
    pub map: Option<ExposureMap>,
}

/// Per-scheme metrics kept for one Monte-Carlo sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeMetrics {
    pub scheme: Scheme,
    pub rho: f64,
    pub chi: f64,
    pub violation_pct: f64,
    pub flags: Vec<String>,
}

impl SchemeMetrics {
    pub fn rho_db(&self) -> f64 {
        to_db(self.rho)
    }
}

/// Metrics of one Monte-Carlo sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSample {
    pub index: usize,
    pub seed: u64,
    /// `|g|^2` of the draw.
    pub channel_gain: f64,
    pub mrt_violates: bool,
    /// One entry per scheme in [`Scheme::ALL`] order.
    pub metrics: Vec<SchemeMetrics>,
    pub truncated_beams: Vec<usize>,
    /// Arc maximum of every truncated beam after truncation, dB relative to the threshold.
    pub truncation_residuals_db: Vec<f64>,
    pub boost_iterations: usize,
    pub power_cap_hit: bool,
}

impl MetricSample {
    pub fn get(&self, scheme: Scheme) -> &SchemeMetrics {
        self.metrics.iter().find(|m| m.scheme == scheme).expect("all schemes are evaluated")
    }
}

fn flags_for(scheme: Scheme, set: &SchemeSet, omega_thresh: f64) -> Vec<&'static str> {
    let mut flags = Vec::new();
    match scheme {
        Scheme::Mrt if set.mrt_violates(omega_thresh) => flags.push("violating"),
        Scheme::Reduced if set.reduced.chi < set.mrt.chi => flags.push("reduced"),
        Scheme::Truncated if !set.truncation.exceed_set.is_empty() => flags.push("truncated"),
        Scheme::Boosted => {
            if set.boosting.boost_iterations > 0 {
                flags.push("boosted");
            }
            if set.boosting.power_cap_hit {
                flags.push("power_cap");
            }
        }
        _ => {}
    }
    flags
}

/// Everything computed for one draw.
pub struct Evaluation {
    pub g: ChannelRow,
    pub schemes: SchemeSet,
    /// In [`Scheme::ALL`] order.
    pub outcomes: Vec<SchemeOutcome>,
}

/// Runs all schemes on `scenario` and scans their exposure.
pub fn evaluate(ctx: &SimContext, scenario: &Scenario, order: BoostOrder, keep_maps: bool) -> Result<Evaluation> {
    let (_, _, g) = channels(scenario);
    let set = compute_schemes(&g, &ctx.frame, ctx.omega_thresh, order)?;
    let outcomes = Scheme::ALL
        .iter()
        .map(|&scheme| {
            let precoder = set.get(scheme).clone();
            let map = ctx.area.scan(&precoder.b, precoder.chi, ctx.omega_thresh)?;
            Ok(SchemeOutcome {
                rho: precoder.received_power(&g),
                violation_pct: map.violation_pct,
                flags: flags_for(scheme, &set, ctx.omega_thresh),
                map: keep_maps.then_some(map),
                precoder,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Evaluation { g, schemes: set, outcomes })
}

/// Evaluates Monte-Carlo sample `index` of `config`.
pub fn run_sample(ctx: &SimContext, config: &ExperimentConfig, index: usize) -> Result<MetricSample> {
    let seed = sample_seed(config.scenario.seed, index as u64);
    let scenario = build_scenario(&ScenarioConfig { seed, ..config.scenario.clone() })?;
    let eval = evaluate(ctx, &scenario, config.boost_order, false)?;
    let set = &eval.schemes;
    let truncation_residuals_db = set
        .truncation
        .exceed_set
        .iter()
        .map(|&m| to_db(set.truncated_arcs.per_beam[m].value / ctx.omega_thresh))
        .collect();
    Ok(MetricSample {
        index,
        seed,
        channel_gain: eval.g.norm_sqr(),
        mrt_violates: set.mrt_violates(ctx.omega_thresh),
        metrics: Scheme::ALL
            .iter()
            .zip(&eval.outcomes)
            .map(|(&scheme, o)| SchemeMetrics {
                scheme,
                rho: o.rho,
                chi: o.precoder.chi,
                violation_pct: o.violation_pct,
                flags: o.flags.iter().map(|s| s.to_string()).collect(),
            })
            .collect(),
        truncated_beams: set.truncation.exceed_set.clone(),
        truncation_residuals_db,
        boost_iterations: set.boosting.boost_iterations,
        power_cap_hit: set.boosting.power_cap_hit,
    })
}

/// One scheme's row of the snapshot report.
#[derive(Debug, Clone)]
pub struct SnapshotRow {
    pub scheme: Scheme,
    pub precoder: Precoder,
    pub rho: f64,
    pub violation_pct: f64,
    pub map: ExposureMap,
}

pub struct SnapshotResult {
    pub scenario: Scenario,
    pub schemes: SchemeSet,
    /// Rows for the requested schemes, in [`Scheme::ALL`] order.
    pub rows: Vec<SnapshotRow>,
    pub report: String,
}

/// Runs every scheme on the single draw seeded by `seed`.
pub fn run_snapshot(config: &ExperimentConfig, seed: u64) -> Result<SnapshotResult> {
    config.validate()?;
    let scenario_cfg = ScenarioConfig { seed, ..config.scenario.clone() };
    let scenario = build_scenario(&scenario_cfg)?;
    let ctx = SimContext::new(&scenario_cfg)?;
    let eval = evaluate(&ctx, &scenario, config.boost_order, true)?;
    let rows: Vec<SnapshotRow> = Scheme::ALL
        .iter()
        .zip(eval.outcomes)
        .filter(|(s, _)| config.schemes.contains(s))
        .map(|(&scheme, o)| SnapshotRow {
            scheme,
            precoder: o.precoder,
            rho: o.rho,
            violation_pct: o.violation_pct,
            map: o.map.expect("maps kept"),
        })
        .collect();
    let report = snapshot_report(&scenario, &eval.schemes, &rows);
    Ok(SnapshotResult { scenario, schemes: eval.schemes, rows, report })
}

fn snapshot_report(scenario: &Scenario, set: &SchemeSet, rows: &[SnapshotRow]) -> String {
    let c = &scenario.config;
    let mut out = String::new();
    out.push_str(&format!(
        "seed {}  M={} N={} K={} P={} R={}  threshold {} dB re chi_max\n",
        c.seed, c.m, c.n, c.k, c.p, c.r, c.omega_thresh_db
    ));
    out.push_str(&format!(
        "RIS: {}  omega_max(MRT) = {:.2} dB  truncated beams {:?}  boosted beams {}{}\n\n",
        if c.k > 0 { "yes" } else { "no" },
        to_db(set.omega_max.value),
        set.truncation.exceed_set,
        set.boosting.boost_iterations,
        if set.boosting.power_cap_hit { " (power cap)" } else { "" },
    ));
    out.push_str(&format!(
        "{:<22}{:>14}{:>10}{:>10}{:>16}\n",
        "scheme", "rho_db", "chi", "chi_db", "violation_pct"
    ));
    for r in rows {
        out.push_str(&format!(
            "{:<22}{:>14.2}{:>10.4}{:>10.2}{:>16.3}\n",
            r.scheme.label(),
            to_db(r.rho),
            r.precoder.chi,
            to_db(r.precoder.chi),
            r.violation_pct
        ));
    }
    out
}

/// A metric tracked per Monte-Carlo sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    ViolationPct,
    Chi,
    RhoDb,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::ViolationPct, Metric::Chi, Metric::RhoDb];

    pub fn name(self) -> &'static str {
        match self {
            Metric::ViolationPct => "violation_pct",
            Metric::Chi => "chi",
            Metric::RhoDb => "rho_db",
        }
    }

    pub fn of(self, m: &SchemeMetrics) -> f64 {
        match self {
            Metric::ViolationPct => m.violation_pct,
            Metric::Chi => m.chi,
            Metric::RhoDb => m.rho_db(),
        }
    }
}

/// Empirical CDF: `probabilities[i] = (i + 1) / n` at `values[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CdfSeries {
    pub metric: String,
    pub values: Vec<f64>,
    pub probabilities: Vec<f64>,
}

impl CdfSeries {
    /// Smallest value whose cumulative probability reaches `p`.
    pub fn quantile(&self, p: f64) -> f64 {
        let i = self.probabilities.iter().position(|&q| q >= p - 1e-12).unwrap_or(self.values.len() - 1);
        self.values[i]
    }

    /// Fraction of samples `<= x`.
    pub fn at(&self, x: f64) -> f64 {
        let n = self.values.partition_point(|&v| v <= x);
        n as f64 / self.values.len() as f64
    }
}

/// Empirical CDF of `values` (stable sort).
pub fn cdf(metric: &str, values: &[f64]) -> Result<CdfSeries> {
    if values.is_empty() {
        return Err(Error::Empty("cdf input"));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    Ok(CdfSeries {
        metric: metric.to_string(),
        probabilities: (1..=sorted.len()).map(|i| i as f64 / n).collect(),
        values: sorted,
    })
}

pub struct MonteCarloResult {
    pub samples: Vec<MetricSample>,
    /// `(metric, scheme, cdf)` for every metric and every requested scheme.
    pub cdfs: Vec<(Metric, Scheme, CdfSeries)>,
}

impl MonteCarloResult {
    pub fn cdf(&self, metric: Metric, scheme: Scheme) -> Option<&CdfSeries> {
        self.cdfs.iter().find(|(m, s, _)| *m == metric && *s == scheme).map(|(_, _, c)| c)
    }
}

/// Runs `config.n_samples` draws on a pool of `workers` threads. The result
/// does not depend on `workers`.
pub fn run_monte_carlo(config: &ExperimentConfig, workers: usize) -> Result<MonteCarloResult> {
    config.validate()?;
    let ctx = SimContext::new(&config.scenario)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    let samples: Vec<MetricSample> = pool.install(|| {
        (0..config.n_samples).into_par_iter().map(|i| run_sample(&ctx, config, i)).collect::<Result<Vec<_>>>()
    })?;
    let mut cdfs = Vec::new();
    for metric in Metric::ALL {
        for &scheme in Scheme::ALL.iter().filter(|s| config.schemes.contains(s)) {
            let values: Vec<f64> = samples.iter().map(|s| metric.of(s.get(scheme))).collect();
            cdfs.push((metric, scheme, cdf(metric.name(), &values)?));
        }
    }
    Ok(MonteCarloResult { samples, cdfs })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cdf_examples() {
        let c = cdf("x", &[5.0]).unwrap();
        assert_eq!((c.values.clone(), c.probabilities.clone()), (vec![5.0], vec![1.0]));
        let c = cdf("x", &[2.0, 4.0, 1.0, 2.0]).unwrap();
        assert_eq!(c.values, vec![1.0, 2.0, 2.0, 4.0]);
        assert_eq!(c.probabilities, vec![0.25, 0.5, 0.75, 1.0]);
        assert_eq!(c.quantile(0.5), 2.0);
        assert_eq!(c.at(2.0), 0.75);
        assert!(cdf("x", &[]).is_err());
    }

    #[test]
    fn config_defaults_and_validation() {
        let c: ExperimentConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(c, ExperimentConfig::default());
        assert_eq!(c.n_samples, 1000);
        let c: ExperimentConfig = serde_json::from_str(r#"{"K": 0, "n_samples": 5, "schemes": ["mrt"]}"#).unwrap();
        assert_eq!(c.scenario.k, 0);
        assert_eq!(c.schemes, vec![Scheme::Mrt]);
        assert!(ExperimentConfig { n_samples: 0, ..Default::default() }.validate().is_err());
        assert!(ExperimentConfig { schemes: vec![], ..Default::default() }.validate().is_err());
    }

    fn small() -> ExperimentConfig {
        ExperimentConfig {
            scenario: ScenarioConfig { m: 16, r: 200.0, square_half_width: 250.0, grid_step: 10.0, circle_samples: 1024, ..Default::default() },
            n_samples: 6,
            ..Default::default()
        }
    }

    #[test]
    fn monte_carlo_is_worker_independent() {
        let cfg = small();
        let a = run_monte_carlo(&cfg, 1).unwrap();
        let b = run_monte_carlo(&cfg, 3).unwrap();
        assert_eq!(a.samples, b.samples);
        assert_eq!(a.cdfs.len(), 12);
        // each sample can be reproduced on its own
        let ctx = SimContext::new(&cfg.scenario).unwrap();
        assert_eq!(run_sample(&ctx, &cfg, 4).unwrap(), a.samples[4]);
    }

    #[test]
    fn single_sample_cdf_is_one_step() {
        let cfg = ExperimentConfig { n_samples: 1, ..small() };
        let r = run_monte_carlo(&cfg, 2).unwrap();
        for (_, _, c) in &r.cdfs {
            assert_eq!(c.probabilities, vec![1.0]);
        }
    }

    #[test]
    fn snapshot_filters_schemes() {
        let cfg = ExperimentConfig { schemes: vec![Scheme::Mrt], ..small() };
        let snap = run_snapshot(&cfg, 3).unwrap();
        assert_eq!(snap.rows.len(), 1);
        assert!(snap.report.contains("MRT"));
        assert!(!snap.report.contains("Reduced"));
    }
}
