//! CSV emitters. Floats use Rust's shortest round-trip formatting so equal
//! results always produce identical bytes.

use std::fmt::Write;

use crate::experiments::{CdfSeries, MetricSample};
use crate::exposure::ExposureMap;
use crate::schemes::Scheme;
use crate::to_db;

/// `samples.csv`: one row per (sample, scheme).
pub fn samples_csv(samples: &[MetricSample], schemes: &[Scheme]) -> String {
    let mut out = String::from("sample_id,scheme,rho_db,chi,violation_pct,flags\n");
    for s in samples {
        for m in s.metrics.iter().filter(|m| schemes.contains(&m.scheme)) {
            let flags = if m.flags.is_empty() { "-".to_string() } else { m.flags.join("|") };
            writeln!(out, "{},{},{},{},{},{}", s.index, m.scheme, m.rho_db(), m.chi, m.violation_pct, flags).unwrap();
        }
    }
    out
}

/// `cdf_<metric>_<scheme>.csv`
pub fn cdf_csv(series: &CdfSeries) -> String {
    let mut out = String::from("value,probability\n");
    for (v, p) in series.values.iter().zip(&series.probabilities) {
        writeln!(out, "{v},{p}").unwrap();
    }
    out
}

/// Every grid point of an exposure map; `over_flag` is only ever 1 outside the circle.
pub fn exposure_csv(map: &ExposureMap) -> String {
    let n = map.side();
    let mut out = String::with_capacity(n * n * 40);
    out.push_str("x,y,omega_db,over_flag\n");
    for j in 0..n {
        for i in 0..n {
            let p = map.point(i, j);
            writeln!(out, "{},{},{},{}", p.x, p.y, to_db(map.power(i, j)), u8::from(map.is_flagged(i, j))).unwrap();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{cdf, SchemeMetrics};

    #[test]
    fn cdf_rows() {
        let s = cdf("chi", &[0.5, 0.25]).unwrap();
        assert_eq!(cdf_csv(&s), "value,probability\n0.25,0.5\n0.5,1\n");
    }

    #[test]
    fn sample_rows() {
        let sample = MetricSample {
            index: 3,
            seed: 0,
            channel_gain: 1.0,
            mrt_violates: true,
            metrics: vec![
                SchemeMetrics { scheme: Scheme::Mrt, rho: 100.0, chi: 1.0, violation_pct: 2.5, flags: vec!["violating".into()] },
                SchemeMetrics { scheme: Scheme::Reduced, rho: 10.0, chi: 0.1, violation_pct: 0.0, flags: vec![] },
            ],
            truncated_beams: vec![],
            truncation_residuals_db: vec![],
            boost_iterations: 0,
            power_cap_hit: false,
        };
        let text = samples_csv(std::slice::from_ref(&sample), &Scheme::ALL);
        assert_eq!(
            text,
            "sample_id,scheme,rho_db,chi,violation_pct,flags\n3,mrt,20,1,2.5,violating\n3,reduced,10,0.1,0,-\n"
        );
        assert_eq!(samples_csv(&[sample], &[Scheme::Reduced]).lines().count(), 2);
    }
}
