//! Scans MRT exposure on the limit circle and over the square area, and
//! writes a heatmap. Usage: `exposure_scan [out.ppm]`.

use emfbeam::channel::channels;
use emfbeam::exposure::{refined_circle_max, AreaProbe, CircleProbe};
use emfbeam::io::heatmap::render_ppm;
use emfbeam::scenario::{build_scenario, ScenarioConfig};
use emfbeam::schemes::mrt;
use emfbeam::to_db;

fn main() -> emfbeam::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "exposure_mrt.ppm".into());
    let cfg = ScenarioConfig { seed: 5, ..Default::default() };
    let sc = build_scenario(&cfg)?;
    let (_, _, g) = channels(&sc);
    let b = mrt(&g)?;

    let circle = CircleProbe::new(&sc.bs_elements, cfg.r, cfg.circle_samples)?;
    let scan = circle.scan(&b.b, b.chi)?;
    let peak = refined_circle_max(&circle, &b.b, &scan)?;
    let at = peak.location.expect("circle maxima have a location");
    println!(
        "max on circle {:.2} dB at {:.1} deg (threshold {} dB)",
        to_db(peak.value),
        at.y.atan2(at.x).to_degrees(),
        cfg.omega_thresh_db
    );

    let map = AreaProbe::for_scenario(&sc)?.scan(&b.b, b.chi, cfg.omega_thresh())?;
    println!("{} of {} points outside the circle are over threshold ({:.3}%)", map.flagged, map.evaluated, map.violation_pct);
    std::fs::write(&out, render_ppm(&map, "MRT exposure"))?;
    println!("wrote {out}");
    Ok(())
}
