//! Draws one multipath + RIS channel and shows how the pieces add up.

use emfbeam::channel::{channels, ris_phases, ris_self_configure};
use emfbeam::scenario::{build_scenario, ScenarioConfig};
use emfbeam::to_db;

fn main() -> emfbeam::Result<()> {
    let cfg = ScenarioConfig { seed: 11, ..Default::default() };
    let sc = build_scenario(&cfg)?;

    for (n, s) in sc.scatterers.iter().enumerate() {
        println!("scatterer {n}: bearing {:+.2} deg, |alpha|^2 = {:.3}", s.direction.bearing().to_degrees(), s.gain.norm_sqr());
    }
    for (k, r) in sc.ris_list.iter().enumerate() {
        println!("RIS {k}: bearing {:+.2} deg, |beta|^2 = {:.3}", r.bs_dir.bearing().to_degrees(), r.gain.norm_sqr());
    }

    // self-configured weights undo the RIS-to-user phase on every element
    let phases = ris_phases(&sc);
    let w = ris_self_configure(&phases);
    let residual = (0..phases.ris_count())
        .flat_map(|k| (0..phases.elements()).map(move |p| (k, p)))
        .map(|(k, p)| (w.get(k, p) * emfbeam::Complex64::cis(phases.psi(k, p)) - 1.0).norm())
        .fold(0.0, f64::max);
    println!("max |w e^(j psi) - 1| = {residual:.1e}");

    let (s, h, g) = channels(&sc);
    println!("|s|^2 = {:.2} dB, |h|^2 = {:.2} dB, |g|^2 = {:.2} dB", to_db(s.norm_sqr()), to_db(h.norm_sqr()), to_db(g.norm_sqr()));
    Ok(())
}
