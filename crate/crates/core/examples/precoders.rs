//! Computes the four precoders for one channel draw.

use emfbeam::channel::channels;
use emfbeam::codebook::BeamFrame;
use emfbeam::scenario::{build_scenario, ScenarioConfig};
use emfbeam::schemes::{compute_schemes, BoostOrder, Scheme};
use emfbeam::to_db;

fn main() -> emfbeam::Result<()> {
    let cfg = ScenarioConfig { seed: 21, ..Default::default() };
    let sc = build_scenario(&cfg)?;
    let frame = BeamFrame::for_scenario(&sc)?;
    let (_, _, g) = channels(&sc);
    let set = compute_schemes(&g, &frame, cfg.omega_thresh(), BoostOrder::Ascending)?;

    println!("MRT circle max {:.2} dB, threshold {} dB", to_db(set.omega_max.value), cfg.omega_thresh_db);
    println!("truncated beams {:?}", set.truncation.exceed_set);
    for (m, f) in &set.truncation.scale_factors {
        println!("  beam {m:>2}: amplitude x {f:.3}");
    }
    println!(
        "boosted {} of {} candidate beams{}",
        set.boosting.boost_iterations,
        set.boosting.boost_set.len(),
        if set.boosting.power_cap_hit { ", stopped at the power cap" } else { "" }
    );
    for s in Scheme::ALL {
        let p = set.get(s);
        println!("{:<22} chi {:>7.4}  rho {:>6.2} dB", s.label(), p.chi, to_db(p.received_power(&g)));
    }
    Ok(())
}
