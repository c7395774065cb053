//! The DFT codebook: where each beam peaks on the limit circle and the arc it owns.

use emfbeam::codebook::{analytic_peak_angle, BeamFrame};
use emfbeam::scenario::{build_scenario, ScenarioConfig};

fn main() -> emfbeam::Result<()> {
    let cfg = ScenarioConfig { k: 0, ..Default::default() };
    let sc = build_scenario(&cfg)?;
    let frame = BeamFrame::for_scenario(&sc)?;

    println!("{:>4} {:>12} {:>12} {:>22}", "beam", "peak deg", "far-field", "arc deg");
    for m in (0..frame.size()).step_by(4) {
        let arc = frame.arc_of(m);
        println!(
            "{m:>4} {:>12.3} {:>12.3} {:>10.2} .. {:>8.2}",
            frame.peak_angles[m].to_degrees(),
            analytic_peak_angle(m, frame.size()).to_degrees(),
            arc.start.to_degrees(),
            arc.end.to_degrees()
        );
    }

    // a single codebook column projects onto exactly one coefficient
    let b = frame.dft.column(5);
    let y = frame.project(&b)?;
    let big: Vec<usize> = (0..y.len()).filter(|&i| y[i].norm() > 1e-9).collect();
    println!("F^H f_5 is nonzero only at {big:?}");
    Ok(())
}
