//! Binary PPM heatmaps of exposure maps.
//!
//! Received power is drawn in 5 dB grey bands over a fixed window of
//! `[threshold - 50 dB, threshold + 30 dB]`; every point above the threshold
//! is yellow and the limit circle is red. The scale is written into the
//! image header as comments.

use std::fmt::Write;

use crate::exposure::ExposureMap;
use crate::to_db;

pub const DB_BELOW_THRESHOLD: f64 = 50.0;
pub const DB_ABOVE_THRESHOLD: f64 = 30.0;
pub const BAND_DB: f64 = 5.0;

const YELLOW: [u8; 3] = [255, 220, 0];
const RED: [u8; 3] = [220, 20, 20];

fn grey(db: f64, lo: f64, hi: f64) -> [u8; 3] {
    let banded = ((db - lo) / BAND_DB).floor() * BAND_DB + lo;
    let t = ((banded - lo) / (hi - lo)).clamp(0.0, 1.0);
    let v = (t * 200.0).round() as u8;
    [v, v, v]
}

/// Renders `map` as a binary PPM, one pixel per grid point, +y up.
pub fn render_ppm(map: &ExposureMap, title: &str) -> Vec<u8> {
    let n = map.side();
    let thresh_db = to_db(map.omega_thresh);
    let lo = thresh_db - DB_BELOW_THRESHOLD;
    let hi = thresh_db + DB_ABOVE_THRESHOLD;
    let mut header = String::new();
    writeln!(header, "P6").unwrap();
    writeln!(header, "# {title}").unwrap();
    writeln!(header, "# grey bands of {BAND_DB} dB from {lo} dB (black) to {hi} dB (light grey), re chi_max").unwrap();
    writeln!(header, "# yellow: omega > threshold ({thresh_db} dB); red: limit circle R = {}", map.radius).unwrap();
    writeln!(header, "# grid pitch {} wavelengths, {} x {} points", map.grid.step, n, n).unwrap();
    writeln!(header, "{n} {n}").unwrap();
    writeln!(header, "255").unwrap();

    let mut bytes = header.into_bytes();
    bytes.reserve(3 * n * n);
    let half_pitch = 0.5 * map.grid.step;
    for row in 0..n {
        let j = n - 1 - row;
        for i in 0..n {
            let p = map.point(i, j);
            let w = map.power(i, j);
            let px = if (p.norm() - map.radius).abs() < half_pitch {
                RED
            } else if w > map.omega_thresh {
                YELLOW
            } else {
                grey(to_db(w), lo, hi)
            };
            bytes.extend_from_slice(&px);
        }
    }
    bytes
}
