//! Exposure around the base station: limit-circle scans, arc maxima and
//! square-area scans with the over-threshold percentage.
//!
//! The array lies on the x-axis and its elements are isotropic, so the
//! received power is mirror symmetric about that axis. Circle scans cover
//! the upper half circle only; area scans evaluate the upper half of the
//! grid and mirror it.
//!
//! Maxima over the circle (global or per arc) are located on the discrete
//! scan first and then refined by a golden-section search between the
//! neighbouring samples, so that the reported maximum is the continuous one
//! to within about 1e-12 rad.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{near_field_row, PowerSample};
use crate::codebook::BeamArc;
use crate::error::{Error, Result};
use crate::scenario::{Scenario, Vec2};
use crate::schemes::Scheme;

/// Relative margin above the threshold before a grid point counts as over-exposed.
pub const VIOLATION_RTOL: f64 = 1e-6;

/// Points within this distance of the circle radius count as outside it.
pub const CIRCLE_EPS: f64 = 1e-9;

const GOLDEN_ITERATIONS: usize = 60;

/// Near-field rows cached for a fixed set of probe points.
#[derive(Debug, Clone)]
pub struct ProbeSet {
    antennas: usize,
    points: Vec<Vec2>,
    rows: Vec<Complex64>,
    /// Probe points sitting on an antenna element (infinite power).
    singular: Vec<bool>,
}

impl ProbeSet {
    /// Caches rows for `points`. With `allow_singular`, points on top of an
    /// element are kept and report infinite power; otherwise they are an error.
    pub fn new(elements: &[Vec2], points: Vec<Vec2>, allow_singular: bool) -> Result<Self> {
        let antennas = elements.len();
        let built: Vec<Result<Option<Vec<Complex64>>>> = points
            .par_iter()
            .map(|&p| match near_field_row(elements, p) {
                Ok(row) => Ok(Some(row)),
                Err(Error::CoincidentPoint { .. }) if allow_singular => Ok(None),
                Err(e) => Err(e),
            })
            .collect();
        let mut rows = Vec::with_capacity(points.len() * antennas);
        let mut singular = Vec::with_capacity(points.len());
        for r in built {
            match r? {
                Some(row) => {
                    rows.extend(row);
                    singular.push(false);
                }
                None => {
                    rows.extend(std::iter::repeat_n(Complex64::default(), antennas));
                    singular.push(true);
                }
            }
        }
        Ok(Self { antennas, points, rows, singular })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec2] {
        &self.points
    }

    /// `|q(Q) b|^2 chi` at every probe point.
    pub fn powers(&self, b: &[Complex64], chi: f64) -> Result<Vec<f64>> {
        if b.len() != self.antennas {
            return Err(Error::DimensionMismatch { expected: self.antennas, found: b.len() });
        }
        Ok(self
            .rows
            .par_chunks_exact(self.antennas.max(1))
            .zip(self.singular.par_iter())
            .map(|(row, &sing)| if sing { f64::INFINITY } else { row_power(row, b, chi) })
            .collect())
    }
}

fn row_power(row: &[Complex64], b: &[Complex64], chi: f64) -> f64 {
    let mut acc = Complex64::default();
    for (q, x) in row.iter().zip(b) {
        acc += q * x;
    }
    acc.norm_sqr() * chi
}

/// Polar angles of `samples` points evenly covering `[0, pi]`, endpoints included.
pub fn half_circle_angles(samples: usize) -> Vec<f64> {
    if samples < 2 {
        return vec![0.0; samples];
    }
    let last = (samples - 1) as f64;
    (0..samples).map(|i| PI * i as f64 / last).collect()
}

/// Cached near-field rows on the upper half of the limit circle.
#[derive(Debug, Clone)]
pub struct CircleProbe {
    radius: f64,
    elements: Vec<Vec2>,
    angles: Vec<f64>,
    probe: ProbeSet,
}

impl CircleProbe {
    pub fn new(elements: &[Vec2], radius: f64, samples: usize) -> Result<Self> {
        if samples < 2 {
            return Err(Error::InvalidConfig("circle needs at least 2 samples".into()));
        }
        let angles = half_circle_angles(samples);
        let points = angles.iter().map(|&t| Vec2::from_polar(radius, t)).collect();
        let probe = ProbeSet::new(elements, points, false)?;
        Ok(Self { radius, elements: elements.to_vec(), angles, probe })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    pub fn point(&self, i: usize) -> Vec2 {
        self.probe.points[i]
    }

    pub fn scan(&self, b: &[Complex64], chi: f64) -> Result<CircleScan> {
        Ok(CircleScan {
            radius: self.radius,
            chi,
            angles: self.angles.clone(),
            powers: self.probe.powers(b, chi)?,
            tag: None,
        })
    }

    /// Power at an arbitrary angle of the circle, evaluated directly.
    pub fn power_at(&self, angle: f64, b: &[Complex64], chi: f64) -> f64 {
        let row = near_field_row(&self.elements, Vec2::from_polar(self.radius, angle))
            .expect("circle points never coincide with elements");
        row_power(&row, b, chi)
    }
}

/// Received power along the upper half of the limit circle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleScan {
    pub radius: f64,
    /// Transmit power the scan was taken with.
    pub chi: f64,
    pub angles: Vec<f64>,
    pub powers: Vec<f64>,
    pub tag: Option<Scheme>,
}

impl CircleScan {
    fn argmax(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, &p) in self.powers.iter().enumerate() {
            if best.is_none_or(|b| p > self.powers[b]) {
                best = Some(i);
            }
        }
        best
    }
}

/// Scans the limit circle of `scenario` with precoder `b` at power `chi`.
pub fn scan_circle(scenario: &Scenario, b: &[Complex64], chi: f64, circle_samples: usize) -> Result<CircleScan> {
    CircleProbe::new(&scenario.bs_elements, scenario.config.r, circle_samples)?.scan(b, chi)
}

/// Largest scanned power, divided by the scan's transmit power.
pub fn circle_max(scan: &CircleScan) -> Result<PowerSample> {
    let i = scan.argmax().ok_or(Error::Empty("circle scan"))?;
    Ok(PowerSample {
        value: normalize(scan.powers[i], scan.chi),
        location: Some(Vec2::from_polar(scan.radius, scan.angles[i])),
    })
}

/// Like [`circle_max`] but refined between the neighbouring samples of the
/// discrete maximum. `scan` must come from `probe` with the same `b` and `chi`.
pub fn refined_circle_max(probe: &CircleProbe, b: &[Complex64], scan: &CircleScan) -> Result<PowerSample> {
    let i = scan.argmax().ok_or(Error::Empty("circle scan"))?;
    let lo = scan.angles[i.saturating_sub(1)];
    let hi = scan.angles[(i + 1).min(scan.angles.len() - 1)];
    let (angle, value) = refine(|t| probe.power_at(t, b, scan.chi), lo, hi, (scan.angles[i], scan.powers[i]));
    Ok(PowerSample { value: normalize(value, scan.chi), location: Some(Vec2::from_polar(scan.radius, angle)) })
}

fn normalize(power: f64, chi: f64) -> f64 {
    if chi > 0.0 {
        power / chi
    } else {
        0.0
    }
}

/// Golden-section maximization of `f` on `[lo, hi]`, never returning less
/// than the `known` sample.
fn refine(f: impl Fn(f64) -> f64, lo: f64, hi: f64, known: (f64, f64)) -> (f64, f64) {
    let mut best = known;
    let mut consider = |t: f64, v: f64| {
        if v > best.1 {
            best = (t, v);
        }
    };
    if hi <= lo {
        return best;
    }
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    consider(a, f(a));
    consider(b, f(b));
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..GOLDEN_ITERATIONS {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    consider(c, fc);
    consider(d, fd);
    best
}

/// Maximum power over one arc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArcMax {
    pub beam: usize,
    pub value: f64,
    pub angle: f64,
}

/// Per-beam maxima over the arcs; `per_beam[m]` belongs to beam `m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcMaxima {
    pub per_beam: Vec<ArcMax>,
}

impl ArcMaxima {
    pub fn overall(&self) -> f64 {
        self.per_beam.iter().map(|a| a.value).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Sample index of the discrete maximum inside each arc (ordered like `arcs`).
/// A sample on a shared boundary belongs to the arc that ends there.
fn arc_argmax(scan: &CircleScan, arcs: &[BeamArc]) -> Result<Vec<usize>> {
    let mut best: Vec<Option<usize>> = vec![None; arcs.len()];
    let mut a = 0;
    for (i, &t) in scan.angles.iter().enumerate() {
        while a + 1 < arcs.len() && t > arcs[a].end {
            a += 1;
        }
        if !arcs[a].contains(t) {
            continue;
        }
        if best[a].is_none_or(|b| scan.powers[i] > scan.powers[b]) {
            best[a] = Some(i);
        }
    }
    best.into_iter().zip(arcs).map(|(b, arc)| b.ok_or(Error::EmptyArc(arc.beam))).collect()
}

fn by_beam(mut maxima: Vec<ArcMax>) -> ArcMaxima {
    maxima.sort_by_key(|a| a.beam);
    ArcMaxima { per_beam: maxima }
}

/// Discrete per-arc maxima of a circle scan.
pub fn arc_maxima(scan: &CircleScan, arcs: &[BeamArc]) -> Result<ArcMaxima> {
    let idx = arc_argmax(scan, arcs)?;
    Ok(by_beam(
        idx.iter()
            .zip(arcs)
            .map(|(&i, arc)| ArcMax { beam: arc.beam, value: scan.powers[i], angle: scan.angles[i] })
            .collect(),
    ))
}

/// Per-arc maxima refined between neighbouring samples, clipped to each arc.
pub fn refined_arc_maxima(
    probe: &CircleProbe,
    b: &[Complex64],
    scan: &CircleScan,
    arcs: &[BeamArc],
) -> Result<ArcMaxima> {
    let idx = arc_argmax(scan, arcs)?;
    let last = scan.angles.len() - 1;
    let maxima = idx
        .par_iter()
        .zip(arcs)
        .map(|(&i, arc)| {
            let lo = scan.angles[i.saturating_sub(1)].max(arc.start);
            let hi = scan.angles[(i + 1).min(last)].min(arc.end);
            let (angle, value) =
                refine(|t| probe.power_at(t, b, scan.chi), lo, hi, (scan.angles[i], scan.powers[i]));
            ArcMax { beam: arc.beam, value, angle }
        })
        .collect();
    Ok(by_beam(maxima))
}

/// Square grid centred on the base station, symmetric about both axes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AreaGrid {
    pub step: f64,
    /// Coordinates along either axis, ascending.
    pub coords: Vec<f64>,
}

impl AreaGrid {
    pub fn new(half_width: f64, step: f64) -> Result<Self> {
        if !(step.is_finite() && step > 0.0 && half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidConfig("grid step and half width must be positive".into()));
        }
        let n = (2.0 * half_width / step + 1e-9).floor() as usize + 1;
        let centre = (n - 1) as f64 / 2.0;
        Ok(Self { step, coords: (0..n).map(|i| (i as f64 - centre) * step).collect() })
    }

    pub fn side(&self) -> usize {
        self.coords.len()
    }

    /// First row index with `y >= 0`; rows below mirror rows at or above it.
    fn first_upper_row(&self) -> usize {
        self.side() / 2
    }

    fn upper_points(&self) -> Vec<Vec2> {
        let first = self.first_upper_row();
        self.coords[first..]
            .iter()
            .flat_map(|&y| self.coords.iter().map(move |&x| Vec2::new(x, y)))
            .collect()
    }
}

/// Received power over a square area with its over-threshold mask.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExposureMap {
    pub grid: AreaGrid,
    pub radius: f64,
    pub omega_thresh: f64,
    /// Row major, `powers[j * side + i]` at `(coords[i], coords[j])`.
    pub powers: Vec<f64>,
    /// Over-threshold flags, only ever set outside the limit circle.
    pub mask: Vec<bool>,
    /// Grid points outside the circle.
    pub evaluated: usize,
    pub flagged: usize,
    pub violation_pct: f64,
}

impl ExposureMap {
    fn from_upper(grid: AreaGrid, radius: f64, omega_thresh: f64, upper: Vec<f64>) -> Self {
        let n = grid.side();
        let first = grid.first_upper_row();
        let mut powers = vec![0.0; n * n];
        for j in 0..n {
            let src = if j >= first { j - first } else { n - 1 - j - first };
            powers[j * n..(j + 1) * n].copy_from_slice(&upper[src * n..(src + 1) * n]);
        }
        let limit = omega_thresh * (1.0 + VIOLATION_RTOL);
        let mut mask = vec![false; n * n];
        let mut evaluated = 0;
        let mut flagged = 0;
        for j in 0..n {
            for i in 0..n {
                if Vec2::new(grid.coords[i], grid.coords[j]).norm() < radius - CIRCLE_EPS {
                    continue;
                }
                evaluated += 1;
                if powers[j * n + i] > limit {
                    mask[j * n + i] = true;
                    flagged += 1;
                }
            }
        }
        let violation_pct = if evaluated == 0 { 0.0 } else { 100.0 * flagged as f64 / evaluated as f64 };
        Self { grid, radius, omega_thresh, powers, mask, evaluated, flagged, violation_pct }
    }

    pub fn side(&self) -> usize {
        self.grid.side()
    }

    pub fn point(&self, i: usize, j: usize) -> Vec2 {
        Vec2::new(self.grid.coords[i], self.grid.coords[j])
    }

    pub fn power(&self, i: usize, j: usize) -> f64 {
        self.powers[j * self.side() + i]
    }

    pub fn is_flagged(&self, i: usize, j: usize) -> bool {
        self.mask[j * self.side() + i]
    }
}

/// Area grid with cached near-field rows, reused across precoders that share
/// the array geometry.
#[derive(Debug, Clone)]
pub struct AreaProbe {
    grid: AreaGrid,
    radius: f64,
    probe: ProbeSet,
}

impl AreaProbe {
    pub fn new(elements: &[Vec2], half_width: f64, step: f64, radius: f64) -> Result<Self> {
        let grid = AreaGrid::new(half_width, step)?;
        let probe = ProbeSet::new(elements, grid.upper_points(), true)?;
        Ok(Self { grid, radius, probe })
    }

    pub fn for_scenario(scenario: &Scenario) -> Result<Self> {
        let c = &scenario.config;
        Self::new(&scenario.bs_elements, c.square_half_width, c.grid_step, c.r)
    }

    pub fn grid(&self) -> &AreaGrid {
        &self.grid
    }

    pub fn scan(&self, b: &[Complex64], chi: f64, omega_thresh: f64) -> Result<ExposureMap> {
        let upper = self.probe.powers(b, chi)?;
        Ok(ExposureMap::from_upper(self.grid.clone(), self.radius, omega_thresh, upper))
    }
}

/// Scans the square area of `scenario` without caching rows.
pub fn scan_area(scenario: &Scenario, b: &[Complex64], chi: f64, grid_step: f64) -> Result<ExposureMap> {
    let c = &scenario.config;
    let elements = &scenario.bs_elements;
    if b.len() != elements.len() {
        return Err(Error::DimensionMismatch { expected: elements.len(), found: b.len() });
    }
    let grid = AreaGrid::new(c.square_half_width, grid_step)?;
    let upper = grid
        .upper_points()
        .into_par_iter()
        .map(|p| match near_field_row(elements, p) {
            Ok(row) => row_power(&row, b, chi),
            Err(_) => f64::INFINITY,
        })
        .collect();
    Ok(ExposureMap::from_upper(grid, c.r, c.omega_thresh(), upper))
}
