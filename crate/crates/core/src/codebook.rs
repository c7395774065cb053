//! DFT beam codebook, beam peaks on the limit circle and the arc partition.
//!
//! Beam indices are zero based: beam `m` is column `m` of the codebook.
//! Projection onto the beam domain uses the conjugate transpose `F^H`, so
//! that `synthesize(project(b)) == b` for any `b`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exposure::CircleProbe;
use crate::scenario::{Scenario, Vec2};

/// Dense square complex matrix, row major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    size: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.size + col]
    }

    pub fn column(&self, col: usize) -> Vec<Complex64> {
        (0..self.size).map(|row| self.get(row, col)).collect()
    }

    /// `A x`
    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.data.chunks_exact(self.size).map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    /// `A^H x`
    pub fn adjoint_mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::default(); self.size];
        for (row, &xr) in self.data.chunks_exact(self.size).zip(x) {
            for (o, a) in out.iter_mut().zip(row) {
                *o += a.conj() * xr;
            }
        }
        out
    }

    /// `A^H A`
    pub fn gram(&self) -> ComplexMatrix {
        let n = self.size;
        let mut data = vec![Complex64::default(); n * n];
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = (0..n).map(|l| self.get(l, i).conj() * self.get(l, j)).sum();
            }
        }
        ComplexMatrix { size: n, data }
    }
}

/// Unitary DFT codebook: entry `(l, m)` is `exp(j 2pi l m / M) / sqrt(M)`.
pub fn dft_matrix(size: usize) -> ComplexMatrix {
    let scale = 1.0 / (size as f64).sqrt();
    let mut data = Vec::with_capacity(size * size);
    for l in 0..size {
        for m in 0..size {
            // reduce the exponent first so large l*m keeps full phase accuracy
            let k = (l * m) % size;
            data.push(Complex64::from_polar(scale, TAU * k as f64 / size as f64));
        }
    }
    ComplexMatrix { size, data }
}

/// Which coefficients a beam-domain vector holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BeamTag {
    Mrt,
    Trunc,
    Boost,
}

/// Precoder coefficients in the beam domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamDomainVector {
    pub y: Vec<Complex64>,
    pub tag: BeamTag,
}

impl BeamDomainVector {
    pub fn norm(&self) -> f64 {
        self.y.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
    }
}

/// Angular segment `[start, end]` of the limit circle owned by one beam.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamArc {
    pub beam: usize,
    pub start: f64,
    pub end: f64,
    /// Polar angle of the beam peak.
    pub peak: f64,
}

impl BeamArc {
    pub fn contains(&self, angle: f64) -> bool {
        self.start <= angle && angle <= self.end
    }
}

/// Codebook, beam peaks and arcs for one array geometry.
#[derive(Debug, Clone)]
pub struct BeamFrame {
    pub dft: ComplexMatrix,
    /// `Q^(m)` for every beam, on the limit circle.
    pub beam_peaks: Vec<Vec2>,
    pub peak_angles: Vec<f64>,
    /// Arcs sorted by increasing angle; `arcs[i].beam` names the owning beam.
    pub arcs: Vec<BeamArc>,
    pub circle: CircleProbe,
}

impl BeamFrame {
    pub fn new(elements: &[Vec2], radius: f64, circle_samples: usize) -> Result<Self> {
        let circle = CircleProbe::new(elements, radius, circle_samples)?;
        let dft = dft_matrix(elements.len());
        let peaks: Vec<(f64, Vec2)> = (0..dft.size()).map(|m| beam_peak(&circle, &dft, m)).collect::<Result<_>>()?;
        let peak_angles: Vec<f64> = peaks.iter().map(|p| p.0).collect();
        let arcs = build_arcs(&peak_angles)?;
        Ok(Self { dft, beam_peaks: peaks.into_iter().map(|p| p.1).collect(), peak_angles, arcs, circle })
    }

    pub fn for_scenario(scenario: &Scenario) -> Result<Self> {
        Self::new(&scenario.bs_elements, scenario.config.r, scenario.config.circle_samples)
    }

    pub fn size(&self) -> usize {
        self.dft.size()
    }

    /// Beam-domain coefficients `y = F^H b`.
    pub fn project(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_len(b.len())?;
        Ok(self.dft.adjoint_mul_vec(b))
    }

    /// Element-domain vector `F y` (not normalized).
    pub fn synthesize(&self, y: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_len(y.len())?;
        Ok(self.dft.mul_vec(y))
    }

    /// The arc owned by `beam`.
    pub fn arc_of(&self, beam: usize) -> &BeamArc {
        self.arcs.iter().find(|a| a.beam == beam).expect("every beam owns one arc")
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.size() {
            return Err(Error::DimensionMismatch { expected: self.size(), found: len });
        }
        Ok(())
    }
}

/// Scanned point of the half circle receiving the most power from beam `m`.
/// Ties go to the smallest polar angle.
pub fn beam_peak(circle: &CircleProbe, dft: &ComplexMatrix, m: usize) -> Result<(f64, Vec2)> {
    let scan = circle.scan(&dft.column(m), 1.0)?;
    let mut best = 0;
    for (i, &p) in scan.powers.iter().enumerate() {
        if p > scan.powers[best] {
            best = i;
        }
    }
    Ok((scan.angles[best], circle.point(best)))
}

/// Far-field pointing angle of DFT beam `m` for half-wavelength spacing:
/// `arccos(wrap(2 m / M))` with the cosine wrapped into `[-1, 1)`.
pub fn analytic_peak_angle(m: usize, size: usize) -> f64 {
    let mut c = 2.0 * m as f64 / size as f64;
    while c >= 1.0 {
        c -= 2.0;
    }
    c.acos()
}

/// Partitions `[0, pi]` into arcs split at the mid-angles between
/// neighbouring beam peaks. `peak_angles[m]` is the peak angle of beam `m`.
pub fn build_arcs(peak_angles: &[f64]) -> Result<Vec<BeamArc>> {
    if peak_angles.is_empty() {
        return Err(Error::Empty("beam peaks"));
    }
    let mut order: Vec<usize> = (0..peak_angles.len()).collect();
    order.sort_by(|&a, &b| peak_angles[a].total_cmp(&peak_angles[b]).then(a.cmp(&b)));
    for w in order.windows(2) {
        if peak_angles[w[0]] == peak_angles[w[1]] {
            return Err(Error::DuplicatePeak(w[0].min(w[1]), w[0].max(w[1])));
        }
    }
    let arcs = order
        .iter()
        .enumerate()
        .map(|(i, &beam)| {
            let peak = peak_angles[beam];
            let start = if i == 0 { 0.0 } else { 0.5 * (peak_angles[order[i - 1]] + peak) };
            let end = if i + 1 == order.len() { PI } else { 0.5 * (peak + peak_angles[order[i + 1]]) };
            BeamArc { beam, start, end, peak }
        })
        .collect();
    Ok(arcs)
}
