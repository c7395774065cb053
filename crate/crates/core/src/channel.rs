//! Propagation channels and received powers.
//!
//! Rows are `1 x M` complex vectors. Far-field rows (`s`, `h`, `g`) use the
//! plane-wave model; the near-field row `q(Q)` uses one isotropic spherical
//! wave per base-station element. Phases are never wrapped before the
//! complex exponential is formed.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::{Scenario, Vec2};

/// What a channel row describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChannelRole {
    /// Through the scatterers.
    Scatter,
    /// Through the RISs.
    Ris,
    /// Scatterers and RISs together.
    Total,
    /// Line of sight towards a probe point close to the array.
    NearField,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelRow {
    pub values: Vec<Complex64>,
    pub role: ChannelRole,
}

impl ChannelRow {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(Complex64::norm_sqr).sum()
    }
}

/// Incident (`phi`) and reflected (`psi`) phase shifts of every RIS element.
#[derive(Debug, Clone, PartialEq)]
pub struct RisPhaseSet {
    ris_count: usize,
    antennas: usize,
    elements: usize,
    phi: Vec<f64>,
    psi: Vec<f64>,
}

impl RisPhaseSet {
    pub fn ris_count(&self) -> usize {
        self.ris_count
    }

    pub fn elements(&self) -> usize {
        self.elements
    }

    pub fn is_empty(&self) -> bool {
        self.ris_count == 0
    }

    /// Phase from base-station element `m` to element `p` of RIS `k`.
    pub fn phi(&self, k: usize, m: usize, p: usize) -> f64 {
        self.phi[(k * self.antennas + m) * self.elements + p]
    }

    /// Phase from element `p` of RIS `k` towards the target user.
    pub fn psi(&self, k: usize, p: usize) -> f64 {
        self.psi[k * self.elements + p]
    }
}

/// Unit-modulus RIS element weights, one per (RIS, element).
#[derive(Debug, Clone, PartialEq)]
pub struct RisWeights {
    ris_count: usize,
    elements: usize,
    w: Vec<Complex64>,
}

impl RisWeights {
    /// Builds weights from a `K x P` row-major table.
    pub fn from_table(ris_count: usize, elements: usize, w: Vec<Complex64>) -> Result<Self> {
        if w.len() != ris_count * elements {
            return Err(Error::DimensionMismatch { expected: ris_count * elements, found: w.len() });
        }
        Ok(Self { ris_count, elements, w })
    }

    pub fn get(&self, k: usize, p: usize) -> Complex64 {
        self.w[k * self.elements + p]
    }

    pub fn ris_count(&self) -> usize {
        self.ris_count
    }

    pub fn elements(&self) -> usize {
        self.elements
    }
}

/// A received power, normalized by the maximum transmit power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerSample {
    pub value: f64,
    pub location: Option<Vec2>,
}

/// Scatter channel: `s_m = sum_n alpha_n exp(j 2pi u_n . v_m)`.
pub fn scatter_channel(scenario: &Scenario) -> ChannelRow {
    let values = scenario
        .bs_elements
        .iter()
        .map(|&v| {
            scenario
                .scatterers
                .iter()
                .map(|sc| sc.gain * Complex64::cis(TAU * sc.direction.dot(v)))
                .sum()
        })
        .collect();
    ChannelRow { values, role: ChannelRole::Scatter }
}

/// Phase shifts of all RIS elements. Empty when the scenario has no RIS.
pub fn ris_phases(scenario: &Scenario) -> RisPhaseSet {
    let ris_count = scenario.ris_list.len();
    let antennas = scenario.bs_elements.len();
    let elements = scenario.ris_list.first().map_or(0, |r| r.element_offsets.len());
    let mut phi = Vec::with_capacity(ris_count * antennas * elements);
    let mut psi = Vec::with_capacity(ris_count * elements);
    for ris in &scenario.ris_list {
        for &v in &scenario.bs_elements {
            for &c in &ris.element_offsets {
                phi.push(TAU * (ris.bs_dir.dot(v) + ris.bs_dir.dot(c)));
            }
        }
        psi.extend(ris.element_offsets.iter().map(|&c| TAU * ris.ue_dir.dot(c)));
    }
    RisPhaseSet { ris_count, antennas, elements, phi, psi }
}

/// Self-configuration: each element cancels its own reflected phase, `w = exp(-j psi)`.
pub fn ris_self_configure(phases: &RisPhaseSet) -> RisWeights {
    RisWeights {
        ris_count: phases.ris_count,
        elements: phases.elements,
        w: phases.psi.iter().map(|&psi| Complex64::cis(-psi)).collect(),
    }
}

/// RIS channel: `h_m = sum_k beta_k / P sum_p w_kp exp(j (phi_kmp + psi_kp))`.
pub fn ris_channel(scenario: &Scenario, weights: &RisWeights) -> Result<ChannelRow> {
    let phases = ris_phases(scenario);
    let antennas = scenario.bs_elements.len();
    if phases.is_empty() {
        return Ok(ChannelRow { values: vec![Complex64::default(); antennas], role: ChannelRole::Ris });
    }
    if weights.ris_count != phases.ris_count {
        return Err(Error::DimensionMismatch { expected: phases.ris_count, found: weights.ris_count });
    }
    if weights.elements != phases.elements {
        return Err(Error::DimensionMismatch { expected: phases.elements, found: weights.elements });
    }
    let p_count = phases.elements as f64;
    let values = (0..antennas)
        .map(|m| {
            scenario
                .ris_list
                .iter()
                .enumerate()
                .map(|(k, ris)| {
                    let array_sum: Complex64 = (0..phases.elements)
                        .map(|p| weights.get(k, p) * Complex64::cis(phases.phi(k, m, p) + phases.psi(k, p)))
                        .sum();
                    ris.gain / p_count * array_sum
                })
                .sum()
        })
        .collect();
    Ok(ChannelRow { values, role: ChannelRole::Ris })
}

/// Total channel `g = s + h`.
pub fn total_channel(s: &ChannelRow, h: &ChannelRow) -> Result<ChannelRow> {
    if s.len() != h.len() {
        return Err(Error::DimensionMismatch { expected: s.len(), found: h.len() });
    }
    let values = s.values.iter().zip(&h.values).map(|(a, b)| a + b).collect();
    Ok(ChannelRow { values, role: ChannelRole::Total })
}

/// Scatter, RIS (with self-configured weights) and total channels of a scenario.
pub fn channels(scenario: &Scenario) -> (ChannelRow, ChannelRow, ChannelRow) {
    let s = scatter_channel(scenario);
    let weights = ris_self_configure(&ris_phases(scenario));
    let h = ris_channel(scenario, &weights).expect("self-configured weights match the scenario");
    let g = total_channel(&s, &h).expect("rows built from the same scenario");
    (s, h, g)
}

/// Spherical-wave channel from each element in `elements` to `point`.
pub fn near_field_row(elements: &[Vec2], point: Vec2) -> Result<Vec<Complex64>> {
    elements
        .iter()
        .enumerate()
        .map(|(m, &v)| {
            let d = v.distance(point);
            if d <= 1e-9 {
                return Err(Error::CoincidentPoint { x: point.x, y: point.y, element: m });
            }
            Ok(Complex64::from_polar(1.0 / (4.0 * PI * d), TAU * d))
        })
        .collect()
}

/// Near-field channel `q(Q)` between the base station and a probe point.
pub fn near_field_channel(scenario: &Scenario, point: Vec2) -> Result<ChannelRow> {
    Ok(ChannelRow { values: near_field_row(&scenario.bs_elements, point)?, role: ChannelRole::NearField })
}

/// Row-times-column product `sum_m row_m b_m` (no conjugation).
pub fn apply(row: &[Complex64], b: &[Complex64]) -> Complex64 {
    row.iter().zip(b).map(|(r, x)| r * x).sum()
}

/// Received power `|row b|^2 chi`.
pub fn received_power(row: &[Complex64], b: &[Complex64], chi: f64) -> Result<PowerSample> {
    if row.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: row.len(), found: b.len() });
    }
    Ok(PowerSample { value: apply(row, b).norm_sqr() * chi, location: None })
}
