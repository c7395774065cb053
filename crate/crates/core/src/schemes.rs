//! The four precoders: MRT, Reduced MRT, Truncated MRT and Truncated &
//! Boosted MRT.
//!
//! Truncation and boosting work on the beam-domain coefficients
//! `y = F^H b^MRT`. Beam `m` is truncated when the maximum power over its
//! arc exceeds the threshold, and scaled by `sqrt(thresh / arc_max)`.
//! Boosting applies the same scaling to the beams whose arc maximum under
//! the truncated precoder is strictly below the threshold, one beam at a
//! time, while the implied transmit power stays below the maximum.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{apply, ChannelRow, PowerSample};
use crate::codebook::{BeamDomainVector, BeamFrame, BeamTag};
use crate::error::{Error, Result};
use crate::exposure::{refined_arc_maxima, refined_circle_max, ArcMaxima, CircleScan};

/// Maximum transmit power; every power is normalized by it.
pub const CHI_MAX: f64 = 1.0;

/// Arc maxima below `omega_thresh * BOOST_FLOOR` are never boosted.
pub const BOOST_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Mrt,
    Reduced,
    Truncated,
    Boosted,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::Mrt, Scheme::Reduced, Scheme::Truncated, Scheme::Boosted];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Mrt => "mrt",
            Scheme::Reduced => "reduced",
            Scheme::Truncated => "truncated",
            Scheme::Boosted => "boosted",
        }
    }

    /// Human readable label used in reports.
    pub fn label(self) -> &'static str {
        match self {
            Scheme::Mrt => "MRT",
            Scheme::Reduced => "Reduced MRT",
            Scheme::Truncated => "Truncated",
            Scheme::Boosted => "Truncated & Boosted",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mrt" => Ok(Scheme::Mrt),
            "reduced" | "red" => Ok(Scheme::Reduced),
            "truncated" | "trunc" => Ok(Scheme::Truncated),
            "boosted" | "boost" => Ok(Scheme::Boosted),
            other => Err(Error::InvalidConfig(format!("unknown scheme `{other}`"))),
        }
    }
}

/// Order in which the boost candidates are visited.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoostOrder {
    #[default]
    Ascending,
    Descending,
}

/// A unit-norm beamforming vector with its transmit power.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Precoder {
    pub b: Vec<Complex64>,
    pub chi: f64,
    pub scheme: Scheme,
}

impl Precoder {
    /// Received power at the target, `|g b|^2 chi`.
    pub fn received_power(&self, g: &ChannelRow) -> f64 {
        apply(&g.values, &self.b).norm_sqr() * self.chi
    }

    fn relabel(&self, scheme: Scheme) -> Precoder {
        Precoder { scheme, ..self.clone() }
    }
}

/// What truncation or boosting did to the beam-domain coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationReport {
    /// Beams whose arc exceeded the threshold (truncated).
    pub exceed_set: Vec<usize>,
    /// Beams whose arc stayed strictly below the threshold (boost candidates).
    pub boost_set: Vec<usize>,
    /// Boost candidates skipped because their arc maximum was below the floor.
    pub skipped: Vec<usize>,
    /// Projection of the MRT precoder.
    pub y_before: BeamDomainVector,
    pub y_after: BeamDomainVector,
    /// `(beam, factor)` for every coefficient that was rescaled.
    pub scale_factors: Vec<(usize, f64)>,
    pub boost_iterations: usize,
    pub power_cap_hit: bool,
    /// Transmit power of the precoder that was projected.
    pub chi_ref: f64,
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
}

/// Maximum ratio transmission `b = g^H / |g|` at full power.
pub fn mrt(g: &ChannelRow) -> Result<Precoder> {
    let n = norm(&g.values);
    if n == 0.0 || !n.is_finite() {
        return Err(Error::ZeroChannel);
    }
    Ok(Precoder { b: g.values.iter().map(|x| x.conj() / n).collect(), chi: CHI_MAX, scheme: Scheme::Mrt })
}

/// Reduced MRT: same beam, `chi = min(thresh / omega_max, 1) chi_max`.
pub fn reduced_mrt(mrt: &Precoder, omega_max: &PowerSample, omega_thresh: f64) -> Precoder {
    let chi = if omega_max.value > 0.0 {
        (omega_thresh / omega_max.value * CHI_MAX).min(CHI_MAX)
    } else {
        CHI_MAX
    };
    Precoder { b: mrt.b.clone(), chi, scheme: Scheme::Reduced }
}

/// Truncates the beams whose arc maximum (under `precoder`) exceeds the threshold.
pub fn truncate(
    precoder: &Precoder,
    frame: &BeamFrame,
    maxima: &ArcMaxima,
    omega_thresh: f64,
) -> Result<(Precoder, TruncationReport)> {
    let y = frame.project(&precoder.b)?;
    let exceed_set: Vec<usize> =
        maxima.per_beam.iter().filter(|a| a.value > omega_thresh).map(|a| a.beam).collect();
    let mut y_trunc = y.clone();
    let mut scale_factors = Vec::with_capacity(exceed_set.len());
    for &m in &exceed_set {
        let factor = (omega_thresh / maxima.per_beam[m].value).sqrt();
        y_trunc[m] = y[m] * factor;
        scale_factors.push((m, factor));
    }
    let out = if exceed_set.is_empty() {
        precoder.relabel(Scheme::Truncated)
    } else {
        let field = frame.synthesize(&y_trunc)?;
        let reference = norm(&frame.synthesize(&y)?);
        let n = norm(&field);
        Precoder {
            b: field.iter().map(|x| x / n).collect(),
            chi: precoder.chi * (n / reference).powi(2),
            scheme: Scheme::Truncated,
        }
    };
    let report = TruncationReport {
        exceed_set,
        boost_set: Vec::new(),
        skipped: Vec::new(),
        y_before: BeamDomainVector { y, tag: BeamTag::Mrt },
        y_after: BeamDomainVector { y: y_trunc, tag: BeamTag::Trunc },
        scale_factors,
        boost_iterations: 0,
        power_cap_hit: false,
        chi_ref: precoder.chi,
    };
    Ok((out, report))
}

/// Truncated MRT from the MRT precoder and its limit-circle scan.
pub fn truncated_mrt(
    mrt: &Precoder,
    frame: &BeamFrame,
    scan: &CircleScan,
    omega_thresh: f64,
) -> Result<(Precoder, TruncationReport)> {
    let maxima = refined_arc_maxima(&frame.circle, &mrt.b, scan, &frame.arcs)?;
    truncate(mrt, frame, &maxima, omega_thresh)
}

/// Boosts the beams whose arc maximum under the truncated precoder is
/// strictly below the threshold. `maxima` must be measured under `trunc`.
pub fn boost(
    trunc: &Precoder,
    trunc_report: &TruncationReport,
    frame: &BeamFrame,
    maxima: &ArcMaxima,
    omega_thresh: f64,
    order: BoostOrder,
) -> Result<(Precoder, TruncationReport)> {
    let y = &trunc_report.y_before.y;
    let mut y_boost = trunc_report.y_after.y.clone();
    let reference = norm(&frame.synthesize(y)?);
    let chi_ref = trunc_report.chi_ref;
    let power_of = |v: &[Complex64]| -> Result<f64> { Ok(chi_ref * (norm(&frame.synthesize(v)?) / reference).powi(2)) };

    let mut boost_set: Vec<usize> = maxima
        .per_beam
        .iter()
        .filter(|a| a.value < omega_thresh && !trunc_report.exceed_set.contains(&a.beam))
        .map(|a| a.beam)
        .collect();
    if order == BoostOrder::Descending {
        boost_set.reverse();
    }

    let floor = omega_thresh * BOOST_FLOOR;
    let mut skipped = Vec::new();
    let mut scale_factors = Vec::new();
    let mut power_cap_hit = false;
    let mut power = power_of(&y_boost)?;
    for &m in &boost_set {
        if power >= CHI_MAX {
            power_cap_hit = true;
            break;
        }
        let arc_max = maxima.per_beam[m].value;
        if arc_max < floor {
            skipped.push(m);
            continue;
        }
        let factor = (omega_thresh / arc_max).sqrt();
        y_boost[m] = y[m] * factor;
        scale_factors.push((m, factor));
        power = power_of(&y_boost)?;
    }
    if power > CHI_MAX {
        power_cap_hit = true;
    }

    let out = if scale_factors.is_empty() {
        trunc.relabel(Scheme::Boosted)
    } else {
        let field = frame.synthesize(&y_boost)?;
        let n = norm(&field);
        Precoder { b: field.iter().map(|x| x / n).collect(), chi: power.min(CHI_MAX), scheme: Scheme::Boosted }
    };
    let report = TruncationReport {
        exceed_set: trunc_report.exceed_set.clone(),
        boost_set,
        skipped,
        y_before: trunc_report.y_after.clone(),
        y_after: BeamDomainVector { y: y_boost, tag: BeamTag::Boost },
        boost_iterations: scale_factors.len(),
        scale_factors,
        power_cap_hit,
        chi_ref,
    };
    Ok((out, report))
}

/// Truncated & Boosted MRT from the truncated precoder and its limit-circle scan.
pub fn truncated_boosted_mrt(
    trunc: &Precoder,
    trunc_report: &TruncationReport,
    frame: &BeamFrame,
    scan: &CircleScan,
    omega_thresh: f64,
    order: BoostOrder,
) -> Result<(Precoder, TruncationReport)> {
    let maxima = refined_arc_maxima(&frame.circle, &trunc.b, scan, &frame.arcs)?;
    boost(trunc, trunc_report, frame, &maxima, omega_thresh, order)
}

/// All four precoders of one channel draw and the intermediate results.
#[derive(Debug, Clone)]
pub struct SchemeSet {
    pub mrt: Precoder,
    pub reduced: Precoder,
    pub truncated: Precoder,
    pub boosted: Precoder,
    /// Maximum on the limit circle under MRT at full power.
    pub omega_max: PowerSample,
    /// Arc maxima under MRT at full power.
    pub mrt_arcs: ArcMaxima,
    /// Arc maxima under the truncated precoder.
    pub truncated_arcs: ArcMaxima,
    pub truncation: TruncationReport,
    pub boosting: TruncationReport,
}

impl SchemeSet {
    pub fn get(&self, scheme: Scheme) -> &Precoder {
        match scheme {
            Scheme::Mrt => &self.mrt,
            Scheme::Reduced => &self.reduced,
            Scheme::Truncated => &self.truncated,
            Scheme::Boosted => &self.boosted,
        }
    }

    /// Whether MRT at full power exceeds the threshold somewhere on the circle.
    pub fn mrt_violates(&self, omega_thresh: f64) -> bool {
        self.omega_max.value * CHI_MAX > omega_thresh
    }
}

/// Runs the full chain MRT -> scans -> Reduced/Truncated -> scan -> Boosted.
pub fn compute_schemes(g: &ChannelRow, frame: &BeamFrame, omega_thresh: f64, order: BoostOrder) -> Result<SchemeSet> {
    let mrt = mrt(g)?;
    let mrt_scan = frame.circle.scan(&mrt.b, mrt.chi)?;
    let omega_max = refined_circle_max(&frame.circle, &mrt.b, &mrt_scan)?;
    let reduced = reduced_mrt(&mrt, &omega_max, omega_thresh);

    let mrt_arcs = refined_arc_maxima(&frame.circle, &mrt.b, &mrt_scan, &frame.arcs)?;
    let (truncated, truncation) = truncate(&mrt, frame, &mrt_arcs, omega_thresh)?;

    let trunc_scan = frame.circle.scan(&truncated.b, truncated.chi)?;
    let truncated_arcs = refined_arc_maxima(&frame.circle, &truncated.b, &trunc_scan, &frame.arcs)?;
    let (boosted, boosting) = boost(&truncated, &truncation, frame, &truncated_arcs, omega_thresh, order)?;

    Ok(SchemeSet { mrt, reduced, truncated, boosted, omega_max, mrt_arcs, truncated_arcs, truncation, boosting })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::ChannelRole;
    use crate::exposure::ArcMax;
    use crate::scenario::{element_positions, Vec2};

    fn row(v: Vec<Complex64>) -> ChannelRow {
        ChannelRow { values: v, role: ChannelRole::Total }
    }

    fn frame(m: usize) -> BeamFrame {
        BeamFrame::new(&element_positions(m, 0.5, Vec2::X_AXIS), 650.0, 2048).unwrap()
    }

    fn maxima(values: &[f64]) -> ArcMaxima {
        ArcMaxima {
            per_beam: values.iter().enumerate().map(|(beam, &value)| ArcMax { beam, value, angle: 0.0 }).collect(),
        }
    }

    fn random_unit(m: usize, seed: u64) -> Vec<Complex64> {
        let v: Vec<Complex64> = (0..m)
            .map(|i| {
                let t = (seed as f64 + 1.0) * (i as f64 + 0.37);
                Complex64::new(t.sin(), (1.7 * t).cos())
            })
            .collect();
        let n = norm(&v);
        v.into_iter().map(|x| x / n).collect()
    }

    #[test]
    fn mrt_basis_and_zero() {
        let mut v = vec![Complex64::default(); 4];
        v[0] = Complex64::new(1.0, 0.0);
        let p = mrt(&row(v.clone())).unwrap();
        assert_eq!(p.b, v);
        assert_eq!(p.chi, 1.0);
        assert!(matches!(mrt(&row(vec![Complex64::default(); 4])), Err(Error::ZeroChannel)));
    }

    #[test]
    fn mrt_beats_random_beams() {
        let g = row(random_unit(8, 3).iter().map(|x| x * 5.0).collect());
        let best = mrt(&g).unwrap().received_power(&g);
        assert!((best - g.norm_sqr()).abs() < 1e-10 * best);
        for seed in 0..50 {
            let other = Precoder { b: random_unit(8, seed + 10), chi: 1.0, scheme: Scheme::Mrt };
            assert!(other.received_power(&g) <= best * (1.0 + 1e-12));
        }
    }

    #[test]
    fn reduced_power_rule() {
        let m = Precoder { b: vec![Complex64::new(1.0, 0.0)], chi: 1.0, scheme: Scheme::Mrt };
        let sample = |v| PowerSample { value: v, location: None };
        assert_eq!(reduced_mrt(&m, &sample(2e-7), 1e-7).chi, 0.5);
        assert_eq!(reduced_mrt(&m, &sample(0.5e-7), 1e-7).chi, 1.0);
        assert_eq!(reduced_mrt(&m, &sample(0.0), 1e-7).chi, 1.0);
        assert_eq!(reduced_mrt(&m, &sample(2e-7), 1e-7).b, m.b);
    }

    #[test]
    fn empty_exceed_set_is_identity() {
        let fr = frame(8);
        let p = Precoder { b: random_unit(8, 1), chi: 1.0, scheme: Scheme::Mrt };
        let (t, rep) = truncate(&p, &fr, &maxima(&[1e-8; 8]), 1e-7).unwrap();
        assert!(rep.exceed_set.is_empty());
        assert_eq!(t.b, p.b);
        assert_eq!(t.chi, 1.0);
    }

    #[test]
    fn uniform_excess_equals_reduction() {
        let fr = frame(8);
        let p = Precoder { b: random_unit(8, 2), chi: 1.0, scheme: Scheme::Mrt };
        let c = 4.0;
        let (t, rep) = truncate(&p, &fr, &maxima(&[c * 1e-7; 8]), 1e-7).unwrap();
        assert_eq!(rep.exceed_set.len(), 8);
        for (x, y) in t.b.iter().zip(&p.b) {
            assert!((x - y).norm() < 1e-12);
        }
        assert!((t.chi - 1.0 / c).abs() < 1e-12);
    }

    #[test]
    fn truncation_scales_only_exceeding_beams() {
        let fr = frame(8);
        let p = Precoder { b: random_unit(8, 4), chi: 1.0, scheme: Scheme::Mrt };
        let mut vals = [5e-8; 8];
        vals[2] = 4e-7;
        vals[5] = 9e-7;
        let (t, rep) = truncate(&p, &fr, &maxima(&vals), 1e-7).unwrap();
        assert_eq!(rep.exceed_set, vec![2, 5]);
        let y = &rep.y_before.y;
        let yt = &rep.y_after.y;
        assert!((yt[2] - y[2] * 0.5).norm() < 1e-15);
        assert!((yt[5] - y[5] / 3.0).norm() < 1e-15);
        assert_eq!(yt[0], y[0]);
        assert!((norm(&t.b) - 1.0).abs() < 1e-12);
        // transmitted field equals F y_trunc
        let field: Vec<Complex64> = t.b.iter().map(|x| x * t.chi.sqrt()).collect();
        let want = fr.synthesize(yt).unwrap();
        for (a, b) in field.iter().zip(&want) {
            assert!((a - b).norm() < 1e-12);
        }
        assert!(rep.scale_factors.iter().all(|&(_, f)| f <= 1.0));
    }

    #[test]
    fn empty_boost_set_keeps_truncated_bits() {
        let fr = frame(8);
        let p = Precoder { b: random_unit(8, 5), chi: 1.0, scheme: Scheme::Mrt };
        let (t, rep) = truncate(&p, &fr, &maxima(&[2e-7; 8]), 1e-7).unwrap();
        // everything exactly at threshold afterwards: no candidate
        let (b, brep) = boost(&t, &rep, &fr, &maxima(&[1e-7; 8]), 1e-7, BoostOrder::Ascending).unwrap();
        assert!(brep.boost_set.is_empty());
        assert_eq!(b.b, t.b);
        assert_eq!(b.chi.to_bits(), t.chi.to_bits());
        assert_eq!(b.scheme, Scheme::Boosted);
    }

    #[test]
    fn boost_respects_sets_order_and_cap() {
        let fr = frame(8);
        let p = Precoder { b: random_unit(8, 6), chi: 1.0, scheme: Scheme::Mrt };
        let mut vals = [5e-8; 8];
        vals[1] = 3e-7;
        let (t, rep) = truncate(&p, &fr, &maxima(&vals), 1e-7).unwrap();
        let mut after = [1e-9; 8];
        after[1] = 1e-7;
        after[7] = 1e-40;
        let (b, brep) = boost(&t, &rep, &fr, &maxima(&after), 1e-7, BoostOrder::Ascending).unwrap();
        assert!(!brep.boost_set.contains(&1));
        assert!(brep.boost_set.windows(2).all(|w| w[0] < w[1]));
        assert!(brep.scale_factors.iter().all(|&(_, f)| f >= 1.0));
        assert!(b.chi <= CHI_MAX && b.chi >= t.chi);
        assert!((norm(&b.b) - 1.0).abs() < 1e-12);
        // factor 10 on every candidate drives the power past the cap quickly
        assert!(brep.power_cap_hit);
        assert!(brep.boost_iterations < brep.boost_set.len());

        let (_, desc) = boost(&t, &rep, &fr, &maxima(&after), 1e-7, BoostOrder::Descending).unwrap();
        assert!(desc.boost_set.windows(2).all(|w| w[0] > w[1]));
        assert!(desc.skipped.contains(&7));
    }

    #[test]
    fn scheme_names_round_trip() {
        for s in Scheme::ALL {
            assert_eq!(s.name().parse::<Scheme>().unwrap(), s);
        }
        assert!("foo".parse::<Scheme>().is_err());
    }
}
