//! Configuration, seeded randomness and the geometric layout of one channel draw.
//!
//! Everything lives in the x-y plane. The base-station array sits on the
//! x-axis with its first element at the origin; scatterer and RIS
//! directions are measured as angles from the +y axis (positive towards +x).

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_6};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point or direction in the plane, in wavelengths.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ORIGIN: Vec2 = Vec2 { x: 0.0, y: 0.0 };
    pub const X_AXIS: Vec2 = Vec2 { x: 1.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Unit vector at `angle` radians from +y, rotating towards +x.
    pub fn from_bearing(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self { x: s, y: c }
    }

    /// Unit vector at polar angle `theta` (from +x, counter-clockwise).
    pub fn from_polar(radius: f64, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self { x: radius * c, y: radius * s }
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn scale(self, k: f64) -> Self {
        Self { x: self.x * k, y: self.y * k }
    }

    pub fn distance(self, other: Vec2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    /// Angle from +y towards +x, in (-pi, pi].
    pub fn bearing(self) -> f64 {
        self.x.atan2(self.y)
    }
}

fn default_m() -> usize {
    64
}
fn default_n() -> usize {
    3
}
fn default_k() -> usize {
    3
}
fn default_p() -> usize {
    16
}
fn default_r() -> f64 {
    650.0
}
fn default_spacing() -> f64 {
    0.5
}
fn default_thresh_db() -> f64 {
    -70.0
}
fn default_half_width() -> f64 {
    700.0
}
fn default_sector() -> f64 {
    FRAC_PI_6
}
fn default_circle_samples() -> usize {
    4096
}
fn default_grid_step() -> f64 {
    5.0
}
fn default_seed() -> u64 {
    1
}

/// Scenario parameters. Missing JSON fields take the reference values
/// (M = 64, N = 3, K = 3, P = 16, R = 650, threshold -70 dB).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    /// Base-station antenna count.
    #[serde(rename = "M", default = "default_m")]
    pub m: usize,
    /// Scatterer count.
    #[serde(rename = "N", default = "default_n")]
    pub n: usize,
    /// RIS count (0 disables the RIS path).
    #[serde(rename = "K", default = "default_k")]
    pub k: usize,
    /// Elements per RIS.
    #[serde(rename = "P", default = "default_p")]
    pub p: usize,
    /// Limit-circle radius.
    #[serde(rename = "R", default = "default_r")]
    pub r: f64,
    #[serde(default = "default_spacing")]
    pub element_spacing: f64,
    /// Exposure threshold relative to the maximum transmit power, in dB.
    #[serde(default = "default_thresh_db")]
    pub omega_thresh_db: f64,
    /// Half side of the square area scan.
    #[serde(default = "default_half_width")]
    pub square_half_width: f64,
    /// Half width of the direction sector about +y, radians.
    #[serde(default = "default_sector")]
    pub sector_half_angle: f64,
    /// Points on the scanned half circle (both endpoints included).
    #[serde(default = "default_circle_samples")]
    pub circle_samples: usize,
    /// Pitch of the area grid.
    #[serde(default = "default_grid_step")]
    pub grid_step: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Polar angle of every RIS array axis. `None` orients each RIS
    /// broadside to the base station.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ris_axis_angle: Option<f64>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            m: default_m(),
            n: default_n(),
            k: default_k(),
            p: default_p(),
            r: default_r(),
            element_spacing: default_spacing(),
            omega_thresh_db: default_thresh_db(),
            square_half_width: default_half_width(),
            sector_half_angle: default_sector(),
            circle_samples: default_circle_samples(),
            grid_step: default_grid_step(),
            seed: default_seed(),
            ris_axis_angle: None,
        }
    }
}

impl ScenarioConfig {
    /// Linear exposure threshold.
    pub fn omega_thresh(&self) -> f64 {
        crate::from_db(self.omega_thresh_db)
    }

    pub fn validate(&self) -> Result<()> {
        fn positive(name: &str, v: f64) -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidConfig(format!("{name} must be finite and > 0, got {v}")))
            }
        }
        if self.m == 0 {
            return Err(Error::InvalidConfig("M must be >= 1".into()));
        }
        if self.n == 0 {
            return Err(Error::InvalidConfig("N must be >= 1".into()));
        }
        if self.p == 0 {
            return Err(Error::InvalidConfig("P must be >= 1".into()));
        }
        if self.circle_samples < 2 {
            return Err(Error::InvalidConfig("circle_samples must be >= 2".into()));
        }
        positive("R", self.r)?;
        positive("element_spacing", self.element_spacing)?;
        positive("square_half_width", self.square_half_width)?;
        positive("sector_half_angle", self.sector_half_angle)?;
        positive("grid_step", self.grid_step)?;
        if !self.omega_thresh_db.is_finite() {
            return Err(Error::InvalidConfig("omega_thresh_db must be finite".into()));
        }
        if self.sector_half_angle > std::f64::consts::PI {
            return Err(Error::InvalidConfig("sector_half_angle must be <= pi".into()));
        }
        if let Some(a) = self.ris_axis_angle {
            if !a.is_finite() {
                return Err(Error::InvalidConfig("ris_axis_angle must be finite".into()));
            }
        }
        if self.r < 50.0 {
            log::warn!("R = {} wavelengths: beam peaks are only meaningful for R >> 1", self.r);
        }
        Ok(())
    }
}

/// A far-field propagation path through one scatterer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scatterer {
    /// Unit vector from the base station towards the scatterer.
    pub direction: Vec2,
    pub gain: Complex64,
}

/// One reconfigurable intelligent surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RisDescriptor {
    /// Unit vector base station -> RIS.
    pub bs_dir: Vec2,
    /// Unit vector RIS -> target user.
    pub ue_dir: Vec2,
    /// Path gain over the whole surface.
    pub gain: Complex64,
    /// Element positions relative to the first element.
    pub element_offsets: Vec<Vec2>,
    /// Unit vector along the RIS array axis.
    pub orientation: Vec2,
}

/// One frozen channel draw plus the array geometry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub bs_elements: Vec<Vec2>,
    pub scatterers: Vec<Scatterer>,
    pub ris_list: Vec<RisDescriptor>,
}

impl Scenario {
    pub fn antenna_count(&self) -> usize {
        self.bs_elements.len()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Positions of a uniform linear array: point `i` is `i * spacing * axis`.
pub fn element_positions(count: usize, spacing: f64, axis: Vec2) -> Vec<Vec2> {
    (0..count).map(|i| axis.scale(i as f64 * spacing)).collect()
}

/// Independent random streams of one scenario draw.
#[derive(Debug, Clone, Copy)]
#[repr(u64)]
enum Stream {
    ScatterDirections = 1,
    ScatterGains = 2,
    RisDirections = 3,
    RisGains = 4,
    RisUserDirections = 5,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent sub-seed from a root seed and a stream label.
pub fn derive_seed(root: u64, stream: u64) -> u64 {
    splitmix64(root ^ splitmix64(stream))
}

/// Seed of Monte-Carlo sample `index`, so any sample can be re-run alone.
pub fn sample_seed(root: u64, index: u64) -> u64 {
    derive_seed(root, 0x5A4D_504C_0000_0000 | index)
}

fn stream_rng(root: u64, stream: Stream) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(derive_seed(root, stream as u64))
}

/// Circularly-symmetric complex Gaussian with unit variance.
fn complex_gaussian<R: Rng>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
}

fn sector_directions(rng: &mut ChaCha12Rng, count: usize, half_angle: f64) -> Vec<Vec2> {
    let dist = Uniform::new_inclusive(-half_angle, half_angle).expect("validated sector");
    (0..count).map(|_| Vec2::from_bearing(rng.sample(dist))).collect()
}

/// Draws a scenario from `config`. Identical configs give bit-identical scenarios.
pub fn build_scenario(config: &ScenarioConfig) -> Result<Scenario> {
    config.validate()?;
    let seed = config.seed;
    let half = config.sector_half_angle;

    let bs_elements = element_positions(config.m, config.element_spacing, Vec2::X_AXIS);

    let dirs = sector_directions(&mut stream_rng(seed, Stream::ScatterDirections), config.n, half);
    let mut gain_rng = stream_rng(seed, Stream::ScatterGains);
    let scatterers = dirs
        .into_iter()
        .map(|direction| Scatterer { direction, gain: complex_gaussian(&mut gain_rng) })
        .collect();

    let bs_dirs = sector_directions(&mut stream_rng(seed, Stream::RisDirections), config.k, half);
    let ue_dirs = sector_directions(&mut stream_rng(seed, Stream::RisUserDirections), config.k, half);
    let mut ris_gain_rng = stream_rng(seed, Stream::RisGains);
    let ris_list = bs_dirs
        .into_iter()
        .zip(ue_dirs)
        .map(|(bs_dir, ue_dir)| {
            let orientation = match config.ris_axis_angle {
                Some(theta) => Vec2::from_polar(1.0, theta),
                // broadside to the base station: axis perpendicular to bs_dir
                None => Vec2::new(bs_dir.y, -bs_dir.x),
            };
            RisDescriptor {
                bs_dir,
                ue_dir,
                gain: complex_gaussian(&mut ris_gain_rng),
                element_offsets: element_positions(config.p, config.element_spacing, orientation),
                orientation,
            }
        })
        .collect();

    Ok(Scenario { config: config.clone(), bs_elements, scatterers, ris_list })
}
