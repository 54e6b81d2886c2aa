//! Run configuration: a TOML file of dotted keys such as `detector.gap = 0.2`.
//!
//! Every key is optional and defaults to the reference parameters (Ω = 0.2/T,
//! M = 10/(c²T), a = 8e-3 c/T, T = 1, L = 100 cT). Units are those of the figure
//! captions: 1/T for frequencies, c/T for accelerations, 1/(c²T) for masses and cT
//! for lengths. `detector.mass = inf` selects the classical trajectory.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize, Serializer};

use crate::kinematics::{DetectorConfig, DriveConfig, Mass};
use crate::probability::WavepacketConfig;
use crate::quadrature::QuadratureConfig;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectorSection {
    pub gap: f64,
    #[serde(serialize_with = "mass_repr")]
    pub mass: f64,
    pub coupling: f64,
}

impl Default for DetectorSection {
    fn default() -> Self {
        Self {
            gap: 0.2,
            mass: 10.0,
            coupling: 1.0,
        }
    }
}

/// JSON has no infinity; an infinite mass is written as the string `"inf"`.
fn mass_repr<S: Serializer>(mass: &f64, s: S) -> Result<S::Ok, S::Error> {
    if mass.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*mass)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DriveSection {
    pub accel: f64,
    pub duration: f64,
}

impl Default for DriveSection {
    fn default() -> Self {
        Self {
            accel: 8e-3,
            duration: 1.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WavepacketSection {
    pub width: f64,
    pub sigma_guard: f64,
}

impl Default for WavepacketSection {
    fn default() -> Self {
        Self {
            width: 100.0,
            sigma_guard: 3.5,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub k_min: f64,
    pub k_max: f64,
    pub k_count: usize,
    pub z_count: usize,
    pub r_min: f64,
    pub r_max: f64,
    pub r_count: usize,
    pub zeta_count: usize,
    /// Extra gaps for the angle-integrated spectra.
    pub gaps: Vec<f64>,
    /// Accelerations for the total-probability scaling report.
    pub accels: Vec<f64>,
    /// Mass multipliers for the limit study.
    pub gammas: Vec<f64>,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            k_min: 0.05,
            k_max: 60.0,
            k_count: 240,
            z_count: 81,
            r_min: 0.05,
            r_max: 3.0,
            r_count: 60,
            zeta_count: 37,
            gaps: vec![0.1, 0.2, 0.4],
            accels: vec![1e-3, 2e-3, 4e-3, 8e-3],
            gammas: vec![1.0, 2.0, 4.0, 8.0, 16.0],
        }
    }
}

impl GridSpec {
    pub fn k_values(&self) -> Vec<f64> {
        linspace(self.k_min, self.k_max, self.k_count)
    }

    pub fn z_values(&self) -> Vec<f64> {
        linspace(-1.0, 1.0, self.z_count)
    }

    pub fn r_values(&self) -> Vec<f64> {
        linspace(self.r_min, self.r_max, self.r_count)
    }

    pub fn zeta_values(&self) -> Vec<f64> {
        linspace(-1.0, 1.0, self.zeta_count)
    }
}

/// `n >= 2` evenly spaced points, each formed as `(lo·(n−1−i) + hi·i)/(n−1)` so
/// both ends and the symmetric points of `[−1, 1]` come out exact.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let last = (n - 1) as f64;
    (0..n)
        .map(|i| {
            let t = i as f64;
            (lo * (last - t) + hi * t) / last
        })
        .collect()
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub out: Option<PathBuf>,
    /// Worker threads; 0 uses every core.
    pub workers: usize,
}

/// Configuration as read from disk, with command-line overrides applied.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub detector: DetectorSection,
    pub drive: DriveSection,
    pub wavepacket: WavepacketSection,
    pub quadrature: QuadratureConfig,
    pub grids: GridSpec,
    pub run: RunSection,
}

/// Validated physical inputs.
#[derive(Debug, Clone, Copy)]
pub struct Resolved {
    pub detector: DetectorConfig,
    /// Drive without the velocity bound; [`RunConfig::resolve`] checks the bound
    /// unless asked not to.
    pub drive: DriveConfig,
    pub wavepacket: WavepacketConfig,
    pub quadrature: QuadratureConfig,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        Self::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    /// Checks the grids and builds the domain types. With `guard_velocity` the
    /// drive must satisfy `aT <= 0.01`.
    pub fn resolve(&self, guard_velocity: bool) -> Result<Resolved, String> {
        let d = &self.detector;
        let mass = if d.mass == f64::INFINITY {
            Mass::Infinite
        } else {
            Mass::Finite(d.mass)
        };
        let detector = DetectorConfig::new(d.gap, mass, d.coupling).map_err(|e| e.to_string())?;
        let drive = if guard_velocity {
            DriveConfig::new(self.drive.accel, self.drive.duration)
        } else {
            DriveConfig::unguarded(self.drive.accel, self.drive.duration)
        }
        .map_err(|e| e.to_string())?;
        let wavepacket = WavepacketConfig::new(self.wavepacket.width, self.wavepacket.sigma_guard)
            .map_err(|e| e.to_string())?;
        self.quadrature.validate().map_err(|e| e.to_string())?;
        self.check_grids()?;
        Ok(Resolved {
            detector,
            drive,
            wavepacket,
            quadrature: self.quadrature,
        })
    }

    fn check_grids(&self) -> Result<(), String> {
        let g = &self.grids;
        let finite = |x: f64| x.is_finite();
        if !(finite(g.k_min) && finite(g.k_max) && g.k_min > 0.0 && g.k_min < g.k_max) {
            return Err(format!("grids.k range must satisfy 0 < k_min < k_max, got [{}, {}]", g.k_min, g.k_max));
        }
        if !(finite(g.r_min) && finite(g.r_max) && g.r_min >= 0.0 && g.r_min < g.r_max) {
            return Err(format!("grids.r range must satisfy 0 <= r_min < r_max, got [{}, {}]", g.r_min, g.r_max));
        }
        for (name, n) in [
            ("k_count", g.k_count),
            ("z_count", g.z_count),
            ("r_count", g.r_count),
            ("zeta_count", g.zeta_count),
        ] {
            if n < 2 {
                return Err(format!("grids.{name} must be >= 2, got {n}"));
            }
        }
        for (name, list) in [("gaps", &g.gaps), ("accels", &g.accels), ("gammas", &g.gammas)] {
            if list.is_empty() {
                return Err(format!("grids.{name} must not be empty"));
            }
        }
        if !g.gaps.iter().all(|&x| finite(x) && x > 0.0) {
            return Err("grids.gaps must be finite and > 0".into());
        }
        if !g.accels.iter().all(|&x| finite(x) && x >= 0.0) {
            return Err("grids.accels must be finite and >= 0".into());
        }
        if !g.gammas.iter().all(|&x| finite(x) && x > 0.0) {
            return Err("grids.gammas must be finite and > 0".into());
        }
        Ok(())
    }
}
