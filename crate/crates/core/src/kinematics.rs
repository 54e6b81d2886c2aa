//! Trajectories, phase frequencies and the nonrelativistic guard.
//!
//! Natural units throughout: ħ = c = 1 and the acceleration window `T` sets the time
//! scale. Inputs are given in the figure-caption units (1/T, c/T, 1/(c²T), cT), which
//! with `T = 1` are plain numbers.

use serde::Serialize;

use crate::error::{invalid, Error, Result};

/// Largest allowed final drive velocity `aT`, in units of c.
pub const VELOCITY_BOUND: f64 = 0.01;

/// Uniform acceleration `a` along +z for `0 <= t <= T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DriveConfig {
    accel: f64,
    duration: f64,
}

impl DriveConfig {
    /// Checked drive: `a >= 0`, `T > 0` and `aT <= 0.01`.
    pub fn new(accel: f64, duration: f64) -> Result<Self> {
        let drive = Self::unguarded(accel, duration)?;
        if accel * duration > VELOCITY_BOUND {
            return Err(invalid(format!(
                "final velocity aT = {} exceeds {VELOCITY_BOUND}c",
                accel * duration
            )));
        }
        Ok(drive)
    }

    /// Drive without the velocity bound. Used by validation runs that must report
    /// on out-of-regime parameters instead of refusing them.
    pub fn unguarded(accel: f64, duration: f64) -> Result<Self> {
        if !(accel.is_finite() && accel >= 0.0) {
            return Err(invalid(format!("acceleration must be finite and >= 0, got {accel}")));
        }
        if !(duration.is_finite() && duration > 0.0) {
            return Err(invalid(format!("duration must be finite and > 0, got {duration}")));
        }
        Ok(Self { accel, duration })
    }

    pub fn accel(&self) -> f64 {
        self.accel
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    /// Same window, different acceleration. The velocity bound is not checked.
    pub fn with_accel(&self, accel: f64) -> Result<Self> {
        Self::unguarded(accel, self.duration)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mass {
    Finite(f64),
    Infinite,
}

impl Mass {
    /// `1/M`, zero for an infinitely heavy detector.
    pub fn inverse(&self) -> f64 {
        match *self {
            Mass::Finite(m) => 1.0 / m,
            Mass::Infinite => 0.0,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Mass::Finite(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetectorConfig {
    gap: f64,
    mass: Mass,
    coupling: f64,
}

impl DetectorConfig {
    pub fn new(gap: f64, mass: Mass, coupling: f64) -> Result<Self> {
        if !(gap.is_finite() && gap > 0.0) {
            return Err(invalid(format!("gap must be finite and > 0, got {gap}")));
        }
        if let Mass::Finite(m) = mass {
            if !(m.is_finite() && m > 0.0) {
                return Err(invalid(format!("mass must be > 0 or infinite, got {m}")));
            }
        }
        if !(coupling.is_finite() && coupling > 0.0) {
            return Err(invalid(format!("coupling must be finite and > 0, got {coupling}")));
        }
        Ok(Self { gap, mass, coupling })
    }

    pub fn gap(&self) -> f64 {
        self.gap
    }

    pub fn mass(&self) -> Mass {
        self.mass
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn with_gap(&self, gap: f64) -> Result<Self> {
        Self::new(gap, self.mass, self.coupling)
    }

    pub fn with_mass(&self, mass: Mass) -> Result<Self> {
        Self::new(self.gap, mass, self.coupling)
    }
}

/// Photon momentum in spherical coordinates about the acceleration axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonCoords {
    k: f64,
    z: f64,
    phi: f64,
}

impl PhotonCoords {
    pub fn new(k: f64, z: f64) -> Result<Self> {
        Self::with_phi(k, z, 0.0)
    }

    pub fn with_phi(k: f64, z: f64, phi: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(invalid(format!("photon momentum must be > 0, got {k}")));
        }
        if !(-1.0..=1.0).contains(&z) {
            return Err(invalid(format!("z = cos(theta) must lie in [-1, 1], got {z}")));
        }
        if !phi.is_finite() {
            return Err(invalid("azimuth must be finite"));
        }
        Ok(Self { k, z, phi })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn kz(&self) -> f64 {
        self.k * self.z
    }

    pub fn k_vec(&self) -> [f64; 3] {
        let s = (1.0 - self.z * self.z).max(0.0).sqrt();
        let (sp, cp) = self.phi.sin_cos();
        [self.k * s * cp, self.k * s * sp, self.k * self.z]
    }
}

/// z-displacement of the driven centre of mass.
pub fn trajectory_z(t: f64, drive: &DriveConfig) -> f64 {
    let (a, tt) = (drive.accel, drive.duration);
    if t <= 0.0 {
        0.0
    } else if t <= tt {
        0.5 * a * t * t
    } else {
        0.5 * a * tt * (2.0 * t - tt)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FiniteMassFrequencies {
    /// ω + k²/2M
    pub omega_0: f64,
    /// ω₀ − p·k/M
    pub omega_m: f64,
    /// ω_M − a k_z T
    pub omega_m_prime: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrequencySet {
    pub omega: f64,
    pub omega_prime: f64,
    pub finite_mass: Option<FiniteMassFrequencies>,
}

/// Phase frequencies for photon momentum `coords`.
///
/// `p_dot_k` switches on the centre-of-mass corrections. With an infinite mass those
/// corrections vanish and `omega_m == omega`.
pub fn frequencies(
    coords: &PhotonCoords,
    det: &DetectorConfig,
    drive: &DriveConfig,
    p_dot_k: Option<f64>,
) -> Result<FrequencySet> {
    let shift = drive.accel * coords.kz() * drive.duration;
    let omega = det.gap + coords.k;
    let omega_prime = omega - shift;
    let finite_mass = match p_dot_k {
        None => None,
        Some(pk) => {
            let inv_m = det.mass.inverse();
            let omega_0 = omega + 0.5 * coords.k * coords.k * inv_m;
            let omega_m = omega_0 - pk * inv_m;
            let omega_m_prime = omega_m - shift;
            if !(omega_m > 0.0) {
                return Err(Error::NonPositiveFrequency {
                    which: "omega_m",
                    value: omega_m,
                });
            }
            if !(omega_m_prime > 0.0) {
                return Err(Error::NonPositiveFrequency {
                    which: "omega_m_prime",
                    value: omega_m_prime,
                });
            }
            Some(FiniteMassFrequencies {
                omega_0,
                omega_m,
                omega_m_prime,
            })
        }
    };
    Ok(FrequencySet {
        omega,
        omega_prime,
        finite_mass,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidationReport {
    /// Initial velocity spread `2σ√2/(LM)`.
    pub v0: f64,
    /// Velocity gained from the drive, `aT`.
    pub a_t: f64,
    pub total: f64,
    pub bound: f64,
    /// `v0 + aT <= bound` read as a hard inequality.
    pub strict_pass: bool,
    /// Order-of-magnitude reading: `aT <= bound` and `v0 + aT <= 2 bound`.
    pub pass: bool,
}

/// Nonrelativistic check for a wavepacket of width `wavepacket_l` truncated at `sigma`
/// standard deviations.
pub fn validate_nonrelativistic(
    det: &DetectorConfig,
    drive: &DriveConfig,
    wavepacket_l: f64,
    sigma: f64,
) -> ValidationReport {
    let v0 = 2.0 * sigma * std::f64::consts::SQRT_2 / wavepacket_l * det.mass.inverse();
    let a_t = drive.accel * drive.duration;
    let total = v0 + a_t;
    ValidationReport {
        v0,
        a_t,
        total,
        bound: VELOCITY_BOUND,
        strict_pass: total <= VELOCITY_BOUND,
        pass: a_t <= VELOCITY_BOUND && total <= 2.0 * VELOCITY_BOUND,
    }
}
