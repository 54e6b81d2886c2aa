//! Excitation probabilities and densities for the driven detector.
//!
//! Densities are per unit photon momentum `k` (and per unit `z = cos θ` where a `z`
//! argument is taken). The finite-mass densities average `|𝓙|²` over the Gaussian
//! centre-of-mass wavepacket `|φ̃(p)|² ∝ exp(−p²L²/2)`, either through the first
//! two Taylor coefficients in `p·k/M` or by Monte Carlo.

use std::cell::Cell;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::amplitude::{taylor_coefficients, time_integral_i, time_integral_j};
use crate::error::{invalid, Error, Result};
use crate::kinematics::{DetectorConfig, DriveConfig, Mass, PhotonCoords};
use crate::quadrature::{
    initial_window, integrate_adaptive, integrate_semi_infinite_generic, GaussianSamples,
    Adaptive, IntegralEstimate, McEstimate, Nested, QuadValue, QuadratureConfig,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WavepacketConfig {
    width_l: f64,
    sigma_guard: f64,
}

impl WavepacketConfig {
    pub fn new(width_l: f64, sigma_guard: f64) -> Result<Self> {
        if !(width_l.is_finite() && width_l > 0.0) {
            return Err(invalid(format!("wavepacket width must be > 0, got {width_l}")));
        }
        if !(sigma_guard.is_finite() && sigma_guard >= 0.0) {
            return Err(invalid(format!("sigma guard must be >= 0, got {sigma_guard}")));
        }
        Ok(Self {
            width_l,
            sigma_guard,
        })
    }

    pub fn width(&self) -> f64 {
        self.width_l
    }

    pub fn sigma_guard(&self) -> f64 {
        self.sigma_guard
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumPoint {
    pub k: f64,
    pub z: Option<f64>,
    pub density: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RecoilPoint {
    pub r: f64,
    pub zeta: f64,
    pub density: f64,
    pub est_error: f64,
}

/// `q² k / (8π²)`
fn emission_prefactor(det: &DetectorConfig, k: f64) -> f64 {
    det.coupling() * det.coupling() * k / (8.0 * PI * PI)
}

/// Rate at which the z-integrands oscillate, `2 a k T²`.
fn z_hint(drive: &DriveConfig, k: f64) -> f64 {
    2.0 * drive.accel() * k * drive.duration() * drive.duration()
}

/// Holds the first error raised inside an integrand; the integrand returns zero
/// from then on and the error is reported once the integral finishes.
struct FirstError(Cell<Option<Error>>);

impl FirstError {
    fn new() -> Self {
        Self(Cell::new(None))
    }

    fn guard<T: Default>(&self, r: Result<T>) -> T {
        match r {
            Ok(v) => v,
            Err(e) => {
                let prev = self.0.take();
                self.0.set(Some(prev.unwrap_or(e)));
                T::default()
            }
        }
    }

    fn check(self) -> Result<()> {
        match self.0.into_inner() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }
}

fn estimate(outer: Adaptive<Nested>, scale: f64) -> IntegralEstimate {
    IntegralEstimate {
        value: scale * outer.value.value,
        est_error: scale * outer.est_error,
        evaluations: outer.evaluations + outer.value.evaluations,
        converged: outer.converged && outer.value.converged,
    }
}

fn z_integral(
    density: impl Fn(f64) -> Result<f64>,
    k: f64,
    drive: &DriveConfig,
    quad: &QuadratureConfig,
) -> Result<IntegralEstimate> {
    let errors = FirstError::new();
    let hint = z_hint(drive, k);
    let r = integrate_adaptive(|z| errors.guard(density(z)), -1.0, 1.0, |_| hint, quad);
    errors.check()?;
    Ok(IntegralEstimate {
        value: r.value,
        est_error: r.est_error,
        evaluations: r.evaluations,
        converged: r.converged,
    })
}

fn k_integral(
    angular: impl Fn(f64) -> Result<IntegralEstimate>,
    det: &DetectorConfig,
    drive: &DriveConfig,
    quad: &QuadratureConfig,
) -> Result<IntegralEstimate> {
    let errors = FirstError::new();
    let start = initial_window(det.gap(), drive.duration());
    let hint = drive.duration();
    let r = integrate_semi_infinite_generic(
        |k| {
            if k <= 0.0 {
                return Nested::from(IntegralEstimate::zero());
            }
            Nested::from(errors.guard(angular(k)))
        },
        start,
        |_| hint,
        quad,
    );
    errors.check()?;
    Ok(estimate(r, 1.0))
}

/// `P_U(k, z) = q² k |𝓘|² / (8π²)`.
pub fn p_u_density(k: f64, z: f64, det: &DetectorConfig, drive: &DriveConfig) -> Result<f64> {
    let c = PhotonCoords::new(k, z)?;
    let amp = time_integral_i(&c, det, drive)?;
    Ok(emission_prefactor(det, k) * amp.value.norm_sqr())
}

/// `P_U(k) = ∫_{−1}^{1} P_U(k, z) dz`.
pub fn p_u_k(
    k: f64,
    det: &DetectorConfig,
    drive: &DriveConfig,
    quad: &QuadratureConfig,
) -> Result<IntegralEstimate> {
    PhotonCoords::new(k, 0.0)?;
    z_integral(|z| p_u_density(k, z, det, drive), k, drive, quad)
}

/// Total excitation probability `∫_0^∞ P_U(k) dk`.
pub fn p_u_total(
    det: &DetectorConfig,
    drive: &DriveConfig,
    quad: &QuadratureConfig,
) -> Result<IntegralEstimate> {
    quad.validate()?;
    k_integral(|k| p_u_k(k, det, drive, quad), det, drive, quad)
}

/// Taylor-reduced finite-mass density `q² k [J1 + k² J2 / (ML)²] / (8π²)`.
///
/// An infinite mass reduces to [`p_u_density`].
pub fn p_m_density_kz(
    k: f64,
    z: f64,
    det: &DetectorConfig,
    drive: &DriveConfig,
    wp: &WavepacketConfig,
) -> Result<f64> {
    let c = PhotonCoords::new(k, z)?;
    let inv_m = det.mass().inverse();
    if inv_m == 0.0 {
        return p_u_density(k, z, det, drive);
    }
    let t = taylor_coefficients(&c, det, drive)?;
    let spread = k * inv_m / wp.width();
    Ok(emission_prefactor(det, k) * (t.j1 + spread * spread * t.j2))
}

/// Monte Carlo estimate of the finite-mass density without the Taylor reduction,
/// over freshly drawn wavepacket samples.
pub fn p_m_density_kz_exact(
    k: f64,
    z: f64,
    det: &DetectorConfig,
    drive: &DriveConfig,
    wp: &WavepacketConfig,
    quad: &QuadratureConfig,
) -> Result<McEstimate> {
    let samples = GaussianSamples::draw(wp.width(), quad)?;
    p_m_density_kz_sampled(k, z, det, drive, &samples)
}

/// As [`p_m_density_kz_exact`] over a given sample set. Each sample carries its own
/// photon azimuth; samples with a non-positive effective frequency are rejected.
pub fn p_m_density_kz_sampled(
    k: f64,
    z: f64,
    det: &DetectorConfig,
    drive: &DriveConfig,
    samples: &GaussianSamples,
) -> Result<McEstimate> {
    PhotonCoords::new(k, z)?;
    let pref = emission_prefactor(det, k);
    let r = samples.expectation(|p, phi| {
        let c = PhotonCoords::with_phi(k, z, phi).ok()?;
        time_integral_j(p, &c, det, drive)
            .ok()
            .map(|a| a.value.norm_sqr())
    });
    Ok(McEstimate {
        mean: pref * r.mean,
        stderr: pref * r.stderr,
        ..r
    })
}

/// `P_M(k) = ∫_{−1}^{1} P_M(k, z) dz` with the Taylor-reduced density.
pub fn p_m_k(
    k: f64,
    det: &DetectorConfig,
    drive: &DriveConfig,
    wp: &WavepacketConfig,
    quad: &QuadratureConfig,
) -> Result<IntegralEstimate> {
    PhotonCoords::new(k, 0.0)?;
    z_integral(|z| p_m_density_kz(k, z, det, drive, wp), k, drive, quad)
}

/// Total finite-mass excitation probability `∫_0^∞ P_M(k) dk`.
pub fn p_m_total(
    det: &DetectorConfig,
    drive: &DriveConfig,
    wp: &WavepacketConfig,
    quad: &QuadratureConfig,
) -> Result<IntegralEstimate> {
    quad.validate()?;
    k_integral(|k| p_m_k(k, det, drive, wp, quad), det, drive, quad)
}

/// Gaussian support in `k` for recoil `r` at relative cosine `zeta`: the weight
/// `exp(−(k + rζ)² L²/2)` is below `e^{-50}` of its peak outside.
fn recoil_window(r: f64, zeta: f64, width_l: f64) -> (f64, f64) {
    let centre = -r * zeta;
    let reach = 10.0 / width_l;
    ((centre - reach).max(0.0), centre.max(0.0) + reach)
}

/// Recoil density `P_M(r, ζ)`.
///
/// ```text
/// L³q²/(2(2π)^{5/2}) ∫_0^∞ dk ∫_{−1}^{1} dz k exp(−(r² + k² + 2rkζ)L²/2)
///                                 × [J1 + (rkζ + k²)² J2 / M²]
/// ```
///
/// The Gaussian confines `k` to within `10/L` of `−rζ`; only that window is integrated.
pub fn p_m_recoil_density(
    r: f64,
    zeta: f64,
    det: &DetectorConfig,
    drive: &DriveConfig,
    wp: &WavepacketConfig,
    quad: &QuadratureConfig,
) -> Result<IntegralEstimate> {
    quad.validate()?;
    let Mass::Finite(mass) = det.mass() else {
        return Err(invalid("recoil density needs a finite mass"));
    };
    if !(r.is_finite() && r >= 0.0) {
        return Err(invalid(format!("recoil momentum must be >= 0, got {r}")));
    }
    if !(-1.0..=1.0).contains(&zeta) {
        return Err(invalid(format!("zeta must lie in [-1, 1], got {zeta}")));
    }
    let l = wp.width();
    let q = det.coupling();
    let pref = l.powi(3) * q * q / (2.0 * (2.0 * PI).powf(2.5));
    let (lo, hi) = recoil_window(r, zeta, l);
    let errors = FirstError::new();
    let outer = integrate_adaptive(
        |k| {
            if k <= 0.0 {
                return Nested::from(IntegralEstimate::zero());
            }
            let exponent = -0.5 * (r * r + k * k + 2.0 * r * k * zeta) * l * l;
            let weight = k * exponent.exp();
            if weight == 0.0 {
                return Nested::from(IntegralEstimate::zero());
            }
            let corr = (r * k * zeta + k * k).powi(2) / (mass * mass);
            let inner = z_integral(
                |z| {
                    let c = PhotonCoords::new(k, z)?;
                    let t = taylor_coefficients(&c, det, drive)?;
                    Ok(t.j1 + corr * t.j2)
                },
                k,
                drive,
                quad,
            );
            Nested::from(errors.guard(inner)).scaled(weight)
        },
        lo,
        hi,
        |_| 0.25 * l,
        quad,
    );
    errors.check()?;
    Ok(estimate(outer, pref))
}

/// Joint density for recoil `r_vec` and photon momentum `k_vec`:
/// `q²/((2π)² 4πk) |φ̃(r + k)|² |𝓙|²`, with `𝓙` at the initial momentum `p = r + k`.
pub fn p_m_joint(
    r_vec: &[f64; 3],
    k_vec: &[f64; 3],
    det: &DetectorConfig,
    drive: &DriveConfig,
    wp: &WavepacketConfig,
) -> Result<f64> {
    let k = (k_vec[0] * k_vec[0] + k_vec[1] * k_vec[1] + k_vec[2] * k_vec[2]).sqrt();
    if !(k > 0.0 && k.is_finite()) {
        return Err(invalid("photon momentum must be non-zero"));
    }
    let coords = PhotonCoords::with_phi(k, (k_vec[2] / k).clamp(-1.0, 1.0), k_vec[1].atan2(k_vec[0]))?;
    let p = [r_vec[0] + k_vec[0], r_vec[1] + k_vec[1], r_vec[2] + k_vec[2]];
    let p2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
    let l = wp.width();
    let packet = (l * l / (2.0 * PI)).powf(1.5) * (-0.5 * p2 * l * l).exp();
    let amp = time_integral_j(&p, &coords, det, drive)?;
    let q = det.coupling();
    Ok(q * q / (4.0 * PI * PI * 4.0 * PI * k) * packet * amp.value.norm_sqr())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitRow {
    pub gamma: f64,
    pub mass: f64,
    pub max_abs_dev: f64,
    pub rel_dev_at_peak: f64,
    /// Largest combined quadrature error of `P_M(k)` and `P_U(k)` over the grid.
    pub est_error: f64,
    /// Every `P_M(k)` integral for this mass met its tolerance.
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub rows: Vec<LimitRow>,
    /// Grid point of the largest `P_U(k)`.
    pub peak_k: f64,
    pub strictly_decreasing: bool,
    /// Every `P_U(k)` and `P_M(k)` integral met its tolerance.
    pub converged: bool,
}

/// Maximum `|P_M(k) − P_U(k)|` over `k_grid` for masses `base_mass · γ` at fixed
/// acceleration.
pub fn infinite_mass_limit_study(
    gammas: &[f64],
    base_mass: f64,
    det: &DetectorConfig,
    drive: &DriveConfig,
    wp: &WavepacketConfig,
    k_grid: &[f64],
    quad: &QuadratureConfig,
) -> Result<ConvergenceReport> {
    if gammas.is_empty() || k_grid.is_empty() {
        return Err(invalid("limit study needs at least one gamma and one k"));
    }
    if let Some(g) = gammas.iter().find(|g| !(g.is_finite() && **g > 0.0)) {
        return Err(invalid(format!("gamma must be > 0, got {g}")));
    }
    let reference = k_grid
        .par_iter()
        .map(|&k| p_u_k(k, det, drive, quad))
        .collect::<Result<Vec<_>>>()?;
    let mut converged = reference.iter().all(|e| e.converged);
    let (peak, _) = reference
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, e)| {
            if e.value > bv {
                (i, e.value)
            } else {
                (bi, bv)
            }
        });
    let mut rows = Vec::with_capacity(gammas.len());
    for &gamma in gammas {
        let mass = base_mass * gamma;
        let heavy = det.with_mass(Mass::Finite(mass))?;
        let massive = k_grid
            .par_iter()
            .map(|&k| p_m_k(k, &heavy, drive, wp, quad))
            .collect::<Result<Vec<_>>>()?;
        let mut row = LimitRow {
            gamma,
            mass,
            max_abs_dev: 0.0,
            rel_dev_at_peak: 0.0,
            est_error: 0.0,
            converged: massive.iter().all(|e| e.converged),
        };
        for (i, (m, u)) in massive.iter().zip(&reference).enumerate() {
            let dev = (m.value - u.value).abs();
            row.max_abs_dev = row.max_abs_dev.max(dev);
            row.est_error = row.est_error.max(m.est_error + u.est_error);
            if i == peak {
                row.rel_dev_at_peak = dev / u.value.abs();
            }
        }
        converged &= row.converged;
        rows.push(row);
    }
    let strictly_decreasing = rows.windows(2).all(|w| w[1].max_abs_dev < w[0].max_abs_dev);
    Ok(ConvergenceReport {
        rows,
        peak_k: k_grid[peak],
        strictly_decreasing,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amplitude::time_integral_i;
    use crate::quadrature::integrate_1d;
    use std::f64::consts::SQRT_2;

    fn drive() -> DriveConfig {
        DriveConfig::new(8e-3, 1.0).unwrap()
    }

    fn massive(mass: f64) -> DetectorConfig {
        DetectorConfig::new(0.2, Mass::Finite(mass), 1.0).unwrap()
    }

    fn wp() -> WavepacketConfig {
        WavepacketConfig::new(100.0, 3.5).unwrap()
    }

    fn few_samples() -> QuadratureConfig {
        QuadratureConfig {
            mc_samples: 20_000,
            ..QuadratureConfig::default()
        }
    }

    #[test]
    fn wavepacket_rejects_bad_width() {
        assert!(WavepacketConfig::new(0.0, 3.5).is_err());
        assert!(WavepacketConfig::new(f64::NAN, 3.5).is_err());
        assert!(WavepacketConfig::new(1.0, -1.0).is_err());
    }

    #[test]
    fn transverse_photons_are_dark() {
        let det = massive(10.0);
        for &k in &[0.05, 1.0, 30.0] {
            assert_eq!(p_u_density(k, 0.0, &det, &drive()).unwrap(), 0.0);
            assert_eq!(p_m_density_kz(k, 0.0, &det, &drive(), &wp()).unwrap(), 0.0);
            let mc = p_m_density_kz_exact(k, 0.0, &det, &drive(), &wp(), &few_samples()).unwrap();
            assert!(mc.mean.abs() <= 3.0 * mc.stderr + 1e-30, "{mc:?}");
        }
    }

    #[test]
    fn inertial_detector_is_dark() {
        let still = DriveConfig::new(0.0, 1.0).unwrap();
        let det = massive(10.0);
        let quad = QuadratureConfig::default();
        for &k in &[0.05, 1.0, 30.0] {
            for &z in &[-1.0, 0.4, 1.0] {
                assert_eq!(p_u_density(k, z, &det, &still).unwrap(), 0.0);
                assert_eq!(p_m_density_kz(k, z, &det, &still, &wp()).unwrap(), 0.0);
            }
            assert_eq!(p_u_k(k, &det, &still, &quad).unwrap().value, 0.0);
            assert_eq!(p_m_k(k, &det, &still, &wp(), &quad).unwrap().value, 0.0);
        }
        assert_eq!(p_u_total(&det, &still, &quad).unwrap().value, 0.0);
        let r = [0.01, 0.0, -0.02];
        let kv = [0.3, 0.1, 0.5];
        assert_eq!(p_m_joint(&r, &kv, &det, &still, &wp()).unwrap(), 0.0);
    }

    #[test]
    fn heavy_detector_matches_classical_density() {
        // The recoil shift k²/2M moves the density by ~k²/M, so the grid stops at k = 3.
        let heavy = massive(1e9);
        for i in 0..11 {
            for j in 0..9 {
                let k = 0.1 + 0.29 * i as f64;
                let z = -1.0 + 0.25 * j as f64;
                let u = p_u_density(k, z, &heavy, &drive()).unwrap();
                let m = p_m_density_kz(k, z, &heavy, &drive(), &wp()).unwrap();
                assert!((m - u).abs() <= 1e-6 * u.abs(), "k={k} z={z}: {m:e} vs {u:e}");
            }
        }
    }

    #[test]
    fn heavy_detector_is_classical_with_shifted_gap() {
        let heavy = massive(1e9);
        for &(k, z) in &[(25.1, -1.0), (60.0, 0.4), (3.0, 0.9)] {
            let shifted = heavy.with_gap(0.2 + k * k / 2e9).unwrap();
            let u = p_u_density(k, z, &shifted, &drive()).unwrap();
            let m = p_m_density_kz(k, z, &heavy, &drive(), &wp()).unwrap();
            assert!((m - u).abs() <= 1e-9 * u.abs(), "k={k} z={z}: {m:e} vs {u:e}");
        }
    }

    #[test]
    fn infinite_mass_reduces_to_classical_density() {
        let det = DetectorConfig::new(0.2, Mass::Infinite, 1.0).unwrap();
        let u = p_u_density(2.0, 0.6, &det, &drive()).unwrap();
        assert_eq!(p_m_density_kz(2.0, 0.6, &det, &drive(), &wp()).unwrap(), u);
    }

    #[test]
    fn mass_correction_carries_the_sign_of_j2() {
        let det = massive(10.0);
        for i in 0..15 {
            for j in 0..7 {
                let k = 0.05 + 4.0 * i as f64;
                let z = -0.9 + 0.3 * j as f64;
                let c = PhotonCoords::new(k, z).unwrap();
                let t = taylor_coefficients(&c, &det, &drive()).unwrap();
                let full = p_m_density_kz(k, z, &det, &drive(), &wp()).unwrap();
                let bare = emission_prefactor(&det, k) * t.j1;
                let diff = full - bare;
                if t.j2 == 0.0 {
                    assert_eq!(diff, 0.0);
                } else {
                    assert_eq!(diff.signum(), t.j2.signum(), "k={k} z={z}");
                }
            }
        }
    }

    #[test]
    fn taylor_density_agrees_with_monte_carlo() {
        let det = massive(10.0);
        let samples = GaussianSamples::draw(wp().width(), &few_samples()).unwrap();
        for &(k, z) in &[(0.3, 0.9), (1.0, -0.5), (4.0, 0.2), (20.0, -1.0)] {
            let mc = p_m_density_kz_sampled(k, z, &det, &drive(), &samples).unwrap();
            let taylor = p_m_density_kz(k, z, &det, &drive(), &wp()).unwrap();
            assert_eq!(mc.rejected, 0);
            assert!((mc.mean - taylor).abs() <= 3.0 * mc.stderr, "k={k} z={z}: {mc:?} vs {taylor:e}");
        }
    }

    #[test]
    fn heavy_monte_carlo_matches_classical_density() {
        let heavy = massive(1e9);
        let mc = p_m_density_kz_exact(1.5, 0.7, &heavy, &drive(), &wp(), &few_samples()).unwrap();
        let u = p_u_density(1.5, 0.7, &heavy, &drive()).unwrap();
        assert!((mc.mean - u).abs() <= 3.0 * mc.stderr + 1e-6 * u, "{mc:?} vs {u:e}");
    }

    #[test]
    fn exact_density_does_not_depend_on_photon_azimuth() {
        let det = massive(10.0);
        let samples = GaussianSamples::draw(wp().width(), &few_samples()).unwrap();
        let (k, z) = (2.0, 0.6);
        let pref = emission_prefactor(&det, k);
        let at = |phi: f64| {
            let c = PhotonCoords::with_phi(k, z, phi).unwrap();
            samples.expectation(|p, _| Some(pref * time_integral_j(p, &c, &det, &drive()).ok()?.value.norm_sqr()))
        };
        let reference = at(0.0);
        for &phi in &[0.7, 2.0, 4.5] {
            let other = at(phi);
            let spread = (reference.stderr.powi(2) + other.stderr.powi(2)).sqrt();
            assert!((other.mean - reference.mean).abs() <= 4.0 * spread, "phi={phi}");
        }
    }

    #[test]
    fn truncated_wavepacket_mass_matches_erf() {
        let l = wp().width();
        let cut = 3.5 * SQRT_2 / l;
        let density = |p: f64| l / (2.0 * PI).sqrt() * (-0.5 * p * p * l * l).exp();
        let axis = integrate_1d(density, -cut, cut, |_| 1.0, &QuadratureConfig::default()).unwrap();
        let numeric = axis.value.powi(3);
        let analytic = libm::erf(3.5).powi(3);
        assert!((numeric - analytic).abs() <= 1e-6, "{numeric} vs {analytic}");
        let samples = GaussianSamples::draw(l, &few_samples()).unwrap();
        assert!(samples.momenta().iter().flatten().all(|p| p.abs() <= cut));
    }

    #[test]
    fn joint_density_is_confined_by_the_wavepacket() {
        let det = massive(10.0);
        let l = wp().width();
        let kv = [0.2, -0.1, 0.8];
        let centre = [-kv[0], -kv[1], -kv[2]];
        let off = [centre[0], centre[1], centre[2] + 5.0 / l];
        let at_centre = p_m_joint(&centre, &kv, &det, &drive(), &wp()).unwrap();
        let away = p_m_joint(&off, &kv, &det, &drive(), &wp()).unwrap();
        assert!(at_centre > 0.0);
        assert!(away <= (-12.0f64).exp() * at_centre, "{away:e} vs {at_centre:e}");
    }

    #[test]
    fn joint_density_at_zero_momentum_is_classical_amplitude_with_shifted_gap() {
        let det = massive(10.0);
        let kv = [0.0, 0.6, 0.8];
        let r = [0.0, -0.6, -0.8];
        let joint = p_m_joint(&r, &kv, &det, &drive(), &wp()).unwrap();
        let shifted = DetectorConfig::new(0.2 + 0.5 / 10.0, Mass::Infinite, 1.0).unwrap();
        let c = PhotonCoords::with_phi(1.0, 0.8, PI / 2.0).unwrap();
        let amp = time_integral_i(&c, &shifted, &drive()).unwrap().value.norm_sqr();
        let l = wp().width();
        let expected = 1.0 / (16.0 * PI.powi(3)) * (l * l / (2.0 * PI)).powf(1.5) * amp;
        assert!((joint - expected).abs() <= 1e-12 * expected, "{joint:e} vs {expected:e}");
    }

    #[test]
    fn recoil_density_needs_finite_mass_and_valid_angles() {
        let quad = QuadratureConfig::default();
        let inf = DetectorConfig::new(0.2, Mass::Infinite, 1.0).unwrap();
        assert!(p_m_recoil_density(0.01, 0.0, &inf, &drive(), &wp(), &quad).is_err());
        let det = massive(10.0);
        assert!(p_m_recoil_density(-0.01, 0.0, &det, &drive(), &wp(), &quad).is_err());
        assert!(p_m_recoil_density(0.01, 1.5, &det, &drive(), &wp(), &quad).is_err());
    }

    #[test]
    fn recoil_along_the_photon_is_suppressed() {
        // For ζ >= 0, |r + k| >= r, so the wavepacket factor is at most exp(−r²L²/2).
        let det = massive(10.0);
        let quad = QuadratureConfig::default();
        let r = 0.3;
        let back = p_m_recoil_density(r, -1.0, &det, &drive(), &wp(), &quad).unwrap().value;
        for &zeta in &[0.0, 0.5, 1.0] {
            let along = p_m_recoil_density(r, zeta, &det, &drive(), &wp(), &quad).unwrap().value;
            assert!(along >= 0.0 && along <= (-12.0f64).exp() * back, "zeta={zeta}: {along:e} vs {back:e}");
        }
    }

    #[test]
    fn recoil_density_is_non_negative_and_converged() {
        let det = massive(10.0);
        let quad = QuadratureConfig::default();
        for &r in &[0.0, 0.01, 0.03] {
            for &zeta in &[-1.0, -0.3, 0.5, 1.0] {
                let e = p_m_recoil_density(r, zeta, &det, &drive(), &wp(), &quad).unwrap();
                assert!(e.converged && e.value >= -quad.abs_tol, "r={r} zeta={zeta}: {e:?}");
            }
        }
    }

    #[test]
    fn limit_study_deviation_shrinks_with_mass() {
        let det = massive(10.0);
        let grid = [0.3, 0.6, 1.0, 2.0, 4.0];
        let quad = QuadratureConfig::default();
        let report =
            infinite_mass_limit_study(&[1.0, 2.0, 4.0], 10.0, &det, &drive(), &wp(), &grid, &quad)
                .unwrap();
        assert_eq!(report.rows.len(), 3);
        assert!(report.strictly_decreasing && report.converged, "{report:?}");
        assert_eq!(report.rows[2].mass, 40.0);
        assert!(grid.contains(&report.peak_k));
        assert!(infinite_mass_limit_study(&[], 10.0, &det, &drive(), &wp(), &grid, &quad).is_err());
    }
}
