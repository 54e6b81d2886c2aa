//! First-order excitation amplitudes of the driven detector.
//!
//! Both the infinitely heavy detector and the quantized centre of mass lead to the
//! same time integral
//!
//! ```text
//! 𝓘(ω) = ∫ exp(iωt − i k_z f(t)) dt
//!      = 1/(iω) − exp(iωT − iαT²/2)/(iω') + ∫_0^T exp(iωt − iαt²/2) dt
//! ```
//!
//! with `α = a k_z` and `ω' = ω − αT`; only the effective frequency differs. The
//! `δ(ω)` pieces of the regularised tails are dropped since `ω > 0`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::kinematics::{frequencies, DetectorConfig, DriveConfig, PhotonCoords};
use crate::quadrature::{integrate_complex, ComplexEstimate, QuadratureConfig};
use crate::specfun::{chirp_unchecked, ChirpBranch};

/// Half the chirp phase `|α|T²/2` accumulated over the window, below which the
/// amplitude is summed as a power series in α.
pub const SERIES_MAX_PHASE: f64 = 1.0;

const SERIES_TERMS: usize = 24;

const ASYMPTOTIC_TERMS: usize = 60;

/// Largest `|α|/min(ω, ω')²` for which the inverse-frequency expansion is tried.
const ASYMPTOTIC_MAX_RATE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AmplitudeResult {
    #[serde(skip)]
    pub value: Complex64,
    pub branch: ChirpBranch,
    /// Relative roundoff bound from the terms that cancel in the sum.
    pub est_error: f64,
}

/// `∫_0^1 u^m exp(ixu) du` for `m = 0..=mmax`.
fn power_moments(x: f64, mmax: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); mmax + 1];
    if x.abs() <= 2.0 {
        for (m, e) in out.iter_mut().enumerate() {
            let mut term = Complex64::new(1.0, 0.0);
            let mut sum = Complex64::new(1.0 / (m as f64 + 1.0), 0.0);
            for j in 1..60 {
                term *= Complex64::new(0.0, x / j as f64);
                let add = term / (m + j + 1) as f64;
                sum += add;
                if add.norm() < 1e-18 * sum.norm() {
                    break;
                }
            }
            *e = sum;
        }
        return out;
    }
    let ix = Complex64::new(0.0, x);
    let end = Complex64::from_polar(1.0, x);
    // Upward recursion loses nothing while m <= |x|, downward while m > |x|.
    let split = (x.abs().floor() as usize).min(mmax);
    out[0] = (end - 1.0) / ix;
    for m in 1..=split {
        out[m] = (end - m as f64 * out[m - 1]) / ix;
    }
    if split < mmax {
        let top = mmax + 30 + x.abs().ceil() as usize;
        let mut e = end / (top as f64 + 1.0);
        for m in (split + 1..=top).rev() {
            if m <= mmax {
                out[m] = e;
            }
            e = (end - ix * e) / m as f64;
        }
    }
    out
}

fn check_frequencies(omega: f64, omega_prime: f64) -> Result<()> {
    if !(omega > 0.0) {
        return Err(Error::NonPositiveFrequency {
            which: "omega",
            value: omega,
        });
    }
    if !(omega_prime > 0.0) {
        return Err(Error::NonPositiveFrequency {
            which: "omega_prime",
            value: omega_prime,
        });
    }
    Ok(())
}

/// The two tails minus `∫_0^T exp(iωt) dt`, written without cancellation:
/// `exp(iωT)/(iω) − exp(iωT − iθ)/(iω')` with `θ = αT²/2`.
fn tails(omega: f64, alpha: f64, duration: f64) -> Complex64 {
    let theta = 0.5 * alpha * duration * duration;
    let omega_prime = omega - alpha * duration;
    let half = (0.5 * theta).sin();
    // 1 − exp(−iθ)
    let one_minus = Complex64::new(2.0 * half * half, theta.sin());
    let numerator = omega * one_minus - alpha * duration;
    Complex64::from_polar(1.0, omega * duration) * Complex64::new(0.0, -1.0) * numerator
        / (omega * omega_prime)
}

/// `∫_0^T exp(iωt)(exp(−iαt²/2) − 1) dt` as a power series in `α`.
fn chirp_excess_series(omega: f64, alpha: f64, duration: f64) -> (Complex64, f64) {
    let moments = power_moments(omega * duration, 2 * SERIES_TERMS);
    let beta = Complex64::new(0.0, -0.5 * alpha * duration * duration);
    let mut coeff = Complex64::new(duration, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    for n in 1..=SERIES_TERMS {
        coeff *= beta / n as f64;
        let term = coeff * moments[2 * n];
        sum += term;
        scale += term.norm();
        if term.norm() < 1e-18 * sum.norm() {
            break;
        }
    }
    (sum, scale)
}

/// `𝓘` by repeated integration by parts across the kinks of the phase:
///
/// ```text
/// 𝓘 = α Σ_n (iα)^n (2n+1)!! [exp(iωT − iθ)/ω'^(2n+3) − 1/ω^(2n+3)]
/// ```
///
/// The remainder after `N` terms is bounded by `|α|^(N+2) (2N+3)!! T / u^(2N+4)` with
/// `u = min(ω, ω')`. Returns the sum, the scale of its terms and the bound, or
/// `None` when the bound does not reach roundoff level.
fn inverse_frequency_series(omega: f64, alpha: f64, duration: f64) -> Option<(Complex64, f64, f64)> {
    let omega_prime = omega - alpha * duration;
    let u = omega.min(omega_prime);
    let rate = alpha.abs() / (u * u);
    if !(u > 0.0 && rate <= ASYMPTOTIC_MAX_RATE) {
        return None;
    }
    // Two factors, so the large phase ωT is not rounded against θ.
    let end = Complex64::from_polar(1.0, omega * duration)
        * Complex64::from_polar(1.0, -0.5 * alpha * duration * duration);
    let step = Complex64::new(0.0, alpha);
    let mut at_end = Complex64::new(alpha / omega_prime.powi(3), 0.0);
    let mut at_start = Complex64::new(alpha / omega.powi(3), 0.0);
    let scale = at_end.norm() + at_start.norm();
    let mut bound = 3.0 * alpha * alpha * duration / u.powi(4);
    let mut sum = Complex64::new(0.0, 0.0);
    for n in 0..ASYMPTOTIC_TERMS {
        sum += end * at_end - at_start;
        if bound <= 0.5 * f64::EPSILON * scale {
            return Some((sum, scale, bound));
        }
        let grow = (2 * n + 3) as f64;
        at_end *= step * grow / (omega_prime * omega_prime);
        at_start *= step * grow / (omega * omega);
        bound *= (2 * n + 5) as f64 * rate;
    }
    None
}

/// `𝓘` as a function of the effective frequency for a fixed chirp rate `α = a k_z`.
pub(crate) fn assemble(omega: f64, alpha: f64, duration: f64) -> AmplitudeResult {
    if alpha == 0.0 {
        return AmplitudeResult {
            value: Complex64::new(0.0, 0.0),
            branch: ChirpBranch::SmallAlphaExpansion,
            est_error: 0.0,
        };
    }
    let omega_prime = omega - alpha * duration;
    let tail_scale = 1.0 / omega + 1.0 / omega_prime;
    let (value, scale, branch) = if let Some((value, scale, bound)) =
        inverse_frequency_series(omega, alpha, duration)
    {
        (value, scale + bound / (8.0 * f64::EPSILON), ChirpBranch::SmallAlphaExpansion)
    } else if 0.5 * alpha.abs() * duration * duration <= SERIES_MAX_PHASE {
        let (excess, excess_scale) = chirp_excess_series(omega, alpha, duration);
        let value = tails(omega, alpha, duration) + excess;
        (value, tail_scale + excess_scale, ChirpBranch::SmallAlphaExpansion)
    } else {
        let i = Complex64::new(0.0, 1.0);
        let head = 1.0 / (i * omega);
        let theta = 0.5 * alpha * duration * duration;
        let tail = Complex64::from_polar(1.0, omega * duration) * Complex64::from_polar(1.0, -theta)
            / (i * omega_prime);
        let middle = chirp_unchecked(omega, alpha, 0.0, duration);
        (head - tail + middle.value, tail_scale + middle.term_scale, middle.branch)
    };
    let magnitude = value.norm();
    AmplitudeResult {
        value,
        branch,
        est_error: if magnitude > 0.0 {
            8.0 * f64::EPSILON * scale / magnitude
        } else {
            0.0
        },
    }
}

/// Amplitude at an effective frequency `omega_eff` for photon momentum `coords`.
pub fn time_integral_at(
    omega_eff: f64,
    coords: &PhotonCoords,
    drive: &DriveConfig,
) -> Result<AmplitudeResult> {
    let alpha = drive.accel() * coords.kz();
    check_frequencies(omega_eff, omega_eff - alpha * drive.duration())?;
    Ok(assemble(omega_eff, alpha, drive.duration()))
}

/// `𝓘` for the infinitely heavy detector on the prescribed trajectory.
pub fn time_integral_i(
    coords: &PhotonCoords,
    det: &DetectorConfig,
    drive: &DriveConfig,
) -> Result<AmplitudeResult> {
    let f = frequencies(coords, det, drive, None)?;
    check_frequencies(f.omega, f.omega_prime)?;
    Ok(assemble(f.omega, drive.accel() * coords.kz(), drive.duration()))
}

/// `𝓙` for centre-of-mass momentum `p_vec` during the emission of `coords`.
///
/// The effective frequency is `ω + k²/2M − p·k/M`.
pub fn time_integral_j(
    p_vec: &[f64; 3],
    coords: &PhotonCoords,
    det: &DetectorConfig,
    drive: &DriveConfig,
) -> Result<AmplitudeResult> {
    let kv = coords.k_vec();
    let pk = p_vec[0] * kv[0] + p_vec[1] * kv[1] + p_vec[2] * kv[2];
    let f = frequencies(coords, det, drive, Some(pk))?;
    let m = f.finite_mass.expect("finite-mass frequencies requested");
    Ok(assemble(m.omega_m, drive.accel() * coords.kz(), drive.duration()))
}

/// Reference value of the time integral at `omega_eff` by direct quadrature.
///
/// The tails are exact. On `[0, T]` the integrand `exp(iωt)(exp(−iαt²/2) − 1)` is
/// integrated adaptively, which avoids subtracting two nearly equal integrals at
/// small `α`. Tolerances are at least `1e-12` relative and `1e-16` absolute. The
/// reported error also carries the rounding of the `O(1/ω)` tails.
pub fn time_integral_oracle(
    omega_eff: f64,
    coords: &PhotonCoords,
    drive: &DriveConfig,
    quad: &QuadratureConfig,
) -> Result<ComplexEstimate> {
    let alpha = drive.accel() * coords.kz();
    let duration = drive.duration();
    check_frequencies(omega_eff, omega_eff - alpha * duration)?;
    let cfg = QuadratureConfig {
        rel_tol: quad.rel_tol.min(1e-12),
        abs_tol: quad.abs_tol.min(1e-16),
        ..*quad
    };
    let rate = omega_eff + alpha.abs() * duration;
    let excess = integrate_complex(
        |t| {
            let phi = 0.5 * alpha * t * t;
            let s = (0.5 * phi).sin();
            Complex64::from_polar(1.0, omega_eff * t) * Complex64::new(-2.0 * s * s, -phi.sin())
        },
        0.0,
        duration,
        |_| rate,
        &cfg,
    )?;
    // The tails are O(1/ω) while the sum can be far smaller; their rounding stays.
    let omega_prime = omega_eff - alpha * duration;
    let tail_rounding = 4.0 * f64::EPSILON * (1.0 / omega_eff + 1.0 / omega_prime);
    let result = ComplexEstimate {
        value: tails(omega_eff, alpha, duration) + excess.value,
        est_error: excess.est_error + tail_rounding,
        ..excess
    };
    if !result.converged {
        return Err(Error::QuadratureNoConvergence {
            value: result.value.norm(),
            est_error: result.est_error,
            evaluations: result.evaluations,
        });
    }
    Ok(result)
}

/// Relative disagreement between Richardson levels above which `J2` is refused.
pub const J2_MAX_DISAGREEMENT: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TaylorCoefficients {
    /// `|𝓙|²` at `ω₀ = ω + k²/2M`.
    pub j1: f64,
    /// `½ d²|𝓙|²/dω²` at `ω₀`.
    pub j2: f64,
    /// Half the gap between the last two Richardson levels.
    pub j2_error: f64,
}

impl TaylorCoefficients {
    /// `j2_error` against `max(|J2|, J1 T²)`, the curvature scale of `|𝓙|²`.
    pub fn relative_error(&self, duration: f64) -> f64 {
        let scale = self.j2.abs().max(self.j1 * duration * duration);
        if self.j2_error == 0.0 {
            0.0
        } else {
            self.j2_error / scale
        }
    }
}

fn second_difference(j: &impl Fn(f64) -> f64, centre: f64, j0: f64, h: f64) -> f64 {
    (j(centre + h) - 2.0 * j0 + j(centre - h)) / (h * h)
}

/// Zeroth and second Taylor coefficients of `|𝓙|²` in `A = p·k/M`.
///
/// `|𝓙|²` depends on `p` only through `ω_M = ω₀ − A`, so the second coefficient is a
/// frequency derivative, taken by central differences with `h = 1e-3 ω₀` and one
/// Richardson step on `h, h/2, h/4`. Above `ω₀ = 1/T` the step stays at `1e-3/T`,
/// since `|𝓙|²` oscillates in `ω` with period `~2π/T`.
pub fn taylor_coefficients(
    coords: &PhotonCoords,
    det: &DetectorConfig,
    drive: &DriveConfig,
) -> Result<TaylorCoefficients> {
    let f = frequencies(coords, det, drive, Some(0.0))?;
    let omega_0 = f.finite_mass.expect("finite-mass frequencies requested").omega_0;
    let alpha = drive.accel() * coords.kz();
    let duration = drive.duration();
    // A step whose quarter is exactly representable as an offset from ω₀.
    let quarter = 0.25e-3 * omega_0.min(1.0 / duration);
    let h = 4.0 * ((omega_0 + quarter) - omega_0);
    check_frequencies(omega_0 - h, omega_0 - h - alpha * duration)?;
    let j = |w: f64| assemble(w, alpha, duration).value.norm_sqr();
    let j1 = j(omega_0);
    let d1 = second_difference(&j, omega_0, j1, h);
    let d2 = second_difference(&j, omega_0, j1, 0.5 * h);
    let d4 = second_difference(&j, omega_0, j1, 0.25 * h);
    let r1 = (4.0 * d2 - d1) / 3.0;
    let r2 = (4.0 * d4 - d2) / 3.0;
    let out = TaylorCoefficients {
        j1,
        j2: 0.5 * r2,
        j2_error: 0.5 * (r2 - r1).abs(),
    };
    let rel = out.relative_error(duration);
    if !(rel <= J2_MAX_DISAGREEMENT) {
        return Err(Error::DerivativeUnstable {
            rel_disagreement: rel,
        });
    }
    if !(out.j1.is_finite() && out.j2.is_finite()) {
        return Err(invalid("non-finite Taylor coefficient"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::Mass;
    use crate::quadrature::composite_gauss_legendre;
    use proptest::prelude::*;

    fn det() -> DetectorConfig {
        DetectorConfig::new(0.2, Mass::Finite(10.0), 1.0).unwrap()
    }

    fn drive() -> DriveConfig {
        DriveConfig::new(8e-3, 1.0).unwrap()
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    fn oracle(omega: f64, c: &PhotonCoords, d: &DriveConfig) -> Complex64 {
        time_integral_oracle(omega, c, d, &QuadratureConfig::default()).unwrap().value
    }

    #[test]
    fn moments_match_direct_quadrature() {
        for &x in &[0.0, 0.3, -1.9, 2.5, 7.0, -33.0, 250.0] {
            let m = power_moments(x, 40);
            for (n, e) in m.iter().enumerate().step_by(3) {
                let direct = composite_gauss_legendre(
                    |u: f64| Complex64::from_polar(u.powi(n as i32), x * u),
                    0.0,
                    1.0,
                    100,
                );
                assert!((e - direct).norm() <= 1e-13 * direct.norm().max(1e-3), "x={x} m={n}");
            }
        }
    }

    #[test]
    fn transverse_and_inertial_nulls_are_exact() {
        let c = PhotonCoords::new(3.0, 0.0).unwrap();
        assert_eq!(time_integral_i(&c, &det(), &drive()).unwrap().value, Complex64::new(0.0, 0.0));
        let still = DriveConfig::new(0.0, 1.0).unwrap();
        let c = PhotonCoords::new(3.0, 0.8).unwrap();
        assert_eq!(time_integral_i(&c, &det(), &still).unwrap().value.norm(), 0.0);
        assert!(oracle(3.2, &c, &still).norm() <= 1e-14);
        let c = PhotonCoords::new(3.0, 0.0).unwrap();
        assert!(oracle(3.2, &c, &drive()).norm() <= 1e-14);
    }

    #[test]
    fn closed_form_matches_oracle_on_coarse_grid() {
        let (det, drive) = (det(), drive());
        for i in 0..25 {
            let k = 0.1 + (60.0 - 0.1) * i as f64 / 24.0;
            for j in 0..11 {
                let z = -1.0 + 0.2 * j as f64;
                let c = PhotonCoords::new(k, z).unwrap();
                let a = time_integral_i(&c, &det, &drive).unwrap();
                let o = oracle(det.gap() + k, &c, &drive);
                if a.value.norm() == 0.0 {
                    assert!(o.norm() <= 1e-14);
                } else {
                    assert!(rel(a.value, o) < 1e-10, "k={k} z={z}: {:e}", rel(a.value, o));
                }
            }
        }
    }

    #[test]
    fn faddeeva_branch_matches_oracle() {
        let strong = DriveConfig::unguarded(1.0, 1.0).unwrap();
        for &(k, z) in &[(3.0, 0.9), (5.0, -0.7), (8.0, 0.5), (2.1, 1.0), (30.0, -1.0)] {
            let c = PhotonCoords::new(k, z).unwrap();
            let det = det();
            let a = time_integral_i(&c, &det, &strong);
            let Ok(a) = a else { continue };
            assert_eq!(a.branch, ChirpBranch::StableFaddeeva);
            let o = oracle(det.gap() + k, &c, &strong);
            assert!(rel(a.value, o) < 1e-10, "k={k} z={z}: {:e}", rel(a.value, o));
        }
    }

    #[test]
    fn branches_agree_at_the_seam() {
        for &omega in &[0.3, 2.5, 6.0] {
            for &sign in &[1.0, -1.0] {
                let alpha = sign * 2.0 * SERIES_MAX_PHASE;
                if omega - alpha <= 0.0 {
                    continue;
                }
                let series = {
                    let (excess, _) = chirp_excess_series(omega, alpha, 1.0);
                    tails(omega, alpha, 1.0) + excess
                };
                let closed = assemble(omega, alpha * (1.0 + 1e-12), 1.0);
                assert_eq!(closed.branch, ChirpBranch::StableFaddeeva);
                assert!(rel(closed.value, series) < 1e-10);
            }
        }
    }

    #[test]
    fn inverse_frequency_series_matches_other_branches() {
        // Just inside the series' reach, where the other branches are still accurate.
        for &(omega, alpha) in &[(12.0f64, 1.1f64), (12.0, -1.2), (60.0, 15.0), (3.0, 0.08), (300.0, 1.0)] {
            let u = omega.min(omega - alpha);
            assert!(alpha.abs() / (u * u) <= ASYMPTOTIC_MAX_RATE);
            let Some((series, _, _)) = inverse_frequency_series(omega, alpha, 1.0) else {
                panic!("series did not converge at omega={omega} alpha={alpha}");
            };
            let i = Complex64::new(0.0, 1.0);
            let reference = if 0.5 * alpha.abs() <= SERIES_MAX_PHASE {
                tails(omega, alpha, 1.0) + chirp_excess_series(omega, alpha, 1.0).0
            } else {
                1.0 / (i * omega)
                    - Complex64::from_polar(1.0, omega - 0.5 * alpha) / (i * (omega - alpha))
                    + chirp_unchecked(omega, alpha, 0.0, 1.0).value
            };
            assert!(rel(series, reference) < 1e-10, "{omega} {alpha}: {:e}", rel(series, reference));
        }
    }

    #[test]
    fn oracle_cross_checked_by_fixed_rule() {
        let d = drive();
        for &(k, z) in &[(0.5, 0.3), (12.0, -0.9), (55.0, 1.0)] {
            let c = PhotonCoords::new(k, z).unwrap();
            let omega = 0.2 + k;
            let alpha = d.accel() * c.kz();
            let adaptive = time_integral_oracle(omega, &c, &d, &QuadratureConfig::default()).unwrap();
            let panels = 10 * (omega / (2.0 * std::f64::consts::PI) * 8.0).ceil() as usize;
            let fixed = tails(omega, alpha, 1.0)
                + composite_gauss_legendre(
                    |t: f64| {
                        let phi = 0.5 * alpha * t * t;
                        Complex64::from_polar(1.0, omega * t) * (Complex64::from_polar(1.0, -phi) - 1.0)
                    },
                    0.0,
                    1.0,
                    panels,
                );
            assert!(rel(adaptive.value, fixed) < 1e-9);
        }
    }

    #[test]
    fn heavy_detector_reduces_to_prescribed_trajectory() {
        let (det, drive) = (det(), drive());
        let heavy = det.with_mass(Mass::Finite(1e9)).unwrap();
        for &(k, z) in &[(0.3, 0.5), (4.0, -0.2), (20.0, 1.0)] {
            let c = PhotonCoords::new(k, z).unwrap();
            let i = time_integral_i(&c, &det, &drive).unwrap().value;
            let j = time_integral_j(&[0.0; 3], &c, &heavy, &drive).unwrap().value;
            assert!(rel(j, i) < 1e-6);
            // at p = 0 a finite mass only shifts the gap
            let j = time_integral_j(&[0.0; 3], &c, &det, &drive).unwrap().value;
            let shifted = det.with_gap(0.2 + k * k / 20.0).unwrap();
            let i = time_integral_i(&c, &shifted, &drive).unwrap().value;
            assert!(rel(j, i) < 1e-14);
        }
    }

    #[test]
    fn superluminal_recoil_is_refused() {
        let c = PhotonCoords::new(1.0, 1.0).unwrap();
        let r = time_integral_j(&[0.0, 0.0, 50.0], &c, &det(), &drive());
        assert!(matches!(r, Err(Error::NonPositiveFrequency { .. })));
    }

    #[test]
    fn amplitude_vanishes_linearly_in_acceleration() {
        let c = PhotonCoords::new(0.8, 0.6).unwrap();
        let at = |a: f64| {
            let d = DriveConfig::new(a, 1.0).unwrap();
            time_integral_i(&c, &det(), &d).unwrap().value.norm()
        };
        let slope = at(1e-3) / 1e-3;
        for a in [1e-5, 1e-4, 1e-3] {
            assert!(at(a) <= slope * a * (1.0 + 1e-6));
        }
    }

    #[test]
    fn taylor_coefficients_basics() {
        let (det, drive) = (det(), drive());
        let c = PhotonCoords::new(2.0, 0.0).unwrap();
        let t = taylor_coefficients(&c, &det, &drive).unwrap();
        assert_eq!((t.j1, t.j2), (0.0, 0.0));
        let c = PhotonCoords::new(2.0, -0.4).unwrap();
        let t = taylor_coefficients(&c, &det, &drive).unwrap();
        let j = time_integral_j(&[0.0; 3], &c, &det, &drive).unwrap().value;
        assert_eq!(t.j1, j.norm_sqr());
        assert!(t.relative_error(1.0) <= 1e-5);
    }

    #[test]
    fn j2_matches_fourth_order_stencil() {
        let (det, drive) = (det(), drive());
        for i in 0..10 {
            for zi in 0..5 {
                let k = 0.05 + 1.3 * i as f64;
                let z = -0.9 + 0.45 * zi as f64;
                let c = PhotonCoords::new(k, z).unwrap();
                let t = taylor_coefficients(&c, &det, &drive).unwrap();
                let omega_0 = 0.2 + k + k * k / 20.0;
                let h = 0.5e-3 * omega_0;
                let alpha = drive.accel() * c.kz();
                let j = |w: f64| assemble(w, alpha, 1.0).value.norm_sqr();
                let stencil = (-j(omega_0 + 2.0 * h) + 16.0 * j(omega_0 + h) - 30.0 * j(omega_0)
                    + 16.0 * j(omega_0 - h)
                    - j(omega_0 - 2.0 * h))
                    / (12.0 * h * h);
                let scale = t.j2.abs().max(t.j1);
                assert!((0.5 * stencil - t.j2).abs() <= 1e-5 * scale, "k={k} z={z}");
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn closed_form_matches_oracle(k in 0.1f64..60.0, z in -1.0f64..1.0) {
            let (det, drive) = (det(), drive());
            let c = PhotonCoords::new(k, z).unwrap();
            let a = time_integral_i(&c, &det, &drive).unwrap();
            let o = time_integral_oracle(det.gap() + k, &c, &drive, &QuadratureConfig::default()).unwrap();
            if (c.kz() * drive.accel()).abs() < 1e-8 {
                prop_assert!(a.value.norm() <= 1e-12 && o.value.norm() <= 1e-12);
            } else {
                let dev = (a.value - o.value).norm();
                prop_assert!(dev <= 1e-10 * o.value.norm() + o.est_error, "{:e} {:e}", dev, o.est_error);
            }
        }

        #[test]
        fn azimuth_does_not_enter(k in 0.1f64..60.0, z in -1.0f64..1.0, phi in 0.0f64..6.28) {
            let (det, drive) = (det(), drive());
            let a = time_integral_i(&PhotonCoords::new(k, z).unwrap(), &det, &drive).unwrap();
            let b = time_integral_i(&PhotonCoords::with_phi(k, z, phi).unwrap(), &det, &drive).unwrap();
            prop_assert_eq!(a.value.norm_sqr(), b.value.norm_sqr());
        }

        #[test]
        fn recoil_samples_match_oracle(
            px in -0.05f64..0.05, py in -0.05f64..0.05, pz in -0.05f64..0.05,
            k in 0.1f64..20.0, z in -1.0f64..1.0,
        ) {
            let (det, drive) = (det(), drive());
            let c = PhotonCoords::new(k, z).unwrap();
            let p = [px, py, pz];
            let a = time_integral_j(&p, &c, &det, &drive).unwrap();
            let kv = c.k_vec();
            let omega_m = 0.2 + k + k * k / 20.0 - (px * kv[0] + py * kv[1] + pz * kv[2]) / 10.0;
            let o = oracle(omega_m, &c, &drive);
            if a.value.norm() > 0.0 {
                prop_assert!(rel(a.value, o) < 1e-8);
            }
        }
    }
}
