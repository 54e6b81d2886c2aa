//! Finite linear-chirp integral `S = ∫_{t0}^{t1} exp(i ω t − i α t²/2) dt`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;

use super::faddeeva::w_upper;
use crate::error::{invalid, Result};

/// `|α| (t1 − t0)²` at or below which the quadratic phase is expanded to first order.
pub const SMALL_ALPHA_THRESHOLD: f64 = 1e-6;

/// Evaluation route taken for a chirp segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChirpBranch {
    StableFaddeeva,
    SmallAlphaExpansion,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChirpValue {
    pub value: Complex64,
    pub branch: ChirpBranch,
    /// Sum of the magnitudes of the terms combined to form `value`. Used to bound
    /// roundoff from cancellation.
    pub term_scale: f64,
}

/// `∫_{t0}^{t1} exp(i ω t − i α t²/2) dt`.
///
/// For `|α|(t1 − t0)² <= 1e-6` the quadratic phase is expanded about the segment
/// midpoint and integrated analytically. Otherwise the square is completed and the
/// two endpoint contributions are written as `exp(i ω t − i α t²/2) · w(ξ)` with
/// every Faddeeva argument `ξ` in the upper half-plane, so no large phase
/// `ω²/(2α)` is ever exponentiated on its own.
pub fn chirp_segment(omega: f64, alpha: f64, t0: f64, t1: f64) -> Result<ChirpValue> {
    if !(omega.is_finite() && alpha.is_finite() && t0.is_finite() && t1.is_finite()) {
        return Err(invalid("chirp_segment arguments must be finite"));
    }
    if t0 > t1 {
        return Err(invalid(format!("chirp_segment requires t0 <= t1, got [{t0}, {t1}]")));
    }
    Ok(chirp_unchecked(omega, alpha, t0, t1))
}

pub(crate) fn chirp_unchecked(omega: f64, alpha: f64, t0: f64, t1: f64) -> ChirpValue {
    let span = t1 - t0;
    if alpha.abs() * span * span <= SMALL_ALPHA_THRESHOLD {
        return small_alpha(omega, alpha, t0, t1);
    }
    if alpha < 0.0 {
        // S(ω, α) = conj(S(−ω, −α))
        let mirrored = stable(-omega, -alpha, t0, t1);
        return ChirpValue {
            value: mirrored.value.conj(),
            ..mirrored
        };
    }
    stable(omega, alpha, t0, t1)
}

#[inline]
fn phase(omega: f64, alpha: f64, t: f64) -> Complex64 {
    Complex64::from_polar(1.0, t * (omega - 0.5 * alpha * t))
}

fn stable(omega: f64, alpha: f64, t0: f64, t1: f64) -> ChirpValue {
    debug_assert!(alpha > 0.0);
    let root = (2.0 * alpha).sqrt();
    // Real coordinates along the steepest-descent diagonal, zero at t = ω/α.
    let s0 = (alpha * t0 - omega) / root;
    let s1 = (alpha * t1 - omega) / root;
    // e^{3iπ/4}|s| lies in the upper half-plane.
    let diag = |s: f64| w_upper(-FRAC_1_SQRT_2 * s.abs(), FRAC_1_SQRT_2 * s.abs());
    // sqrt(2/α) e^{−iπ/4} sqrt(π)/2
    let prefactor = Complex64::new(FRAC_1_SQRT_2, -FRAC_1_SQRT_2) * (PI / (2.0 * alpha)).sqrt();

    let e0 = phase(omega, alpha, t0) * diag(s0);
    let e1 = phase(omega, alpha, t1) * diag(s1);
    let (bracket, scale) = if s0 >= 0.0 {
        (e0 - e1, e0.norm() + e1.norm())
    } else if s1 <= 0.0 {
        (e1 - e0, e0.norm() + e1.norm())
    } else {
        // The stationary point lies inside the segment; ω²/(2α) = ω t_c / 2 is bounded
        // by α max(t0², t1²) / 2 here.
        let centre = omega / alpha;
        let stationary = 2.0 * Complex64::from_polar(1.0, 0.5 * omega * centre);
        (stationary - e0 - e1, 2.0 + e0.norm() + e1.norm())
    };
    ChirpValue {
        value: prefactor * bracket,
        branch: ChirpBranch::StableFaddeeva,
        term_scale: prefactor.norm() * scale,
    }
}

/// `∫_0^1 u² cos(x u) du`.
fn cos_moment2(x: f64) -> f64 {
    if x.abs() < 2.0 {
        let x2 = x * x;
        let mut term = 1.0;
        let mut sum = 1.0 / 3.0;
        for n in 1..40 {
            let n = n as f64;
            term *= -x2 / ((2.0 * n - 1.0) * (2.0 * n));
            let contrib = term / (2.0 * n + 3.0);
            sum += contrib;
            if contrib.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    } else {
        let (s, c) = x.sin_cos();
        s / x + 2.0 * c / (x * x) - 2.0 * s / (x * x * x)
    }
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

fn small_alpha(omega: f64, alpha: f64, t0: f64, t1: f64) -> ChirpValue {
    let mid = 0.5 * (t0 + t1);
    let half = 0.5 * (t1 - t0);
    // phase about the midpoint: ω_m τ − α τ²/2 with ω_m = ω − α·mid
    let local = omega - alpha * mid;
    let x = local * half;
    let zeroth = 2.0 * half * sinc(x);
    let second = 2.0 * half.powi(3) * cos_moment2(x);
    let value = phase(omega, alpha, mid) * Complex64::new(zeroth, -0.5 * alpha * second);
    ChirpValue {
        value,
        branch: ChirpBranch::SmallAlphaExpansion,
        term_scale: value.norm(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate_complex, QuadratureConfig};
    use proptest::prelude::*;

    fn quadrature(omega: f64, alpha: f64, t0: f64, t1: f64) -> Complex64 {
        let cfg = QuadratureConfig {
            rel_tol: 1e-12,
            abs_tol: 1e-16 * (t1 - t0),
            ..Default::default()
        };
        let rate = omega.abs() + alpha.abs() * t0.abs().max(t1.abs());
        integrate_complex(|t| phase(omega, alpha, t), t0, t1, |_| rate, &cfg).unwrap().value
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    #[test]
    fn pure_exponential_when_alpha_zero() {
        let (w, t0, t1) = (2.3, -0.4, 1.7);
        let s = chirp_segment(w, 0.0, t0, t1).unwrap();
        let i = Complex64::new(0.0, 1.0);
        let exact = ((i * w * t1).exp() - (i * w * t0).exp()) / (i * w);
        assert!(rel(s.value, exact) < 1e-14);
        assert_eq!(s.branch, ChirpBranch::SmallAlphaExpansion);
    }

    #[test]
    fn length_when_both_zero() {
        let s = chirp_segment(0.0, 0.0, 0.25, 3.0).unwrap();
        assert!((s.value - Complex64::new(2.75, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn conjugation_symmetry() {
        for &(w, a) in &[(1.0, 0.3), (5.0, -2.0), (0.2, 1e-7), (-3.0, 40.0)] {
            let s = chirp_segment(w, a, 0.0, 1.3).unwrap().value;
            let m = chirp_segment(-w, -a, 0.0, 1.3).unwrap().value;
            assert!(rel(m, s.conj()) < 1e-15);
        }
    }

    #[test]
    fn stationary_point_inside_segment() {
        // ω/α = 0.5 lies inside [0, 1]; compare with a brute-force midpoint rule.
        let (w, a) = (10.0, 20.0);
        let n = 200_000;
        let h = 1.0 / n as f64;
        let brute: Complex64 = (0..n)
            .map(|j| {
                let t = (j as f64 + 0.5) * h;
                phase(w, a, t) * h
            })
            .sum();
        let s = chirp_segment(w, a, 0.0, 1.0).unwrap().value;
        assert!(rel(s, brute) < 1e-9);
    }

    #[test]
    fn matches_quadrature_across_chirp_strengths() {
        let (t0, t1) = (0.0, 1.0);
        for e in -9..=3 {
            for &mantissa in &[1.0, 3.7] {
                let alpha = mantissa * 10f64.powi(e);
                for &omega in &[0.2, 1.5, -4.0, 20.0, 300.0] {
                    for &sign in &[1.0, -1.0] {
                        let s = chirp_segment(omega, sign * alpha, t0, t1).unwrap().value;
                        let q = quadrature(omega, sign * alpha, t0, t1);
                        let scale = s.norm().max((t1 - t0) * 1e-30);
                        assert!((s - q).norm() / scale <= 1e-10, "w={omega} a={}", sign * alpha);
                    }
                }
            }
        }
    }

    #[test]
    fn continuous_across_branch_threshold() {
        for &(omega, t0, t1) in &[(0.7, 0.0, 1.0), (12.0, -0.5, 2.0), (-3.0, 1.0, 1.5)] {
            let edge = SMALL_ALPHA_THRESHOLD / ((t1 - t0) * (t1 - t0));
            let below = chirp_segment(omega, edge * (1.0 - 1e-3), t0, t1).unwrap();
            let above = chirp_segment(omega, edge * (1.0 + 1e-3), t0, t1).unwrap();
            assert_eq!(below.branch, ChirpBranch::SmallAlphaExpansion);
            assert_eq!(above.branch, ChirpBranch::StableFaddeeva);
            assert!(rel(below.value, above.value) < 1e-8);
        }
    }

    proptest! {
        #[test]
        fn additive_over_adjacent_segments(
            omega in -50.0f64..50.0,
            alpha in -100.0f64..100.0,
            t0 in -2.0f64..2.0,
            d1 in 0.0f64..1.5,
            d2 in 0.0f64..1.5,
        ) {
            let (t1, t2) = (t0 + d1, t0 + d1 + d2);
            let whole = chirp_segment(omega, alpha, t0, t2).unwrap();
            let a = chirp_segment(omega, alpha, t0, t1).unwrap();
            let b = chirp_segment(omega, alpha, t1, t2).unwrap();
            let scale = whole.value.norm().max(whole.term_scale * 1e-4).max((t2 - t0) * 1e-30);
            prop_assert!((a.value + b.value - whole.value).norm() / scale <= 1e-10);
        }

        #[test]
        fn conjugation(omega in -50.0f64..50.0, alpha in -100.0f64..100.0, t1 in 0.0f64..3.0) {
            let s = chirp_segment(omega, alpha, 0.0, t1).unwrap().value;
            let m = chirp_segment(-omega, -alpha, 0.0, t1).unwrap().value;
            prop_assert!((m - s.conj()).norm() <= 1e-14 * s.norm());
        }
    }

    #[test]
    fn rejects_reversed_interval() {
        assert!(chirp_segment(1.0, 1.0, 2.0, 1.0).is_err());
        assert!(chirp_segment(f64::NAN, 1.0, 0.0, 1.0).is_err());
    }
}
