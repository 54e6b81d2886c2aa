use super::adaptive::{integrate_adaptive, Adaptive, QuadValue};
use super::{IntegralEstimate, QuadratureConfig};
use crate::error::{invalid, Result};

/// Number of doublings of the upper limit before giving up on the tail.
pub const MAX_DOUBLINGS: usize = 20;

/// First window edge for a detector of gap `gap` driven over `duration`.
pub fn initial_window(gap: f64, duration: f64) -> f64 {
    16.0 * gap.max(1.0 / duration)
}

pub(crate) fn integrate_semi_infinite_generic<V: QuadValue>(
    mut f: impl FnMut(f64) -> V,
    start: f64,
    hint: impl Fn(f64) -> f64,
    cfg: &QuadratureConfig,
) -> Adaptive<V> {
    // Each window gets a share of the absolute tolerance so the sum still meets it.
    let window_cfg = QuadratureConfig {
        abs_tol: cfg.abs_tol / (MAX_DOUBLINGS + 1) as f64,
        ..*cfg
    };
    let mut total = V::zero();
    let mut error = 0.0;
    let mut evaluations = 0;
    let mut all_converged = true;
    let mut tail_reached = false;
    let (mut lo, mut hi) = (0.0, start);
    for _ in 0..=MAX_DOUBLINGS {
        let w = integrate_adaptive(&mut f, lo, hi, &hint, &window_cfg);
        total = total.plus(w.value);
        error += w.est_error;
        evaluations += w.evaluations;
        all_converged &= w.converged;
        if w.value.magnitude() <= cfg.k_cutoff_rel * total.magnitude() {
            tail_reached = true;
            break;
        }
        lo = hi;
        hi *= 2.0;
    }
    let converged = all_converged
        && tail_reached
        && error <= cfg.rel_tol * total.magnitude() + cfg.abs_tol;
    Adaptive {
        value: total,
        est_error: error,
        evaluations,
        converged,
    }
}

/// `∫_0^∞ f(k) dk` over doubling windows `[0, K], [K, 2K], [2K, 4K], …`.
///
/// Stops once a window adds less than `k_cutoff_rel` of the running total. The
/// reported error covers quadrature only; the discarded tail is bounded by the
/// cutoff. Use [`initial_window`] for `start`.
pub fn integrate_semi_infinite_k(
    f: impl Fn(f64) -> f64,
    start: f64,
    hint: impl Fn(f64) -> f64,
    cfg: &QuadratureConfig,
) -> Result<IntegralEstimate> {
    cfg.validate()?;
    if !(start.is_finite() && start > 0.0) {
        return Err(invalid(format!("first window edge must be > 0, got {start}")));
    }
    let r = integrate_semi_infinite_generic(f, start, hint, cfg);
    if !r.value.is_finite() {
        return Err(invalid("integrand produced a non-finite value"));
    }
    Ok(IntegralEstimate {
        value: r.value,
        est_error: r.est_error,
        evaluations: r.evaluations,
        converged: r.converged,
    })
}
