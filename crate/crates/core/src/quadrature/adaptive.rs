use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use num_complex::Complex64;

use super::{IntegralEstimate, QuadratureConfig};
use crate::error::{invalid, Result};

// 21-point Kronrod extension of the 10-point Gauss rule. Abscissae are listed from
// the edge inwards; the odd entries are the Gauss nodes.
const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077208093005172,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651146,
];

/// Values that can be integrated: a real vector space with a size.
pub trait QuadValue: Copy {
    fn zero() -> Self;
    fn plus(self, other: Self) -> Self;
    fn scaled(self, s: f64) -> Self;
    fn magnitude(&self) -> f64;
    /// Error already carried by the value, e.g. from an inner integration.
    fn carried_error(&self) -> f64 {
        0.0
    }
    fn is_finite(&self) -> bool;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn plus(self, other: Self) -> Self {
        self + other
    }
    fn scaled(self, s: f64) -> Self {
        self * s
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn plus(self, other: Self) -> Self {
        self + other
    }
    fn scaled(self, s: f64) -> Self {
        self * s
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn is_finite(&self) -> bool {
        Complex64::is_finite(*self)
    }
}

/// Inner-integral result used as the integrand of an outer integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Nested {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl From<IntegralEstimate> for Nested {
    fn from(e: IntegralEstimate) -> Self {
        Self {
            value: e.value,
            error: e.est_error,
            evaluations: e.evaluations,
            converged: e.converged,
        }
    }
}

impl QuadValue for Nested {
    fn zero() -> Self {
        Self {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
            converged: true,
        }
    }
    fn plus(self, other: Self) -> Self {
        Self {
            value: self.value + other.value,
            error: self.error + other.error,
            evaluations: self.evaluations + other.evaluations,
            converged: self.converged && other.converged,
        }
    }
    fn scaled(self, s: f64) -> Self {
        Self {
            value: self.value * s,
            error: self.error * s.abs(),
            ..self
        }
    }
    fn magnitude(&self) -> f64 {
        self.value.abs()
    }
    fn carried_error(&self) -> f64 {
        self.error
    }
    fn is_finite(&self) -> bool {
        self.value.is_finite() && self.error.is_finite()
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Adaptive<V> {
    pub value: V,
    pub est_error: f64,
    pub evaluations: usize,
    pub converged: bool,
}

struct Panel<V> {
    lo: f64,
    hi: f64,
    value: V,
    error: f64,
}

fn gauss_kronrod<V: QuadValue>(f: &mut impl FnMut(f64) -> V, lo: f64, hi: f64) -> Panel<V> {
    let centre = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(centre);
    let mut kronrod = fc.scaled(WGK[10]);
    let mut gauss = V::zero();
    let mut resabs = WGK[10] * fc.magnitude();
    for j in 0..10 {
        let dx = half * XGK[j];
        let (f1, f2) = (f(centre - dx), f(centre + dx));
        resabs += WGK[j] * (f1.magnitude() + f2.magnitude());
        let pair = f1.plus(f2);
        kronrod = kronrod.plus(pair.scaled(WGK[j]));
        if j % 2 == 1 {
            gauss = gauss.plus(pair.scaled(WG[j / 2]));
        }
    }
    let value = kronrod.scaled(half);
    let diff = value.plus(gauss.scaled(-half)).magnitude();
    // roundoff floor, so that panels of a cancelling integrand stop splitting
    let error = diff + value.carried_error() + 4.0 * f64::EPSILON * resabs * half;
    Panel { lo, hi, value, error }
}

#[derive(PartialEq)]
struct Worst(f64, usize);

impl Eq for Worst {}

impl PartialOrd for Worst {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Worst {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then_with(|| other.1.cmp(&self.1))
    }
}

fn initial_edges(lo: f64, hi: f64, hint: &impl Fn(f64) -> f64, cfg: &QuadratureConfig) -> Vec<f64> {
    let budget = (cfg.max_subdiv / 2).max(1);
    let mut edges = vec![lo];
    let mut x = lo;
    while x < hi {
        let rate = hint(x).abs();
        let width = if rate > 0.0 && rate.is_finite() {
            2.0 * PI / (rate * cfg.panels_per_period as f64)
        } else {
            hi - lo
        };
        x = (x + width).min(hi);
        edges.push(x);
        if edges.len() > budget + 1 {
            let n = budget;
            return (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
        }
    }
    *edges.last_mut().unwrap() = hi;
    edges
}

/// Globally adaptive bisection driven by the panel with the largest error.
pub(crate) fn integrate_adaptive<V: QuadValue>(
    mut f: impl FnMut(f64) -> V,
    lo: f64,
    hi: f64,
    hint: impl Fn(f64) -> f64,
    cfg: &QuadratureConfig,
) -> Adaptive<V> {
    let edges = initial_edges(lo, hi, &hint, cfg);
    let mut panels: Vec<Panel<V>> = edges
        .windows(2)
        .map(|w| gauss_kronrod(&mut f, w[0], w[1]))
        .collect();
    let mut heap: BinaryHeap<Worst> =
        panels.iter().enumerate().map(|(i, p)| Worst(p.error, i)).collect();

    let exact = |panels: &[Panel<V>]| {
        let mut order: Vec<usize> = (0..panels.len()).collect();
        order.sort_by(|&a, &b| panels[a].lo.total_cmp(&panels[b].lo));
        let mut value = V::zero();
        let mut error = 0.0;
        for i in order {
            value = value.plus(panels[i].value);
            error += panels[i].error;
        }
        (value, error)
    };
    let tolerance = |v: &V| cfg.rel_tol * v.magnitude() + cfg.abs_tol;

    // Running sums steer the loop; every decision to stop is confirmed on sums
    // recomputed in panel order so that the result does not depend on split history.
    let (mut value, mut error) = exact(&panels);
    let mut converged = false;
    let mut splits = 0usize;
    let mut next_check = 256;
    let mut trust = 1.0;
    loop {
        if error <= trust * tolerance(&value) || splits >= next_check {
            next_check = splits + panels.len().max(256);
            (value, error) = exact(&panels);
            if error <= tolerance(&value) {
                converged = true;
                break;
            }
            trust *= 0.5;
        }
        if panels.len() >= cfg.max_subdiv {
            break;
        }
        let Some(Worst(_, idx)) = heap.pop() else {
            break;
        };
        let (a, b) = (panels[idx].lo, panels[idx].hi);
        let mid = 0.5 * (a + b);
        if !(mid > a && mid < b) {
            break;
        }
        let left = gauss_kronrod(&mut f, a, mid);
        let right = gauss_kronrod(&mut f, mid, b);
        value = value
            .plus(left.value)
            .plus(right.value)
            .plus(panels[idx].value.scaled(-1.0));
        error += left.error + right.error - panels[idx].error;
        heap.push(Worst(left.error, idx));
        heap.push(Worst(right.error, panels.len()));
        panels[idx] = left;
        panels.push(right);
        splits += 1;
    }
    let (value, est_error) = exact(&panels);
    let finite = value.is_finite() && est_error.is_finite();
    Adaptive {
        value,
        est_error,
        evaluations: 21 * (edges.len() - 1 + 2 * splits),
        converged: converged && finite,
    }
}

fn check_interval(lo: f64, hi: f64, cfg: &QuadratureConfig) -> Result<()> {
    cfg.validate()?;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(invalid(format!("integration interval [{lo}, {hi}] must be finite with lo < hi")));
    }
    Ok(())
}

/// Adaptive Gauss-Kronrod (G10/K21) integral of a real function on `[lo, hi]`.
///
/// `hint(x)` is the local angular frequency of the integrand. Initial panels are no
/// wider than `2π / (hint · panels_per_period)`. A result that misses the tolerance
/// within `max_subdiv` panels is returned with `converged = false`.
pub fn integrate_1d(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    hint: impl Fn(f64) -> f64,
    cfg: &QuadratureConfig,
) -> Result<IntegralEstimate> {
    check_interval(lo, hi, cfg)?;
    let r = integrate_adaptive(f, lo, hi, hint, cfg);
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

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexEstimate {
    pub value: Complex64,
    pub est_error: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Complex-valued counterpart of [`integrate_1d`]; the error is measured in modulus.
pub fn integrate_complex(
    f: impl Fn(f64) -> Complex64,
    lo: f64,
    hi: f64,
    hint: impl Fn(f64) -> f64,
    cfg: &QuadratureConfig,
) -> Result<ComplexEstimate> {
    check_interval(lo, hi, cfg)?;
    let r = integrate_adaptive(f, lo, hi, hint, cfg);
    if !r.value.is_finite() {
        return Err(invalid("integrand produced a non-finite value"));
    }
    Ok(ComplexEstimate {
        value: r.value,
        est_error: r.est_error,
        evaluations: r.evaluations,
        converged: r.converged,
    })
}

/// Fixed composite 10-point Gauss-Legendre rule on `panels` equal panels.
pub fn composite_gauss_legendre<V: QuadValue>(
    f: impl Fn(f64) -> V,
    lo: f64,
    hi: f64,
    panels: usize,
) -> V {
    let width = (hi - lo) / panels as f64;
    let mut total = V::zero();
    for p in 0..panels {
        let centre = lo + (p as f64 + 0.5) * width;
        let half = 0.5 * width;
        let mut acc = V::zero();
        for (j, w) in WG.iter().enumerate() {
            let dx = half * XGK[2 * j + 1];
            acc = acc.plus(f(centre - dx).plus(f(centre + dx)).scaled(*w));
        }
        total = total.plus(acc.scaled(half));
    }
    total
}
