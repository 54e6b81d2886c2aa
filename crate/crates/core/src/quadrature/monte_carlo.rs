use std::f64::consts::{PI, SQRT_2};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use super::QuadratureConfig;
use crate::error::{invalid, Result};

const BLOCK: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    /// Samples that entered the mean.
    pub accepted: usize,
    /// Samples the integrand refused.
    pub rejected: usize,
}

impl McEstimate {
    pub fn rejection_fraction(&self) -> f64 {
        let n = self.accepted + self.rejected;
        if n == 0 {
            0.0
        } else {
            self.rejected as f64 / n as f64
        }
    }
}

/// Momentum samples from `|φ̃(p)|² ∝ exp(−p²L²/2)`, truncated per axis, with a
/// uniform azimuth attached to each.
///
/// Sample `i` is drawn from its own ChaCha8 stream `i` under the configured seed, so
/// the set does not depend on how the work is scheduled.
#[derive(Debug, Clone)]
pub struct GaussianSamples {
    width_l: f64,
    momenta: Vec<[f64; 3]>,
    phis: Vec<f64>,
}

impl GaussianSamples {
    pub fn draw(width_l: f64, cfg: &QuadratureConfig) -> Result<Self> {
        cfg.validate()?;
        if !(width_l.is_finite() && width_l > 0.0) {
            return Err(invalid(format!("wavepacket width must be > 0, got {width_l}")));
        }
        // Truncation in units of the per-axis deviation 1/L.
        let cut = cfg.mc_sigma_trunc * SQRT_2;
        let seed = cfg.mc_seed;
        let (momenta, phis) = (0..cfg.mc_samples)
            .into_par_iter()
            .with_min_len(BLOCK)
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i as u64);
                let mut axis = || loop {
                    let x: f64 = rng.sample(StandardNormal);
                    if x.abs() <= cut {
                        return x / width_l;
                    }
                };
                let p = [axis(), axis(), axis()];
                let phi = 2.0 * PI * rng.gen::<f64>();
                (p, phi)
            })
            .unzip();
        Ok(Self {
            width_l,
            momenta,
            phis,
        })
    }

    pub fn width(&self) -> f64 {
        self.width_l
    }

    pub fn len(&self) -> usize {
        self.momenta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.momenta.is_empty()
    }

    pub fn momenta(&self) -> &[[f64; 3]] {
        &self.momenta
    }

    /// Sample mean of `g(p, φ)`. Samples for which `g` returns `None` are counted as
    /// rejected and left out of the mean.
    pub fn expectation(&self, g: impl Fn(&[f64; 3], f64) -> Option<f64> + Sync) -> McEstimate {
        let blocks: Vec<(Moments, usize)> = self
            .momenta
            .par_chunks(BLOCK)
            .zip(self.phis.par_chunks(BLOCK))
            .map(|(ps, phis)| {
                let mut m = Moments::default();
                let mut rejected = 0;
                for (p, &phi) in ps.iter().zip(phis) {
                    match g(p, phi) {
                        Some(v) => m.push(v),
                        None => rejected += 1,
                    }
                }
                (m, rejected)
            })
            .collect();
        let mut total = Moments::default();
        let mut rejected = 0;
        for (m, r) in &blocks {
            total = total.merge(m);
            rejected += r;
        }
        McEstimate {
            mean: total.mean,
            stderr: total.stderr(),
            accepted: total.n,
            rejected,
        }
    }
}

/// Running count, mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(&self, other: &Moments) -> Moments {
        if other.n == 0 {
            return *self;
        }
        if self.n == 0 {
            return *other;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        let frac = other.n as f64 / n as f64;
        Moments {
            n,
            mean: self.mean + d * frac,
            m2: self.m2 + other.m2 + d * d * self.n as f64 * frac,
        }
    }

    fn stderr(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let var = self.m2 / (self.n - 1) as f64;
        (var / self.n as f64).sqrt()
    }
}

/// `E[g(p)]` over the truncated Gaussian wavepacket of width `width_l`.
pub fn mc_gaussian_expectation(
    g: impl Fn(&[f64; 3]) -> f64 + Sync,
    width_l: f64,
    cfg: &QuadratureConfig,
) -> Result<McEstimate> {
    let samples = GaussianSamples::draw(width_l, cfg)?;
    Ok(samples.expectation(|p, _| Some(g(p))))
}
