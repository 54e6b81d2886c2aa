//! Convergence of `P_M(k)` to `P_U(k)` as the detector mass grows at fixed acceleration.

use unruh::cli::config::linspace;
use unruh::kinematics::{DetectorConfig, DriveConfig, Mass};
use unruh::probability::{infinite_mass_limit_study, WavepacketConfig};
use unruh::quadrature::QuadratureConfig;

fn main() -> unruh::Result<()> {
    let det = DetectorConfig::new(0.2, Mass::Finite(10.0), 1.0)?;
    let drive = DriveConfig::new(8e-3, 1.0)?;
    let wp = WavepacketConfig::new(100.0, 3.5)?;
    let report = infinite_mass_limit_study(
        &[1.0, 2.0, 4.0, 8.0, 16.0],
        10.0,
        &det,
        &drive,
        &wp,
        &linspace(0.05, 60.0, 240),
        &QuadratureConfig::default(),
    )?;
    println!("P_U(k) peaks at k = {:.3}", report.peak_k);
    for row in &report.rows {
        println!(
            "γ = {:>4}  M = {:>5}  max |P_M − P_U| = {:.4e}  at the peak {:.3e} relative",
            row.gamma, row.mass, row.max_abs_dev, row.rel_dev_at_peak
        );
    }
    println!("strictly decreasing: {}", report.strictly_decreasing);
    Ok(())
}
