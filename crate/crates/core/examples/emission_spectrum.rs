//! Angle-integrated emission spectrum `P_U(k)` and the total probability for a rigid
//! detector, for three gaps.

use unruh::cli::config::linspace;
use unruh::kinematics::{DetectorConfig, DriveConfig, Mass};
use unruh::probability::{p_u_k, p_u_total};
use unruh::quadrature::QuadratureConfig;

fn main() -> unruh::Result<()> {
    let drive = DriveConfig::new(8e-3, 1.0)?;
    let quad = QuadratureConfig::default();
    let ks = linspace(0.05, 6.0, 120);
    for gap in [0.1, 0.2, 0.4] {
        let det = DetectorConfig::new(gap, Mass::Infinite, 1.0)?;
        let mut peak = (0.0, 0.0);
        for &k in &ks {
            let p = p_u_k(k, &det, &drive, &quad)?.value;
            if p > peak.1 {
                peak = (k, p);
            }
        }
        let total = p_u_total(&det, &drive, &quad)?;
        println!(
            "gap {gap}: peak at k = {:.3} (P_U(k) = {:.4e}), total {:.6e} ± {:.1e}",
            peak.0, peak.1, total.value, total.est_error
        );
    }
    Ok(())
}
