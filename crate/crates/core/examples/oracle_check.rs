//! Closed-form time integral against direct quadrature, with the evaluation route.

use unruh::amplitude::{time_integral_i, time_integral_oracle};
use unruh::kinematics::{DetectorConfig, DriveConfig, Mass, PhotonCoords};
use unruh::quadrature::QuadratureConfig;

fn main() -> unruh::Result<()> {
    let det = DetectorConfig::new(0.2, Mass::Infinite, 1.0)?;
    let quad = QuadratureConfig::default();
    for accel in [8e-3, 0.5] {
        let drive = DriveConfig::unguarded(accel, 1.0)?;
        for (k, z) in [(0.1, 1.0), (0.55, -0.3), (5.0, 0.7), (60.0, 1.0), (60.0, 1e-9)] {
            let c = PhotonCoords::new(k, z)?;
            let closed = time_integral_i(&c, &det, &drive)?;
            let oracle = time_integral_oracle(det.gap() + k, &c, &drive, &quad)?;
            println!(
                "a = {accel}  k = {k:>5}  z = {z:>6}  |I| = {:.6e}  rel dev {:.2e}  ({:?})",
                closed.value.norm(),
                (closed.value - oracle.value).norm() / oracle.value.norm(),
                closed.branch
            );
        }
    }
    Ok(())
}
