//! Recoil momentum distribution `P_M(r, ζ)` of the detector centre of mass.

use unruh::kinematics::{DetectorConfig, DriveConfig, Mass};
use unruh::probability::{p_m_recoil_density, RecoilPoint, WavepacketConfig};
use unruh::quadrature::QuadratureConfig;

fn main() -> unruh::Result<()> {
    let det = DetectorConfig::new(0.2, Mass::Finite(10.0), 1.0)?;
    let drive = DriveConfig::new(8e-3, 1.0)?;
    let wp = WavepacketConfig::new(100.0, 3.5)?;
    let quad = QuadratureConfig::default();
    for r in [0.25, 0.5, 1.0] {
        for zeta in [-1.0, -0.99, -0.95, 0.0] {
            let e = p_m_recoil_density(r, zeta, &det, &drive, &wp, &quad)?;
            let p = RecoilPoint {
                r,
                zeta,
                density: e.value,
                est_error: e.est_error,
            };
            println!("r = {:.2}  ζ = {:>5.2}  density {:.4e} ± {:.1e}", p.r, p.zeta, p.density, p.est_error);
        }
    }
    Ok(())
}
