//! Taylor-reduced finite-mass density against a Monte Carlo average over the
//! wavepacket without the reduction.

use unruh::kinematics::{DetectorConfig, DriveConfig, Mass};
use unruh::probability::{p_m_density_kz, p_m_density_kz_sampled, WavepacketConfig};
use unruh::quadrature::{GaussianSamples, QuadratureConfig};

fn main() -> unruh::Result<()> {
    let det = DetectorConfig::new(0.2, Mass::Finite(10.0), 1.0)?;
    let drive = DriveConfig::new(8e-3, 1.0)?;
    let wp = WavepacketConfig::new(100.0, 3.5)?;
    let quad = QuadratureConfig {
        mc_samples: 50_000,
        ..QuadratureConfig::default()
    };
    let samples = GaussianSamples::draw(wp.width(), &quad)?;
    for (k, z) in [(0.3, 0.5), (0.55, 1.0), (1.0, -0.5), (5.0, 0.75), (15.0, 1.0)] {
        let taylor = p_m_density_kz(k, z, &det, &drive, &wp)?;
        let mc = p_m_density_kz_sampled(k, z, &det, &drive, &samples)?;
        println!(
            "k = {k:>5}  z = {z:>5}  Taylor {taylor:.6e}  MC {:.6e} ± {:.1e}  ({:+.2} σ, {} rejected)",
            mc.mean,
            mc.stderr,
            (taylor - mc.mean) / mc.stderr,
            mc.rejected
        );
    }
    Ok(())
}
