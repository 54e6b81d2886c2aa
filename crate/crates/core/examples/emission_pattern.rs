//! Angular emission pattern `P_U(k, z)` at a fixed photon momentum.

use unruh::cli::config::linspace;
use unruh::kinematics::{DetectorConfig, DriveConfig, Mass};
use unruh::probability::{p_u_density, SpectrumPoint};

fn main() -> unruh::Result<()> {
    let det = DetectorConfig::new(0.2, Mass::Infinite, 1.0)?;
    let drive = DriveConfig::new(8e-3, 1.0)?;
    let k = 0.55;
    let points = linspace(-1.0, 1.0, 21)
        .into_iter()
        .map(|z| {
            Ok(SpectrumPoint {
                k,
                z: Some(z),
                density: p_u_density(k, z, &det, &drive)?,
            })
        })
        .collect::<unruh::Result<Vec<_>>>()?;
    let max = points.iter().fold(0.0f64, |m, p| m.max(p.density));
    for p in &points {
        let bar = "#".repeat((40.0 * p.density / max).round() as usize);
        println!("z = {:>5.2}  {:.4e}  {bar}", p.z.unwrap(), p.density);
    }
    Ok(())
}
