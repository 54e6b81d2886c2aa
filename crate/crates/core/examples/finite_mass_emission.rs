//! Finite-mass spectrum `P_M(k)` against the rigid-detector `P_U(k)`, and the totals.

use unruh::cli::config::linspace;
use unruh::kinematics::{DetectorConfig, DriveConfig, Mass};
use unruh::probability::{p_m_k, p_m_total, p_u_k, p_u_total, WavepacketConfig};
use unruh::quadrature::QuadratureConfig;

fn main() -> unruh::Result<()> {
    let drive = DriveConfig::new(8e-3, 1.0)?;
    let wp = WavepacketConfig::new(100.0, 3.5)?;
    let quad = QuadratureConfig::default();
    let det = DetectorConfig::new(0.2, Mass::Finite(10.0), 1.0)?;
    let rigid = det.with_mass(Mass::Infinite)?;
    println!("{:>6} {:>12} {:>12}", "k", "P_U(k)", "P_M(k)");
    for k in linspace(0.25, 5.0, 20) {
        let pu = p_u_k(k, &rigid, &drive, &quad)?.value;
        let pm = p_m_k(k, &det, &drive, &wp, &quad)?.value;
        println!("{k:>6.2} {pu:>12.4e} {pm:>12.4e}");
    }
    println!("P_U total {:.6e}", p_u_total(&rigid, &drive, &quad)?.value);
    for mass in [10.0, 100.0] {
        let e = p_m_total(&det.with_mass(Mass::Finite(mass))?, &drive, &wp, &quad)?;
        println!("P_M total at M = {mass}: {:.6e}", e.value);
    }
    Ok(())
}
