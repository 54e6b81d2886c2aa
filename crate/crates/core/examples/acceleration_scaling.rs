//! Total excitation probability against acceleration.

use unruh::cli::commands::r2_through_origin;
use unruh::kinematics::{DetectorConfig, DriveConfig, Mass};
use unruh::probability::p_u_total;
use unruh::quadrature::QuadratureConfig;

fn main() -> unruh::Result<()> {
    let det = DetectorConfig::new(0.2, Mass::Infinite, 1.0)?;
    let quad = QuadratureConfig::default();
    let mut points = Vec::new();
    for a in [1e-3, 2e-3, 4e-3, 8e-3] {
        let e = p_u_total(&det, &DriveConfig::new(a, 1.0)?, &quad)?;
        println!("a = {a:.0e}  P_U = {:.6e}  P_U/a² = {:.6e}", e.value, e.value / (a * a));
        points.push((a, e.value));
    }
    let (first, last) = (points[0], points[points.len() - 1]);
    println!("R² of a line through the origin: {:.4}", r2_through_origin(&points));
    println!("d ln P_U / d ln a: {:.4}", (last.1 / first.1).ln() / (last.0 / first.0).ln());
    Ok(())
}
