//! Nonrelativistic check on the detector velocity for a few drives.

use unruh::kinematics::{validate_nonrelativistic, DetectorConfig, DriveConfig, Mass};

fn main() -> unruh::Result<()> {
    let det = DetectorConfig::new(0.2, Mass::Finite(10.0), 1.0)?;
    for accel in [1e-3, 8e-3, 2e-2] {
        let drive = DriveConfig::unguarded(accel, 1.0)?;
        let r = validate_nonrelativistic(&det, &drive, 100.0, 3.5);
        println!(
            "a = {accel:.0e}  v0 = {:.4}  aT = {:.4}  total {:.4}  bound {}  pass {}  strict {}",
            r.v0, r.a_t, r.total, r.bound, r.pass, r.strict_pass
        );
    }
    Ok(())
}
