//! Faddeeva function and complex error function at a few points.

use num_complex::Complex64;
use unruh::specfun::{chirp_segment, erf_complex, faddeeva_w};

fn main() -> unruh::Result<()> {
    for z in [
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 1.0),
        Complex64::new(-3.0, 0.5),
        Complex64::new(20.0, 1e-3),
        Complex64::new(2.0, -1.0),
    ] {
        let w = faddeeva_w(z)?;
        let e = erf_complex(z)?;
        println!("z = {z:>12.4}  w(z) = {w:.15e}  erf(z) = {e:.15e}");
    }

    // A chirp segment on either side of the small-α switch.
    for alpha in [1e-8, 0.5] {
        let c = chirp_segment(3.0, alpha, 0.0, 1.0)?;
        println!("chirp(ω=3, α={alpha}) = {:.15e} via {:?}", c.value, c.branch);
    }
    Ok(())
}
