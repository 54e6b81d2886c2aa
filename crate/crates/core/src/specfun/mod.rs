//! Complex special functions behind the closed-form amplitudes.

mod chirp;
mod faddeeva;

pub use chirp::{chirp_segment, ChirpBranch, ChirpValue, SMALL_ALPHA_THRESHOLD};
pub use faddeeva::{erf_complex, faddeeva_w};

pub(crate) use chirp::chirp_unchecked;

/// Complex number carrier used throughout the crate.
pub type ComplexValue = num_complex::Complex64;
