pub mod amplitude;
pub mod cli;
pub mod error;
pub mod kinematics;
pub mod probability;
pub mod quadrature;
pub mod specfun;

pub use error::{Error, Result};
