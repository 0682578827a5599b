//! Length spectra, minimizing indices and uniform-energy critical points on
//! concretely represented compact length spaces.

pub mod curves;
pub mod energy;
pub mod error;
pub mod gh;
pub mod spaces;
pub mod spectra;

pub use error::{Error, Result};
