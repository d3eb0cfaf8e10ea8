pub mod cli;
pub mod error;
pub mod exactdist;
pub mod kernels;
pub mod limitdist;
pub mod params;
pub mod precision;
pub mod quadrature;
pub mod sim;

pub use error::{AsepError, Result};
