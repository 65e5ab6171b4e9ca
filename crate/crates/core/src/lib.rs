pub mod chebyshev;
pub mod error;
pub mod export;
pub mod filters;
pub mod logmag;
pub mod modulator;
pub mod quadrature;
pub mod rate;
pub mod reconstruction;
pub mod relaxed;
pub mod rng;
pub mod validate;

pub use error::{Error, Result};
pub use logmag::SignedLog;
