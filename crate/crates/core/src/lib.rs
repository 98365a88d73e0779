pub mod cli;
pub mod error;
pub mod expfamily;
pub mod fixed_window;
pub mod lattice;
pub mod quadrature;
pub mod rng;
pub mod simulate;
pub mod special;
pub mod varying_window;
pub mod walk_functionals;

pub use error::{Error, Result};
