pub mod bessel;
pub mod certify;
pub mod distances;
pub mod error;
pub mod exec;
pub mod moment_bounds;
pub mod quad;
pub mod roots;
pub mod special;
pub mod stein_factors;
pub mod stein_solver;
pub mod vg_dist;

pub use error::{Error, Result};
