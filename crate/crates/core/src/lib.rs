//! Exact-arithmetic laboratory for the skew product
//! S_α(x, t) = (2x, t + α·χ_{[0,1/2)}(x)) on the 3-torus.
//!
//! Modules follow the pipeline: continued fractions and the α pair
//! ([`cfrac`]), torus geometry and rotation discrepancy ([`torus`]), exact
//! mixing certificates ([`skewprod`]), shrinking-target experiments
//! ([`targets`]) and covering bounds for Hausdorff dimension
//! ([`dimension`]). [`cli`] drives them from the command line.

pub mod cfrac;
pub mod cli;
pub mod dimension;
pub mod error;
pub mod io;
pub mod rigorous;
pub mod skewprod;
pub mod stats;
pub mod targets;
pub mod torus;

pub use error::{Error, Result};
pub use num_bigint::{BigInt, BigUint};
pub use num_rational::BigRational;
