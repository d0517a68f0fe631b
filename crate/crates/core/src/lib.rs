//! Construction, decision and certification of entangleability for pairs of
//! convex cones, together with tensor-norm and robustness computations for
//! general probabilistic theories.
//!
//! Certified paths run on exact rationals end to end; spectral paths (Lorentz
//! and PSD cones) use `f64` with an explicit tolerance.

pub mod error;
pub mod ballcones;
pub mod cli;
pub mod cones;
pub mod dim3lab;
pub mod exactnum;
pub mod gptnorms;
pub mod retractlab;
pub mod repro;
pub mod samples;
pub mod tensorcone;

pub use error::{Error, Result};
