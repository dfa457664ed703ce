//! Simulation and verification of G-Strand equations on semisimple Lie
//! algebras that admit a zero-curvature representation quadratic in the
//! spectral parameter.

pub mod algebra;
pub mod cli;
pub mod config;
pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod run;
pub mod sectional;
pub mod stability;
pub mod zcr;

pub use error::{Error, Result};
