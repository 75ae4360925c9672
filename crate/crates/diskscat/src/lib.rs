//! Scattering of plane and multipole waves by a small disk inclusion.
//!
//! The crate evaluates the exact Fourier–Bessel solution of the 2-D
//! Helmholtz transmission problem, locates quasi-resonant frequencies, builds
//! frequency exclusion sets and checks the accompanying analytic bounds
//! numerically.

pub mod cli;
pub mod error;
pub mod norms;
pub mod quotients;
pub mod resonance;
pub mod roots;
pub mod scatter;
pub mod specfun;
pub mod verify;
mod wide;

pub use error::{Error, Result};
