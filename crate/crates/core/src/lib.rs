//! Finite-field Fourier tools, linear codes and an exact small-scale
//! simulator for reducing coset-sampling problems to classical decoding.

pub mod codes;
pub mod config;
pub mod decode;
pub mod error;
pub mod galois;
pub mod noise;
pub mod opi;
pub mod qsim;
pub mod rng;
pub mod selfcheck;
pub mod thresholds;

pub use error::{Error, Result};
