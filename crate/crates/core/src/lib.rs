//! Numerical laboratory for averaged simplex Hilbert transforms.
//!
//! The crate evaluates the multiplier μ_n, the time-side and frequency-side
//! multilinear forms, the ψ/φ paraproduct decomposition, a dyadic model and
//! shifted maximal/square functions, and bundles them into reproducible
//! experiments.

pub mod bumps;
pub mod dyadic;
pub mod error;
pub mod experiment;
pub mod fit;
pub mod forms;
pub mod gen;
pub mod grid;
pub mod quadrature;
pub mod shifted;
pub mod symbol;

pub use error::{Error, Result};
pub use grid::{convolve_axis, dft, idft, lp_norm, GridFunction, SpectralFunction};
pub use num_complex::Complex64;
