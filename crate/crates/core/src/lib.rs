//! Linearized quantum-Langevin model of a damped mechanical oscillator
//! coupled by radiation pressure to a driven optical cavity.
//!
//! All frequencies are angular (rad/s) and all quantities are SI unless a
//! function says it works in the dimensionless (hatted) variables
//! `q̂ = sqrt(mΩ/ħ) δq`, `p̂ = p / sqrt(mħΩ)` and the cavity quadratures `X`, `Y`.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![forbid(unsafe_code)]
#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod bath_spectrum;
pub mod detection;
pub mod energy_cooling;
pub mod error;
pub mod fluctuation_spectra;
pub mod numerics;
pub mod optomech_linear;
pub mod oscillator_markov;
pub mod params;
pub mod pole_analysis;
pub mod table;

pub use error::CoreError;
pub use num_complex::Complex64;

/// Result alias used throughout the crate.
pub type Result<T> = core::result::Result<T, CoreError>;
