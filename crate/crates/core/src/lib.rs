//! Numerical toolkit for the driven Dicke model realised with cavity-assisted
//! Raman transitions.
//!
//! The crate covers the whole forward chain from raw experimental settings to
//! observables:
//!
//! - [`params`]: effective Dicke parameters, Raman detunings and Doppler width.
//! - [`specfun`]: Dawson function and the scaled complementary error function.
//! - [`thresholds`]: closed-form critical couplings.
//! - [`poles`]: Laplace-domain characteristic functions and numerical
//!   pole-crossing thresholds for single, co- and counter-propagating beams.
//! - [`dynamics`]: semiclassical mean-field integration with velocity classes.
//! - [`spectrum`]: weak-probe transmission spectra.
//!
//! All frequencies are angular frequencies in rad/s.

pub mod dynamics;
pub mod error;
pub mod params;
pub mod poles;
pub mod specfun;
pub mod spectrum;
pub mod thresholds;

pub use error::{Error, Result};
pub use num_complex::Complex64 as Complex;
pub use params::{ExperimentConfig, ModelParams};
pub use poles::{Geometry, ScaledParams};
pub use thresholds::{ThresholdModel, ThresholdResult};

/// 2π × 1 kHz in rad/s.
pub const KHZ: f64 = 2.0 * std::f64::consts::PI * 1.0e3;
