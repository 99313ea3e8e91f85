//! Exact quantum dynamics of a two-mode non-degenerate parametric amplifier
//! driven by a detuned harmonic pump.
//!
//! The interaction-picture evolution operator is factorized over the SU(1,1)
//! generators `K+ = a†b†`, `K- = ab`, `K0 = (a†a + bb†)/2` as
//! `U_I(t) = exp(A+ K+) exp(2 A0 K0) exp(A- K-)`. Everything else in the crate
//! (transition amplitudes, photon statistics, squeezing, signal-to-noise
//! ratios) is assembled from the coefficient triple `(A+, A-, A0)`.
//!
//! - [`model`]: parameters, regimes, pump profiles, revival times.
//! - [`wei_norman`]: closed-form and integrated coefficient functions.
//! - [`amplitudes`]: Fock and coherent transition probabilities.
//! - [`moments`]: normal-ordered moments of the evolved mode operators.
//! - [`observables`]: Mandel Q, cross correlations, squeezing, SNR.
//! - [`oracle`]: brute-force propagation on a truncated Fock space.

pub mod amplitudes;
pub mod config;
pub mod error;
pub mod model;
pub mod moments;
pub mod observables;
pub mod ode;
pub mod oracle;
pub mod special;
pub mod wei_norman;

pub use error::{Error, Result};
pub use model::{ModelParams, PumpProfile, Regime, RegimeKind};
pub use wei_norman::{DerivedScalars, WeiNormanCoefficients};

pub use num_complex::Complex64;
