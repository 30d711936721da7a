//! Complex solutions of the Painlevé IV equation from higher-order
//! supersymmetric partners of the harmonic oscillator.
//!
//! The pipeline runs bottom-up:
//!
//! * [`special`]: Kummer's function `M(a, b; z)` and oscillator eigenstates.
//! * [`seeds`]: complex Schrödinger seeds and the annihilation-operator chain.
//! * [`wronskian`]: derivative recurrences and Wronskian jets.
//! * [`susy`]: the k-th order partner potential, Crum map and extremal states.
//! * [`painleve`]: PIV solutions, their parameters and an independent residual.
//! * [`spectra`]: ladder operators and the spectral structure of `H_k`.
//!
//! Every generated object can be checked by a finite-difference residual that
//! does not share code with the analytic construction.

pub mod error;
pub mod fd;
pub mod grid;
pub mod jet;
pub mod painleve;
pub mod seeds;
pub mod special;
pub mod spectra;
pub mod susy;
pub mod wronskian;

pub use error::{Error, Result};
pub use grid::{Grid, GridFunction};
pub use jet::ComplexJet;
pub use num_complex::Complex64;
