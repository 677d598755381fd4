//! Quantum master equations for the Anderson-Holstein model.
//!
//! A two-level molecular system (one harmonic nuclear coordinate, one on-site
//! electron level) is coupled to a reservoir of non-interacting fermions. In
//! the weak-coupling regime the reduced dynamics of the system is governed by
//! the Redfield equation or, after the secular approximation, by a Lindblad
//! (GKLS) equation. This crate builds both generators on a truncated
//! two-ladder eigenbasis, tabulates the bath correlation coefficients that
//! weight them, propagates block density matrices in time, and solves the
//! semiclassical phase-space limits of both equations (the classical master
//! equation and its Lindbladian counterpart).
//!
//! Everything is dimensionless: energies are measured against the oscillator
//! energy scale, `epsilon` is the semiclassical parameter and `alpha` the
//! system-bath coupling strength.
//!
//! The [`acceptance`] module bundles the verification scenarios used by the
//! `acceptance` integration test target and by `ahsim check`.
//!
//! With the default `parallel` feature, grid updates, phase-space field
//! assembly and coefficient tabulation run data-parallel via rayon. Building
//! with `--no-default-features` selects the sequential fallback; results are
//! bit-identical either way.

pub mod acceptance;
pub mod basis;
pub mod bath;
pub mod density;
pub mod dynamics;
mod error;
pub mod generators;
pub mod linalg;
pub mod params;
pub mod quad;
mod par;
pub mod semiclassical;

pub use error::{Error, Result};
pub use params::ModelParams;

/// Complex scalar used throughout.
pub type C64 = nalgebra::Complex<f64>;

/// Dense complex matrix used for operators and full density matrices.
pub type CMatrix = nalgebra::DMatrix<C64>;
