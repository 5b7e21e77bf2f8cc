//! Information geometry of bipartite Gaussian states on noncommutative phase
//! space.
//!
//! The crate classifies states of a two-modes-per-party toy covariance family
//! as unphysical, separable or entangled (Robertson-Schrödinger and PPT
//! conditions relative to a deformed symplectic form), computes Fisher-Rao
//! metrics of Gaussian covariance families, and integrates a regularized
//! volume density over the resulting parameter regions.
//!
//! Modules, bottom-up:
//!
//! - [`numerics`]: dense small-matrix kernel.
//! - [`phase_space`]: symplectic forms `J`, `Ω(θ,η)`, `Ω′`, Bopp-shift maps.
//! - [`gaussian`]: toy covariance family, symplectic spectra, classifier.
//! - [`infogeo`]: Fisher-Rao metric, regularizer.
//! - [`volume`]: region integrals and parameter sweeps.
//! - [`output`], [`report`], [`cli`]: tables, plots, audits, command line.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod gaussian;
pub mod infogeo;
pub mod numerics;
pub mod output;
pub mod phase_space;
pub mod report;
pub mod volume;

pub use error::{Error, Result};
