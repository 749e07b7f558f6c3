//! Piecewise-linear trigonometric Riesz system on the unit cube.
//!
//! The library is organized around one family of objects: the sawtooth
//! generators `C` and `S` (piecewise-linear interpolants of `cos(2πt)` and
//! `sin(2πt)`), their integer-frequency dilations `C_k(x) = C(k·x)` and
//! `S_k(x) = S(k·x)` on `[0,1]^d`, and the half-lattice index set that makes
//! `{1} ∪ {C_k, S_k}` a Riesz basis of `L2([0,1]^d)`.
//!
//! Modules:
//! - [`basis`] — closed-form evaluation of the generators and the
//!   half-lattice ordering predicate.
//! - [`lattice`] — lattice point enumeration/counting in Euclidean balls and
//!   the weight-rearrangement machinery behind the n-term bounds.
//! - [`spectrum`] — coefficient containers, the Möbius-function transforms
//!   between cosine/sine and sawtooth coefficients, norms, exact Gram
//!   matrices, and seeded random test functions.
//! - [`network`] — the ReLU network data model, exact constructions of basis
//!   functions and their linear combinations, structural audits, and
//!   serialization.
//! - [`approx`] — radius-truncation and best n-term approximation pipelines
//!   with certified error reports.
//! - [`recovery`] — least-squares and basis-pursuit recovery of coefficient
//!   vectors from randomly sampled function values.
//! - [`config`] — numeric constants and solver knobs, overridable from a
//!   config file.

pub mod approx;
pub mod basis;
pub mod config;
pub mod error;
pub mod lattice;
pub mod network;
pub mod recovery;
pub mod rng;
pub mod spectrum;

pub use basis::{BasisId, GeneratorKind, MultiIndex};
pub use config::Config;
pub use error::{Error, Result};
pub use spectrum::{FourierCoeffs, GramMatrix, RieszCoeffs};
