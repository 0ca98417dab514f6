//! pinchtrace: a laboratory for noncommutative trace inequalities.
//!
//! The crate computes word-trace averages over all two-letter words with
//! prescribed letter counts, pinched commuting parts, and clustered traces
//! for positive semidefinite matrix pairs; reproduces the exact 3x3
//! counterexample family to the clustered upper bound; and hunts for new
//! violations via eigenbasis cycle (spectral-bridge) diagnostics and a
//! seeded multiplicative hill-climb.
//!
//! Everything runs in one of two scalar modes: exact arbitrary-precision
//! rationals for real symmetric inputs, or complex doubles with a
//! documented tolerance policy.

pub mod bridge;
pub mod cha;
pub mod error;
pub mod harness;
pub mod matrix;
pub mod pinching;
pub mod report;
pub mod samplers;
pub mod scalar;
pub mod search;
pub mod spectral;
pub mod words;

pub use error::{Error, Result};
pub use matrix::{AnyMatrix, Matrix};
pub use report::InequalityReport;
pub use scalar::{Cf64, Exact, Scalar, ScalarMode};
pub use spectral::SpectralDecomposition;
