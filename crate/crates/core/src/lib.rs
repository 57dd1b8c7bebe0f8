//! Complexity-vs-probability analysis of generative input-output maps.
//!
//! The crate provides the pieces needed to measure how strongly a map favours
//! simple output patterns:
//!
//! * [`bits`] — binary strings, dot-bracket structures, and their elementary
//!   statistics (ones, adjacent changes).
//! * [`complexity`] — the Lempel-Ziv 1976 phrase counter and the adapted
//!   complexity estimator built on it.
//! * [`maps`] — generative maps producing fixed-length binary outputs: a
//!   finite state transducer, random polynomial curves, RNA secondary
//!   structure folding, Bernoulli bit strings, and real-valued series windows.
//! * [`sampling`] — seeded, shardable Monte Carlo sampling and exact input
//!   enumeration into mergeable output distributions with a stable text
//!   format.
//! * [`analysis`] — bound fitting over a distribution, scatter/rank datasets,
//!   pairwise probability prediction, per-complexity correlation reports,
//!   mass-deficit profiles, and low-complexity low-probability selection.
//! * [`predictor`] — complexity-driven next-bit forecasting, greedy
//!   extrapolation, and candidate ranking.
//!
//! Numeric kernels are generic over the scalar type via [`Scalar`]; the
//! distribution and analysis layers work in [`Real`] (`f64`), which is also
//! the precision of every file format.

pub mod analysis;
pub mod bits;
pub mod complexity;
pub mod error;
pub mod maps;
pub mod predictor;
pub mod sampling;
pub mod scalar;
pub mod stats;

pub use bits::{BitString, Bracket, DotBracket};
pub use error::{Error, Result};
pub use scalar::Scalar;

/// Concrete scalar used by the distribution, analysis and I/O layers.
pub type Real = f64;
