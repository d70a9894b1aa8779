//! Truncated non-binary LDPC messages processed in the Walsh-Hadamard domain.
//!
//! The crate covers the pieces needed to reason about the cost of a check
//! node that receives truncated messages (`q'` of `q` symbols, uniform tail):
//!
//! - [`message`]: truncated and dense messages, tail completion, log domain.
//! - [`wht`]: dense and sparsity-aware fast Walsh-Hadamard transforms with
//!   exact addition/negation counting.
//! - [`exact`]: exact expected operation counts over uniformly random
//!   non-zero patterns of fixed weight, in rational arithmetic.
//! - [`approx`]: the layer-wise Bernoulli approximation of the same counts.
//! - [`convolution`]: XOR-group convolution, check and variable node
//!   primitives, cost models.
//! - [`montecarlo`]: seeded sampling and exhaustive enumeration of patterns.

pub mod approx;
pub mod convolution;
mod error;
pub mod exact;
pub mod message;
pub mod montecarlo;
pub mod wht;

pub use error::{Error, Result};
pub use message::{DenseVector, Domain, TruncatedMessage};
pub use wht::{OpCount, PatternMask};

/// Tolerance used for probability-mass checks.
pub const MASS_EPS: f64 = 1e-12;
