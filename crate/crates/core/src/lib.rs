//! High-precision evaluation of Hardy's Z-function and its derivatives.
//!
//! The crate computes the main sum of the approximate functional equation for
//! `Z^(k)(t)`, an exact reference value assembled from the Dirichlet-type series
//! `η_p(d, s) = Σ n^{-s}(d − log n)^p` and Faà di Bruno coefficients, and the
//! error term `R_k(t)` between them.

pub mod combinatorics;
pub mod error;
pub mod eta;
pub mod hardy;
pub mod harness;
pub mod numerics;
pub mod theta;

pub use error::{Error, Result};
pub use numerics::{context_for, BigComplex, BigReal, PrecisionContext};
