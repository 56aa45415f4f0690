//! Verification toolkit for uniform empirical-CDF convergence under dependence.
//!
//! The crate simulates stationary sequences with known dependence structure
//! (iid, AR(1), finite-state Markov chains, m-dependent moving sums), computes
//! exact strong-mixing (α) and absolute-regularity (β) coefficients for finite
//! chains, certifies the classical mixing covariance inequalities numerically,
//! evaluates the normalized variance-growth conditions that drive
//! Glivenko-Cantelli theorems for dependent data, and measures sup-norm
//! empirical-CDF deviations exactly at desk scale.
//!
//! Everything is deterministic given `(seed, stream)`: replications use
//! counter-based streams, so concurrent and sequential runs produce identical
//! numbers.

pub mod covcheck;
pub mod empirical;
pub mod entropy;
pub mod error;
pub mod fitting;
pub mod gcip;
pub mod mixing;
pub mod procgen;
pub mod rng;

pub use error::{LabError, Result};
