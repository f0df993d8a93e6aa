//! Spectral radii and limit points of the deformed Laplacian
//! `M_T(s) = I - sA + s^2 (D - I)` on trees, in configurable precision.
//!
//! The main entry points:
//! - [`diagonalize::count_eigenvalues`] locates eigenvalues of `M_T(s)`
//!   relative to a point in linear time.
//! - [`diagonalize::approximate_radius`] brackets the spectral radius by
//!   bisection, with an `O(k)` probe for caterpillars.
//! - [`shearer::generate`] builds the greedy caterpillar sequence whose radii
//!   approach a target `lambda`, and [`shearer::convergence_report`] measures
//!   how fast.
//! - [`limits`] holds the closed forms `tau0(s)` and `s*(lambda)`.

pub mod cli;
pub mod dense;
pub mod diagonalize;
pub mod error;
pub mod limits;
pub mod properties;
pub mod recurrence;
pub mod scalar;
pub mod shearer;
pub mod tree;

pub use error::{Error, Result};
pub use scalar::{PrecisionContext, Scalar};
