//! Numerical lab for the entropy power inequality and its reversal.
//!
//! The library builds piecewise densities (truncated Pareto, Pareto, Gaussian,
//! uniform, exponential and their affine images), convolves them in closed form
//! or by quadrature, computes differential entropies and the distance to
//! normality, and checks entropy inequalities with explicit error margins.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calculus;
pub mod cli;
pub mod convolution;
pub mod density;
pub mod entropy;
pub mod error;
pub mod experiment;
pub mod inequalities;

pub use error::{Error, Result};
