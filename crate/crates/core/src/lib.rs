//! Desk-scale computations around coarse fixed-point properties.
//!
//! The crate is organised by the objects it manipulates:
//!
//! * [`metric`]: uniformly convex norm spaces (Hilbert and finite-dimensional
//!   `ℓ^p`), their midpoints and moduli of convexity.
//! * [`centres`]: Chebyshev centres of bounded sets, mean centres of finite
//!   measures, shopping centres, and the stability estimates relating them.
//! * [`groups`]: finite groups given by multiplication tables with symmetric
//!   generating sets, and the usual family builders.
//! * [`spectral`]: averaging operators, two-sided spectral gaps, expander
//!   verdicts and Laplacian gap certificates.
//! * [`product`]: truncated bounded products, the almost-invariant vector
//!   iteration and the unbounded cocycle construction.
//! * [`actions`]: affine isometric actions, cocycles, displacement descent and
//!   the Gaussian kernel embedding.
//! * [`homeo`]: exact piecewise-linear lifts of circle homeomorphisms.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod actions;
pub mod centres;
pub mod config;
pub mod eigen;
pub mod error;
pub mod groups;
pub mod homeo;
pub mod linalg;
pub mod metric;
pub mod product;
pub mod rng;
pub mod spectral;

pub use error::{Error, Result};
