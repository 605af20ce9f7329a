//! Finite-dimensional monotone-operator calculus.
//!
//! Points of `R^n` (1 <= n <= 8) serve both as primal points and as dual
//! points; the pairing is the dot product and the norm is Euclidean. The crate
//! provides:
//!
//! - [`geometry`]: closed convex set descriptions with membership, distance,
//!   support, emptiness and Minkowski sums with balls.
//! - [`operators`]: a catalog of maximal monotone operators with exact images
//!   `T(x)`, resolvent (Minty) graph sampling and monotonicity validation.
//! - [`slope`]: the slope functional `L(x, x*, T)`, the image distance
//!   `d(x*, T(x))` and the shifted slope of the enlargement `T^eps`.
//! - [`enlargements`]: membership, polyhedra and domain probes for the
//!   norm-weighted enlargement `T^eps` and the constant enlargement `T_eps`.
//! - [`theorems`]: seeded checkers producing [`Verdict`]s.
//!
//! Everything here is pure and allocation-only; IO lives in the `monotone`
//! crate.
#![no_std]

extern crate alloc;

pub mod catalog;
pub mod enlargements;
mod error;
mod ext;
pub mod geometry;
mod linalg;
pub mod operators;
pub mod rng;
pub mod slope;
pub mod theorems;
mod vector;
pub mod verdict;

pub use error::{Error, Result};
pub use ext::ExtReal;
pub use geometry::{ConvexSet, Halfspace, Sign};
pub use linalg::Matrix;
pub use operators::{GraphPoint, GraphSample, OperatorSpec, SmoothId};
pub use slope::SlopeResult;
pub use vector::{Vector, MAX_DIM};
pub use verdict::{TheoremId, Verdict, Witness};
