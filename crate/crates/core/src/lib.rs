//! Numerical laboratory for identifiability of nonsmooth functions on ℝⁿ.
//!
//! The crate is `no_std` (with `alloc`) and contains only pure computations:
//! function models with exact subdifferential oracles, slope calculus,
//! proximal sequences, embedded manifolds, subgradient-curve integrators and
//! the theorem-level sampling checks built on top of them. File formats and
//! the command-line front end live in the `ident-lab` crate.

#![no_std]
#![forbid(unsafe_code)]
// `!(x > 0.0)` is used on purpose so NaN is rejected with the rest.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::type_complexity)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod catalog;
pub mod desing;
pub mod error;
pub mod flow;
pub mod linalg;
pub mod manifold;
pub mod model;
pub mod polytope;
pub mod prox;
pub mod sampling;
pub mod slope;

pub use catalog::{catalog_get, CATALOG_NAMES};
pub use desing::DesingularizerSpec;
pub use error::{Error, Result};
pub use manifold::{ClosedSet, CuspRegion, Manifold};
pub use model::{ExtReal, FunctionModel, SmoothMap};
pub use polytope::Polytope;

/// A point (or vector) in ℝⁿ.
pub type Point = alloc::vec::Vec<f64>;
