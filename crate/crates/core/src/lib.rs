//! Robust (k,z)-clustering: choose `k` facilities minimizing the largest,
//! over a family of client weight vectors, of the weighted sum of `z`-th
//! powers of client-to-center distances.
//!
//! The crate provides an exact enumeration oracle, bicriteria seeding, a
//! ring-and-ball coreset for the weight-vector formulation, a
//! leader-guessing `(1+ε)`-approximation over doubling metrics, a
//! midpoint-closure search for Euclidean inputs that beats the `3^z`
//! projection bound, and generators for the discrete `k`-center hardness
//! gadget.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bicriteria;
pub mod coreset;
pub mod epas;
pub mod error;
pub mod euclid;
pub mod generate;
pub mod hardness;
pub mod instance;
pub mod io;
pub mod metric;
pub mod oracle;

pub use error::{Error, Result};
pub use instance::{Facilities, Group, Instance, Solution};
pub use metric::{Ball, MetricSpace, Site};
