//! Dyadic geometry, Carleson and non-tangential functionals, causal singular
//! integrals and their sparse domination on the upper half-space
//! `R^{1+n}_+ = {(t, x) : t > 0}`.
//!
//! Points are ordered `(t, x_1, .., x_n)` throughout. Exact dyadic arithmetic
//! is used for all geometry; grid quantities are `f64`.

pub mod dyadic;
mod error;
pub mod experiments;
pub mod functionals;
pub mod grid;
pub mod kernels;
pub mod operators;
mod quad;
pub mod sparse;

pub use dyadic::{BoundaryCube, Dyadic, DyadicPoint, HalfCube, RegionKind, RegionSet};
pub use error::Error;
pub use experiments::ExperimentReport;
pub use functionals::{BoundaryGridFunction, CubeSequence};
pub use grid::{GridFunction, Window};
pub use kernels::{CausalSign, KernelSpec};
pub use operators::{PvParams, SparseKind};
pub use sparse::{SparseFamily, SparseParams};
