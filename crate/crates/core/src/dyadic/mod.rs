//! Exact dyadic geometry on the closed quadrant of `R^{1+n}_+`.

mod cube;
mod number;
mod region;

pub use cube::{covering_family, BoundaryCube, DyadicPoint, HalfCube};
pub use number::Dyadic;
pub use region::{region, DyadicBox, RegionKind, RegionSet};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GeometryError {
    #[error("negative dyadic offset {0}; cubes live in the positive quadrant")]
    NegativeOffset(i64),
    #[error("region requires a point")]
    MissingPoint,
    #[error("point lies outside the cube")]
    PointOutside,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}
