//! Constant-rank regions of F on a grid, leaves of the null foliation, and
//! the space of leaves.

mod grid;
mod leaf;
mod summary;
mod union_find;

use thiserror::Error;

use crate::geometry::GeometryError;

pub use grid::{rank_map, GridAxis, GridSpec, RegionMap, RegionSummary};
pub use leaf::{eom_residual, trace_leaf, trace_leaf_with_direction, LeafPath, Termination};
pub use summary::{leaf_space_summary, LeafSpaceReport, RegionLeafInfo};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FoliationError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("step size must be positive and finite, got {0}")]
    InvalidStep(f64),
    #[error("F vanishes at the start point: every direction is null, there is no canonical leaf")]
    RankZero,
    #[error("F has full rank at the start point: the only solution is the constant path")]
    FullRank,
    #[error("null space has dimension {dim}; supply an initial direction")]
    AmbiguousNullSpace { dim: usize },
    #[error("initial direction has no component in the null space")]
    DirectionOutsideNullSpace,
    #[error("path has {len} points, at least 3 are needed")]
    PathTooShort { len: usize },
    #[error("path repeats a point around index {index}")]
    DegeneratePath { index: usize },
}
