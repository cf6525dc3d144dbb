//! Spatial substrates: an exact kd-tree for neighbor queries and an
//! axis-aligned voxel partition.

mod kdtree;
mod voxel;

use thiserror::Error;

pub use kdtree::{Neighbor, NeighborIndex};
pub use voxel::{NeighborMode, VoxelBuckets, VoxelGrid, VoxelIndex, DEGENERATE_PAD};

#[derive(Debug, Error, PartialEq)]
pub enum SpatialError {
    #[error("cannot index an empty point subset")]
    EmptySubset,
    #[error("point {index} is not part of the indexed subset")]
    QueryOutsideSubset { index: usize },
    #[error("neighbor count k must be at least 1")]
    ZeroK,
    #[error("voxel divisions must be at least 1, got {0}")]
    BadDivisions(usize),
    #[error("voxel {0:?} lies outside the grid")]
    VoxelOutOfRange(VoxelIndex),
}
