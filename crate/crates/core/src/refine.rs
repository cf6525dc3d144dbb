//! Second and third classification passes.
//!
//! A scanner with angular step θ samples a surface at range d roughly every
//! `d·θ` meters. Wood surfaces reproduce that spacing; leaves, being sparse
//! and jittery, do not. [`knn_refine`] compares each point's mean neighbor
//! distance with the expected spacing; [`voxel_refine`] compares each voxel's
//! point count with the count a fully sampled surface would produce.

use thiserror::Error;

use crate::model::{LabeledCloud, Point};
use crate::par;
use crate::spatial::{NeighborIndex, NeighborMode, SpatialError, VoxelGrid, VoxelIndex};

#[derive(Debug, Error, PartialEq)]
pub enum RefineError {
    #[error("angular step must be > 0, got {0}")]
    BadAngularStep(f64),
    #[error("point coincides with the scanner; spacing is undefined")]
    ZeroRange,
    #[error("voxel center coincides with the scanner; expected count is undefined")]
    ZeroVoxelDistance,
    #[error("indexed subset has a single point; no neighbors to average")]
    Singleton,
    #[error(transparent)]
    Spatial(#[from] SpatialError),
}

/// Expected point spacing as a function of range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpacingModel {
    angular_step: f64,
}

impl SpacingModel {
    pub fn new(angular_step: f64) -> Result<Self, RefineError> {
        if angular_step > 0.0 && angular_step.is_finite() {
            Ok(Self { angular_step })
        } else {
            Err(RefineError::BadAngularStep(angular_step))
        }
    }

    pub fn angular_step(&self) -> f64 {
        self.angular_step
    }

    /// `S_s = d_p · θ_s` for a point in scanner-centered coordinates.
    pub fn spacing_at(&self, point: &Point) -> Result<f64, RefineError> {
        let d = point.range();
        if d > 0.0 {
            Ok(d * self.angular_step)
        } else {
            Err(RefineError::ZeroRange)
        }
    }
}

pub fn spacing_at(point: &Point, model: &SpacingModel) -> Result<f64, RefineError> {
    model.spacing_at(point)
}

/// Mean distance from indexed point `point` to its `k` nearest indexed
/// neighbors (fewer when the subset is small).
pub fn mean_neighbor_distance(index: &NeighborIndex, point: usize, k: usize) -> Result<f64, RefineError> {
    let nn = index.k_nearest(point, k)?;
    if nn.is_empty() {
        return Err(RefineError::Singleton);
    }
    Ok(nn.iter().map(|n| n.distance).sum::<f64>() / nn.len() as f64)
}

/// The wood rule of the neighbor pass: ratio at or below the threshold.
#[inline]
pub fn is_wood_ratio(ratio: f64, threshold: f64) -> bool {
    ratio <= threshold
}

/// `d_a / S_s` for every point of `subset`, in subset order. Points with no
/// neighbors or zero range get `+∞`.
pub fn spacing_ratios(
    cloud: &LabeledCloud,
    index: &NeighborIndex,
    subset: &[usize],
    model: &SpacingModel,
    k: usize,
) -> Vec<f64> {
    let pts = cloud.points();
    par::map_slice(subset, |&i| {
        let da = match mean_neighbor_distance(index, i, k) {
            Ok(d) => d,
            Err(_) => return f64::INFINITY,
        };
        match model.spacing_at(&pts[i]) {
            Ok(s) => da / s,
            Err(_) => f64::INFINITY,
        }
    })
}

/// Splits `wood_a` into (wood_B, leaf_B) by the spacing-ratio rule, using a
/// neighbor index over `wood_a` alone. A singleton input has no neighbors and
/// goes to leaf.
pub fn knn_refine(
    cloud: &LabeledCloud,
    wood_a: &[usize],
    model: &SpacingModel,
    k: usize,
    ratio_threshold: f64,
) -> Result<(Vec<usize>, Vec<usize>), RefineError> {
    if wood_a.is_empty() {
        return Ok((Vec::new(), Vec::new()));
    }
    let index = NeighborIndex::build(cloud, wood_a)?;
    let ratios = spacing_ratios(cloud, &index, wood_a, model, k);
    let mut wood = Vec::new();
    let mut leaf = Vec::new();
    for (&i, &r) in wood_a.iter().zip(&ratios) {
        if is_wood_ratio(r, ratio_threshold) {
            wood.push(i);
        } else {
            leaf.push(i);
        }
    }
    wood.sort_unstable();
    leaf.sort_unstable();
    Ok((wood, leaf))
}

/// Point count a fully sampled surface would leave in a voxel of the given
/// sizes whose center sits `d_v` from the scanner:
/// `Z/(d_v·θ) × √(X²+Y²)/(d_v·θ)`.
pub fn expected_voxel_count(sizes: [f64; 3], d_v: f64, angular_step: f64) -> Result<f64, RefineError> {
    if !(d_v > 0.0) {
        return Err(RefineError::ZeroVoxelDistance);
    }
    if !(angular_step > 0.0) {
        return Err(RefineError::BadAngularStep(angular_step));
    }
    let [x, y, z] = sizes;
    let step = d_v * angular_step;
    Ok((z / step) * (x.hypot(y) / step))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VoxelDensityRecord {
    pub voxel: VoxelIndex,
    /// Points actually in the voxel.
    pub num_r: usize,
    /// Points expected from a fully sampled surface.
    pub num_s: f64,
    /// `num_r / num_s`.
    pub ratio: f64,
}

/// Density record of every occupied voxel, in grid iteration order.
pub fn voxel_density_records(grid: &VoxelGrid, angular_step: f64) -> Result<Vec<VoxelDensityRecord>, RefineError> {
    let buckets = grid.buckets();
    let sizes = grid.sizes();
    par::map_range(buckets.len(), |s| {
        let (voxel, members) = buckets.entry(s);
        let c = grid.center(voxel);
        let d_v = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
        let num_s = expected_voxel_count(sizes, d_v, angular_step)?;
        Ok(VoxelDensityRecord {
            voxel,
            num_r: members.len(),
            num_s,
            ratio: members.len() as f64 / num_s,
        })
    })
    .into_iter()
    .collect()
}

/// Whether `v` has no occupied neighbor among the grid's buckets.
pub fn is_isolated(grid: &VoxelGrid, v: VoxelIndex) -> bool {
    let buckets = grid.buckets();
    let mut isolated = true;
    grid.for_each_neighbor(v, NeighborMode::Cube3x3x3, |n| {
        if isolated && buckets.is_occupied(n) {
            isolated = false;
        }
    });
    isolated
}

/// Splits the points bucketed in `grid` (wood_B) into (wood_C, leaf_C).
/// A voxel is a leaf voxel when its density ratio is below
/// `ratio_threshold` or it has no occupied 26-neighbor.
pub fn voxel_refine(
    grid: &VoxelGrid,
    angular_step: f64,
    ratio_threshold: f64,
) -> Result<(Vec<usize>, Vec<usize>), RefineError> {
    let records = voxel_density_records(grid, angular_step)?;
    let leaf_voxel: Vec<bool> = par::map_slice(&records, |r| {
        r.ratio < ratio_threshold || is_isolated(grid, r.voxel)
    });
    let buckets = grid.buckets();
    let mut wood = Vec::new();
    let mut leaf = Vec::new();
    for (s, &is_leaf) in leaf_voxel.iter().enumerate() {
        let (_, members) = buckets.entry(s);
        let target = if is_leaf { &mut leaf } else { &mut wood };
        target.extend(members.iter().map(|&i| i as usize));
    }
    wood.sort_unstable();
    leaf.sort_unstable();
    Ok((wood, leaf))
}
