//! End-to-end classification with per-stage bookkeeping.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::intensity::{classify_by_intensity, derive_threshold, IntensityError, IntensityThreshold};
use crate::model::{validate_params, ClassLabel, LabeledCloud, ParamErrors, PipelineParams, ScanConfig};
use crate::refine::{knn_refine, voxel_refine, RefineError, SpacingModel};
use crate::spatial::{NeighborIndex, SpatialError, VoxelGrid};
use crate::verify::{tree_height_split, verify_wood, VerifyConfig, VerifyError, VerifySummary};

#[derive(Debug, Error, PartialEq)]
pub enum PipelineError {
    #[error("cloud is empty")]
    EmptyCloud,
    #[error(transparent)]
    Params(#[from] ParamErrors),
    #[error("intensity stage: {0}")]
    Intensity(#[from] IntensityError),
    #[error("refinement stage: {0}")]
    Refine(#[from] RefineError),
    #[error("spatial index: {0}")]
    Spatial(#[from] SpatialError),
    #[error("verification stage: {0}")]
    Verify(#[from] VerifyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StageTimes {
    pub intensity: Duration,
    pub knn: Duration,
    pub voxel: Duration,
    pub verify: Duration,
}

impl StageTimes {
    pub fn total(&self) -> Duration {
        self.intensity + self.knn + self.voxel + self.verify
    }
}

/// Index sets produced by every stage, all ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct StageTrace {
    pub wood_a: Vec<usize>,
    pub leaf_a: Vec<usize>,
    pub wood_b: Vec<usize>,
    pub leaf_b: Vec<usize>,
    pub wood_c: Vec<usize>,
    pub leaf_c: Vec<usize>,
    pub leaf_d: Vec<usize>,
    pub final_wood: Vec<usize>,
    pub final_leaf: Vec<usize>,
    pub threshold: IntensityThreshold,
    pub verification: VerifySummary,
    pub times: StageTimes,
}

impl StageTrace {
    /// Points moved to wood by verification, counted on the wood side.
    pub fn wood_gain(&self) -> usize {
        self.final_wood.len() - self.wood_c.len()
    }

    /// The same figure counted on the leaf side.
    pub fn leaf_loss(&self) -> usize {
        self.leaf_d.len() - self.final_leaf.len()
    }

    /// Stage counts laid out like the published process table.
    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{:<14}{:>14}{:>14}{:>14}{:>14}{:>16}", "", "intensity", "knn", "voxel", "", "verification");
        let _ = writeln!(
            s,
            "{:<14}{:>14}{:>14}{:>14}{:>14}{:>16}",
            "wood points",
            self.wood_a.len(),
            self.wood_b.len(),
            self.wood_c.len(),
            "",
            self.final_wood.len()
        );
        let _ = writeln!(
            s,
            "{:<14}{:>14}{:>14}{:>14}{:>14}{:>16}",
            "leaf points",
            self.leaf_a.len(),
            self.leaf_b.len(),
            self.leaf_c.len(),
            self.leaf_d.len(),
            self.final_leaf.len()
        );
        let _ = writeln!(s, "{:<14}{:>14}{:>14}{:>14}{:>14}{:>16}", "", "A", "B", "C", "D", "final");
        let _ = writeln!(s, "intensity threshold {:.4} ({:?})", self.threshold.value, self.threshold.provenance);
        let t = &self.times;
        let _ = writeln!(
            s,
            "time ms: intensity {:.1}, knn {:.1}, voxel {:.1}, verify {:.1}, total {:.1}",
            ms(t.intensity),
            ms(t.knn),
            ms(t.voxel),
            ms(t.verify),
            ms(t.total())
        );
        s
    }
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

/// Sorted union of two disjoint ascending sets.
fn merge(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] < b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Runs the intensity gate, both refinements and wood verification.
///
/// `cloud` must already be centered on the scanner. Errors in any stage
/// abort the run.
pub fn classify(
    cloud: &LabeledCloud,
    scan: &ScanConfig,
    params: &PipelineParams,
) -> Result<(Vec<ClassLabel>, StageTrace), PipelineError> {
    scan.validate()?;
    let params = validate_params(*params)?;
    if cloud.is_empty() {
        return Err(PipelineError::EmptyCloud);
    }
    let spacing = SpacingModel::new(scan.angular_step)?;
    let mut times = StageTimes::default();

    let t = Instant::now();
    let all: Vec<usize> = (0..cloud.len()).collect();
    let full_index = NeighborIndex::build(cloud, &all)?;
    let fit = derive_threshold(cloud, &full_index, params.n_seeds, params.sphere_radius, params.rng_seed)?;
    drop(full_index);
    let (wood_a, leaf_a) = classify_by_intensity(cloud, fit.threshold.value);
    times.intensity = t.elapsed();
    log::debug!(
        "intensity threshold {:.4} from {} wood / {} leaf training points",
        fit.threshold.value,
        fit.seed_classes.wood.len(),
        fit.seed_classes.leaf.len()
    );

    let t = Instant::now();
    let (wood_b, leaf_b) = knn_refine(
        cloud,
        &wood_a,
        &spacing,
        params.k_neighbors,
        params.neighbor_ratio_threshold,
    )?;
    times.knn = t.elapsed();

    let t = Instant::now();
    let (grid, wood_c, leaf_c) = if wood_b.is_empty() {
        (VoxelGrid::build(cloud, &all, params.voxel_divisions)?, Vec::new(), Vec::new())
    } else {
        let grid = VoxelGrid::build(cloud, &wood_b, params.voxel_divisions)?;
        let (w, l) = voxel_refine(&grid, scan.angular_step, params.voxel_ratio_threshold)?;
        (grid, w, l)
    };
    times.voxel = t.elapsed();

    let t = Instant::now();
    let leaf_d = merge(&merge(&leaf_a, &leaf_b), &leaf_c);
    let config = VerifyConfig {
        spacing,
        intensity_threshold: fit.threshold.value,
        sd1: params.sd1,
        sd2: params.sd2,
        z_split: tree_height_split(cloud, params.height_fraction)?,
    };
    let (final_wood, final_leaf, verification) = verify_wood(cloud, &wood_c, &leaf_d, &grid, config)?;
    times.verify = t.elapsed();

    let mut labels = vec![ClassLabel::Leaf; cloud.len()];
    for &i in &final_wood {
        labels[i] = ClassLabel::Wood;
    }
    let trace = StageTrace {
        wood_a,
        leaf_a,
        wood_b,
        leaf_b,
        wood_c,
        leaf_c,
        leaf_d,
        final_wood,
        final_leaf,
        threshold: fit.threshold,
        verification,
        times,
    };
    Ok((labels, trace))
}
