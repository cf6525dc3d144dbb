//! Wood verification: promotes leaf-labeled points back to wood.
//!
//! Below the height split the lower trunk is grown voxel by voxel inside
//! each z layer: any occupied voxel next to a wood voxel becomes wood. Above
//! the split each leaf point near a wood point is promoted when it is within
//! `sd1·S_s` of it, or within `sd2·S_s` and at least as bright as the
//! intensity threshold, `S_s` being the wood point's expected spacing.
//! Promoted points act as wood in later sweeps until nothing changes.
//!
//! Promotions are committed at the end of each sweep, so the outcome does not
//! depend on iteration order.

use std::collections::VecDeque;

use thiserror::Error;

use crate::model::LabeledCloud;
use crate::par;
use crate::refine::SpacingModel;
use crate::spatial::{NeighborIndex, NeighborMode, VoxelBuckets, VoxelGrid, VoxelIndex};

#[derive(Debug, Error, PartialEq)]
pub enum VerifyError {
    #[error("cannot compute a height split of an empty cloud")]
    EmptyCloud,
    #[error("wood and leaf sets do not partition the cloud ({wood} + {leaf} != {total})")]
    NotPartition { wood: usize, leaf: usize, total: usize },
}

/// `z_min + fraction · (z_max − z_min)` over the whole cloud.
pub fn tree_height_split(cloud: &LabeledCloud, height_fraction: f64) -> Result<f64, VerifyError> {
    let (lo, hi) = cloud
        .points()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.z), hi.max(p.z)));
    if cloud.is_empty() {
        return Err(VerifyError::EmptyCloud);
    }
    Ok(lo + height_fraction * (hi - lo))
}

/// Settings shared by both verification regimes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    pub spacing: SpacingModel,
    pub intensity_threshold: f64,
    pub sd1: f64,
    pub sd2: f64,
    pub z_split: f64,
}

/// Mutable classification during verification. Every point is either wood
/// or leaf; leaf points only ever turn into wood.
pub struct VerificationState<'a> {
    cloud: &'a LabeledCloud,
    grid: &'a VoxelGrid,
    config: VerifyConfig,
    all: VoxelBuckets,
    is_wood: Vec<bool>,
    /// Wood points not yet used as sources of upper-region checks.
    frontier: Vec<usize>,
    lower_promotions: usize,
    upper_promotions: usize,
    sweeps: usize,
}

impl<'a> VerificationState<'a> {
    /// `wood` lists the wood points; everything else starts as leaf.
    pub fn new(cloud: &'a LabeledCloud, grid: &'a VoxelGrid, wood: &[usize], config: VerifyConfig) -> Self {
        let mut is_wood = vec![false; cloud.len()];
        for &i in wood {
            is_wood[i] = true;
        }
        let everything: Vec<usize> = (0..cloud.len()).collect();
        let mut frontier = wood.to_vec();
        frontier.sort_unstable();
        frontier.dedup();
        Self {
            cloud,
            grid,
            config,
            all: grid.reindex(cloud, &everything),
            is_wood,
            frontier,
            lower_promotions: 0,
            upper_promotions: 0,
            sweeps: 0,
        }
    }

    pub fn is_wood(&self, i: usize) -> bool {
        self.is_wood[i]
    }

    pub fn wood_count(&self) -> usize {
        self.is_wood.iter().filter(|&&w| w).count()
    }

    pub fn leaf_count(&self) -> usize {
        self.is_wood.len() - self.wood_count()
    }

    pub fn lower_promotions(&self) -> usize {
        self.lower_promotions
    }

    pub fn upper_promotions(&self) -> usize {
        self.upper_promotions
    }

    /// Upper-region sweeps run so far.
    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    fn is_lower(&self, v: VoxelIndex) -> bool {
        self.grid.center(v)[2] < self.config.z_split
    }

    fn promote(&mut self, i: usize) -> bool {
        if self.is_wood[i] {
            return false;
        }
        self.is_wood[i] = true;
        self.frontier.push(i);
        true
    }

    /// Breadth-first growth inside z layers below the split. Returns the
    /// number of promoted points.
    pub fn grow_lower_region(&mut self) -> usize {
        let n_vox = self.all.len();
        let mut visited = vec![false; n_vox];
        let mut queue = VecDeque::new();
        for s in 0..n_vox {
            let (v, members) = self.all.entry(s);
            if self.is_lower(v) && members.iter().any(|&i| self.is_wood[i as usize]) {
                visited[s] = true;
                queue.push_back(v);
            }
        }
        let mut promoted = 0;
        let mut neighbors = Vec::with_capacity(8);
        while let Some(v) = queue.pop_front() {
            neighbors.clear();
            self.grid
                .for_each_neighbor(v, NeighborMode::SameLayer3x3, |n| neighbors.push(n));
            for &n in &neighbors {
                let Some(slot) = self.all.slot(n) else { continue };
                let members: Vec<u32> = self.all.entry(slot).1.to_vec();
                for i in members {
                    if self.promote(i as usize) {
                        promoted += 1;
                    }
                }
                if !visited[slot] {
                    visited[slot] = true;
                    queue.push_back(n);
                }
            }
        }
        self.frontier.sort_unstable();
        self.lower_promotions += promoted;
        promoted
    }

    /// Point-level checks above the split, repeated until a sweep promotes
    /// nothing. Returns the number of promoted points.
    pub fn verify_upper_region(&mut self) -> usize {
        let mut total = 0;
        loop {
            let n = self.upper_sweep();
            if n == 0 {
                break;
            }
            total += n;
        }
        self.upper_promotions += total;
        total
    }

    fn upper_sweep(&mut self) -> usize {
        let frontier = std::mem::take(&mut self.frontier);
        let pts = self.cloud.points();
        let sources: Vec<usize> = frontier
            .into_iter()
            .filter(|&i| self.is_wood[i] && !self.is_lower(self.grid.voxel_of(&pts[i])))
            .collect();
        if sources.is_empty() {
            return 0;
        }
        self.sweeps += 1;

        let mut source_voxels: Vec<VoxelIndex> = sources.iter().map(|&i| self.grid.voxel_of(&pts[i])).collect();
        source_voxels.sort_unstable();
        source_voxels.dedup();

        let mut seen = vec![false; self.all.len()];
        let mut candidates = Vec::new();
        for &v in &source_voxels {
            let mut visit = |u: VoxelIndex| {
                if let Some(slot) = self.all.slot(u) {
                    if !seen[slot] {
                        seen[slot] = true;
                        candidates.extend(
                            self.all
                                .entry(slot)
                                .1
                                .iter()
                                .map(|&i| i as usize)
                                .filter(|&i| !self.is_wood[i]),
                        );
                    }
                }
            };
            visit(v);
            self.grid.for_each_neighbor(v, NeighborMode::Cube3x3x3, &mut visit);
        }
        if candidates.is_empty() {
            return 0;
        }
        candidates.sort_unstable();

        let index = match NeighborIndex::build(self.cloud, &sources) {
            Ok(ix) => ix,
            Err(_) => return 0,
        };
        let cfg = self.config;
        let theta = cfg.spacing.angular_step();
        let max_range = sources.iter().map(|&i| pts[i].range()).fold(0.0, f64::max);
        let search = cfg.sd1.max(cfg.sd2) * theta * max_range;
        let grid = self.grid;

        let hits = par::map_slice(&candidates, |&l| {
            let lp = &pts[l];
            let lv = grid.voxel_of(lp);
            let bright = lp.intensity >= cfg.intensity_threshold;
            index.within_radius(lp.position(), search).into_iter().any(|w| {
                let wp = &pts[w];
                if grid.voxel_of(wp).chebyshev(&lv) > 1 {
                    return false;
                }
                let spacing = wp.range() * theta;
                let d = wp.distance(lp);
                d <= cfg.sd1 * spacing || (bright && d <= cfg.sd2 * spacing)
            })
        });
        let mut promoted = 0;
        for (&l, hit) in candidates.iter().zip(hits) {
            if hit && self.promote(l) {
                promoted += 1;
            }
        }
        promoted
    }

    /// Ascending (wood, leaf) index sets.
    pub fn partition(&self) -> (Vec<usize>, Vec<usize>) {
        let mut wood = Vec::new();
        let mut leaf = Vec::new();
        for (i, &w) in self.is_wood.iter().enumerate() {
            if w {
                wood.push(i);
            } else {
                leaf.push(i);
            }
        }
        (wood, leaf)
    }
}

/// Bookkeeping of one verification run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct VerifySummary {
    pub lower_promotions: usize,
    pub upper_promotions: usize,
    pub sweeps: usize,
}

/// Runs lower growth and upper checks alternately until neither promotes
/// anything. The result is a fixpoint: verifying it again changes nothing.
pub fn verify_wood(
    cloud: &LabeledCloud,
    wood: &[usize],
    leaf: &[usize],
    grid: &VoxelGrid,
    config: VerifyConfig,
) -> Result<(Vec<usize>, Vec<usize>, VerifySummary), VerifyError> {
    if wood.len() + leaf.len() != cloud.len() {
        return Err(VerifyError::NotPartition {
            wood: wood.len(),
            leaf: leaf.len(),
            total: cloud.len(),
        });
    }
    let mut state = VerificationState::new(cloud, grid, wood, config);
    loop {
        state.grow_lower_region();
        if state.verify_upper_region() == 0 {
            break;
        }
    }
    let (w, l) = state.partition();
    let summary = VerifySummary {
        lower_promotions: state.lower_promotions(),
        upper_promotions: state.upper_promotions(),
        sweeps: state.sweeps(),
    };
    Ok((w, l, summary))
}
