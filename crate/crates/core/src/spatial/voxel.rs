use crate::model::{LabeledCloud, Point};
use crate::par;

use super::SpatialError;

/// Degenerate (zero-extent) axes are widened to this many meters.
pub const DEGENERATE_PAD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VoxelIndex {
    pub ix: u32,
    pub iy: u32,
    pub iz: u32,
}

impl VoxelIndex {
    pub fn new(ix: u32, iy: u32, iz: u32) -> Self {
        Self { ix, iy, iz }
    }

    /// Chebyshev distance in voxel units.
    pub fn chebyshev(&self, other: &VoxelIndex) -> u32 {
        self.ix
            .abs_diff(other.ix)
            .max(self.iy.abs_diff(other.iy))
            .max(self.iz.abs_diff(other.iz))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NeighborMode {
    /// The 8 voxels around `v` in its own z layer.
    SameLayer3x3,
    /// The 26 voxels of the surrounding cube.
    Cube3x3x3,
}

/// Point-index lists per occupied voxel, stored compactly: occupied voxel ids
/// sorted ascending, with offsets into one flat index array.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VoxelBuckets {
    divisions: u32,
    keys: Vec<u64>,
    offsets: Vec<u32>,
    points: Vec<u32>,
}

impl VoxelBuckets {
    fn from_pairs(divisions: u32, mut pairs: Vec<(u64, u32)>) -> Self {
        par::sort_unstable(&mut pairs);
        let mut keys = Vec::new();
        let mut offsets = Vec::new();
        let mut points = Vec::with_capacity(pairs.len());
        for (i, &(key, p)) in pairs.iter().enumerate() {
            if i == 0 || pairs[i - 1].0 != key {
                keys.push(key);
                offsets.push(i as u32);
            }
            points.push(p);
        }
        offsets.push(points.len() as u32);
        Self {
            divisions,
            keys,
            offsets,
            points,
        }
    }

    fn key(&self, v: VoxelIndex) -> u64 {
        let d = self.divisions as u64;
        (v.iz as u64 * d + v.iy as u64) * d + v.ix as u64
    }

    fn unkey(&self, key: u64) -> VoxelIndex {
        let d = self.divisions as u64;
        VoxelIndex::new((key % d) as u32, ((key / d) % d) as u32, (key / (d * d)) as u32)
    }

    /// Number of occupied voxels.
    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn total_points(&self) -> usize {
        self.points.len()
    }

    pub fn slot(&self, v: VoxelIndex) -> Option<usize> {
        self.keys.binary_search(&self.key(v)).ok()
    }

    /// Points in voxel `v`, ascending; empty when unoccupied.
    pub fn get(&self, v: VoxelIndex) -> &[u32] {
        match self.slot(v) {
            Some(s) => &self.points[self.offsets[s] as usize..self.offsets[s + 1] as usize],
            None => &[],
        }
    }

    pub fn is_occupied(&self, v: VoxelIndex) -> bool {
        self.slot(v).is_some()
    }

    /// Occupied voxels in (z, y, x) order with their point lists.
    pub fn iter(&self) -> impl Iterator<Item = (VoxelIndex, &[u32])> + '_ {
        (0..self.keys.len()).map(move |s| self.entry(s))
    }

    /// The `s`-th occupied voxel in iteration order.
    pub fn entry(&self, s: usize) -> (VoxelIndex, &[u32]) {
        (
            self.unkey(self.keys[s]),
            &self.points[self.offsets[s] as usize..self.offsets[s + 1] as usize],
        )
    }
}

/// Axis-aligned partition of the cloud's bounding box into
/// `divisions` equal parts per axis.
#[derive(Debug, Clone)]
pub struct VoxelGrid {
    min: [f64; 3],
    max: [f64; 3],
    size: [f64; 3],
    divisions: u32,
    buckets: VoxelBuckets,
}

impl VoxelGrid {
    /// The bounding box spans every point of `cloud`; only `subset` is
    /// bucketed.
    pub fn build(cloud: &LabeledCloud, subset: &[usize], divisions: usize) -> Result<Self, SpatialError> {
        if subset.is_empty() || cloud.is_empty() {
            return Err(SpatialError::EmptySubset);
        }
        if divisions == 0 || divisions > u32::MAX as usize {
            return Err(SpatialError::BadDivisions(divisions));
        }
        let mut min = [f64::INFINITY; 3];
        let mut max = [f64::NEG_INFINITY; 3];
        for p in cloud.points() {
            let pos = p.position();
            for a in 0..3 {
                min[a] = min[a].min(pos[a]);
                max[a] = max[a].max(pos[a]);
            }
        }
        for a in 0..3 {
            if max[a] - min[a] <= 0.0 {
                min[a] -= DEGENERATE_PAD / 2.0;
                max[a] += DEGENERATE_PAD / 2.0;
            }
        }
        let size = std::array::from_fn(|a| (max[a] - min[a]) / divisions as f64);
        let mut grid = Self {
            min,
            max,
            size,
            divisions: divisions as u32,
            buckets: VoxelBuckets::default(),
        };
        grid.buckets = grid.reindex(cloud, subset);
        Ok(grid)
    }

    pub fn divisions(&self) -> usize {
        self.divisions as usize
    }

    pub fn bounds(&self) -> ([f64; 3], [f64; 3]) {
        (self.min, self.max)
    }

    /// Voxel edge lengths (X_size, Y_size, Z_size), meters.
    pub fn sizes(&self) -> [f64; 3] {
        self.size
    }

    pub fn buckets(&self) -> &VoxelBuckets {
        &self.buckets
    }

    pub fn contains_voxel(&self, v: VoxelIndex) -> bool {
        v.ix < self.divisions && v.iy < self.divisions && v.iz < self.divisions
    }

    fn cell(&self, c: f64, axis: usize) -> u32 {
        let f = ((c - self.min[axis]) / self.size[axis]).floor();
        if f <= 0.0 {
            0
        } else {
            (f as u64).min(self.divisions as u64 - 1) as u32
        }
    }

    /// Voxel containing `p`; points on or beyond a max face clamp inward.
    pub fn voxel_of(&self, p: &Point) -> VoxelIndex {
        VoxelIndex::new(self.cell(p.x, 0), self.cell(p.y, 1), self.cell(p.z, 2))
    }

    pub fn center(&self, v: VoxelIndex) -> [f64; 3] {
        [
            self.min[0] + (v.ix as f64 + 0.5) * self.size[0],
            self.min[1] + (v.iy as f64 + 0.5) * self.size[1],
            self.min[2] + (v.iz as f64 + 0.5) * self.size[2],
        ]
    }

    /// Neighbor voxels of `v`, excluding `v` and anything outside the grid.
    pub fn neighbors(&self, v: VoxelIndex, mode: NeighborMode) -> Result<Vec<VoxelIndex>, SpatialError> {
        if !self.contains_voxel(v) {
            return Err(SpatialError::VoxelOutOfRange(v));
        }
        let mut out = Vec::with_capacity(26);
        self.for_each_neighbor(v, mode, |n| out.push(n));
        Ok(out)
    }

    /// Allocation-free neighbor walk; `v` must lie within the grid.
    pub fn for_each_neighbor(&self, v: VoxelIndex, mode: NeighborMode, mut f: impl FnMut(VoxelIndex)) {
        let d = self.divisions as i64;
        let dz_range = match mode {
            NeighborMode::SameLayer3x3 => 0..=0,
            NeighborMode::Cube3x3x3 => -1..=1,
        };
        for dz in dz_range {
            let z = v.iz as i64 + dz;
            if z < 0 || z >= d {
                continue;
            }
            for dy in -1..=1i64 {
                let y = v.iy as i64 + dy;
                if y < 0 || y >= d {
                    continue;
                }
                for dx in -1..=1i64 {
                    let x = v.ix as i64 + dx;
                    if x < 0 || x >= d || (dx == 0 && dy == 0 && dz == 0) {
                        continue;
                    }
                    f(VoxelIndex::new(x as u32, y as u32, z as u32));
                }
            }
        }
    }

    /// Buckets `subset` with the same rule used at build time.
    pub fn reindex(&self, cloud: &LabeledCloud, subset: &[usize]) -> VoxelBuckets {
        let pts = cloud.points();
        let proto = VoxelBuckets {
            divisions: self.divisions,
            ..Default::default()
        };
        let pairs = par::map_slice(subset, |&i| (proto.key(self.voxel_of(&pts[i])), i as u32));
        VoxelBuckets::from_pairs(self.divisions, pairs)
    }
}
