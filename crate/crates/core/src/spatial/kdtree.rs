use crate::model::LabeledCloud;

use super::SpatialError;

const LEAF_SIZE: usize = 12;
const NOT_INDEXED: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    /// Index into the source cloud.
    pub index: usize,
    /// Euclidean distance, meters.
    pub distance: f64,
}

#[derive(Debug, Clone)]
enum Node {
    Leaf { start: u32, end: u32 },
    Split { axis: u8, value: f64, left: u32, right: u32 },
}

/// Static kd-tree over a subset of a cloud's points.
///
/// Queries are exact. Among equidistant candidates the lower point index
/// wins, which makes every query result deterministic.
#[derive(Debug, Clone)]
pub struct NeighborIndex {
    positions: Vec<[f64; 3]>,
    ids: Vec<u32>,
    nodes: Vec<Node>,
    root: u32,
    /// Cloud index -> slot in `ids`, or `NOT_INDEXED`.
    slot_of: Vec<u32>,
}

#[inline]
fn dist2(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    dx * dx + dy * dy + dz * dz
}

/// Bounded list of the best `k` candidates, kept sorted by (distance², id).
struct KBest {
    k: usize,
    items: Vec<(f64, u32)>,
}

impl KBest {
    fn new(k: usize) -> Self {
        Self {
            k,
            items: Vec::with_capacity(k + 1),
        }
    }

    #[inline]
    fn worst(&self) -> f64 {
        if self.items.len() < self.k {
            f64::INFINITY
        } else {
            self.items[self.k - 1].0
        }
    }

    #[inline]
    fn offer(&mut self, d2: f64, id: u32) {
        if self.items.len() == self.k {
            let (wd, wid) = self.items[self.k - 1];
            if d2 > wd || (d2 == wd && id > wid) {
                return;
            }
        }
        let pos = self
            .items
            .partition_point(|&(d, i)| d < d2 || (d == d2 && i < id));
        self.items.insert(pos, (d2, id));
        self.items.truncate(self.k);
    }
}

impl NeighborIndex {
    /// Builds an index over `subset` (indices into `cloud`).
    pub fn build(cloud: &LabeledCloud, subset: &[usize]) -> Result<Self, SpatialError> {
        if subset.is_empty() {
            return Err(SpatialError::EmptySubset);
        }
        let pts = cloud.points();
        let mut order: Vec<(u32, [f64; 3])> = subset
            .iter()
            .map(|&i| (i as u32, pts[i].position()))
            .collect();
        let mut nodes = Vec::with_capacity(2 * subset.len() / LEAF_SIZE + 1);
        let n = order.len();
        let root = build_rec(&mut order, 0, n, &mut nodes);

        let mut slot_of = vec![NOT_INDEXED; pts.len()];
        for (slot, (id, _)) in order.iter().enumerate() {
            slot_of[*id as usize] = slot as u32;
        }
        let (ids, positions) = order.into_iter().unzip();
        Ok(Self {
            positions,
            ids,
            nodes,
            root,
            slot_of,
        })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.slot_of.get(index).is_some_and(|&s| s != NOT_INDEXED)
    }

    /// Indexed point indices, in tree order.
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.ids.iter().map(|&i| i as usize)
    }

    /// The `k` nearest indexed points to indexed point `query`, excluding the
    /// query itself, ascending by distance.
    pub fn k_nearest(&self, query: usize, k: usize) -> Result<Vec<Neighbor>, SpatialError> {
        if k == 0 {
            return Err(SpatialError::ZeroK);
        }
        let slot = match self.slot_of.get(query) {
            Some(&s) if s != NOT_INDEXED => s as usize,
            _ => return Err(SpatialError::QueryOutsideSubset { index: query }),
        };
        let q = self.positions[slot];
        Ok(self.knn_at(&q, k, Some(query as u32)))
    }

    /// The `k` nearest indexed points to an arbitrary position.
    pub fn k_nearest_to(&self, position: [f64; 3], k: usize) -> Vec<Neighbor> {
        if k == 0 {
            return Vec::new();
        }
        self.knn_at(&position, k, None)
    }

    fn knn_at(&self, q: &[f64; 3], k: usize, exclude: Option<u32>) -> Vec<Neighbor> {
        let mut best = KBest::new(k);
        self.knn_rec(self.root, q, exclude, &mut best);
        best.items
            .into_iter()
            .map(|(d2, id)| Neighbor {
                index: id as usize,
                distance: d2.sqrt(),
            })
            .collect()
    }

    fn knn_rec(&self, node: u32, q: &[f64; 3], exclude: Option<u32>, best: &mut KBest) {
        match self.nodes[node as usize] {
            Node::Leaf { start, end } => {
                for s in start as usize..end as usize {
                    let id = self.ids[s];
                    if Some(id) == exclude {
                        continue;
                    }
                    best.offer(dist2(q, &self.positions[s]), id);
                }
            }
            Node::Split {
                axis,
                value,
                left,
                right,
            } => {
                let diff = q[axis as usize] - value;
                let (near, far) = if diff < 0.0 { (left, right) } else { (right, left) };
                self.knn_rec(near, q, exclude, best);
                // Equal-distance subtrees are still visited so index ties resolve low.
                if diff * diff <= best.worst() {
                    self.knn_rec(far, q, exclude, best);
                }
            }
        }
    }

    /// All indexed points within `radius` (inclusive) of `position`,
    /// ascending by point index.
    pub fn within_radius(&self, position: [f64; 3], radius: f64) -> Vec<usize> {
        let mut out = Vec::new();
        self.within_radius_into(position, radius, &mut out);
        out
    }

    pub fn within_radius_into(&self, position: [f64; 3], radius: f64, out: &mut Vec<usize>) {
        out.clear();
        let r2 = radius * radius;
        self.radius_rec(self.root, &position, r2, out);
        out.sort_unstable();
    }

    fn radius_rec(&self, node: u32, q: &[f64; 3], r2: f64, out: &mut Vec<usize>) {
        match self.nodes[node as usize] {
            Node::Leaf { start, end } => {
                for s in start as usize..end as usize {
                    if dist2(q, &self.positions[s]) <= r2 {
                        out.push(self.ids[s] as usize);
                    }
                }
            }
            Node::Split {
                axis,
                value,
                left,
                right,
            } => {
                let diff = q[axis as usize] - value;
                let (near, far) = if diff < 0.0 { (left, right) } else { (right, left) };
                self.radius_rec(near, q, r2, out);
                if diff * diff <= r2 {
                    self.radius_rec(far, q, r2, out);
                }
            }
        }
    }
}

fn build_rec(order: &mut [(u32, [f64; 3])], start: usize, end: usize, nodes: &mut Vec<Node>) -> u32 {
    let slice = &mut order[start..end];
    if slice.len() <= LEAF_SIZE {
        nodes.push(Node::Leaf {
            start: start as u32,
            end: end as u32,
        });
        return (nodes.len() - 1) as u32;
    }
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for (_, p) in slice.iter() {
        for a in 0..3 {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    let axis = (0..3)
        .max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b])))
        .unwrap_or(0);
    let mid = slice.len() / 2;
    slice.select_nth_unstable_by(mid, |a, b| a.1[axis].total_cmp(&b.1[axis]));
    let value = slice[mid].1[axis];

    let me = nodes.len();
    nodes.push(Node::Leaf { start: 0, end: 0 });
    let left = build_rec(order, start, start + mid, nodes);
    let right = build_rec(order, start + mid, end, nodes);
    nodes[me] = Node::Split {
        axis: axis as u8,
        value,
        left,
        right,
    };
    me as u32
}
