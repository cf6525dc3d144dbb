#![allow(dead_code)]

pub mod fixtures;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use woodleaf::metrics::ConfusionCounts;
use woodleaf::synth::{default_acceptance_tree, SyntheticTreeSpec};
use woodleaf::{LabeledCloud, Point};

/// Leaf is the positive class: "false leaf" points are wood predicted leaf.
pub fn counts(row: &fixtures::TreeRow) -> ConfusionCounts {
    ConfusionCounts::new(row.true_leaf, row.true_wood, row.false_leaf, row.false_wood)
}

/// Four-decimal truncation.
pub fn trunc4(x: f64) -> f64 {
    (x * 1e4).floor() / 1e4
}

/// A 4 m tree scanned coarsely, about 15k points.
pub fn small_tree_spec(seed: u64) -> SyntheticTreeSpec {
    SyntheticTreeSpec {
        trunk_height: 4.0,
        branch_count: 6,
        branch_length: (0.4, 0.8),
        leaf_count: 120,
        canopy_radius: 1.0,
        scanner_distance: 8.0,
        angular_step: 6e-4,
        rng_seed: seed,
        ..default_acceptance_tree()
    }
}

/// Exhaustive k nearest neighbors of `query` among `subset`, ordered by
/// (distance, index), excluding the query itself.
pub fn brute_knn(points: &[Point], subset: &[usize], query: usize, k: usize) -> Vec<(usize, f64)> {
    let mut d: Vec<(usize, f64)> = subset
        .iter()
        .filter(|&&i| i != query)
        .map(|&i| (i, points[i].distance_squared(&points[query])))
        .collect();
    // rank on squared distance: distinct squares can share a rounded root
    d.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    d.truncate(k);
    d.into_iter().map(|(i, d2)| (i, d2.sqrt())).collect()
}

/// All cuts `t` (taken at sample values and midpoints) minimizing
/// misclassification when `>= t` is wood; returns the lowest and highest.
pub fn best_cut_interval(wood: &[f64], leaf: &[f64]) -> (f64, f64) {
    let mut all: Vec<f64> = wood.iter().chain(leaf).copied().collect();
    all.sort_by(f64::total_cmp);
    let errors = |t: f64| wood.iter().filter(|&&w| w < t).count() + leaf.iter().filter(|&&l| l >= t).count();
    let mut best = usize::MAX;
    let (mut lo, mut hi) = (0.0, 0.0);
    for w in all.windows(2) {
        let t = (w[0] + w[1]) / 2.0;
        let e = errors(t);
        if e < best {
            best = e;
            lo = t;
            hi = t;
        } else if e == best {
            hi = t;
        }
    }
    (lo, hi)
}

/// The cloud with points reordered by a seeded shuffle. `perm[new] = old`.
pub fn shuffled(cloud: &LabeledCloud, seed: u64) -> (LabeledCloud, Vec<usize>) {
    let mut perm: Vec<usize> = (0..cloud.len()).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let points = perm.iter().map(|&i| cloud.points()[i]).collect();
    let labels = perm.iter().map(|&i| cloud.labels()[i]).collect();
    (LabeledCloud::with_labels(points, labels).unwrap(), perm)
}
