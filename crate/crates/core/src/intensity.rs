//! Adaptive intensity threshold and the first wood/leaf split.
//!
//! Random spheres are dropped on the cloud. Each sphere's members are
//! projected onto the horizontal plane; a trunk patch collapses to a thin arc
//! (high count per projected area) while foliage spreads out. The densest
//! quarter of the density range supplies wood training points, the sparsest
//! quarter leaf training points. The intensity threshold is where the two
//! classes' smoothed intensity histograms cross.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::hull;
use crate::model::LabeledCloud;
use crate::par;
use crate::spatial::NeighborIndex;

/// Spheres with fewer members carry no usable density information.
pub const MIN_USABLE_MEMBERS: usize = 5;
/// Floor on the projected hull area, m².
pub const MIN_HULL_AREA: f64 = 1e-6;
pub const HISTOGRAM_BINS: usize = 100;
pub const SMOOTHING_WINDOW: usize = 5;

#[derive(Debug, Error, PartialEq)]
pub enum IntensityError {
    #[error("cannot sample an empty cloud")]
    EmptyCloud,
    #[error("n_seeds must be at least 1")]
    NoSeeds,
    #[error("no sampling sphere had at least {MIN_USABLE_MEMBERS} members")]
    NoUsableSamples,
    #[error("sphere sampling found no {side} spheres; the cloud may lack one of the two materials")]
    EmptyClass { side: &'static str },
    #[error("intensity threshold needs non-empty wood and leaf samples")]
    EmptySamples,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SphereSample {
    pub seed: usize,
    /// Every cloud point within the sphere radius of the seed (seed included),
    /// ascending.
    pub members: Vec<usize>,
    /// Members per m² of projected convex-hull area.
    pub projection_density: f64,
}

impl SphereSample {
    pub fn is_usable(&self) -> bool {
        self.members.len() >= MIN_USABLE_MEMBERS
    }
}

/// Seed indices: uniform without replacement, or with replacement when more
/// seeds than points are requested.
pub fn draw_seeds(n_points: usize, n_seeds: usize, rng_seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    if n_seeds <= n_points {
        index::sample(&mut rng, n_points, n_seeds).into_vec()
    } else {
        (0..n_seeds).map(|_| rng.random_range(0..n_points)).collect()
    }
}

pub fn sample_spheres(
    cloud: &LabeledCloud,
    n_seeds: usize,
    sphere_radius: f64,
    rng_seed: u64,
) -> Result<Vec<SphereSample>, IntensityError> {
    if cloud.is_empty() {
        return Err(IntensityError::EmptyCloud);
    }
    let all: Vec<usize> = (0..cloud.len()).collect();
    let index = NeighborIndex::build(cloud, &all).map_err(|_| IntensityError::EmptyCloud)?;
    sample_spheres_indexed(cloud, &index, n_seeds, sphere_radius, rng_seed)
}

/// Like [`sample_spheres`], reusing a prebuilt index over the whole cloud.
pub fn sample_spheres_indexed(
    cloud: &LabeledCloud,
    index: &NeighborIndex,
    n_seeds: usize,
    sphere_radius: f64,
    rng_seed: u64,
) -> Result<Vec<SphereSample>, IntensityError> {
    if cloud.is_empty() {
        return Err(IntensityError::EmptyCloud);
    }
    if n_seeds == 0 {
        return Err(IntensityError::NoSeeds);
    }
    let order = canonical_order(cloud);
    let pts = cloud.points();
    let seeds: Vec<usize> = draw_seeds(cloud.len(), n_seeds, rng_seed)
        .into_iter()
        .map(|r| order[r])
        .collect();
    Ok(par::map_slice(&seeds, |&seed| {
        let members = index.within_radius(pts[seed].position(), sphere_radius);
        let projection_density = projection_density(cloud, &members);
        SphereSample {
            seed,
            members,
            projection_density,
        }
    }))
}

/// Point indices sorted by coordinates then intensity. Seeds are drawn as
/// ranks in this order, so the sampled spheres do not depend on the order
/// points were stored in.
pub fn canonical_order(cloud: &LabeledCloud) -> Vec<usize> {
    let pts = cloud.points();
    let mut order: Vec<usize> = (0..cloud.len()).collect();
    par::sort_unstable_by(&mut order, |&a, &b| {
        let (p, q) = (&pts[a], &pts[b]);
        p.x.total_cmp(&q.x)
            .then(p.y.total_cmp(&q.y))
            .then(p.z.total_cmp(&q.z))
            .then(p.intensity.total_cmp(&q.intensity))
            .then(a.cmp(&b))
    });
    order
}

/// Member count over the area of the convex hull of the members' (x, y)
/// projections, the area floored at [`MIN_HULL_AREA`].
pub fn projection_density(cloud: &LabeledCloud, members: &[usize]) -> f64 {
    let pts = cloud.points();
    let xy: Vec<[f64; 2]> = members.iter().map(|&i| [pts[i].x, pts[i].y]).collect();
    let area = hull::hull_area(&xy).max(MIN_HULL_AREA);
    members.len() as f64 / area
}

/// Quarter points of the density interval: `(ρ_min + Δ/4, ρ_max − Δ/4)`.
pub fn quarter_thresholds(densities: &[f64]) -> Option<(f64, f64)> {
    let (lo, hi) = densities
        .iter()
        .fold(None, |acc: Option<(f64, f64)>, &d| match acc {
            None => Some((d, d)),
            Some((lo, hi)) => Some((lo.min(d), hi.max(d))),
        })?;
    let quarter = (hi - lo) / 4.0;
    Some((lo + quarter, hi - quarter))
}

/// Training points gathered from the densest and sparsest spheres.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedClasses {
    pub wood: Vec<usize>,
    pub leaf: Vec<usize>,
    pub wood_spheres: usize,
    pub leaf_spheres: usize,
}

/// Spheres denser than `rho_three_quarter` vote wood, sparser than
/// `rho_quarter` vote leaf; points claimed by both sides are dropped.
/// Unusable spheres are ignored.
pub fn select_seed_classes(
    samples: &[SphereSample],
    rho_quarter: f64,
    rho_three_quarter: f64,
) -> Result<SeedClasses, IntensityError> {
    let mut wood = Vec::new();
    let mut leaf = Vec::new();
    let (mut wood_spheres, mut leaf_spheres) = (0, 0);
    for s in samples.iter().filter(|s| s.is_usable()) {
        if s.projection_density > rho_three_quarter {
            wood.extend_from_slice(&s.members);
            wood_spheres += 1;
        } else if s.projection_density < rho_quarter {
            leaf.extend_from_slice(&s.members);
            leaf_spheres += 1;
        }
    }
    if wood_spheres == 0 {
        return Err(IntensityError::EmptyClass { side: "wood" });
    }
    if leaf_spheres == 0 {
        return Err(IntensityError::EmptyClass { side: "leaf" });
    }
    wood.sort_unstable();
    wood.dedup();
    leaf.sort_unstable();
    leaf.dedup();
    let wood_only: Vec<usize> = wood.iter().copied().filter(|i| leaf.binary_search(i).is_err()).collect();
    let leaf_only: Vec<usize> = leaf.iter().copied().filter(|i| wood.binary_search(i).is_err()).collect();
    if wood_only.is_empty() {
        return Err(IntensityError::EmptyClass { side: "wood" });
    }
    if leaf_only.is_empty() {
        return Err(IntensityError::EmptyClass { side: "leaf" });
    }
    Ok(SeedClasses {
        wood: wood_only,
        leaf: leaf_only,
        wood_spheres,
        leaf_spheres,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThresholdProvenance {
    CurveIntersection,
    MidpointFallback,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntensityThreshold {
    pub value: f64,
    pub provenance: ThresholdProvenance,
}

/// Normalized, smoothed histogram on a shared binning.
fn smoothed_histogram(values: &[f64], lo: f64, width: f64) -> Vec<f64> {
    let mut h = vec![0.0; HISTOGRAM_BINS];
    for &v in values {
        let b = (((v - lo) / width).floor().max(0.0) as usize).min(HISTOGRAM_BINS - 1);
        h[b] += 1.0;
    }
    let n = values.len() as f64;
    h.iter_mut().for_each(|x| *x /= n);
    let half = SMOOTHING_WINDOW / 2;
    (0..HISTOGRAM_BINS)
        .map(|i| {
            let a = i.saturating_sub(half);
            let b = (i + half).min(HISTOGRAM_BINS - 1);
            h[a..=b].iter().sum::<f64>() / (b - a + 1) as f64
        })
        .collect()
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Intensity at which the smoothed wood and leaf intensity curves cross,
/// searched between the two curve peaks. Falls back to the midpoint of the
/// sample means when the curves do not cross there.
pub fn fit_intensity_threshold(wood: &[f64], leaf: &[f64]) -> Result<IntensityThreshold, IntensityError> {
    if wood.is_empty() || leaf.is_empty() {
        return Err(IntensityError::EmptySamples);
    }
    let fallback = IntensityThreshold {
        value: (mean(wood) + mean(leaf)) / 2.0,
        provenance: ThresholdProvenance::MidpointFallback,
    };
    let (lo, hi) = wood
        .iter()
        .chain(leaf)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if hi <= lo {
        return Ok(fallback);
    }
    let width = (hi - lo) / HISTOGRAM_BINS as f64;
    let wood_curve = smoothed_histogram(wood, lo, width);
    let leaf_curve = smoothed_histogram(leaf, lo, width);
    let (wood_peak, leaf_peak) = (argmax(&wood_curve), argmax(&leaf_curve));
    if wood_peak == leaf_peak {
        return Ok(fallback);
    }
    // diff > 0 where the curve with the higher-intensity peak dominates
    let (from, to, diff): (usize, usize, Vec<f64>) = if leaf_peak < wood_peak {
        (leaf_peak, wood_peak, wood_curve.iter().zip(&leaf_curve).map(|(w, l)| w - l).collect())
    } else {
        log::warn!(
            "wood intensity peak (bin {wood_peak}) lies below leaf peak (bin {leaf_peak}); \
             searching the crossing with roles swapped"
        );
        (wood_peak, leaf_peak, leaf_curve.iter().zip(&wood_curve).map(|(l, w)| l - w).collect())
    };
    let center = |b: f64| lo + (b + 0.5) * width;

    let mut j = from;
    while j < to {
        if diff[j] < 0.0 && diff[j + 1] >= 0.0 {
            if diff[j + 1] > 0.0 {
                let t = -diff[j] / (diff[j + 1] - diff[j]);
                return Ok(IntensityThreshold {
                    value: center(j as f64 + t),
                    provenance: ThresholdProvenance::CurveIntersection,
                });
            }
            // Both curves vanish over a gap; cross in its middle if the
            // higher curve takes over afterwards.
            let mut m = j + 1;
            while m < to && diff[m + 1] == 0.0 {
                m += 1;
            }
            if m < to && diff[m + 1] > 0.0 {
                return Ok(IntensityThreshold {
                    value: (center((j + 1) as f64) + center(m as f64)) / 2.0,
                    provenance: ThresholdProvenance::CurveIntersection,
                });
            }
            j = m;
        }
        j += 1;
    }
    Ok(fallback)
}

/// Splits every point at `threshold`: `>=` goes to wood, `<` to leaf.
/// Both returned index sets are ascending.
pub fn classify_by_intensity(cloud: &LabeledCloud, threshold: f64) -> (Vec<usize>, Vec<usize>) {
    let mut wood = Vec::new();
    let mut leaf = Vec::new();
    for (i, p) in cloud.points().iter().enumerate() {
        if p.intensity >= threshold {
            wood.push(i);
        } else {
            leaf.push(i);
        }
    }
    (wood, leaf)
}

/// Everything learned while deriving the threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdFit {
    pub threshold: IntensityThreshold,
    pub spheres: usize,
    pub usable_spheres: usize,
    pub rho_quarter: f64,
    pub rho_three_quarter: f64,
    pub seed_classes: SeedClasses,
}

/// Sphere sampling, quartering, seed-class selection and curve fitting in one
/// call. `index` must cover the whole cloud.
pub fn derive_threshold(
    cloud: &LabeledCloud,
    index: &NeighborIndex,
    n_seeds: usize,
    sphere_radius: f64,
    rng_seed: u64,
) -> Result<ThresholdFit, IntensityError> {
    let samples = sample_spheres_indexed(cloud, index, n_seeds, sphere_radius, rng_seed)?;
    let densities: Vec<f64> = samples
        .iter()
        .filter(|s| s.is_usable())
        .map(|s| s.projection_density)
        .collect();
    let (rho_quarter, rho_three_quarter) =
        quarter_thresholds(&densities).ok_or(IntensityError::NoUsableSamples)?;
    let seed_classes = select_seed_classes(&samples, rho_quarter, rho_three_quarter)?;
    let pts = cloud.points();
    let wood: Vec<f64> = seed_classes.wood.iter().map(|&i| pts[i].intensity).collect();
    let leaf: Vec<f64> = seed_classes.leaf.iter().map(|&i| pts[i].intensity).collect();
    let threshold = fit_intensity_threshold(&wood, &leaf)?;
    Ok(ThresholdFit {
        threshold,
        spheres: samples.len(),
        usable_spheres: densities.len(),
        rho_quarter,
        rho_three_quarter,
        seed_classes,
    })
}
