//! Synthetic scans of a single tree with ground-truth labels.
//!
//! The tree is a tapering trunk of stacked cylinders, inclined cylindrical
//! branches and two-sided leaf disks. The scanner sits at the origin and
//! fires rays on a regular azimuth/elevation grid; every primitive keeps the
//! nearest intersection of each ray that hits it. Occlusion between
//! primitives is not modeled.

use std::f64::consts::PI;
use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::model::{ClassLabel, LabeledCloud, Point};
use crate::par;

#[derive(Debug, Error, PartialEq)]
pub enum SynthError {
    #[error("{field} = {value}: {reason}")]
    Invalid {
        field: &'static str,
        value: f64,
        reason: &'static str,
    },
}

/// Intensity distribution of one class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntensityModel {
    pub mean: f64,
    pub std_dev: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticTreeSpec {
    /// Height of the trunk, which is also the tree top, m.
    pub trunk_height: f64,
    /// Radius at the base, m.
    pub trunk_radius: f64,
    /// Top radius as a fraction of the base radius.
    pub trunk_taper: f64,
    /// Length of each stacked trunk cylinder, m.
    pub trunk_segment_length: f64,
    pub branch_count: usize,
    /// Branch inclination from vertical, degrees.
    pub branch_inclination: (f64, f64),
    pub branch_length: (f64, f64),
    pub branch_radius: (f64, f64),
    /// Branch attachment heights as fractions of the trunk height.
    pub branch_height: (f64, f64),
    pub leaf_count: usize,
    pub leaf_radius: f64,
    /// Lowest leaf height as a fraction of the trunk height.
    pub canopy_base_fraction: f64,
    /// Horizontal semi-axis of the ellipsoidal crown, m.
    pub canopy_radius: f64,
    /// Minimum gap between a leaf disk and any wood surface, m.
    pub leaf_clearance: f64,
    /// Horizontal distance from scanner to trunk axis, m.
    pub scanner_distance: f64,
    /// Scanner height above the trunk base, m.
    pub scanner_height: f64,
    /// Radians between neighboring rays.
    pub angular_step: f64,
    pub wood_intensity: IntensityModel,
    pub leaf_intensity: IntensityModel,
    /// Half-width of the uniform per-axis jitter applied to leaf points, m.
    pub leaf_jitter: f64,
    pub rng_seed: u64,
}

impl Default for SyntheticTreeSpec {
    fn default() -> Self {
        default_acceptance_tree()
    }
}

/// A 12 m tree with a 0.10 m trunk and 30 branches seen from 15 m, about
/// 200k points.
pub fn default_acceptance_tree() -> SyntheticTreeSpec {
    SyntheticTreeSpec {
        trunk_height: 12.0,
        trunk_radius: 0.10,
        trunk_taper: 0.1,
        trunk_segment_length: 0.5,
        branch_count: 30,
        branch_inclination: (20.0, 45.0),
        branch_length: (0.6, 1.5),
        branch_radius: (0.006, 0.012),
        branch_height: (0.40, 0.85),
        leaf_count: 760,
        leaf_radius: 0.06,
        canopy_base_fraction: 0.45,
        canopy_radius: 2.5,
        leaf_clearance: 0.06,
        scanner_distance: 15.0,
        scanner_height: 1.5,
        angular_step: 3.49e-4,
        wood_intensity: IntensityModel {
            mean: 60.0,
            std_dev: 10.0,
        },
        leaf_intensity: IntensityModel {
            mean: 35.0,
            std_dev: 10.0,
        },
        leaf_jitter: 0.01,
        rng_seed: 42,
    }
}

impl SyntheticTreeSpec {
    pub fn validate(&self) -> Result<(), SynthError> {
        let invalid = |field, value, reason| Err(SynthError::Invalid { field, value, reason });
        let positive = [
            ("trunk_height", self.trunk_height),
            ("trunk_radius", self.trunk_radius),
            ("trunk_taper", self.trunk_taper),
            ("trunk_segment_length", self.trunk_segment_length),
            ("branch_length.min", self.branch_length.0),
            ("branch_radius.min", self.branch_radius.0),
            ("leaf_radius", self.leaf_radius),
            ("canopy_radius", self.canopy_radius),
            ("scanner_distance", self.scanner_distance),
            ("angular_step", self.angular_step),
            ("wood_intensity.std_dev", self.wood_intensity.std_dev),
            ("leaf_intensity.std_dev", self.leaf_intensity.std_dev),
        ];
        for (field, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return invalid(field, value, "must be positive and finite");
            }
        }
        let non_negative = [
            ("leaf_clearance", self.leaf_clearance),
            ("leaf_jitter", self.leaf_jitter),
        ];
        for (field, value) in non_negative {
            if !(value >= 0.0 && value.is_finite()) {
                return invalid(field, value, "must be non-negative and finite");
            }
        }
        if !self.scanner_height.is_finite() {
            return invalid("scanner_height", self.scanner_height, "must be finite");
        }
        let ranges = [
            ("branch_inclination", self.branch_inclination, 0.0, 90.0),
            ("branch_length", self.branch_length, 0.0, f64::INFINITY),
            ("branch_radius", self.branch_radius, 0.0, f64::INFINITY),
            ("branch_height", self.branch_height, 0.0, 1.0),
        ];
        for (field, (lo, hi), min, max) in ranges {
            if !(lo <= hi && lo >= min && hi <= max) {
                return invalid(field, hi, "range must be ordered and within bounds");
            }
        }
        if !(self.canopy_base_fraction > 0.0 && self.canopy_base_fraction < 1.0) {
            return invalid("canopy_base_fraction", self.canopy_base_fraction, "must lie in (0, 1)");
        }
        if !(self.wood_intensity.mean > self.leaf_intensity.mean) {
            return invalid("wood_intensity.mean", self.wood_intensity.mean, "must exceed the leaf mean");
        }
        let reach = self.canopy_radius.max(self.branch_length.1 + self.trunk_radius) + self.leaf_radius;
        if self.scanner_distance <= reach {
            return invalid("scanner_distance", self.scanner_distance, "scanner would sit inside the crown");
        }
        Ok(())
    }
}

/// A generated tree and where its trunk points landed.
#[derive(Debug, Clone)]
pub struct SyntheticTree {
    /// Ground-truth labels are attached.
    pub cloud: LabeledCloud,
    pub trunk: Range<usize>,
    pub wood_count: usize,
    pub leaf_count: usize,
}

pub fn generate_tree(spec: &SyntheticTreeSpec) -> Result<LabeledCloud, SynthError> {
    Ok(generate_tree_detailed(spec)?.cloud)
}

#[derive(Debug, Clone, Copy)]
enum Shape {
    Cylinder {
        base: [f64; 3],
        axis: [f64; 3],
        length: f64,
        radius: f64,
    },
    Disk {
        center: [f64; 3],
        normal: [f64; 3],
        radius: f64,
    },
}

impl Shape {
    fn bounding_sphere(&self) -> ([f64; 3], f64) {
        match *self {
            Shape::Cylinder {
                base,
                axis,
                length,
                radius,
            } => (add(base, scale(axis, length / 2.0)), (length * length / 4.0 + radius * radius).sqrt()),
            Shape::Disk { center, radius, .. } => (center, radius),
        }
    }

    /// Distance along the unit ray `dir` from the origin to the nearest
    /// surface hit.
    fn intersect(&self, dir: [f64; 3]) -> Option<f64> {
        match *self {
            Shape::Cylinder {
                base,
                axis,
                length,
                radius,
            } => {
                let p = scale(base, -1.0);
                let u_perp = sub(dir, scale(axis, dot(dir, axis)));
                let p_perp = sub(p, scale(axis, dot(p, axis)));
                let a = dot(u_perp, u_perp);
                if a < 1e-18 {
                    return None;
                }
                let b = 2.0 * dot(p_perp, u_perp);
                let c = dot(p_perp, p_perp) - radius * radius;
                let disc = b * b - 4.0 * a * c;
                if disc < 0.0 {
                    return None;
                }
                let t = (-b - disc.sqrt()) / (2.0 * a);
                let s = dot(add(p, scale(dir, t)), axis);
                (t > 0.0 && (0.0..length).contains(&s)).then_some(t)
            }
            Shape::Disk { center, normal, radius } => {
                let denom = dot(dir, normal);
                if denom.abs() < 1e-12 {
                    return None;
                }
                let t = dot(center, normal) / denom;
                let hit = scale(dir, t);
                let off = sub(hit, center);
                (t > 0.0 && dot(off, off) <= radius * radius).then_some(t)
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Primitive {
    shape: Shape,
    label: ClassLabel,
}

fn add(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn scale(a: [f64; 3], s: f64) -> [f64; 3] {
    [a[0] * s, a[1] * s, a[2] * s]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

/// Distance from `p` to the segment `base + s·axis`, `s ∈ [0, length]`.
fn segment_distance(p: [f64; 3], base: [f64; 3], axis: [f64; 3], length: f64) -> f64 {
    let s = dot(sub(p, base), axis).clamp(0.0, length);
    norm(sub(p, add(base, scale(axis, s))))
}

fn random_unit(rng: &mut ChaCha8Rng) -> [f64; 3] {
    let z: f64 = rng.random_range(-1.0..=1.0);
    let phi = rng.random_range(0.0..2.0 * PI);
    let r = (1.0 - z * z).sqrt();
    [r * phi.cos(), r * phi.sin(), z]
}

fn layout(spec: &SyntheticTreeSpec) -> (Vec<Primitive>, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    let foot = [spec.scanner_distance, 0.0, -spec.scanner_height];
    let up = [0.0, 0.0, 1.0];
    let radius_at = |h: f64| spec.trunk_radius * (1.0 - (1.0 - spec.trunk_taper) * h / spec.trunk_height);

    let mut prims = Vec::new();
    let segments = (spec.trunk_height / spec.trunk_segment_length).ceil() as usize;
    for k in 0..segments {
        let h0 = k as f64 * spec.trunk_segment_length;
        let len = spec.trunk_segment_length.min(spec.trunk_height - h0);
        prims.push(Primitive {
            shape: Shape::Cylinder {
                base: add(foot, [0.0, 0.0, h0]),
                axis: up,
                length: len,
                radius: radius_at(h0 + len / 2.0),
            },
            label: ClassLabel::Wood,
        });
    }
    let trunk_segments = prims.len();

    for _ in 0..spec.branch_count {
        let h = spec.trunk_height * rng.random_range(spec.branch_height.0..=spec.branch_height.1);
        let phi = rng.random_range(0.0..2.0 * PI);
        let incl = rng.random_range(spec.branch_inclination.0..=spec.branch_inclination.1).to_radians();
        let length = rng.random_range(spec.branch_length.0..=spec.branch_length.1);
        let radius = rng.random_range(spec.branch_radius.0..=spec.branch_radius.1);
        let out = [phi.cos(), phi.sin(), 0.0];
        let base = add(add(foot, [0.0, 0.0, h]), scale(out, radius_at(h)));
        let axis = [incl.sin() * phi.cos(), incl.sin() * phi.sin(), incl.cos()];
        prims.push(Primitive {
            shape: Shape::Cylinder {
                base,
                axis,
                length,
                radius,
            },
            label: ClassLabel::Wood,
        });
    }

    let wood: Vec<Shape> = prims.iter().map(|p| p.shape).collect();
    let crown_lo = spec.canopy_base_fraction * spec.trunk_height + spec.leaf_radius;
    let crown_hi = spec.trunk_height - spec.leaf_radius;
    let crown_mid = (crown_lo + crown_hi) / 2.0;
    let crown_half = (crown_hi - crown_lo) / 2.0;
    let clear_of_wood = |c: [f64; 3]| {
        wood.iter().all(|w| match *w {
            Shape::Cylinder {
                base,
                axis,
                length,
                radius,
            } => segment_distance(c, base, axis, length) - radius >= spec.leaf_radius + spec.leaf_clearance,
            Shape::Disk { .. } => true,
        })
    };
    for _ in 0..spec.leaf_count {
        for _attempt in 0..200 {
            let x = rng.random_range(-1.0..=1.0);
            let y = rng.random_range(-1.0..=1.0);
            let z = rng.random_range(-1.0..=1.0);
            if x * x + y * y + z * z > 1.0 {
                continue;
            }
            let center = add(
                foot,
                [x * spec.canopy_radius, y * spec.canopy_radius, crown_mid + z * crown_half],
            );
            if !clear_of_wood(center) {
                continue;
            }
            prims.push(Primitive {
                shape: Shape::Disk {
                    center,
                    normal: random_unit(&mut rng),
                    radius: spec.leaf_radius,
                },
                label: ClassLabel::Leaf,
            });
            break;
        }
    }
    (prims, trunk_segments)
}

/// Ray hits of one primitive, in ray-grid order, with per-point noise.
fn scan_primitive(spec: &SyntheticTreeSpec, prim: &Primitive, stream: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    rng.set_stream(stream);
    let step = spec.angular_step;
    let (center, r) = prim.shape.bounding_sphere();
    let horiz = center[0].hypot(center[1]);
    let az_c = center[1].atan2(center[0]);
    let el_c = center[2].atan2(horiz);
    let az_half = (r / horiz).min(1.0).asin();
    let el_half = (r / norm(center)).min(1.0).asin();
    let az_range = ((az_c - az_half) / step).floor() as i64..=((az_c + az_half) / step).ceil() as i64;
    let el_range = ((el_c - el_half) / step).floor() as i64..=((el_c + el_half) / step).ceil() as i64;

    let (intensity, jitter) = match prim.label {
        ClassLabel::Leaf => (spec.leaf_intensity, spec.leaf_jitter),
        _ => (spec.wood_intensity, 0.0),
    };
    let normal = Normal::new(intensity.mean, intensity.std_dev).expect("validated spread");
    let mut out = Vec::new();
    for i in az_range {
        let az = i as f64 * step;
        for j in el_range.clone() {
            let el = j as f64 * step;
            let dir = [el.cos() * az.cos(), el.cos() * az.sin(), el.sin()];
            let Some(t) = prim.shape.intersect(dir) else {
                continue;
            };
            let mut p = scale(dir, t);
            if jitter > 0.0 {
                for c in &mut p {
                    *c += rng.random_range(-jitter..=jitter);
                }
            }
            out.push(Point::new(p[0], p[1], p[2], normal.sample(&mut rng)));
        }
    }
    out
}

pub fn generate_tree_detailed(spec: &SyntheticTreeSpec) -> Result<SyntheticTree, SynthError> {
    spec.validate()?;
    let (prims, trunk_segments) = layout(spec);
    let streams: Vec<(u64, Primitive)> = prims.iter().enumerate().map(|(i, p)| (i as u64 + 1, *p)).collect();
    let scanned = par::map_slice(&streams, |(stream, prim)| scan_primitive(spec, prim, *stream));

    let total: usize = scanned.iter().map(Vec::len).sum();
    let mut points = Vec::with_capacity(total);
    let mut labels = Vec::with_capacity(total);
    let mut trunk_end = 0;
    for (k, (pts, prim)) in scanned.into_iter().zip(&prims).enumerate() {
        labels.extend(std::iter::repeat_n(prim.label, pts.len()));
        points.extend(pts);
        if k + 1 == trunk_segments {
            trunk_end = points.len();
        }
    }
    let wood_count = labels.iter().filter(|&&l| l == ClassLabel::Wood).count();
    let leaf_count = labels.len() - wood_count;
    let cloud = LabeledCloud::with_labels(points, labels).expect("generated points are finite");
    Ok(SyntheticTree {
        cloud,
        trunk: 0..trunk_end,
        wood_count,
        leaf_count,
    })
}
