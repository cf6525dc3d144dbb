//! Shared domain types: points, labels, labeled clouds and run parameters.

use std::fmt;

use thiserror::Error;

/// A single scanner return. Coordinates are meters in the scanner-centered
/// frame once a cloud has been ingested.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub intensity: f64,
}

impl Point {
    pub fn new(x: f64, y: f64, z: f64, intensity: f64) -> Self {
        Self { x, y, z, intensity }
    }

    #[inline]
    pub fn position(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    /// Distance to the scanner (the origin of the centered frame).
    #[inline]
    pub fn range(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    #[inline]
    pub fn distance_squared(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z - other.z;
        dx * dx + dy * dy + dz * dz
    }

    #[inline]
    pub fn distance(&self, other: &Point) -> f64 {
        self.distance_squared(other).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite() && self.intensity.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClassLabel {
    Wood,
    Leaf,
    Unassigned,
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ClassLabel::Wood => "wood",
            ClassLabel::Leaf => "leaf",
            ClassLabel::Unassigned => "unassigned",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum CloudError {
    #[error("point {index} has a non-finite coordinate or intensity")]
    NonFinite { index: usize },
    #[error("label count {labels} does not match point count {points}")]
    LengthMismatch { points: usize, labels: usize },
    #[error("scanner position must be finite")]
    NonFiniteOrigin,
}

/// Points plus a parallel label array.
///
/// `origin` is the scanner position that was subtracted from every point at
/// ingestion; writers add it back.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledCloud {
    points: Vec<Point>,
    labels: Vec<ClassLabel>,
    origin: [f64; 3],
}

impl LabeledCloud {
    /// Wraps already-centered points, all labels `Unassigned`, origin at zero.
    pub fn new(points: Vec<Point>) -> Result<Self, CloudError> {
        let n = points.len();
        Self::with_labels(points, vec![ClassLabel::Unassigned; n])
    }

    pub fn with_labels(points: Vec<Point>, labels: Vec<ClassLabel>) -> Result<Self, CloudError> {
        if points.len() != labels.len() {
            return Err(CloudError::LengthMismatch {
                points: points.len(),
                labels: labels.len(),
            });
        }
        if let Some(index) = points.iter().position(|p| !p.is_finite()) {
            return Err(CloudError::NonFinite { index });
        }
        Ok(Self {
            points,
            labels,
            origin: [0.0; 3],
        })
    }

    /// Takes points in an arbitrary frame and re-expresses them relative to
    /// `scanner_position`.
    pub fn from_world(points: Vec<Point>, scanner_position: [f64; 3]) -> Result<Self, CloudError> {
        if !scanner_position.iter().all(|c| c.is_finite()) {
            return Err(CloudError::NonFiniteOrigin);
        }
        let [sx, sy, sz] = scanner_position;
        let centered = points
            .into_iter()
            .map(|p| Point::new(p.x - sx, p.y - sy, p.z - sz, p.intensity))
            .collect();
        let mut cloud = Self::new(centered)?;
        cloud.origin = scanner_position;
        Ok(cloud)
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn labels(&self) -> &[ClassLabel] {
        &self.labels
    }

    pub fn origin(&self) -> [f64; 3] {
        self.origin
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Replaces the label array, keeping geometry.
    pub fn relabel(&self, labels: Vec<ClassLabel>) -> Result<Self, CloudError> {
        if labels.len() != self.points.len() {
            return Err(CloudError::LengthMismatch {
                points: self.points.len(),
                labels: labels.len(),
            });
        }
        Ok(Self {
            points: self.points.clone(),
            labels,
            origin: self.origin,
        })
    }

    /// Point `i` in the original (de-centered) frame.
    pub fn world_point(&self, i: usize) -> Point {
        let p = self.points[i];
        Point::new(
            p.x + self.origin[0],
            p.y + self.origin[1],
            p.z + self.origin[2],
            p.intensity,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanConfig {
    pub scanner_position: [f64; 3],
    /// Angular step between successive rays, radians.
    pub angular_step: f64,
}

impl ScanConfig {
    pub fn new(scanner_position: [f64; 3], angular_step: f64) -> Result<Self, ParamErrors> {
        let cfg = Self {
            scanner_position,
            angular_step,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ParamErrors> {
        let mut v = Vec::new();
        if !(self.angular_step > 0.0 && self.angular_step.is_finite()) {
            v.push(ParamViolation::new("angular_step", self.angular_step, "must be > 0"));
        }
        for (c, name) in self.scanner_position.iter().zip(["scanner_x", "scanner_y", "scanner_z"]) {
            if !c.is_finite() {
                v.push(ParamViolation::new(name, *c, "must be finite"));
            }
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(ParamErrors(v))
        }
    }
}

/// Every tunable of the classifier. `Default` is the published parameter set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineParams {
    pub n_seeds: usize,
    /// Sampling sphere radius, meters.
    pub sphere_radius: f64,
    pub k_neighbors: usize,
    /// Upper bound on mean-neighbor-distance / expected spacing for wood.
    pub neighbor_ratio_threshold: f64,
    pub voxel_divisions: usize,
    pub voxel_ratio_threshold: f64,
    pub sd1: f64,
    pub sd2: f64,
    pub height_fraction: f64,
    pub rng_seed: u64,
}

impl Default for PipelineParams {
    fn default() -> Self {
        Self {
            n_seeds: 1000,
            sphere_radius: 0.03,
            k_neighbors: 8,
            neighbor_ratio_threshold: 1.71,
            voxel_divisions: 100,
            voxel_ratio_threshold: 0.1,
            sd1: 2.0,
            sd2: 6.0,
            height_fraction: 1.0 / 3.0,
            rng_seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParamViolation {
    pub field: &'static str,
    pub value: f64,
    pub reason: &'static str,
}

impl ParamViolation {
    fn new(field: &'static str, value: f64, reason: &'static str) -> Self {
        Self {
            field,
            value,
            reason,
        }
    }
}

impl fmt::Display for ParamViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {} ({})", self.field, self.value, self.reason)
    }
}

/// All violations found by a validation pass.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid parameters: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
pub struct ParamErrors(pub Vec<ParamViolation>);

impl ParamErrors {
    pub fn names(&self, field: &str) -> bool {
        self.0.iter().any(|v| v.field == field)
    }
}

/// Checks every invariant of `params`, reporting all violations at once.
pub fn validate_params(params: PipelineParams) -> Result<PipelineParams, ParamErrors> {
    let mut v = Vec::new();
    let counts = [
        ("n_seeds", params.n_seeds),
        ("k_neighbors", params.k_neighbors),
        ("voxel_divisions", params.voxel_divisions),
    ];
    for (name, c) in counts {
        if c < 1 {
            v.push(ParamViolation::new(name, c as f64, "must be >= 1"));
        }
    }
    let positives = [
        ("sphere_radius", params.sphere_radius),
        ("neighbor_ratio_threshold", params.neighbor_ratio_threshold),
        ("voxel_ratio_threshold", params.voxel_ratio_threshold),
        ("sd1", params.sd1),
        ("sd2", params.sd2),
    ];
    for (name, x) in positives {
        if !(x > 0.0 && x.is_finite()) {
            v.push(ParamViolation::new(name, x, "must be finite and > 0"));
        }
    }
    let h = params.height_fraction;
    if !(h > 0.0 && h < 1.0) {
        v.push(ParamViolation::new("height_fraction", h, "must lie in (0, 1)"));
    }
    if v.is_empty() {
        Ok(params)
    } else {
        Err(ParamErrors(v))
    }
}
