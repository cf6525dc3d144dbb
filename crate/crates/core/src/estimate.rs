//! Angular step estimation for clouds without scan metadata.
//!
//! On a surface sampled by a scanner stepping θ between rays, the nearest
//! neighbor of a point at range d sits about d·θ away. The estimate is the
//! median of nearest-neighbor distance over range, taken over the points of
//! the densest sampling spheres (dense patches are wood-like surfaces, where
//! sampling is regular).

use thiserror::Error;

use crate::intensity::{quarter_thresholds, sample_spheres_indexed, IntensityError};
use crate::model::{LabeledCloud, PipelineParams};
use crate::par;
use crate::spatial::NeighborIndex;

#[derive(Debug, Error, PartialEq)]
pub enum EstimateError {
    #[error("need at least two points to estimate the angular step")]
    TooFewPoints,
    #[error("no sampling sphere yielded a usable spacing sample")]
    NoSamples,
    #[error(transparent)]
    Sampling(#[from] IntensityError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularStepEstimate {
    /// Radians.
    pub angular_step: f64,
    pub samples: usize,
    /// False when no sphere was dense enough and all usable spheres were used.
    pub from_dense_spheres: bool,
}

pub fn estimate_angular_step(cloud: &LabeledCloud, params: &PipelineParams) -> Result<AngularStepEstimate, EstimateError> {
    if cloud.len() < 2 {
        return Err(EstimateError::TooFewPoints);
    }
    let all: Vec<usize> = (0..cloud.len()).collect();
    let index = NeighborIndex::build(cloud, &all).map_err(|_| EstimateError::TooFewPoints)?;
    let spheres = sample_spheres_indexed(cloud, &index, params.n_seeds, params.sphere_radius, params.rng_seed)?;
    let usable: Vec<_> = spheres.iter().filter(|s| s.is_usable()).collect();
    let densities: Vec<f64> = usable.iter().map(|s| s.projection_density).collect();
    let (_, dense) = quarter_thresholds(&densities).ok_or(EstimateError::NoSamples)?;

    let mut members: Vec<usize> = usable
        .iter()
        .filter(|s| s.projection_density > dense)
        .flat_map(|s| s.members.iter().copied())
        .collect();
    let from_dense_spheres = !members.is_empty();
    if !from_dense_spheres {
        members = usable.iter().flat_map(|s| s.members.iter().copied()).collect();
    }
    members.sort_unstable();
    members.dedup();

    let pts = cloud.points();
    let ratios: Vec<Option<f64>> = par::map_slice(&members, |&i| {
        let range = pts[i].range();
        let nn = index.k_nearest(i, 1).ok()?;
        let d = nn.first()?.distance;
        (range > 0.0 && d > 0.0).then(|| d / range)
    });
    let mut ratios: Vec<f64> = ratios.into_iter().flatten().collect();
    if ratios.is_empty() {
        return Err(EstimateError::NoSamples);
    }
    let mid = ratios.len() / 2;
    let (_, median, _) = ratios.select_nth_unstable_by(mid, f64::total_cmp);
    let angular_step = *median;
    log::info!(
        "estimated angular step {angular_step:.4e} rad from {} spacing samples",
        ratios.len()
    );
    Ok(AngularStepEstimate {
        angular_step,
        samples: ratios.len(),
        from_dense_spheres,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Point;

    /// A vertical plane 10 m away sampled on an exact angular grid.
    fn scanned_wall(step: f64, scale: f64) -> LabeledCloud {
        let mut pts = Vec::new();
        for a in -40..=40 {
            for e in -40..=40 {
                let az = a as f64 * step;
                let el = e as f64 * step;
                let x = 10.0 * scale;
                let t = x / (az.cos() * el.cos());
                pts.push(Point::new(x, t * az.sin() * el.cos(), t * el.sin(), 1.0));
            }
        }
        LabeledCloud::new(pts).unwrap()
    }

    #[test]
    fn recovers_grid_step() {
        let step = 1e-3;
        let params = PipelineParams {
            n_seeds: 200,
            ..PipelineParams::default()
        };
        let est = estimate_angular_step(&scanned_wall(step, 1.0), &params).unwrap();
        assert!((est.angular_step / step - 1.0).abs() < 0.05, "{est:?}");
    }

    #[test]
    fn scale_free() {
        let params = PipelineParams {
            n_seeds: 200,
            ..PipelineParams::default()
        };
        let a = estimate_angular_step(&scanned_wall(1e-3, 1.0), &params).unwrap();
        let doubled = PipelineParams {
            sphere_radius: params.sphere_radius * 2.0,
            ..params
        };
        let b = estimate_angular_step(&scanned_wall(1e-3, 2.0), &doubled).unwrap();
        assert!((a.angular_step - b.angular_step).abs() <= 1e-12 * a.angular_step);
    }

    #[test]
    fn single_point_is_an_error() {
        let cloud = LabeledCloud::new(vec![Point::new(1.0, 0.0, 0.0, 1.0)]).unwrap();
        assert_eq!(
            estimate_angular_step(&cloud, &PipelineParams::default()),
            Err(EstimateError::TooFewPoints)
        );
    }
}
