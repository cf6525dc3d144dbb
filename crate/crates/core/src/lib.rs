//! Wood/leaf classification of terrestrial laser scan tree point clouds.
//!
//! The classifier runs in three passes, each moving more points into the
//! leaf class, followed by a verification pass that promotes misplaced
//! wood points back:
//!
//! 1. [`intensity`]: sphere sampling picks confident wood and leaf regions,
//!    whose intensity histograms yield an adaptive threshold.
//! 2. [`refine::knn_refine`]: points whose mean 8-neighbor distance is far
//!    above the scanner's expected spacing are leaves.
//! 3. [`refine::voxel_refine`]: sparse or isolated voxels are leaves.
//! 4. [`verify`]: region growth in the lower trunk, distance/intensity tests
//!    above it.
//!
//! [`pipeline::classify`] chains the stages; [`metrics`] scores the result
//! and [`synth`] produces labeled test trees.
//!
//! Inner loops run on rayon when the `parallel` feature (default) is on.

pub mod estimate;
pub mod hull;
pub mod intensity;
pub mod io;
pub mod metrics;
pub mod model;
pub mod par;
pub mod pipeline;
pub mod refine;
pub mod spatial;
pub mod synth;
pub mod verify;

pub use model::{ClassLabel, LabeledCloud, PipelineParams, Point, ScanConfig};
pub use pipeline::{classify, PipelineError, StageTrace};
