//! Benchmark harness: synthetic shapes, noise injection, metrics.

pub mod metrics;
pub mod noise;
pub mod shapes;

pub use metrics::{compare, compare_clouds, MetricsReport, Warnings};
pub use noise::{add_mesh_noise, noise_displacement, perturb_points};
pub use shapes::{make_shape, ShapeKind};
