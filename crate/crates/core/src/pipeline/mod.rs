//! Ingestion, resampling, normalization, splitting and metrics.

pub mod dataset;
pub mod metrics;
pub mod normalize;
pub mod spline;
pub mod split;
pub mod well;

pub use dataset::{Dataset, Sample};
pub use metrics::Metrics;
pub use normalize::{MinMaxSpec, ZScoreSpec};
pub use spline::{spline_resample, CubicSpline};
pub use split::{random_split, split_indices};
pub use well::{integrate_wells, PrepSummary, WellLocation, WellSeries};
