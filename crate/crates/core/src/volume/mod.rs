//! Volumetric prediction over seismic cubes, inline-by-inline median
//! smoothing, and slice export.

pub mod cube;
pub mod export;
pub mod median;
pub mod predict;

pub use cube::{CubeFile, Geometry, SeismicCube};
pub use export::{export_overlay, export_slice, write_overlay, write_slice};
pub use median::{median_filter_inline, smooth_cube, WINDOW};
pub use predict::{predict_cube, PropertyCube, VolumeDiagnostics};
