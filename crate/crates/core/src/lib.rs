//! Neuro-fuzzy and neural regression of a reservoir property (sand
//! fraction) from seismic attributes.
//!
//! The crate covers the whole workflow: integrating well logs with seismic
//! traces ([`pipeline`]), seeding fuzzy rule bases by grid partition or
//! clustering ([`builder`], [`cluster`]), hybrid ANFIS training
//! ([`train`]), a single-hidden-layer network baseline ([`ann`]), forward
//! feature selection ([`select`]) and volumetric prediction with median
//! smoothing ([`volume`]).
//!
//! The data-parallel loops run on rayon when the `parallel` feature is on
//! (the default); see [`par::Exec`].

pub mod ann;
pub mod builder;
pub mod cluster;
pub mod error;
pub mod fuzzy;
pub mod par;
pub mod pipeline;
pub mod predictor;
pub mod select;
pub mod train;
pub mod volume;

pub use error::{Error, Result};
pub use fuzzy::{BellMf, TskModel, TskRule};
pub use par::Exec;
pub use pipeline::{Dataset, Metrics, Sample};
pub use predictor::{AnyModel, Regressor};
