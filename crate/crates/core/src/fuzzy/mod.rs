//! Takagi–Sugeno–Kang fuzzy inference with generalized bell memberships.

pub mod mf;
pub mod model;

pub use mf::{BellGrad, BellMf};
pub use model::{normalize_firing, Inference, LabeledMf, TskModel, TskRule};
