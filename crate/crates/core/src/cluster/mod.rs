//! Clustering used to seed fuzzy rule bases: k-means, fuzzy c-means and
//! subtractive (mountain-potential) clustering.

mod fcm;
mod kmeans;
mod subtractive;

pub use fcm::{fcm, fcm_from, FcmParams};
pub use kmeans::{farthest_point_seeds, kmeans};
pub use subtractive::{potentials, subtractive, SubtractiveParams};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationStat {
    /// Objective after the iteration.
    pub cost: f64,
    /// Largest `|sum_i u_ij - 1|` over points; zero for hard clusterings.
    pub membership_sum_error: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ClusterResult {
    pub centers: Vec<Vec<f64>>,
    /// `n_clusters × n_points` fuzzy membership matrix (FCM only).
    pub membership: Option<Vec<Vec<f64>>>,
    /// Hard labels (k-means only).
    pub assignments: Option<Vec<usize>>,
    /// Indices of the data points chosen as centers (subtractive only).
    pub center_indices: Option<Vec<usize>>,
    /// Potentials before any subtraction (subtractive only).
    pub potentials: Option<Vec<f64>>,
    pub iterations: usize,
    pub final_cost: f64,
    pub history: Vec<IterationStat>,
}

pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub(crate) fn check_points(points: &[Vec<f64>]) -> Result<usize> {
    let first = points
        .first()
        .ok_or_else(|| Error::ParameterDomain("clustering needs at least one point".into()))?;
    let dim = first.len();
    for (i, p) in points.iter().enumerate() {
        if p.len() != dim {
            return Err(Error::dim(dim, p.len(), format!("point {i}")));
        }
        if p.iter().any(|v| !v.is_finite()) {
            return Err(Error::ParameterDomain(format!("point {i} is not finite")));
        }
    }
    Ok(dim)
}
