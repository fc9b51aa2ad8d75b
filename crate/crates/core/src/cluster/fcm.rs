use super::kmeans::farthest_point_seeds;
use super::{check_points, sq_dist, ClusterResult, IterationStat};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FcmParams {
    pub clusters: usize,
    /// Fuzziness exponent `m > 1`.
    pub fuzziness: f64,
    /// Stop once the largest membership change falls below this.
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for FcmParams {
    fn default() -> Self {
        Self {
            clusters: 2,
            fuzziness: 2.0,
            tol: 1e-5,
            max_iter: 200,
            seed: 0,
        }
    }
}

impl FcmParams {
    pub fn with_clusters(clusters: usize) -> Self {
        Self {
            clusters,
            ..Self::default()
        }
    }
}

/// Fuzzy c-means from farthest-point seeded centers.
pub fn fcm(points: &[Vec<f64>], params: &FcmParams) -> Result<ClusterResult> {
    check_points(points)?;
    validate(points.len(), params)?;
    let init: Vec<Vec<f64>> = farthest_point_seeds(points, params.clusters, params.seed)
        .into_iter()
        .map(|i| points[i].clone())
        .collect();
    fcm_from(points, init, params)
}

fn validate(n: usize, params: &FcmParams) -> Result<()> {
    if params.clusters == 0 || params.clusters > n {
        return Err(Error::ParameterDomain(format!(
            "fuzzy c-means needs 1 <= clusters <= n_points, got {} clusters for {n} points",
            params.clusters
        )));
    }
    if !(params.fuzziness > 1.0 && params.fuzziness.is_finite()) {
        return Err(Error::ParameterDomain(format!(
            "fuzziness must exceed 1, got {}",
            params.fuzziness
        )));
    }
    if params.tol.is_nan() || params.tol < 0.0 || params.max_iter == 0 {
        return Err(Error::ParameterDomain("fcm needs tol >= 0 and max_iter >= 1".into()));
    }
    Ok(())
}

/// Optimal memberships of one point given the centers. A point that sits
/// exactly on one or more centers belongs to them crisply, split evenly.
fn point_memberships(p: &[f64], centers: &[Vec<f64>], exponent: f64, out: &mut [f64]) {
    let d2: Vec<f64> = centers.iter().map(|c| sq_dist(p, c)).collect();
    let zeros = d2.iter().filter(|&&d| d == 0.0).count();
    if zeros > 0 {
        let share = 1.0 / zeros as f64;
        for (u, d) in out.iter_mut().zip(&d2) {
            *u = if *d == 0.0 { share } else { 0.0 };
        }
        return;
    }
    // u_i = 1 / sum_k (d_i / d_k)^(2/(m-1)), scaled by the nearest distance
    let dmin = d2.iter().copied().fold(f64::INFINITY, f64::min);
    let mut total = 0.0;
    for (u, d) in out.iter_mut().zip(&d2) {
        *u = (dmin / d).powf(exponent);
        total += *u;
    }
    out.iter_mut().for_each(|u| *u /= total);
}

/// Fuzzy c-means from the given initial centers.
pub fn fcm_from(points: &[Vec<f64>], init: Vec<Vec<f64>>, params: &FcmParams) -> Result<ClusterResult> {
    let dim = check_points(points)?;
    let params = FcmParams {
        clusters: init.len(),
        ..*params
    };
    validate(points.len(), &params)?;
    if let Some(bad) = init.iter().find(|c| c.len() != dim) {
        return Err(Error::dim(dim, bad.len(), "initial center"));
    }
    let (n, c, m) = (points.len(), init.len(), params.fuzziness);
    let exponent = 1.0 / (m - 1.0);
    let mut centers = init;
    let mut u = vec![vec![0.0; n]; c];
    let mut column = vec![0.0; c];
    let mut history = Vec::new();
    let mut iterations = 0;

    while iterations < params.max_iter {
        iterations += 1;
        let mut max_change: f64 = if iterations == 1 { f64::INFINITY } else { 0.0 };
        let mut sum_error: f64 = 0.0;
        for (j, p) in points.iter().enumerate() {
            point_memberships(p, &centers, exponent, &mut column);
            let mut s = 0.0;
            for (i, &v) in column.iter().enumerate() {
                max_change = max_change.max((v - u[i][j]).abs());
                u[i][j] = v;
                s += v;
            }
            sum_error = sum_error.max((s - 1.0).abs());
        }
        for (i, center) in centers.iter_mut().enumerate() {
            let mut num = vec![0.0; dim];
            let mut den = 0.0;
            for (p, &uij) in points.iter().zip(&u[i]) {
                let w = uij.powf(m);
                den += w;
                num.iter_mut().zip(p).for_each(|(a, v)| *a += w * v);
            }
            if den > 0.0 {
                *center = num.into_iter().map(|v| v / den).collect();
            }
        }
        let cost = objective(points, &centers, &u, m);
        history.push(IterationStat {
            cost,
            membership_sum_error: sum_error,
        });
        if max_change < params.tol {
            break;
        }
    }
    Ok(ClusterResult {
        centers,
        membership: Some(u),
        iterations,
        final_cost: history.last().map_or(0.0, |h| h.cost),
        history,
        ..Default::default()
    })
}

/// `J = sum_i sum_j u_ij^m ||c_i - x_j||^2`.
pub(crate) fn objective(points: &[Vec<f64>], centers: &[Vec<f64>], u: &[Vec<f64>], m: f64) -> f64 {
    centers
        .iter()
        .zip(u)
        .map(|(c, row)| {
            points
                .iter()
                .zip(row)
                .map(|(p, &uij)| uij.powf(m) * sq_dist(p, c))
                .sum::<f64>()
        })
        .sum()
}
