use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{check_points, sq_dist, ClusterResult, IterationStat};
use crate::error::{Error, Result};

const MAX_ITER: usize = 300;

/// Farthest-point seeding: a seeded random first center, then repeatedly the
/// point farthest from its nearest chosen center (lowest index on ties).
pub fn farthest_point_seeds(points: &[Vec<f64>], k: usize, seed: u64) -> Vec<usize> {
    let n = points.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen = vec![rng.random_range(0..n)];
    let mut nearest: Vec<f64> = points.iter().map(|p| sq_dist(p, &points[chosen[0]])).collect();
    while chosen.len() < k {
        let (next, _) = nearest
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, &d)| if d > best.1 { (i, d) } else { best });
        chosen.push(next);
        for (d, p) in nearest.iter_mut().zip(points) {
            *d = d.min(sq_dist(p, &points[next]));
        }
    }
    chosen
}

fn nearest_center(p: &[f64], centers: &[Vec<f64>]) -> (usize, f64) {
    centers
        .iter()
        .enumerate()
        .map(|(i, c)| (i, sq_dist(p, c)))
        .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
}

/// Lloyd's k-means with farthest-point seeding. Deterministic for a seed.
pub fn kmeans(points: &[Vec<f64>], k: usize, seed: u64) -> Result<ClusterResult> {
    let dim = check_points(points)?;
    let n = points.len();
    if k == 0 || k > n {
        return Err(Error::ParameterDomain(format!(
            "k-means needs 1 <= k <= n_points, got k = {k}, n = {n}"
        )));
    }
    let mut centers: Vec<Vec<f64>> = farthest_point_seeds(points, k, seed)
        .into_iter()
        .map(|i| points[i].clone())
        .collect();
    let mut labels = vec![usize::MAX; n];
    let mut history = Vec::new();
    let mut iterations = 0;
    while iterations < MAX_ITER {
        iterations += 1;
        let mut changed = false;
        let mut dists = vec![0.0; n];
        for (j, p) in points.iter().enumerate() {
            let (c, d) = nearest_center(p, &centers);
            changed |= labels[j] != c;
            labels[j] = c;
            dists[j] = d;
        }
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (p, &c) in points.iter().zip(&labels) {
            counts[c] += 1;
            sums[c].iter_mut().zip(p).for_each(|(s, v)| *s += v);
        }
        for c in 0..k {
            if counts[c] > 0 {
                centers[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            }
        }
        let cost: f64 = points
            .iter()
            .zip(&labels)
            .map(|(p, &c)| sq_dist(p, &centers[c]))
            .sum();
        history.push(IterationStat {
            cost,
            membership_sum_error: 0.0,
        });

        // Re-seed empty clusters at the points farthest from their centers.
        let empty: Vec<usize> = (0..k).filter(|&c| counts[c] == 0).collect();
        if !empty.is_empty() {
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| dists[b].total_cmp(&dists[a]).then(a.cmp(&b)));
            for (c, &j) in empty.iter().zip(&order) {
                centers[*c] = points[j].clone();
            }
            continue;
        }
        if !changed {
            break;
        }
    }
    Ok(ClusterResult {
        centers,
        assignments: Some(labels),
        iterations,
        final_cost: history.last().map_or(0.0, |h| h.cost),
        history,
        ..Default::default()
    })
}
