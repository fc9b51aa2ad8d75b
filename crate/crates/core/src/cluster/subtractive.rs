use super::{check_points, sq_dist, ClusterResult};
use crate::error::{Error, Result};
use crate::par::{self, Exec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubtractiveParams {
    /// Neighborhood radius `r_a` in unit-scaled data space.
    pub radius: f64,
    /// Ratio `r_b / r_a` of the subtraction radius to the neighborhood radius.
    pub squash: f64,
    /// Candidates above this fraction of the first potential are accepted.
    pub accept_ratio: f64,
    /// Candidates below this fraction of the first potential end the search.
    pub reject_ratio: f64,
    pub max_centers: usize,
}

impl Default for SubtractiveParams {
    fn default() -> Self {
        Self {
            radius: 0.2,
            squash: 1.25,
            accept_ratio: 0.5,
            reject_ratio: 0.15,
            max_centers: 1000,
        }
    }
}

impl SubtractiveParams {
    pub fn with_radius(radius: f64) -> Self {
        Self {
            radius,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.radius > 0.0
            && self.radius <= 1.0
            && self.squash > 1.0
            && self.squash.is_finite()
            && self.reject_ratio > 0.0
            && self.reject_ratio < self.accept_ratio
            && self.accept_ratio <= 1.0
            && self.max_centers >= 1;
        if !ok {
            return Err(Error::ParameterDomain(format!(
                "invalid subtractive clustering parameters {self:?}"
            )));
        }
        Ok(())
    }
}

/// `P_i = sum_j exp(-4 ||x_i - x_j||^2 / r_a^2)`, self term included.
pub fn potentials(points: &[Vec<f64>], radius: f64) -> Vec<f64> {
    let alpha = 4.0 / (radius * radius);
    par::map(Exec::default(), points.len(), |i| {
        points
            .iter()
            .map(|q| (-alpha * sq_dist(&points[i], q)).exp())
            .sum()
    })
}

fn argmax(values: &[f64]) -> usize {
    values
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, &v)| if v > best.1 { (i, v) } else { best })
        .0
}

/// Subtractive clustering. Centers are data points, chosen by highest
/// remaining potential; each accepted center removes potential within
/// `squash * radius` of itself. Candidates between the reject and accept
/// ratios are kept only if they are far enough from existing centers
/// relative to their potential.
pub fn subtractive(points: &[Vec<f64>], params: &SubtractiveParams) -> Result<ClusterResult> {
    check_points(points)?;
    params.validate()?;
    let initial = potentials(points, params.radius);
    let mut p = initial.clone();
    let rb = params.squash * params.radius;
    let beta = 4.0 / (rb * rb);

    let first = argmax(&p);
    let p_first = p[first];
    let mut chosen: Vec<usize> = Vec::new();
    let mut candidate = first;
    loop {
        let pk = p[candidate];
        let accept = if chosen.is_empty() || pk > params.accept_ratio * p_first {
            true
        } else if pk < params.reject_ratio * p_first {
            break;
        } else {
            let dmin = chosen
                .iter()
                .map(|&c| sq_dist(&points[candidate], &points[c]).sqrt())
                .fold(f64::INFINITY, f64::min);
            dmin / params.radius + pk / p_first >= 1.0
        };
        if accept {
            chosen.push(candidate);
            let center = &points[candidate];
            let drop = par::map(Exec::default(), points.len(), |i| {
                pk * (-beta * sq_dist(&points[i], center)).exp()
            });
            p.iter_mut().zip(drop).for_each(|(v, d)| *v -= d);
            if chosen.len() >= params.max_centers {
                break;
            }
        } else {
            p[candidate] = 0.0;
        }
        candidate = argmax(&p);
    }
    Ok(ClusterResult {
        centers: chosen.iter().map(|&i| points[i].clone()).collect(),
        iterations: chosen.len(),
        center_indices: Some(chosen),
        potentials: Some(initial),
        ..Default::default()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_point() {
        let res = subtractive(&[vec![0.4, 0.6]], &SubtractiveParams::default()).unwrap();
        assert_eq!(res.potentials.unwrap(), vec![1.0]);
        assert_eq!(res.centers, vec![vec![0.4, 0.6]]);
    }

    #[test]
    fn coincident_points_tie_to_lowest_index() {
        for r in [0.05, 0.2, 0.9] {
            let res = subtractive(&[vec![0.5], vec![0.5]], &SubtractiveParams::with_radius(r)).unwrap();
            assert_eq!(res.potentials.unwrap(), vec![2.0, 2.0]);
            assert_eq!(res.center_indices.unwrap()[0], 0);
            assert_eq!(res.centers.len(), 1);
        }
    }

    #[test]
    fn separated_groups_give_one_center_each() {
        let mut points = Vec::new();
        for &c in &[0.1, 0.5, 0.9] {
            for k in 0..10 {
                points.push(vec![c + 0.002 * k as f64]);
            }
        }
        let res = subtractive(&points, &SubtractiveParams::with_radius(0.2)).unwrap();
        assert_eq!(res.centers.len(), 3);
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(subtractive(&[], &SubtractiveParams::default()).is_err());
        assert!(SubtractiveParams { squash: 1.0, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn potentials_include_self_term() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let points: Vec<Vec<f64>> = (0..40).map(|_| vec![rng.random_range(0.0..1.0)]).collect();
        assert!(potentials(&points, 0.2).iter().all(|&p| p >= 1.0));
    }
}
