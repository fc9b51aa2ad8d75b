use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::dataset::Dataset;
use crate::error::{Error, Result};

/// Index partition of a seeded shuffle: the first `floor(fraction * n)`
/// shuffled indices train, the rest test.
pub fn split_indices(n: usize, fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::Config(format!(
            "split fraction must lie in (0, 1), got {fraction}"
        )));
    }
    if n < 2 {
        return Err(Error::ParameterDomain(format!(
            "need at least 2 rows to split, got {n}"
        )));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_train = ((fraction * n as f64).floor() as usize).clamp(1, n - 1);
    let test = idx.split_off(n_train);
    Ok((idx, test))
}

/// Seeded random train/test split.
pub fn random_split(dataset: &Dataset, fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    let (train, test) = split_indices(dataset.len(), fraction, seed)?;
    Ok((dataset.subset(&train), dataset.subset(&test)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventy_thirty_sizes() {
        let (a, b) = split_indices(10, 0.7, 1).unwrap();
        assert_eq!((a.len(), b.len()), (7, 3));
    }

    #[test]
    fn partition_is_exhaustive_and_disjoint() {
        let (mut a, b) = split_indices(101, 0.7, 9).unwrap();
        a.extend(b);
        a.sort_unstable();
        assert_eq!(a, (0..101).collect::<Vec<_>>());
    }

    #[test]
    fn seed_controls_partition() {
        assert_eq!(split_indices(1000, 0.7, 3).unwrap(), split_indices(1000, 0.7, 3).unwrap());
        assert_ne!(split_indices(1000, 0.7, 3).unwrap(), split_indices(1000, 0.7, 4).unwrap());
    }

    #[test]
    fn bad_fraction() {
        assert!(split_indices(10, 1.0, 0).is_err());
        assert!(split_indices(1, 0.5, 0).is_err());
    }
}
