//! Execution strategy for the data-parallel loops.
//!
//! Every reduction here splits its index range into fixed-size chunks and
//! combines the chunk partials in index order, so results are bit-identical
//! whether the chunks ran on one thread or many.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Rows per chunk for deterministic reductions.
pub const CHUNK: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    /// Uses rayon when the `parallel` feature is enabled, otherwise runs
    /// sequentially.
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

impl Exec {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }
}

/// Maps `f` over `0..n`, preserving order.
pub fn map<T, F>(exec: Exec, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..n).map(f).collect()
}

/// Calls `f(index, chunk)` for each `chunk_len`-sized piece of `data`.
pub fn for_each_chunk_mut<T, F>(exec: Exec, data: &mut [T], chunk_len: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        data.par_chunks_mut(chunk_len)
            .enumerate()
            .for_each(|(i, c)| f(i, c));
        return;
    }
    let _ = exec;
    data.chunks_mut(chunk_len)
        .enumerate()
        .for_each(|(i, c)| f(i, c));
}

/// Folds `0..n` in chunks of [`CHUNK`] rows. `fold_chunk` receives a range
/// and returns its partial; partials are merged left to right with `merge`.
pub fn chunked_reduce<T, F, M>(exec: Exec, n: usize, fold_chunk: F, merge: M) -> Option<T>
where
    T: Send,
    F: Fn(std::ops::Range<usize>) -> T + Sync + Send,
    M: Fn(T, T) -> T,
{
    let n_chunks = n.div_ceil(CHUNK);
    let partials = map(exec, n_chunks, |k| {
        let lo = k * CHUNK;
        fold_chunk(lo..(lo + CHUNK).min(n))
    });
    partials.into_iter().reduce(merge)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunked_sum_is_identical_across_modes() {
        let xs: Vec<f64> = (0..10_000).map(|i| (i as f64 * 0.37).sin() * 1e-3).collect();
        let run = |exec| {
            chunked_reduce(exec, xs.len(), |r| xs[r].iter().sum::<f64>(), |a, b| a + b).unwrap()
        };
        assert_eq!(
            run(Exec::Sequential).to_bits(),
            run(Exec::Parallel).to_bits()
        );
    }

    #[test]
    fn empty_reduce_is_none() {
        assert!(chunked_reduce(Exec::default(), 0, |_| 1.0, |a, b| a + b).is_none());
    }

    #[test]
    fn map_preserves_order() {
        assert_eq!(map(Exec::Parallel, 5, |i| i * 2), vec![0, 2, 4, 6, 8]);
    }
}
