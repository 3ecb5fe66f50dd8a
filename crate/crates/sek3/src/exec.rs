//! Data-parallel execution helpers.
//!
//! With the `parallel` feature the index space is fanned out over rayon;
//! without it the same code runs sequentially. Both paths produce
//! bit-identical results: per-index work is a pure function of the index,
//! and sums are reduced block-by-block in index order so the floating-point
//! summation tree never depends on the thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Fixed block length for deterministic block sums.
pub(crate) const BLOCK: usize = 4096;

/// Maps `0..n` and collects in index order.
#[cfg(feature = "parallel")]
pub(crate) fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

/// Sums `term(i)` over `0..n` with a fixed two-level reduction: sequential
/// sums inside [`BLOCK`]-sized blocks, then a sequential sum over the block
/// partials in block order.
pub(crate) fn block_sum<F>(n: usize, term: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let blocks = n.div_ceil(BLOCK);
    let partials = map_indexed(blocks, |b| {
        let start = b * BLOCK;
        let end = ((b + 1) * BLOCK).min(n);
        let mut acc = 0.0;
        for i in start..end {
            acc += term(i);
        }
        acc
    });
    partials.into_iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_sum_matches_reference_reduction() {
        let n = 3 * BLOCK + 17;
        let term = |i: usize| ((i as f64) * 0.37).sin();
        let got = block_sum(n, term);

        // Reference: the same two-level tree, hand-rolled sequentially.
        let mut partials = Vec::new();
        let mut i = 0;
        while i < n {
            let mut acc = 0.0;
            for j in i..(i + BLOCK).min(n) {
                acc += term(j);
            }
            partials.push(acc);
            i += BLOCK;
        }
        let expected: f64 = partials.into_iter().sum();
        assert_eq!(got, expected);
    }

    #[test]
    fn map_indexed_preserves_order() {
        let v = map_indexed(1000, |i| i * 2);
        assert!(v.iter().enumerate().all(|(i, x)| *x == i * 2));
    }
}
