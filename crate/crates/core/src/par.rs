//! Data-parallel map helpers.
//!
//! Per-token feasibility solves, corpus positions, and per-column fits are
//! all embarrassingly parallel. With the `parallel` feature (default) these
//! fan out on the rayon pool; without it they run sequentially so the crate
//! builds on targets where rayon is unwanted. Results are position-stable
//! either way, so outputs do not depend on the feature or thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Apply `f` to every index in `0..n`, collecting results in index order.
#[cfg(feature = "parallel")]
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

/// Apply `f` to every index in `0..n`, collecting results in index order.
#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

/// Sequential twin of [`map_indexed`], always available. Benchmarks use it
/// to compare the two execution modes within one build.
pub fn map_indexed_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_stable() {
        let xs = map_indexed(100, |i| i * i);
        let ys = map_indexed_seq(100, |i| i * i);
        assert_eq!(xs, ys);
    }
}
