//! Grid evaluation strategy.
//!
//! Sweep points are independent pure computations, so grids evaluate in
//! parallel with rayon when the `parallel` feature is enabled (the default)
//! and fall back to a plain sequential map otherwise. Output order is by
//! input index either way, so artifacts are byte-identical across schedules
//! and across the two code paths.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `items`, preserving input order in the output.
pub fn map_ordered<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Sequential map with the same signature, kept available alongside the
/// parallel path for baseline comparisons.
pub fn map_ordered_seq<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// Cap the worker-thread count for grid evaluation. `0` keeps the automatic
/// choice. Must be called before the first parallel sweep; later calls have
/// no effect. A no-op without the `parallel` feature.
pub fn configure_threads(threads: usize) {
    #[cfg(feature = "parallel")]
    if threads > 0 {
        // build_global errors if a pool already exists; keep whatever is set
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_and_sequential_agree_in_order() {
        let items: Vec<u64> = (0..257).collect();
        let f = |x: &u64| x * x + 1;
        assert_eq!(map_ordered(&items, f), map_ordered_seq(&items, f));
    }
}
