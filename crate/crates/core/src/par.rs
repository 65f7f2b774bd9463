//! Data-parallel map helpers with a sequential fallback.
//!
//! With the `parallel` feature (default) these fan out over rayon; without it
//! they compile to plain sequential loops. Benchmarks flip
//! [`set_force_sequential`] to compare both paths inside one binary.

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use std::sync::atomic::{AtomicBool, Ordering};

static FORCE_SEQUENTIAL: AtomicBool = AtomicBool::new(false);

/// Force the sequential path even when the `parallel` feature is enabled.
///
/// Global switch meant for benchmarks and diagnostics; it does not affect
/// result values, only the execution strategy.
pub fn set_force_sequential(on: bool) {
    FORCE_SEQUENTIAL.store(on, Ordering::SeqCst);
}

/// True when the sequential path is active (feature off or forced).
pub fn sequential() -> bool {
    if cfg!(feature = "parallel") {
        FORCE_SEQUENTIAL.load(Ordering::SeqCst)
    } else {
        true
    }
}

/// Map `f` over `0..n`, preserving index order in the output.
pub fn map_range<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if !sequential() {
        return (0..n).into_par_iter().map(f).collect();
    }
    (0..n).map(f).collect()
}

/// Map `f` over a slice, preserving order.
pub fn map_slice<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if !sequential() {
        return items.par_iter().map(f).collect();
    }
    items.iter().map(f).collect()
}

/// Earliest index in `0..n` where `f` returns `Some`, with its payload.
///
/// The parallel path still reports the smallest such index.
pub fn find_first_range<U, F>(n: usize, f: F) -> Option<(usize, U)>
where
    U: Send,
    F: Fn(usize) -> Option<U> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if !sequential() {
        return (0..n)
            .into_par_iter()
            .filter_map(|i| f(i).map(|u| (i, u)))
            .min_by_key(|(i, _)| *i);
    }
    (0..n).find_map(|i| f(i).map(|u| (i, u)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_range_matches_sequential() {
        let par: Vec<usize> = map_range(100, |i| i * i);
        let seq: Vec<usize> = (0..100).map(|i| i * i).collect();
        assert_eq!(par, seq);
    }

    #[test]
    fn find_first_reports_smallest_index() {
        let hit = find_first_range(1000, |i| if i >= 17 { Some(i * 2) } else { None });
        assert_eq!(hit, Some((17, 34)));
    }
}
