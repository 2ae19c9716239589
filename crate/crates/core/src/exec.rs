//! Execution strategy for the exhaustive verification sweeps.
//!
//! The identity checks in this crate are embarrassingly parallel over basis
//! elements. With the default `parallel` feature they fan out on rayon;
//! without it the same sweeps run sequentially. [`map_seq`] is always
//! sequential and exists so benchmarks can compare both code paths in one
//! build.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Order-preserving map over `items`, parallel when the `parallel` feature is
/// enabled.
#[cfg(feature = "parallel")]
pub fn map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    items.par_iter().map(f).collect()
}

/// Order-preserving map over `items`, parallel when the `parallel` feature is
/// enabled.
#[cfg(not(feature = "parallel"))]
pub fn map<T, U>(items: &[T], f: impl Fn(&T) -> U) -> Vec<U> {
    items.iter().map(f).collect()
}

/// Sequential reference implementation of [`map`].
pub fn map_seq<T, U>(items: &[T], f: impl Fn(&T) -> U) -> Vec<U> {
    items.iter().map(f).collect()
}

/// Runs `check` over every item and returns the first failure in item order,
/// so witnesses are deterministic regardless of scheduling.
#[cfg(feature = "parallel")]
pub fn first_failure<T: Sync, W: Send>(
    items: &[T],
    check: impl Fn(&T) -> Option<W> + Sync + Send,
) -> Option<W> {
    let mut results = map(items, check);
    results.iter_mut().find_map(|r| r.take())
}

/// Runs `check` over every item and returns the first failure in item order,
/// so witnesses are deterministic regardless of scheduling.
#[cfg(not(feature = "parallel"))]
pub fn first_failure<T, W>(items: &[T], check: impl Fn(&T) -> Option<W>) -> Option<W> {
    items.iter().find_map(check)
}

/// Sequential reference implementation of [`first_failure`].
pub fn first_failure_seq<T, W>(items: &[T], check: impl Fn(&T) -> Option<W>) -> Option<W> {
    items.iter().find_map(check)
}
