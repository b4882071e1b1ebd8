//! Execution strategy for embarrassingly parallel maps.
//!
//! With the `parallel` feature (default), [`map`] fans out over rayon once
//! the input is large enough to amortize the pool overhead; small inputs and
//! builds without the feature run sequentially. Results are collected in
//! input order, so output bytes do not depend on the strategy.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How to run a batch map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Sequential,
    #[cfg(feature = "parallel")]
    Parallel,
}

/// Inputs below this length stay sequential in [`map`]; per-item work in this
/// crate is in the microsecond range, so smaller batches lose to pool setup.
pub const PAR_THRESHOLD: usize = 4096;

/// Map `f` over `0..len` with the default strategy.
pub fn map<T: Send>(len: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    #[cfg(feature = "parallel")]
    if len >= PAR_THRESHOLD {
        return map_with(Mode::Parallel, len, f);
    }
    map_with(Mode::Sequential, len, f)
}

/// Map `f` over `0..len` with an explicit strategy (used by the benches).
pub fn map_with<T: Send>(mode: Mode, len: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    match mode {
        Mode::Sequential => (0..len).map(f).collect(),
        #[cfg(feature = "parallel")]
        Mode::Parallel => (0..len).into_par_iter().map(f).collect(),
    }
}

/// Map over a slice of items, default strategy.
pub fn map_slice<I: Sync, T: Send>(items: &[I], f: impl Fn(&I) -> T + Sync + Send) -> Vec<T> {
    #[cfg(feature = "parallel")]
    if items.len() >= 2 {
        return items.par_iter().map(f).collect();
    }
    items.iter().map(f).collect()
}

/// Map over a slice sequentially regardless of features (bench baseline).
pub fn map_slice_seq<I, T>(items: &[I], f: impl Fn(&I) -> T) -> Vec<T> {
    items.iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategies_agree() {
        let seq = map_with(Mode::Sequential, 10_000, |i| (i as f64).sqrt());
        let auto = map(10_000, |i| (i as f64).sqrt());
        assert_eq!(seq, auto);
    }
}
