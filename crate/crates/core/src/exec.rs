use std::ops::Range;

/// How the data-parallel loops (oracle grid sweeps, Monte Carlo trials) run.
///
/// Both modes produce bit-identical results. Without the `parallel` feature
/// `Parallel` silently runs sequentially.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    pub fn is_parallel_available() -> bool {
        cfg!(feature = "parallel")
    }

    /// Folds every index of `range` into an accumulator and merges the
    /// per-worker accumulators with `reduce`.
    ///
    /// `reduce` must be associative and commutative for the result to be
    /// independent of how the range is split.
    pub(crate) fn fold_range<T, I, F, R>(
        self,
        range: Range<usize>,
        identity: I,
        fold: F,
        reduce: R,
    ) -> T
    where
        T: Send,
        I: Fn() -> T + Sync + Send,
        F: Fn(T, usize) -> T + Sync + Send,
        R: Fn(T, T) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                range
                    .into_par_iter()
                    .fold(&identity, &fold)
                    .reduce(&identity, &reduce)
            }
            _ => {
                let _ = &reduce;
                range.fold(identity(), fold)
            }
        }
    }
}
