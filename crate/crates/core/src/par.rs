//! Batch execution over index ranges.
//!
//! With the `parallel` feature (on by default) [`Execution::Parallel`] fans work out with
//! rayon; without it every batch runs sequentially. Results always come back in index
//! order, so any reduction done by the caller is independent of the thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    /// Evaluates `f(i)` for `i in 0..n`, returned in index order.
    pub fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => (0..n).into_par_iter().map(f).collect(),
            _ => (0..n).map(f).collect(),
        }
    }

    /// Like [`Execution::map`] over a slice.
    pub fn map_slice<S, T, F>(self, items: &[S], f: F) -> Vec<T>
    where
        S: Sync,
        T: Send,
        F: Fn(usize, &S) -> T + Sync + Send,
    {
        self.map(items.len(), |i| f(i, &items[i]))
    }

    /// Returns the index and value of the smallest key; ties go to the lower index.
    pub fn argmin<T, F>(self, n: usize, f: F) -> Option<(usize, T)>
    where
        T: Send + PartialOrd,
        F: Fn(usize) -> T + Sync + Send,
    {
        let values = self.map(n, f);
        let mut best: Option<(usize, T)> = None;
        for (i, v) in values.into_iter().enumerate() {
            let better = match &best {
                None => true,
                Some((_, b)) => v < *b,
            };
            if better {
                best = Some((i, v));
            }
        }
        best
    }

    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}
