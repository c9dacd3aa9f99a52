//! Order-preserving map over independent work items, on a rayon pool when
//! the `parallel` feature is enabled.

use crate::error::Result;
#[cfg(feature = "parallel")]
use crate::error::Error;

/// How independent work items are distributed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parallelism {
    Sequential,
    /// A dedicated pool with this many threads (sequential without the
    /// `parallel` feature).
    Threads(usize),
}

impl Parallelism {
    /// Available cores, capped by `ESCAPE_SPEC_THREADS` when it is set.
    pub fn from_env() -> Self {
        let avail = std::thread::available_parallelism().map_or(1, |n| n.get());
        Parallelism::Threads(thread_cap(
            std::env::var("ESCAPE_SPEC_THREADS").ok().as_deref(),
            avail,
        ))
    }

    /// `Threads(n)` capped like [`from_env`](Self::from_env).
    pub fn threads_capped(n: usize) -> Self {
        let cap = std::env::var("ESCAPE_SPEC_THREADS").ok();
        Parallelism::Threads(thread_cap(cap.as_deref(), n.max(1)))
    }
}

/// `min(cap, avail)` for a positive integer `cap`, else `avail`.
pub fn thread_cap(var: Option<&str>, avail: usize) -> usize {
    var.and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .map_or(avail, |n| n.min(avail))
        .max(1)
}

/// `items.map(f)` with results in input order whatever the thread count.
#[cfg(feature = "parallel")]
pub fn map_ordered<T, R, F>(items: &[T], par: Parallelism, f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    match par {
        Parallelism::Sequential => Ok(items.iter().map(f).collect()),
        Parallelism::Threads(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::param(format!("thread pool: {e}")))?;
            Ok(pool.install(|| items.par_iter().map(f).collect()))
        }
    }
}

#[cfg(not(feature = "parallel"))]
pub fn map_ordered<T, R, F>(items: &[T], _par: Parallelism, f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    Ok(items.iter().map(f).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let items: Vec<u64> = (0..1000).collect();
        let seq = map_ordered(&items, Parallelism::Sequential, |x| x * x).unwrap();
        let par = map_ordered(&items, Parallelism::Threads(4), |x| x * x).unwrap();
        assert_eq!(seq, par);
    }

    #[test]
    fn thread_cap_from_env_text() {
        assert_eq!(thread_cap(Some("2"), 8), 2);
        assert_eq!(thread_cap(Some("64"), 8), 8);
        assert_eq!(thread_cap(Some("0"), 8), 8);
        assert_eq!(thread_cap(Some("x"), 4), 4);
        assert_eq!(thread_cap(None, 4), 4);
    }
}
