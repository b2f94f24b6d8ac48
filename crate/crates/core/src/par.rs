//! Execution lanes for the data-parallel kernels.
//!
//! With the `parallel` feature (default) `map_collect` fans out over rayon;
//! without it the same call compiles to a plain iterator. `map_collect_seq`
//! is always the sequential lane so benchmarks can compare both in one
//! build. Both lanes preserve input order, so results are identical.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub fn map_collect_seq<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn map_collect<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_collect<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    map_collect_seq(items, f)
}

/// Order-preserving indexed map, parallel when the feature is on.
pub fn map_indexed<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

pub fn map_indexed_seq<U, F>(n: usize, f: F) -> Vec<U>
where
    F: Fn(usize) -> U,
{
    (0..n).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lanes_agree_and_preserve_order() {
        let xs: Vec<i64> = (0..1000).collect();
        let par = map_collect(&xs, |x| x * x);
        let seq = map_collect_seq(&xs, |x| x * x);
        assert_eq!(par, seq);
        assert_eq!(map_indexed(100, |i| i * 3), map_indexed_seq(100, |i| i * 3));
    }
}
