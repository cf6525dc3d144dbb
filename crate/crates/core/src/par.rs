//! Data-parallel helpers. With the `parallel` feature these dispatch to
//! rayon; without it they are plain sequential iterators. Output order is
//! identical either way.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// `(0..n).map(f).collect()`.
#[cfg(feature = "parallel")]
pub(crate) fn map_range<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_range<R, F>(n: usize, f: F) -> Vec<R>
where
    F: Fn(usize) -> R,
{
    (0..n).map(f).collect()
}

/// `items.iter().map(f).collect()`.
#[cfg(feature = "parallel")]
pub(crate) fn map_slice<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_slice<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}

#[cfg(feature = "parallel")]
pub(crate) fn sort_unstable<T: Ord + Send>(v: &mut [T]) {
    v.par_sort_unstable();
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn sort_unstable<T: Ord>(v: &mut [T]) {
    v.sort_unstable();
}

#[cfg(feature = "parallel")]
pub(crate) fn sort_unstable_by<T, F>(v: &mut [T], cmp: F)
where
    T: Send,
    F: Fn(&T, &T) -> std::cmp::Ordering + Sync,
{
    v.par_sort_unstable_by(cmp);
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn sort_unstable_by<T, F>(v: &mut [T], cmp: F)
where
    F: Fn(&T, &T) -> std::cmp::Ordering,
{
    v.sort_unstable_by(cmp);
}

/// True when this build evaluates inner loops on the rayon pool.
pub fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
