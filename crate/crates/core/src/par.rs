//! Thin data-parallel kernels with sequential twins.
//!
//! With the `parallel` feature (the default) these fan work out over rayon;
//! without it they run plain loops. All reductions used through this module
//! are exact and associative (big-integer and rational arithmetic), so both
//! code paths produce bit-identical results; `find_witness` uses rayon's
//! first-match search to keep even witness selection deterministic.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `0..n`, preserving index order in the output.
#[cfg(feature = "parallel")]
pub(crate) fn map_indexed<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_indexed<U, F>(n: usize, f: F) -> Vec<U>
where
    F: Fn(usize) -> U,
{
    map_indexed_seq(n, f)
}

/// Sequential twin of [`map_indexed`], available in every build for
/// benchmark comparisons.
pub(crate) fn map_indexed_seq<U, F>(n: usize, f: F) -> Vec<U>
where
    F: Fn(usize) -> U,
{
    (0..n).map(f).collect()
}

/// Fills a row-major buffer of `ncols`-wide rows, handing each row to `f`.
#[cfg(feature = "parallel")]
pub(crate) fn fill_rows<T, F>(data: &mut [T], ncols: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    data.par_chunks_mut(ncols)
        .enumerate()
        .for_each(|(i, row)| f(i, row));
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn fill_rows<T, F>(data: &mut [T], ncols: usize, f: F)
where
    F: Fn(usize, &mut [T]),
{
    fill_rows_seq(data, ncols, f);
}

/// Sequential twin of [`fill_rows`].
pub(crate) fn fill_rows_seq<T, F>(data: &mut [T], ncols: usize, f: F)
where
    F: Fn(usize, &mut [T]),
{
    for (i, row) in data.chunks_mut(ncols).enumerate() {
        f(i, row);
    }
}

/// First index (in index order) where `f` produces a witness, with the
/// witness itself; deterministic in both build modes.
#[cfg(feature = "parallel")]
pub(crate) fn find_witness<U, F>(n: usize, f: F) -> Option<U>
where
    U: Send,
    F: Fn(usize) -> Option<U> + Sync + Send,
{
    (0..n).into_par_iter().find_map_first(f)
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn find_witness<U, F>(n: usize, f: F) -> Option<U>
where
    F: Fn(usize) -> Option<U>,
{
    (0..n).find_map(f)
}
