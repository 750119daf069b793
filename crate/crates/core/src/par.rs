//! Row-parallel helpers. With the `parallel` feature the closures run on the
//! rayon global pool; without it they run in order on the calling thread.
//! Every row is computed by the same closure either way, so results are
//! bit-identical across both builds and any thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Fills a row-major buffer of `width`-wide rows, calling `fill(row, slice)`.
pub(crate) fn fill_rows<F>(buf: &mut [f64], width: usize, fill: F)
where
    F: Fn(usize, &mut [f64]) + Sync + Send,
{
    if width == 0 {
        return;
    }
    #[cfg(feature = "parallel")]
    buf.par_chunks_mut(width).enumerate().for_each(|(i, row)| fill(i, row));
    #[cfg(not(feature = "parallel"))]
    buf.chunks_mut(width).enumerate().for_each(|(i, row)| fill(i, row));
}

/// Maps `f` over `0..n`, preserving order.
pub(crate) fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
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
