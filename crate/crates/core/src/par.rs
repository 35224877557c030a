//! Execution helpers: rayon when the `parallel` feature is on, plain loops
//! otherwise.
//!
//! Every helper is deterministic by construction: each output element is
//! written by exactly one task from inputs fixed before the call, and no
//! floating-point reduction order depends on scheduling. Results are
//! bit-identical across thread counts and against the sequential build.

/// Minimum number of f64 elements touched before forking pays for itself.
#[cfg(feature = "parallel")]
const PAR_MIN_WORK: usize = 16 * 1024;

/// Apply `f` to each row of a flat row-major buffer.
pub(crate) fn for_each_row<F>(data: &mut [f64], row_len: usize, f: F)
where
    F: Fn(usize, &mut [f64]) + Sync + Send,
{
    debug_assert!(row_len > 0 && data.len() % row_len == 0);
    #[cfg(feature = "parallel")]
    {
        if data.len() >= PAR_MIN_WORK {
            use rayon::prelude::*;
            data.par_chunks_mut(row_len)
                .enumerate()
                .for_each(|(i, row)| f(i, row));
            return;
        }
    }
    data.chunks_mut(row_len)
        .enumerate()
        .for_each(|(i, row)| f(i, row));
}

/// Fill `out[i] = f(i)` where each element costs roughly `work_per_elem` flops.
pub(crate) fn fill_indexed<F>(out: &mut [f64], work_per_elem: usize, f: F)
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if out.len().saturating_mul(work_per_elem.max(1)) >= PAR_MIN_WORK {
            use rayon::prelude::*;
            out.par_iter_mut().enumerate().for_each(|(i, v)| *v = f(i));
            return;
        }
    }
    #[cfg(not(feature = "parallel"))]
    let _ = work_per_elem;
    out.iter_mut().enumerate().for_each(|(i, v)| *v = f(i));
}
