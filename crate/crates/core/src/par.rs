//! Data-parallel kernels over amplitude arrays and instance sweeps.
//!
//! Every kernel has a sequential body and, with the `parallel` feature, a
//! rayon body. Both produce bit-identical results: each output element is
//! written by exactly one closure invocation and no reduction order changes.

use num_complex::Complex64;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Arrays shorter than this are always processed sequentially.
pub const PAR_THRESHOLD: usize = 1 << 14;

/// How a kernel is executed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Falls back to sequential when the `parallel` feature is disabled.
    Parallel,
}

impl Execution {
    /// Parallel for large arrays, sequential otherwise.
    pub fn auto(len: usize) -> Self {
        if cfg!(feature = "parallel") && len >= PAR_THRESHOLD {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

/// Visit every amplitude pair `(i, i + stride)` where bit `stride` of `i`
/// is clear. The closure receives the lower index.
pub fn for_each_pair<F>(amps: &mut [Complex64], stride: usize, exec: Execution, f: F)
where
    F: Fn(usize, &mut Complex64, &mut Complex64) + Sync + Send,
{
    debug_assert!(stride.is_power_of_two());
    let block = 2 * stride;
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            let blocks = amps.len() / block;
            if blocks >= rayon::current_num_threads() * 4 {
                amps.par_chunks_mut(block)
                    .enumerate()
                    .for_each(|(b, chunk)| pair_block(chunk, b * block, stride, &f));
            } else {
                for (b, chunk) in amps.chunks_mut(block).enumerate() {
                    let (lo, hi) = chunk.split_at_mut(stride);
                    let base = b * block;
                    lo.par_iter_mut()
                        .zip(hi.par_iter_mut())
                        .enumerate()
                        .for_each(|(i, (a0, a1))| f(base + i, a0, a1));
                }
            }
        }
        _ => {
            for (b, chunk) in amps.chunks_mut(block).enumerate() {
                pair_block(chunk, b * block, stride, &f);
            }
        }
    }
}

fn pair_block<F>(chunk: &mut [Complex64], base: usize, stride: usize, f: &F)
where
    F: Fn(usize, &mut Complex64, &mut Complex64),
{
    let (lo, hi) = chunk.split_at_mut(stride);
    for (i, (a0, a1)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
        f(base + i, a0, a1);
    }
}

/// Visit every amplitude with its index.
pub fn for_each_amp<F>(amps: &mut [Complex64], exec: Execution, f: F)
where
    F: Fn(usize, &mut Complex64) + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => amps.par_iter_mut().enumerate().for_each(|(i, a)| f(i, a)),
        _ => amps.iter_mut().enumerate().for_each(|(i, a)| f(i, a)),
    }
}

/// Map `f` over `0..count`, preserving index order in the output.
pub fn map_indexed<R, F>(count: usize, exec: Execution, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => (0..count).into_par_iter().map(f).collect(),
        _ => (0..count).map(f).collect(),
    }
}

/// Map over a slice of instances; parallel when the feature is on.
pub fn sweep<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}
