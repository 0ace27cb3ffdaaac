//! Vector kernels with a fixed reduction order.
//!
//! Reductions are split into fixed-size chunks whose partial sums are
//! combined sequentially, so results do not depend on the thread count.

use num_complex::Complex64 as C64;
use rayon::prelude::*;

const CHUNK: usize = 1 << 12;
const PAR_THRESHOLD: usize = 1 << 14;

pub(crate) fn dot(a: &[C64], b: &[C64]) -> C64 {
    debug_assert_eq!(a.len(), b.len());
    if a.len() < PAR_THRESHOLD {
        return a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    }
    let partials: Vec<C64> = a
        .par_chunks(CHUNK)
        .zip(b.par_chunks(CHUNK))
        .map(|(ca, cb)| ca.iter().zip(cb).map(|(x, y)| x.conj() * y).sum())
        .collect();
    partials.into_iter().sum()
}

pub(crate) fn norm_sqr(a: &[C64]) -> f64 {
    if a.len() < PAR_THRESHOLD {
        return a.iter().map(|x| x.norm_sqr()).sum();
    }
    let partials: Vec<f64> = a
        .par_chunks(CHUNK)
        .map(|c| c.iter().map(|x| x.norm_sqr()).sum())
        .collect();
    partials.into_iter().sum()
}

/// y += alpha * x
pub(crate) fn axpy(alpha: C64, x: &[C64], y: &mut [C64]) {
    if y.len() < PAR_THRESHOLD {
        y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += alpha * xi);
    } else {
        y.par_iter_mut()
            .zip(x.par_iter())
            .for_each(|(yi, xi)| *yi += alpha * xi);
    }
}

pub(crate) fn scale(alpha: C64, x: &mut [C64]) {
    if x.len() < PAR_THRESHOLD {
        x.iter_mut().for_each(|v| *v *= alpha);
    } else {
        x.par_iter_mut().for_each(|v| *v *= alpha);
    }
}

pub(crate) fn is_parallel(len: usize) -> bool {
    len >= PAR_THRESHOLD
}
