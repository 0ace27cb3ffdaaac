//! Reduced density matrices and von Neumann entropy.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::error::{Result, SpinError};
use crate::state::StateVector;

/// Logarithm base for entropies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LogBase {
    #[default]
    Natural,
    Two,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReducedDensityMatrix {
    n_sub: usize,
    entries: DMatrix<C64>,
}

impl ReducedDensityMatrix {
    pub fn n_sub(&self) -> usize {
        self.n_sub
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn trace(&self) -> C64 {
        self.entries.trace()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        SymmetricEigen::new(self.entries.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect()
    }

    /// `-Tr(ρ log ρ)` with `0·log 0 = 0`.
    pub fn von_neumann_entropy(&self, base: LogBase) -> f64 {
        let s: f64 = self
            .eigenvalues()
            .into_iter()
            .filter(|&p| p > 1e-300)
            .map(|p| -p * p.ln())
            .sum();
        match base {
            LogBase::Natural => s,
            LogBase::Two => s / std::f64::consts::LN_2,
        }
    }
}

/// Traces out every site after the first `n_sub`.
pub fn partial_trace_prefix(v: &StateVector, n_sub: usize) -> Result<ReducedDensityMatrix> {
    let n = v.n_spins();
    if n_sub == 0 || n_sub >= n {
        return Err(SpinError::SubsystemOutOfRange { n_sub, n_spins: n });
    }
    let dim_a = 1usize << n_sub;
    let dim_b = 1usize << (n - n_sub);
    let psi = v.amplitudes();
    // ψ as a dim_a × dim_b matrix, row index = prefix sites.
    let m = DMatrix::from_fn(dim_a, dim_b, |a, b| psi[a * dim_b + b]);
    let entries = &m * m.adjoint();
    Ok(ReducedDensityMatrix { n_sub, entries })
}
