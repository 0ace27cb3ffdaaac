//! Dense small-chain reference computations (exact diagonalization).

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::error::Result;
use crate::operator::OperatorSum;
use crate::state::StateVector;

/// Eigen-decomposition of the dense matrix of `op`.
pub struct DenseSpectrum {
    pub energies: Vec<f64>,
    pub vectors: DMatrix<C64>,
}

pub fn diagonalize(op: &OperatorSum) -> Result<DenseSpectrum> {
    let m = op.dense_matrix()?;
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let energies = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(eig.eigenvectors.nrows(), order.len(), |r, c| {
        eig.eigenvectors[(r, order[c])]
    });
    Ok(DenseSpectrum { energies, vectors })
}

pub fn ground_energy(op: &OperatorSum) -> Result<f64> {
    Ok(diagonalize(op)?.energies[0])
}

impl DenseSpectrum {
    /// `exp(-iHt)·v` through the eigenbasis.
    pub fn evolve(&self, v: &StateVector, t: f64) -> Result<StateVector> {
        let psi = DVector::from_column_slice(v.amplitudes());
        let mut coeffs = self.vectors.adjoint() * psi;
        for (c, e) in coeffs.iter_mut().zip(&self.energies) {
            *c *= C64::new(0.0, -e * t).exp();
        }
        let out = &self.vectors * coeffs;
        StateVector::new(v.n_spins(), out.as_slice().to_vec())
    }
}

/// One-shot dense `exp(-iHt)·v`.
pub fn expm_apply(op: &OperatorSum, v: &StateVector, t: f64) -> Result<StateVector> {
    diagonalize(op)?.evolve(v, t)
}
