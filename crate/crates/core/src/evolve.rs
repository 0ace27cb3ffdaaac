//! Real-time evolution `exp(-iHt)·v` by Lanczos (Krylov) projection.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::error::{Result, SpinError};
use crate::kernels;
use crate::operator::OperatorSum;
use crate::state::StateVector;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveConfig {
    /// Largest Krylov subspace per sub-step.
    pub krylov_dim: usize,
    /// Longest sub-step; longer times are split.
    pub dt_max: f64,
    /// Bound on the a-posteriori error estimate of a sub-step.
    pub tolerance: f64,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        Self {
            krylov_dim: 30,
            dt_max: 0.1,
            tolerance: 1e-10,
        }
    }
}

/// Returns `exp(-iHt)·v`.
pub fn evolve(op: &OperatorSum, v: &StateVector, t: f64, cfg: &EvolveConfig) -> Result<StateVector> {
    if v.n_spins() != op.n_spins() {
        return Err(SpinError::DimensionMismatch {
            expected: op.n_spins(),
            found: v.n_spins(),
        });
    }
    if !(t >= 0.0) {
        return Err(SpinError::NegativeTime(t));
    }
    let mut state = v.clone();
    if t == 0.0 {
        return Ok(state);
    }
    let n_steps = (t / cfg.dt_max).ceil().max(1.0) as usize;
    let dt = t / n_steps as f64;
    for _ in 0..n_steps {
        let next = krylov_step(op, state.amplitudes(), dt, cfg)?;
        state = StateVector::new(op.n_spins(), next)?;
    }
    Ok(state)
}

/// One Lanczos step with full reorthogonalization.
fn krylov_step(op: &OperatorSum, v: &[C64], dt: f64, cfg: &EvolveConfig) -> Result<Vec<C64>> {
    let dim = v.len();
    let beta0 = kernels::norm_sqr(v).sqrt();
    if beta0 == 0.0 {
        return Ok(vec![C64::new(0.0, 0.0); dim]);
    }
    let m_max = cfg.krylov_dim.clamp(1, dim);

    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(m_max);
    let mut q0 = v.to_vec();
    kernels::scale(C64::new(1.0 / beta0, 0.0), &mut q0);
    basis.push(q0);

    let mut alphas: Vec<f64> = Vec::with_capacity(m_max);
    let mut betas: Vec<f64> = Vec::with_capacity(m_max);
    let mut w = vec![C64::new(0.0, 0.0); dim];
    let mut last_err = f64::INFINITY;

    for j in 0..m_max {
        op.apply_into(&basis[j], &mut w);
        let alpha = kernels::dot(&basis[j], &w).re;
        kernels::axpy(C64::new(-alpha, 0.0), &basis[j], &mut w);
        if j > 0 {
            kernels::axpy(C64::new(-betas[j - 1], 0.0), &basis[j - 1], &mut w);
        }
        for q in &basis {
            let c = kernels::dot(q, &w);
            kernels::axpy(-c, q, &mut w);
        }
        alphas.push(alpha);
        let beta = kernels::norm_sqr(&w).sqrt();

        let coeffs = tridiagonal_exp_e1(&alphas, &betas, dt);
        let scale = alphas.iter().map(|a| a.abs()).fold(1.0, f64::max);
        let breakdown = beta <= 1e-13 * scale;
        last_err = if breakdown {
            0.0
        } else {
            beta * coeffs[j].norm()
        };
        if breakdown || last_err < cfg.tolerance {
            let mut out = vec![C64::new(0.0, 0.0); dim];
            for (q, c) in basis.iter().zip(&coeffs) {
                kernels::axpy(c * beta0, q, &mut out);
            }
            return Ok(out);
        }
        if j + 1 < m_max {
            betas.push(beta);
            let mut next = w.clone();
            kernels::scale(C64::new(1.0 / beta, 0.0), &mut next);
            basis.push(next);
        }
    }
    Err(SpinError::KrylovNotConverged {
        residual: last_err,
        dim: m_max,
    })
}

/// First column of `exp(-i T dt)` for the real symmetric tridiagonal `T`.
fn tridiagonal_exp_e1(alphas: &[f64], betas: &[f64], dt: f64) -> Vec<C64> {
    let m = alphas.len();
    let mut t = DMatrix::<f64>::zeros(m, m);
    for k in 0..m {
        t[(k, k)] = alphas[k];
        if k + 1 < m {
            t[(k, k + 1)] = betas[k];
            t[(k + 1, k)] = betas[k];
        }
    }
    let eig = SymmetricEigen::new(t);
    (0..m)
        .map(|k| {
            (0..m)
                .map(|l| {
                    let phase = C64::new(0.0, -eig.eigenvalues[l] * dt).exp();
                    phase * eig.eigenvectors[(k, l)] * eig.eigenvectors[(0, l)]
                })
                .sum()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{Pauli, PauliTerm};

    #[test]
    fn zero_time_is_identity() {
        let op = OperatorSum::new(2)
            .with_term(PauliTerm::single(1.0, 1, Pauli::X))
            .unwrap();
        let v = StateVector::neel(2);
        assert_eq!(evolve(&op, &v, 0.0, &EvolveConfig::default()).unwrap(), v);
    }

    #[test]
    fn negative_time_rejected() {
        let op = OperatorSum::new(1);
        let v = StateVector::all_up(1);
        assert!(evolve(&op, &v, -1.0, &EvolveConfig::default()).is_err());
    }

    #[test]
    fn single_spin_rabi() {
        // exp(-i X t)|↑⟩ = cos t |↑⟩ - i sin t |↓⟩
        let op = OperatorSum::new(1)
            .with_term(PauliTerm::single(1.0, 1, Pauli::X))
            .unwrap();
        let t = 0.7;
        let out = evolve(&op, &StateVector::all_up(1), t, &EvolveConfig::default()).unwrap();
        let a = out.amplitudes();
        assert!((a[0] - C64::new(t.cos(), 0.0)).norm() < 1e-12);
        assert!((a[1] - C64::new(0.0, -t.sin())).norm() < 1e-12);
    }

    #[test]
    fn too_small_subspace_reports_residual() {
        let mut op = OperatorSum::new(6);
        for s in 1..=6 {
            op.push(PauliTerm::single(1.0, s, Pauli::X)).unwrap();
        }
        let cfg = EvolveConfig {
            krylov_dim: 2,
            dt_max: 1.0,
            tolerance: 1e-12,
        };
        match evolve(&op, &StateVector::all_up(6), 1.0, &cfg) {
            Err(SpinError::KrylovNotConverged { residual, dim }) => {
                assert_eq!(dim, 2);
                assert!(residual > 1e-12);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }
}
