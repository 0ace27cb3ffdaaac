//! Coupling sets and Hamiltonian builders for the two chain models.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, SpinError};
use crate::operator::{OperatorSum, Pauli, PauliTerm};

/// Couplings of the periodic transverse-field Ising chain
/// `H = -Σ J_i σ^z_i σ^z_{i+1} - Σ Γ_i σ^x_i` with site `N+1 ≡ 1`.
///
/// Any chain of two or more spins can be built; block renormalization
/// additionally needs an even length of at least four.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingCouplings {
    j: Vec<f64>,
    gamma: Vec<f64>,
}

impl IsingCouplings {
    pub fn new(j: Vec<f64>, gamma: Vec<f64>) -> Result<Self> {
        if j.len() != gamma.len() {
            return Err(SpinError::InvalidCouplings(format!(
                "J has {} entries but Gamma has {}",
                j.len(),
                gamma.len()
            )));
        }
        if j.len() < 2 {
            return Err(SpinError::InvalidCouplings(format!(
                "an Ising chain needs at least 2 spins, got {}",
                j.len()
            )));
        }
        if j.iter().chain(&gamma).any(|x| !x.is_finite()) {
            return Err(SpinError::InvalidCouplings("non-finite coupling".into()));
        }
        Ok(Self { j, gamma })
    }

    pub fn homogeneous(n_spins: usize, j: f64, gamma: f64) -> Result<Self> {
        Self::new(vec![j; n_spins], vec![gamma; n_spins])
    }

    /// `J_i` then `Γ_i`, each drawn i.i.d. uniform on `[0, 1)` from a ChaCha8 stream.
    pub fn random(n_spins: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let j = (0..n_spins).map(|_| rng.gen::<f64>()).collect();
        let gamma = (0..n_spins).map(|_| rng.gen::<f64>()).collect();
        Self::new(j, gamma)
    }

    pub fn n_spins(&self) -> usize {
        self.j.len()
    }

    /// Bond couplings; entry `i` (0-based) couples sites `i+1` and `i+2`.
    pub fn j(&self) -> &[f64] {
        &self.j
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    /// Coupling of bond `i` (1-based, periodic).
    pub fn j_at(&self, i: usize) -> f64 {
        self.j[(i - 1) % self.j.len()]
    }

    pub fn gamma_at(&self, i: usize) -> f64 {
        self.gamma[(i - 1) % self.gamma.len()]
    }
}

/// Couplings of the open XXZ chain
/// `H = J Σ_{j<N} (S^x S^x + S^y S^y + Δ S^z S^z)` with `S = σ/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeisenbergCouplings {
    n_spins: usize,
    j: f64,
    delta: f64,
}

impl HeisenbergCouplings {
    pub fn new(n_spins: usize, j: f64, delta: f64) -> Result<Self> {
        if n_spins < 2 {
            return Err(SpinError::InvalidCouplings(format!(
                "a Heisenberg chain needs at least 2 spins, got {n_spins}"
            )));
        }
        if !(j > 0.0) || !j.is_finite() {
            return Err(SpinError::InvalidCouplings(format!("J must be positive, got {j}")));
        }
        if !(delta >= 0.0) || !delta.is_finite() {
            return Err(SpinError::InvalidCouplings(format!(
                "Delta must be non-negative, got {delta}"
            )));
        }
        Ok(Self { n_spins, j, delta })
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn j(&self) -> f64 {
        self.j
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

pub fn build_ising(c: &IsingCouplings) -> OperatorSum {
    let n = c.n_spins();
    let mut h = OperatorSum::new(n);
    for i in 1..=n {
        let next = i % n + 1;
        let bond = PauliTerm::new(-c.j_at(i), vec![(i, Pauli::Z), (next, Pauli::Z)])
            .expect("distinct sites");
        h.push(bond).expect("sites in range");
    }
    for i in 1..=n {
        h.push(PauliTerm::single(-c.gamma_at(i), i, Pauli::X))
            .expect("site in range");
    }
    h
}

pub fn build_heisenberg(c: &HeisenbergCouplings) -> OperatorSum {
    let n = c.n_spins();
    let mut h = OperatorSum::new(n);
    // S^a S^a = σ^a σ^a / 4
    let w = c.j() / 4.0;
    for s in 1..n {
        for (axis, coef) in [(Pauli::X, w), (Pauli::Y, w), (Pauli::Z, w * c.delta())] {
            if coef != 0.0 {
                h.push(PauliTerm::new(coef, vec![(s, axis), (s + 1, axis)]).expect("distinct"))
                    .expect("in range");
            }
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ising_rejects_mismatched_arrays() {
        assert!(IsingCouplings::new(vec![1.0; 4], vec![1.0; 3]).is_err());
        assert!(IsingCouplings::new(vec![1.0], vec![1.0]).is_err());
    }

    #[test]
    fn ising_term_count_includes_wrap_bond() {
        let h = build_ising(&IsingCouplings::homogeneous(6, 1.0, 0.5).unwrap());
        assert_eq!(h.terms().len(), 12);
        let wrap = &h.terms()[5];
        assert_eq!(wrap.factors(), &[(1, Pauli::Z), (6, Pauli::Z)]);
        assert_eq!(wrap.coefficient(), -1.0);
    }

    #[test]
    fn heisenberg_validation() {
        assert!(HeisenbergCouplings::new(6, 0.0, 1.0).is_err());
        assert!(HeisenbergCouplings::new(6, 1.0, -0.1).is_err());
        assert!(HeisenbergCouplings::new(6, 1.0, 0.0).is_ok());
    }

    #[test]
    fn random_couplings_are_seeded() {
        let a = IsingCouplings::random(8, 7).unwrap();
        let b = IsingCouplings::random(8, 7).unwrap();
        let c = IsingCouplings::random(8, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.j().iter().chain(a.gamma()).all(|&x| (0.0..1.0).contains(&x)));
    }
}
