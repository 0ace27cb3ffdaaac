//! Two-site block renormalization of the transverse-field Ising chain.
//!
//! Block `i` holds sites `2i-1, 2i`. Its intrablock part
//! `-J_{2i-1} σ^z_{2i-1} σ^z_{2i} - Γ_{2i-1} σ^x_{2i-1}` conserves `σ^z_{2i}`,
//! so the spectrum is two degenerate pairs `∓√(J² + Γ²)`. The lower pair
//!
//! ```text
//! |1⟩ = a₊|↑↑⟩ + a₋|↓↑⟩,   |2⟩ = a₊|↓↓⟩ + a₋|↑↓⟩,
//! a± = √(½(1 ± J/√(J² + Γ²)))
//! ```
//!
//! is kept and becomes `|↑'⟩, |↓'⟩` of the coarse spin.

use nalgebra::{DMatrix, Matrix4};

use crate::embedding::EmbeddingMap;
use crate::error::{Result, SpinError};
use crate::models::{build_ising, IsingCouplings};
use crate::operator::OperatorSum;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockEigen {
    /// 1-based block index (0 when computed standalone).
    pub block: usize,
    /// `ε^(1..4)`, ascending.
    pub energies: [f64; 4],
    pub a_plus: f64,
    /// Carries the sign of `Γ`, so both kept states stay eigenvectors for `Γ < 0`.
    pub a_minus: f64,
}

impl BlockEigen {
    /// `|1⟩` in the block basis `|↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩`.
    pub fn state_one(&self) -> [f64; 4] {
        [self.a_plus, 0.0, self.a_minus, 0.0]
    }

    /// `|2⟩` in the same basis.
    pub fn state_two(&self) -> [f64; 4] {
        [0.0, self.a_minus, 0.0, self.a_plus]
    }

    /// Discarded pair `|3⟩, |4⟩`.
    pub fn state_three(&self) -> [f64; 4] {
        [0.0, -self.a_plus, 0.0, self.a_minus]
    }

    pub fn state_four(&self) -> [f64; 4] {
        [self.a_minus, 0.0, -self.a_plus, 0.0]
    }
}

/// The 4×4 intrablock Hamiltonian in the block basis.
pub fn intrablock_matrix(j: f64, gamma: f64) -> Matrix4<f64> {
    // -J σ^z_1 σ^z_2 on the diagonal, -Γ σ^x_1 pairs |s1 s2⟩ with |s̄1 s2⟩.
    let mut m = Matrix4::from_diagonal(&nalgebra::Vector4::new(-j, j, j, -j));
    for (a, b) in [(0, 2), (1, 3)] {
        m[(a, b)] = -gamma;
        m[(b, a)] = -gamma;
    }
    m
}

pub fn block_eigensystem(j: f64, gamma: f64) -> Result<BlockEigen> {
    let r = j.hypot(gamma);
    if r == 0.0 {
        return Err(SpinError::DegenerateBlock { block: 0 });
    }
    let a_plus = (0.5 * (1.0 + j / r)).sqrt();
    let a_minus = (0.5 * (1.0 - j / r)).max(0.0).sqrt().copysign(gamma);
    Ok(BlockEigen {
        block: 0,
        energies: [-r, -r, r, r],
        a_plus,
        a_minus,
    })
}

fn block_eigen_at(c: &IsingCouplings, block: usize) -> Result<BlockEigen> {
    let site = 2 * block - 1;
    block_eigensystem(c.j_at(site), c.gamma_at(site))
        .map(|e| BlockEigen { block, ..e })
        .map_err(|_| SpinError::DegenerateBlock { block })
}

fn check_blockable(c: &IsingCouplings) -> Result<()> {
    let n = c.n_spins();
    if !n.is_multiple_of(2) || n < 4 {
        return Err(SpinError::InvalidCouplings(format!(
            "Ising block renormalization needs an even chain of at least 4 spins, got {n}"
        )));
    }
    Ok(())
}

pub fn build_embedding_ising(c: &IsingCouplings) -> Result<EmbeddingMap> {
    check_blockable(c)?;
    let blocks = (1..=c.n_spins() / 2)
        .map(|i| {
            let e = block_eigen_at(c, i)?;
            let mut v = DMatrix::<f64>::zeros(4, 2);
            for (row, (x, y)) in e.state_one().iter().zip(e.state_two()).enumerate() {
                v[(row, 0)] = *x;
                v[(row, 1)] = y;
            }
            Ok(v)
        })
        .collect::<Result<Vec<_>>>()?;
    EmbeddingMap::new(2, blocks)
}

/// Coarse chain produced by one Ising blocking step.
#[derive(Debug, Clone)]
pub struct IsingRg {
    pub couplings: IsingCouplings,
    /// `Σ_i ε_i^(1)`
    pub energy_offset: f64,
    pub embedding: EmbeddingMap,
}

impl IsingRg {
    /// Closed-form coarse Hamiltonian including the constant offset.
    pub fn hamiltonian(&self) -> OperatorSum {
        let mut h = build_ising(&self.couplings);
        h.add_identity(self.energy_offset);
        h
    }
}

pub fn renormalize_ising(c: &IsingCouplings) -> Result<IsingRg> {
    check_blockable(c)?;
    let half = c.n_spins() / 2;
    let eig: Vec<BlockEigen> = (1..=half)
        .map(|i| block_eigen_at(c, i))
        .collect::<Result<_>>()?;
    // R_i = √(J²_{2i-1} + Γ²_{2i-1}) = -ε_i^(1)
    let r = |block: usize| -eig[(block - 1) % half].energies[0];

    let j_new = (1..=half)
        .map(|i| c.j_at(2 * i) * c.j_at(2 * i + 1) / r(i + 1))
        .collect();
    let gamma_new = (1..=half)
        .map(|i| c.gamma_at(2 * i - 1) * c.gamma_at(2 * i) / r(i))
        .collect();
    let energy_offset = eig.iter().map(|e| e.energies[0]).sum();
    Ok(IsingRg {
        couplings: IsingCouplings::new(j_new, gamma_new)?,
        energy_offset,
        embedding: build_embedding_ising(c)?,
    })
}
