//! Three-site block renormalization of the open XXZ chain.
//!
//! Each block of three sites keeps its `S = 1/2` ground doublet. The
//! closed-form edge-spin factors `ξ^x = ξ^y`, `ξ^z` and the block energy
//! `E_B` give the coarse chain `(N/3)·E_B + H_{N/3}(J', Δ')` with
//! `J' = (ξ^x)² J` and `Δ' = (ξ^z/ξ^x)² Δ`. The doublet itself is found
//! numerically, so the closed forms can be cross-checked against it.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::embedding::EmbeddingMap;
use crate::error::{Result, SpinError};
use crate::models::{build_heisenberg, HeisenbergCouplings};
use crate::operator::{OperatorSum, Pauli};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeisenbergRgFactors {
    pub x: f64,
    /// Edge factor for `S^x` (and `S^y`).
    pub xi_x: f64,
    pub xi_z: f64,
    /// Ground-doublet energy of one block.
    pub e_b: f64,
    pub j_prime: f64,
    pub delta_prime: f64,
}

pub fn rg_factors(j: f64, delta: f64) -> Result<HeisenbergRgFactors> {
    if !(j > 0.0) || !(delta >= 0.0) {
        return Err(SpinError::InvalidCouplings(format!(
            "need J > 0 and Delta >= 0, got J = {j}, Delta = {delta}"
        )));
    }
    let root = (delta * delta + 8.0).sqrt();
    let x = 2.0 * (delta - 1.0) / (8.0 + delta + 3.0 * root);
    let den = 3.0 * (1.0 + 2.0 * x * x);
    let xi_x = 2.0 * (1.0 + x) * (1.0 - 2.0 * x) / den;
    let xi_z = 2.0 * (1.0 + x) * (1.0 + x) / den;
    if xi_x == 0.0 {
        return Err(SpinError::InvalidCouplings("xi^x vanishes".into()));
    }
    let e_b = -j / 4.0 * (delta + root);
    Ok(HeisenbergRgFactors {
        x,
        xi_x,
        xi_z,
        e_b,
        j_prime: xi_x * xi_x * j,
        delta_prime: (xi_z / xi_x).powi(2) * delta,
    })
}

/// The 8×8 Hamiltonian of one open three-site block.
pub fn block_hamiltonian(j: f64, delta: f64) -> Result<DMatrix<f64>> {
    let h = build_heisenberg(&HeisenbergCouplings::new(3, j, delta)?);
    Ok(h.dense_matrix()?.map(|z| z.re))
}

/// Block total `S^z` (diagonal).
fn block_sz() -> DMatrix<f64> {
    DMatrix::from_fn(8, 8, |r, c| {
        if r == c {
            1.5 - r.count_ones() as f64
        } else {
            0.0
        }
    })
}

/// Block total `S^+`.
fn block_s_plus() -> DMatrix<f64> {
    let mut m = DMatrix::zeros(8, 8);
    for col in 0..8usize {
        for bit in 0..3 {
            let mask = 1 << bit;
            // raising flips a down (1) into an up (0)
            if col & mask != 0 {
                m[(col ^ mask, col)] = 1.0;
            }
        }
    }
    m
}

/// Ground doublet of one block as an 8×2 isometry, `S^z = +1/2` column first.
///
/// The `+1/2` column has its largest-magnitude amplitude positive; the
/// `-1/2` column is fixed by `⟨+|S^+_tot|−⟩ > 0`.
pub fn block_doublet(j: f64, delta: f64) -> Result<(DMatrix<f64>, [f64; 3])> {
    let h = block_hamiltonian(j, delta)?;
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..8).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let e: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let tol = 1e-9 * j.max(1.0);
    if (e[1] - e[0]).abs() > tol || (e[2] - e[1]).abs() <= tol {
        return Err(SpinError::UnexpectedSpectrum(format!(
            "block ground level is not a doublet: lowest energies {:?}",
            &e[..3]
        )));
    }
    let u = DMatrix::from_fn(8, 2, |r, c| eig.eigenvectors[(r, order[c])]);

    // Diagonalize block S^z inside the doublet.
    let sz_sub = u.transpose() * block_sz() * &u;
    let sz_eig = SymmetricEigen::new(sz_sub);
    let (hi, lo) = if sz_eig.eigenvalues[0] >= sz_eig.eigenvalues[1] {
        (0, 1)
    } else {
        (1, 0)
    };
    let mut plus = &u * sz_eig.eigenvectors.column(hi);
    let mut minus = &u * sz_eig.eigenvectors.column(lo);

    let lead = plus.iamax();
    if plus[lead] < 0.0 {
        plus = -plus;
    }
    let raise = (plus.transpose() * block_s_plus() * &minus)[(0, 0)];
    if raise < 0.0 {
        minus = -minus;
    }
    let mut v = DMatrix::zeros(8, 2);
    v.set_column(0, &plus);
    v.set_column(1, &minus);
    Ok((v, [e[0], e[1], e[2]]))
}

#[derive(Debug, Clone)]
pub struct HeisenbergRg {
    pub couplings: HeisenbergCouplings,
    /// `(N/3)·E_B`
    pub energy_offset: f64,
    pub factors: HeisenbergRgFactors,
    pub embedding: EmbeddingMap,
}

impl HeisenbergRg {
    pub fn hamiltonian(&self) -> OperatorSum {
        let mut h = build_heisenberg(&self.couplings);
        h.add_identity(self.energy_offset);
        h
    }
}

pub fn build_embedding_heisenberg(c: &HeisenbergCouplings) -> Result<EmbeddingMap> {
    check_blockable(c)?;
    let (v, _) = block_doublet(c.j(), c.delta())?;
    EmbeddingMap::new(3, vec![v; c.n_spins() / 3])
}

fn check_blockable(c: &HeisenbergCouplings) -> Result<()> {
    let n = c.n_spins();
    if !n.is_multiple_of(3) || n < 6 {
        return Err(SpinError::InvalidCouplings(format!(
            "Heisenberg block renormalization needs N divisible by 3 and at least 6, got {n}"
        )));
    }
    Ok(())
}

pub fn renormalize_heisenberg(c: &HeisenbergCouplings) -> Result<HeisenbergRg> {
    check_blockable(c)?;
    let factors = rg_factors(c.j(), c.delta())?;
    let n_blocks = c.n_spins() / 3;
    Ok(HeisenbergRg {
        couplings: HeisenbergCouplings::new(n_blocks, factors.j_prime, factors.delta_prime)?,
        energy_offset: n_blocks as f64 * factors.e_b,
        factors,
        embedding: build_embedding_heisenberg(c)?,
    })
}

/// Measured edge-spin factors of one block against the closed forms.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryReport {
    pub block: usize,
    /// `[first edge, last edge]` for each axis.
    pub xi_x: [f64; 2],
    pub xi_y: [f64; 2],
    pub xi_z: [f64; 2],
    /// Largest entrywise `|V†σV − ξ·σ̃|` over both edges and all axes.
    pub max_deviation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryFactorsReport {
    pub closed_form: HeisenbergRgFactors,
    pub blocks: Vec<BoundaryReport>,
}

impl BoundaryFactorsReport {
    pub fn max_deviation(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| b.max_deviation)
            .fold(0.0, f64::max)
    }
}

pub fn verify_boundary_factors(
    embedding: &EmbeddingMap,
    c: &HeisenbergCouplings,
) -> Result<BoundaryFactorsReport> {
    let closed = rg_factors(c.j(), c.delta())?;
    let mut blocks = Vec::with_capacity(embedding.n_blocks());
    for blk in 0..embedding.n_blocks() {
        let mut measured = [[0.0; 2]; 3];
        let mut dev: f64 = 0.0;
        for (a, (axis, xi)) in [
            (Pauli::X, closed.xi_x),
            (Pauli::Y, closed.xi_x),
            (Pauli::Z, closed.xi_z),
        ]
        .into_iter()
        .enumerate()
        {
            for (e, site) in [1usize, 3].into_iter().enumerate() {
                let f = embedding.project_block(blk, &[(site, axis)]);
                let sigma = axis.matrix();
                // component along σ̃^axis
                measured[a][e] = (sigma * f).trace().re / 2.0;
                let diff = f - sigma * nalgebra::Complex::new(xi, 0.0);
                dev = dev.max(diff.iter().map(|z| z.norm()).fold(0.0, f64::max));
            }
        }
        blocks.push(BoundaryReport {
            block: blk + 1,
            xi_x: measured[0],
            xi_y: measured[1],
            xi_z: measured[2],
            max_deviation: dev,
        });
    }
    Ok(BoundaryFactorsReport {
        closed_form: closed,
        blocks,
    })
}
