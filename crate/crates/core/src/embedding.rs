//! Block-product isometries `T = ⊗ T_i` mapping a coarse chain into the
//! original one, with the state and observable maps built on them.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64 as C64;

use crate::error::{Result, SpinError};
use crate::operator::{OperatorSum, Pauli, PauliTerm};
use crate::state::StateVector;

/// `T = ⊗_i V_i`, one `2^b × 2` real isometry per block of `b` sites.
///
/// Block `i` (0-based) covers original sites `b·i + 1 ..= b·(i+1)` and maps
/// to coarse site `i + 1`. Column 0 of `V_i` is the image of `|↑'⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMap {
    block_size: usize,
    blocks: Vec<DMatrix<f64>>,
}

/// Result of `T†·v`.
#[derive(Debug, Clone)]
pub struct Truncation {
    pub state: StateVector,
    /// `‖T†v‖` before any rescaling.
    pub kept_norm: f64,
}

impl EmbeddingMap {
    pub fn new(block_size: usize, blocks: Vec<DMatrix<f64>>) -> Result<Self> {
        let rows = 1usize << block_size;
        if blocks.is_empty() {
            return Err(SpinError::InvalidCouplings("embedding has no blocks".into()));
        }
        if let Some(k) = blocks
            .iter()
            .position(|m| m.nrows() != rows || m.ncols() != 2)
        {
            return Err(SpinError::InvalidCouplings(format!(
                "block {k} is not a {rows}x2 matrix"
            )));
        }
        Ok(Self { block_size, blocks })
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn n_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[DMatrix<f64>] {
        &self.blocks
    }

    /// Spins of the coarse chain.
    pub fn source_spins(&self) -> usize {
        self.blocks.len()
    }

    /// Spins of the original chain.
    pub fn target_spins(&self) -> usize {
        self.blocks.len() * self.block_size
    }

    /// Largest entrywise deviation of `V_i^T V_i` from the identity.
    pub fn isometry_defect(&self) -> f64 {
        self.blocks
            .iter()
            .map(|v| {
                let g = v.transpose() * v - DMatrix::<f64>::identity(2, 2);
                g.amax()
            })
            .fold(0.0, f64::max)
    }

    /// Block projector `P_i = V_i V_i^T`.
    pub fn block_projector(&self, block: usize) -> DMatrix<f64> {
        let v = &self.blocks[block];
        v * v.transpose()
    }

    /// `|ψ⟩ = T|ψ'⟩`
    pub fn apply_t(&self, v_prime: &StateVector) -> Result<StateVector> {
        if v_prime.n_spins() != self.source_spins() {
            return Err(SpinError::DimensionMismatch {
                expected: self.source_spins(),
                found: v_prime.n_spins(),
            });
        }
        let mats: Vec<DMatrix<f64>> = self.blocks.clone();
        let data = blockwise(v_prime.amplitudes(), &mats, 2, 1 << self.block_size);
        StateVector::new(self.target_spins(), data)
    }

    /// `|ψ'⟩ = T†|ψ⟩`, optionally rescaled to unit norm.
    pub fn apply_t_dagger(&self, v: &StateVector, renormalize: bool) -> Result<Truncation> {
        if v.n_spins() != self.target_spins() {
            return Err(SpinError::DimensionMismatch {
                expected: self.target_spins(),
                found: v.n_spins(),
            });
        }
        let mats: Vec<DMatrix<f64>> = self.blocks.iter().map(|m| m.transpose()).collect();
        let data = blockwise(v.amplitudes(), &mats, 1 << self.block_size, 2);
        let mut state = StateVector::new(self.source_spins(), data)?;
        let kept_norm = state.norm();
        if kept_norm <= 1e-14 * v.norm().max(f64::MIN_POSITIVE) {
            return Err(SpinError::ZeroTruncatedState);
        }
        if renormalize {
            state.normalize();
        }
        Ok(Truncation { state, kept_norm })
    }

    /// Dense `V_i^† A V_i` for a product of Paulis inside block `i`.
    pub fn project_block(&self, block: usize, local: &[(usize, Pauli)]) -> Matrix2<C64> {
        let a = block_operator(local, self.block_size);
        let v = self.blocks[block].map(|x| C64::new(x, 0.0));
        let f = v.adjoint() * a * v;
        Matrix2::new(f[(0, 0)], f[(0, 1)], f[(1, 0)], f[(1, 1)])
    }

    /// `A' = T†AT` for an operator built from one- and two-block Pauli terms.
    pub fn project_observable(&self, op: &OperatorSum) -> Result<OperatorSum> {
        if op.n_spins() != self.target_spins() {
            return Err(SpinError::DimensionMismatch {
                expected: self.target_spins(),
                found: op.n_spins(),
            });
        }
        let mut out = OperatorSum::new(self.source_spins());
        out.add_identity(op.identity_offset());
        for term in op.terms() {
            let groups = self.group_by_block(term.factors());
            if groups.len() > 2 {
                return Err(SpinError::TermSpansTooManyBlocks {
                    blocks: groups.len(),
                });
            }
            // Pauli expansion of each projected 2×2 factor.
            let expansions: Vec<(usize, [f64; 4])> = groups
                .iter()
                .map(|(blk, local)| (*blk, pauli_components(&self.project_block(*blk, local))))
                .collect();
            expand_product(term.coefficient(), &expansions, &mut out)?;
        }
        Ok(out)
    }

    /// Factors of a Pauli string grouped by block, with sites made block-local (1-based).
    pub fn group_by_block(&self, factors: &[(usize, Pauli)]) -> Vec<(usize, Vec<(usize, Pauli)>)> {
        let b = self.block_size;
        let mut groups: Vec<(usize, Vec<(usize, Pauli)>)> = Vec::new();
        for &(site, axis) in factors {
            let blk = (site - 1) / b;
            let local = (site - 1) % b + 1;
            match groups.last_mut() {
                Some((last, v)) if *last == blk => v.push((local, axis)),
                _ => groups.push((blk, vec![(local, axis)])),
            }
        }
        groups
    }
}

const AXES: [Option<Pauli>; 4] = [None, Some(Pauli::X), Some(Pauli::Y), Some(Pauli::Z)];

/// Real coefficients `f_p = Tr(σ_p F)/2` of a Hermitian 2×2 matrix.
fn pauli_components(f: &Matrix2<C64>) -> [f64; 4] {
    let mut out = [0.0; 4];
    for (k, axis) in AXES.iter().enumerate() {
        let s = match axis {
            None => Matrix2::identity(),
            Some(p) => p.matrix(),
        };
        out[k] = (s * f).trace().re / 2.0;
    }
    out
}

fn expand_product(coef: f64, expansions: &[(usize, [f64; 4])], out: &mut OperatorSum) -> Result<()> {
    let cutoff = 1e-15 * coef.abs();
    let mut partial: Vec<(f64, Vec<(usize, Pauli)>)> = vec![(coef, Vec::new())];
    for (blk, comps) in expansions {
        let mut next = Vec::with_capacity(partial.len() * 4);
        for (c, factors) in &partial {
            for (k, axis) in AXES.iter().enumerate() {
                let w = c * comps[k];
                if w.abs() <= cutoff {
                    continue;
                }
                let mut f = factors.clone();
                if let Some(p) = axis {
                    f.push((blk + 1, *p));
                }
                next.push((w, f));
            }
        }
        partial = next;
    }
    for (c, f) in partial {
        out.push(PauliTerm::new(c, f)?)?;
    }
    Ok(())
}

/// Dense `2^b × 2^b` matrix of a Pauli product on block-local sites.
pub fn block_operator(local: &[(usize, Pauli)], block_size: usize) -> DMatrix<C64> {
    let mut m = DMatrix::<C64>::identity(1, 1);
    for site in 1..=block_size {
        let f = match local.iter().find(|(s, _)| *s == site) {
            Some((_, p)) => p.matrix(),
            None => Matrix2::identity(),
        };
        m = m.kronecker(&f);
    }
    m
}

/// Applies `mats[k]` (`out × inp`) to the `k`-th block digit of a
/// mixed-radix index, site 1 most significant.
fn blockwise(data: &[C64], mats: &[DMatrix<f64>], inp: usize, out: usize) -> Vec<C64> {
    let nb = mats.len();
    let mut cur = data.to_vec();
    for (k, m) in mats.iter().enumerate() {
        let outer = out.pow(k as u32);
        let inner = inp.pow((nb - k - 1) as u32);
        let mut next = vec![C64::new(0.0, 0.0); outer * out * inner];
        for o in 0..outer {
            for r in 0..out {
                let dst = &mut next[(o * out + r) * inner..(o * out + r + 1) * inner];
                for s in 0..inp {
                    let w = m[(r, s)];
                    if w == 0.0 {
                        continue;
                    }
                    let src = &cur[(o * inp + s) * inner..(o * inp + s + 1) * inner];
                    for (d, x) in dst.iter_mut().zip(src) {
                        *d += x * w;
                    }
                }
            }
        }
        cur = next;
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;

    fn copy_code() -> EmbeddingMap {
        // |↑'⟩ → |↑↑⟩, |↓'⟩ → |↓↓⟩
        let mut v = DMatrix::zeros(4, 2);
        v[(0, 0)] = 1.0;
        v[(3, 1)] = 1.0;
        EmbeddingMap::new(2, vec![v.clone(), v]).unwrap()
    }

    #[test]
    fn pair_collapse_maps_up_to_up() {
        let t = copy_code();
        let out = t.apply_t(&StateVector::all_up(2)).unwrap();
        assert_eq!(out, StateVector::all_up(4));
        let back = t.apply_t_dagger(&StateVector::from_bitstring("0011").unwrap(), true).unwrap();
        assert_eq!(back.state, StateVector::from_bitstring("01").unwrap());
        assert_eq!(back.kept_norm, 1.0);
    }

    #[test]
    fn truncated_away_state_is_an_error() {
        let t = copy_code();
        let v = StateVector::from_bitstring("0100").unwrap();
        assert!(matches!(
            t.apply_t_dagger(&v, true),
            Err(SpinError::ZeroTruncatedState)
        ));
    }

    #[test]
    fn wrong_shape_rejected() {
        assert!(EmbeddingMap::new(2, vec![DMatrix::zeros(8, 2)]).is_err());
    }

    #[test]
    fn block_operator_ordering() {
        // Z on local site 1 of a 2-site block: diag(1, 1, -1, -1)
        let m = block_operator(&[(1, Pauli::Z)], 2);
        let d: Vec<f64> = (0..4).map(|k| m[(k, k)].re).collect();
        assert_eq!(d, vec![1.0, 1.0, -1.0, -1.0]);
    }

    #[test]
    fn three_block_term_rejected() {
        let t = copy_code();
        let mut v = DMatrix::zeros(4, 2);
        v[(0, 0)] = 1.0;
        v[(3, 1)] = 1.0;
        let t3 = EmbeddingMap::new(2, vec![v.clone(), v.clone(), v]).unwrap();
        let op = OperatorSum::new(6)
            .with_term(PauliTerm::new(1.0, vec![(1, Pauli::Z), (3, Pauli::Z), (5, Pauli::Z)]).unwrap())
            .unwrap();
        assert!(matches!(
            t3.project_observable(&op),
            Err(SpinError::TermSpansTooManyBlocks { blocks: 3 })
        ));
        assert_eq!(t.n_blocks(), 2);
    }
}
