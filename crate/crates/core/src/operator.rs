//! Operators as real-weighted sums of Pauli strings, applied matrix-free.

use std::fmt;

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Result, SpinError};
use crate::kernels;
use crate::state::{site_mask, StateVector};

/// Largest chain for which [`OperatorSum::dense_matrix`] will allocate.
pub const DEFAULT_DENSE_CAP: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix(self) -> Matrix2<C64> {
        let o = C64::new(0.0, 0.0);
        let l = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        match self {
            Pauli::X => Matrix2::new(o, l, l, o),
            Pauli::Y => Matrix2::new(o, -i, i, o),
            Pauli::Z => Matrix2::new(l, o, o, -l),
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Pauli::X => "X",
            Pauli::Y => "Y",
            Pauli::Z => "Z",
        };
        f.write_str(s)
    }
}

/// `coefficient · ⊗ σ^{axis}_{site}`; an empty factor list is a scaled identity.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    coefficient: f64,
    factors: Vec<(usize, Pauli)>,
}

impl PauliTerm {
    /// Sorts factors by site. Repeated sites are rejected.
    pub fn new(coefficient: f64, mut factors: Vec<(usize, Pauli)>) -> Result<Self> {
        factors.sort_by_key(|&(s, _)| s);
        if let Some(w) = factors.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(SpinError::InvalidCouplings(format!(
                "Pauli term repeats site {}",
                w[0].0
            )));
        }
        if factors.iter().any(|&(s, _)| s == 0) {
            return Err(SpinError::SiteOutOfRange {
                site: 0,
                n_spins: 0,
            });
        }
        Ok(Self {
            coefficient,
            factors,
        })
    }

    pub fn identity(coefficient: f64) -> Self {
        Self {
            coefficient,
            factors: Vec::new(),
        }
    }

    pub fn single(coefficient: f64, site: usize, axis: Pauli) -> Self {
        Self::new(coefficient, vec![(site, axis)]).expect("single factor is valid")
    }

    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    pub fn factors(&self) -> &[(usize, Pauli)] {
        &self.factors
    }

    pub fn is_identity(&self) -> bool {
        self.factors.is_empty()
    }

    fn max_site(&self) -> usize {
        self.factors.last().map_or(0, |&(s, _)| s)
    }

    fn compile(&self, n_spins: usize) -> CompiledTerm {
        let mut flip = 0usize;
        let mut phase = 0usize;
        let mut n_y = 0u32;
        for &(site, axis) in &self.factors {
            let m = site_mask(site, n_spins);
            match axis {
                Pauli::X => flip |= m,
                Pauli::Z => phase |= m,
                Pauli::Y => {
                    flip |= m;
                    phase |= m;
                    n_y += 1;
                }
            }
        }
        // Y = i·X·Z
        let i_pow = match n_y % 4 {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        };
        CompiledTerm {
            flip,
            phase,
            weight: i_pow * self.coefficient,
        }
    }
}

impl fmt::Display for PauliTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+}", self.coefficient)?;
        if self.factors.is_empty() {
            return f.write_str("·I");
        }
        for (s, p) in &self.factors {
            write!(f, "·{p}{s}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
struct CompiledTerm {
    flip: usize,
    phase: usize,
    weight: C64,
}

impl CompiledTerm {
    /// Contribution to `(P v)[a]`, gathered from `v[a ^ flip]`.
    #[inline]
    fn gather(&self, a: usize, v: &[C64]) -> C64 {
        let src = a ^ self.flip;
        let amp = v[src] * self.weight;
        if (src & self.phase).count_ones() & 1 == 1 {
            -amp
        } else {
            amp
        }
    }
}

/// A Hermitian operator `Σ_k c_k P_k + offset·I` on an `n_spins` chain.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSum {
    n_spins: usize,
    terms: Vec<PauliTerm>,
    identity_offset: f64,
}

impl OperatorSum {
    pub fn new(n_spins: usize) -> Self {
        Self {
            n_spins,
            terms: Vec::new(),
            identity_offset: 0.0,
        }
    }

    /// Appends a term. Identity terms are folded into the offset.
    pub fn push(&mut self, term: PauliTerm) -> Result<()> {
        if term.max_site() > self.n_spins {
            return Err(SpinError::SiteOutOfRange {
                site: term.max_site(),
                n_spins: self.n_spins,
            });
        }
        if term.is_identity() {
            self.identity_offset += term.coefficient;
        } else {
            self.terms.push(term);
        }
        Ok(())
    }

    pub fn with_term(mut self, term: PauliTerm) -> Result<Self> {
        self.push(term)?;
        Ok(self)
    }

    pub fn add_identity(&mut self, value: f64) {
        self.identity_offset += value;
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn identity_offset(&self) -> f64 {
        self.identity_offset
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            n_spins: self.n_spins,
            terms: self
                .terms
                .iter()
                .map(|t| PauliTerm {
                    coefficient: t.coefficient * factor,
                    factors: t.factors.clone(),
                })
                .collect(),
            identity_offset: self.identity_offset * factor,
        }
    }

    pub fn plus(&self, other: &OperatorSum) -> Result<Self> {
        if self.n_spins != other.n_spins {
            return Err(SpinError::DimensionMismatch {
                expected: self.n_spins,
                found: other.n_spins,
            });
        }
        let mut out = self.clone();
        out.terms.extend(other.terms.iter().cloned());
        out.identity_offset += other.identity_offset;
        Ok(out)
    }

    /// Every term including the identity offset, as a single list.
    pub fn all_terms(&self) -> Vec<PauliTerm> {
        let mut v = self.terms.clone();
        if self.identity_offset != 0.0 {
            v.push(PauliTerm::identity(self.identity_offset));
        }
        v
    }

    fn compiled(&self) -> Vec<CompiledTerm> {
        self.terms.iter().map(|t| t.compile(self.n_spins)).collect()
    }

    fn check(&self, v: &StateVector) -> Result<()> {
        if v.n_spins() != self.n_spins {
            return Err(SpinError::DimensionMismatch {
                expected: self.n_spins,
                found: v.n_spins(),
            });
        }
        Ok(())
    }

    /// `H·v`, computed term by term without forming a matrix.
    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        self.check(v)?;
        let mut out = StateVector::zeros(self.n_spins);
        self.apply_into(v.amplitudes(), out.amplitudes_mut());
        Ok(out)
    }

    pub(crate) fn apply_into(&self, v: &[C64], out: &mut [C64]) {
        let terms = self.compiled();
        let offset = self.identity_offset;
        let kernel = |a: usize| -> C64 {
            let mut acc = v[a] * offset;
            for t in &terms {
                acc += t.gather(a, v);
            }
            acc
        };
        if kernels::is_parallel(out.len()) {
            out.par_iter_mut()
                .enumerate()
                .for_each(|(a, o)| *o = kernel(a));
        } else {
            out.iter_mut().enumerate().for_each(|(a, o)| *o = kernel(a));
        }
    }

    /// `⟨v|H|v⟩` (not divided by the norm).
    pub fn expectation(&self, v: &StateVector) -> Result<f64> {
        let hv = self.apply(v)?;
        Ok(kernels::dot(v.amplitudes(), hv.amplitudes()).re)
    }

    /// Nonzero entries of column `b` of the matrix, merged by row.
    pub fn column(&self, b: usize) -> Vec<(usize, C64)> {
        let mut entries: Vec<(usize, C64)> = vec![(b, C64::new(self.identity_offset, 0.0))];
        for t in self.compiled() {
            let row = b ^ t.flip;
            let sign = if (b & t.phase).count_ones() & 1 == 1 {
                -1.0
            } else {
                1.0
            };
            let w = t.weight * sign;
            match entries.iter_mut().find(|(r, _)| *r == row) {
                Some((_, z)) => *z += w,
                None => entries.push((row, w)),
            }
        }
        entries.retain(|(_, z)| z.norm_sqr() > 0.0);
        entries
    }

    /// Dense `2^N × 2^N` matrix, refused above `cap` spins.
    pub fn dense_matrix_capped(&self, cap: usize) -> Result<DMatrix<C64>> {
        if self.n_spins > cap {
            return Err(SpinError::DenseCapExceeded {
                n_spins: self.n_spins,
                cap,
            });
        }
        let dim = 1usize << self.n_spins;
        let terms = self.compiled();
        let mut m = DMatrix::from_diagonal_element(dim, dim, C64::new(self.identity_offset, 0.0));
        for t in &terms {
            for col in 0..dim {
                let row = col ^ t.flip;
                let sign = if (col & t.phase).count_ones() & 1 == 1 {
                    -1.0
                } else {
                    1.0
                };
                m[(row, col)] += t.weight * sign;
            }
        }
        Ok(m)
    }

    pub fn dense_matrix(&self) -> Result<DMatrix<C64>> {
        self.dense_matrix_capped(DEFAULT_DENSE_CAP)
    }
}

/// Free-function form of [`OperatorSum::apply`].
pub fn apply_operator(op: &OperatorSum, v: &StateVector) -> Result<StateVector> {
    op.apply(v)
}
