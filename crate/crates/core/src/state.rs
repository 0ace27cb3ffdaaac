//! Pure states of a spin-1/2 chain.
//!
//! Ordering convention used throughout the crate: site 1 is the most
//! significant bit of the basis index, and a bit value of 0 is spin up
//! (`σ^z = +1`), 1 is spin down.

use num_complex::Complex64 as C64;

use crate::error::{Result, SpinError};
use crate::kernels;

/// Bit value of `site` (1-based) in basis index `index` of an `n_spins` chain.
#[inline]
pub fn site_bit(index: usize, site: usize, n_spins: usize) -> usize {
    (index >> (n_spins - site)) & 1
}

/// Bit mask selecting `site` (1-based).
#[inline]
pub fn site_mask(site: usize, n_spins: usize) -> usize {
    1 << (n_spins - site)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_spins: usize,
    amplitudes: Vec<C64>,
}

impl StateVector {
    pub fn new(n_spins: usize, amplitudes: Vec<C64>) -> Result<Self> {
        if n_spins >= usize::BITS as usize || amplitudes.len() != 1usize << n_spins {
            return Err(SpinError::BadLength {
                n_spins,
                len: amplitudes.len(),
            });
        }
        Ok(Self {
            n_spins,
            amplitudes,
        })
    }

    pub fn zeros(n_spins: usize) -> Self {
        Self {
            n_spins,
            amplitudes: vec![C64::new(0.0, 0.0); 1 << n_spins],
        }
    }

    /// Computational basis state with the given index.
    pub fn basis(n_spins: usize, index: usize) -> Result<Self> {
        let mut v = Self::zeros(n_spins);
        if index >= v.dim() {
            return Err(SpinError::BadLength {
                n_spins,
                len: index,
            });
        }
        v.amplitudes[index] = C64::new(1.0, 0.0);
        Ok(v)
    }

    /// Product basis state from a string of `0` (up) and `1` (down), site 1 first.
    pub fn from_bitstring(bits: &str) -> Result<Self> {
        let n = bits.len();
        let mut index = 0usize;
        for (k, ch) in bits.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => index |= site_mask(k + 1, n),
                other => {
                    return Err(SpinError::InvalidCouplings(format!(
                        "bitstring contains {other:?}; only '0' and '1' are allowed"
                    )))
                }
            }
        }
        Self::basis(n, index)
    }

    pub fn all_up(n_spins: usize) -> Self {
        Self::basis(n_spins, 0).expect("index 0 is always valid")
    }

    /// Néel state `|↑↓↑↓…⟩`: odd sites up, even sites down.
    pub fn neel(n_spins: usize) -> Self {
        let index = (1..=n_spins)
            .filter(|s| s % 2 == 0)
            .fold(0, |acc, s| acc | site_mask(s, n_spins));
        Self::basis(n_spins, index).expect("valid index")
    }

    /// Uncorrelated product state with the same single-site state on every site.
    pub fn uniform_product(n_spins: usize, up: C64, down: C64) -> Self {
        let amplitudes = (0..1usize << n_spins)
            .map(|b| {
                let ones = b.count_ones() as i32;
                up.powi(n_spins as i32 - ones) * down.powi(ones)
            })
            .collect();
        Self {
            n_spins,
            amplitudes,
        }
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        kernels::norm_sqr(&self.amplitudes).sqrt()
    }

    /// Rescales to unit norm and returns the norm before rescaling.
    pub fn normalize(&mut self) -> f64 {
        let n = self.norm();
        if n > 0.0 {
            kernels::scale(C64::new(1.0 / n, 0.0), &mut self.amplitudes);
        }
        n
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        self.check_same(other)?;
        Ok(kernels::dot(&self.amplitudes, &other.amplitudes))
    }

    /// `|⟨self|other⟩|`, insensitive to global phase.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm())
    }

    pub(crate) fn check_same(&self, other: &StateVector) -> Result<()> {
        if self.n_spins != other.n_spins {
            return Err(SpinError::DimensionMismatch {
                expected: self.n_spins,
                found: other.n_spins,
            });
        }
        Ok(())
    }

    /// Probability of each basis state.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_wrong_length() {
        assert!(StateVector::new(3, vec![C64::new(0.0, 0.0); 7]).is_err());
    }

    #[test]
    fn neel_layout() {
        let v = StateVector::neel(4);
        // |0101⟩
        assert_eq!(v.amplitudes()[0b0101], C64::new(1.0, 0.0));
        assert_eq!(v, StateVector::from_bitstring("0101").unwrap());
    }

    #[test]
    fn site_one_is_most_significant() {
        let v = StateVector::from_bitstring("100").unwrap();
        assert_eq!(v.amplitudes()[4].re, 1.0);
        assert_eq!(site_bit(4, 1, 3), 1);
        assert_eq!(site_bit(4, 3, 3), 0);
    }

    #[test]
    fn normalize_reports_prior_norm() {
        let mut v = StateVector::new(1, vec![C64::new(3.0, 0.0), C64::new(0.0, 4.0)]).unwrap();
        assert!((v.normalize() - 5.0).abs() < 1e-15);
        assert!((v.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn uniform_product_plus_state() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v = StateVector::uniform_product(3, C64::new(h, 0.0), C64::new(h, 0.0));
        assert!((v.norm() - 1.0).abs() < 1e-14);
        assert!(v.amplitudes().iter().all(|a| (a.re - h.powi(3)).abs() < 1e-15));
    }
}
