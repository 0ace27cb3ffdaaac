//! Independent dense oracles shared by the integration tests.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spinrg::embedding::EmbeddingMap;
use spinrg::{OperatorSum, Pauli, PauliTerm, StateVector};

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn pauli_dense(p: Option<Pauli>) -> DMatrix<C64> {
    let i = C64::new(0.0, 1.0);
    match p {
        None => DMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(1.0)]),
        Some(Pauli::X) => DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]),
        Some(Pauli::Y) => DMatrix::from_row_slice(2, 2, &[c(0.0), -i, i, c(0.0)]),
        Some(Pauli::Z) => DMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)]),
    }
}

/// Kronecker product with site 1 as the leftmost factor.
pub fn term_dense(n: usize, term: &PauliTerm) -> DMatrix<C64> {
    let mut m = DMatrix::from_element(1, 1, c(term.coefficient()));
    for site in 1..=n {
        let p = term
            .factors()
            .iter()
            .find(|(s, _)| *s == site)
            .map(|(_, p)| *p);
        m = m.kronecker(&pauli_dense(p));
    }
    m
}

pub fn op_dense(op: &OperatorSum) -> DMatrix<C64> {
    let n = op.n_spins();
    let dim = 1 << n;
    let mut m = DMatrix::<C64>::identity(dim, dim) * c(op.identity_offset());
    for t in op.terms() {
        m += term_dense(n, t);
    }
    m
}

/// `T` as a dense `2^N × 2^(N/b)` matrix, built from Kronecker products of the blocks.
pub fn t_dense(t: &EmbeddingMap) -> DMatrix<C64> {
    let mut m = DMatrix::from_element(1, 1, c(1.0));
    for v in t.blocks() {
        m = m.kronecker(&v.map(c));
    }
    m
}

pub fn to_vec(v: &StateVector) -> nalgebra::DVector<C64> {
    nalgebra::DVector::from_column_slice(v.amplitudes())
}

pub fn max_abs_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn random_state(n: usize, seed: u64) -> StateVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amps = (0..1usize << n)
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let mut v = StateVector::new(n, amps).unwrap();
    v.normalize();
    v
}

pub fn random_operator(n: usize, n_terms: usize, seed: u64) -> OperatorSum {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut op = OperatorSum::new(n);
    for _ in 0..n_terms {
        let mut factors = Vec::new();
        for site in 1..=n {
            match rng.gen_range(0..4) {
                1 => factors.push((site, Pauli::X)),
                2 => factors.push((site, Pauli::Y)),
                3 => factors.push((site, Pauli::Z)),
                _ => {}
            }
        }
        let coeff = rng.gen_range(-1.0..1.0);
        op.push(PauliTerm::new(coeff, factors).unwrap()).unwrap();
    }
    op
}
