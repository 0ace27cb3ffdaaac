mod common;

use common::*;
use nalgebra::DVector;
use num_complex::Complex64 as C64;
use spinrg::dense::{diagonalize, ground_energy};
use spinrg::models::{build_heisenberg, build_ising, HeisenbergCouplings, IsingCouplings};
use spinrg::{evolve, EvolveConfig, OperatorSum, StateVector};

fn oracle_expm(h: &OperatorSum, v: &StateVector, t: f64) -> DVector<C64> {
    // Independent route: Hermitian eigendecomposition of the Kronecker-built matrix.
    let m = op_dense(h);
    let eig = nalgebra::SymmetricEigen::new(m.map(|z| z.re));
    let u = eig.eigenvectors.map(c);
    let phases = DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|e| C64::new(0.0, -e * t).exp()),
    );
    let coeffs = u.adjoint() * to_vec(v);
    u * coeffs.component_mul(&phases)
}

fn fidelity(a: &DVector<C64>, b: &DVector<C64>) -> f64 {
    a.dotc(b).norm()
}

#[test]
fn krylov_matches_dense_both_models() {
    let cfg = EvolveConfig::default();
    let hs = [
        build_ising(&IsingCouplings::homogeneous(8, 1.0, 0.5).unwrap()),
        build_heisenberg(&HeisenbergCouplings::new(8, 1.0, 0.5).unwrap()),
    ];
    for h in &hs {
        let v0 = StateVector::neel(8);
        for t in [0.5, 1.0, 5.0, 10.0] {
            let got = to_vec(&evolve(h, &v0, t, &cfg).unwrap());
            let f = fidelity(&got, &oracle_expm(h, &v0, t));
            assert!(f >= 1.0 - 1e-10, "t = {t}: {f}");
        }
    }
}

#[test]
fn library_dense_evolution_matches_oracle() {
    let h = build_ising(&IsingCouplings::random(6, 4).unwrap());
    let v0 = random_state(6, 1);
    let spec = diagonalize(&h).unwrap();
    let got = to_vec(&spec.evolve(&v0, 2.5).unwrap());
    assert!(fidelity(&got, &oracle_expm(&h, &v0, 2.5)) > 1.0 - 1e-12);
}

#[test]
fn norm_and_energy_are_conserved() {
    let h = build_ising(&IsingCouplings::random(10, 11).unwrap());
    let v0 = random_state(10, 2);
    let e0 = h.expectation(&v0).unwrap();
    let v = evolve(&h, &v0, 7.0, &EvolveConfig::default()).unwrap();
    assert!((v.norm() - 1.0).abs() < 1e-10);
    assert!((h.expectation(&v).unwrap() - e0).abs() < 1e-9);
}

#[test]
fn evolution_composes() {
    let h = build_heisenberg(&HeisenbergCouplings::new(9, 1.0, 1.0).unwrap());
    let cfg = EvolveConfig::default();
    let v0 = StateVector::neel(9);
    let direct = evolve(&h, &v0, 3.0, &cfg).unwrap();
    let split = evolve(&h, &evolve(&h, &v0, 1.2, &cfg).unwrap(), 1.8, &cfg).unwrap();
    assert!(direct.fidelity(&split).unwrap() > 1.0 - 1e-10);
}

#[test]
fn eigenstate_only_gains_phase() {
    let h = build_ising(&IsingCouplings::homogeneous(6, 1.0, 0.0).unwrap());
    let v0 = StateVector::all_up(6);
    let v = evolve(&h, &v0, 4.0, &EvolveConfig::default()).unwrap();
    let overlap = v0.inner(&v).unwrap();
    // E = -6, so ⟨ψ|e^{-iHt}|ψ⟩ = e^{6it}.
    assert!((overlap - C64::new(0.0, 24.0).exp()).norm() < 1e-10);
}

#[test]
fn ising_ground_energies_small() {
    // Classical limit: E0 = -N J.
    let e = ground_energy(&build_ising(&IsingCouplings::homogeneous(4, 1.0, 0.0).unwrap())).unwrap();
    assert!((e + 4.0).abs() < 1e-12);
    // Pure field: E0 = -N Γ.
    let e = ground_energy(&build_ising(&IsingCouplings::homogeneous(4, 0.0, 1.0).unwrap())).unwrap();
    assert!((e + 4.0).abs() < 1e-12);
    // Periodic critical chain, N = 4: E0 = -2 Σ_k |sin(k/2)| over k = ±π/4, ±3π/4.
    let oracle: f64 = [1.0f64, 3.0]
        .iter()
        .map(|m| 4.0 * (m * std::f64::consts::PI / 8.0).sin())
        .sum::<f64>();
    let e = ground_energy(&build_ising(&IsingCouplings::homogeneous(4, 1.0, 1.0).unwrap())).unwrap();
    assert!((e + oracle).abs() < 1e-12, "{e} vs {}", -oracle);
}

#[test]
fn heisenberg_three_site_spectrum() {
    for (delta, e0) in [(1.0, -1.0), (0.0, -std::f64::consts::FRAC_1_SQRT_2)] {
        let h = build_heisenberg(&HeisenbergCouplings::new(3, 1.0, delta).unwrap());
        let spec = diagonalize(&h).unwrap();
        assert!((spec.energies[0] - e0).abs() < 1e-12);
        assert!((spec.energies[1] - e0).abs() < 1e-12);
        if delta == 1.0 {
            // Levels -1 (×2), 0 (×2), +1/2 (×4).
            assert!(spec.energies[2].abs() < 1e-12 && spec.energies[3].abs() < 1e-12);
            assert!(spec.energies[4..].iter().all(|e| (e - 0.5).abs() < 1e-12));
        }
    }
}
