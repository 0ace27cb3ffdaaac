mod common;

use common::*;
use nalgebra::DMatrix;
use spinrg::heisenberg::{
    block_doublet, block_hamiltonian, build_embedding_heisenberg, renormalize_heisenberg,
    rg_factors, verify_boundary_factors,
};
use spinrg::models::{build_heisenberg, HeisenbergCouplings};
use spinrg::StateVector;

const DELTAS: [f64; 5] = [0.0, 0.25, 0.5, 1.0, 2.0];

#[test]
fn isotropic_factors_exact() {
    let f = rg_factors(1.0, 1.0).unwrap();
    assert_eq!(f.x, 0.0);
    assert_eq!(f.xi_x, 2.0 / 3.0);
    assert_eq!(f.xi_z, 2.0 / 3.0);
    assert_eq!(f.j_prime, 4.0 / 9.0);
    assert_eq!(f.delta_prime, 1.0);
    assert_eq!(f.e_b, -1.0);
}

#[test]
fn doublet_energy_matches_closed_form() {
    for delta in DELTAS {
        let f = rg_factors(1.0, delta).unwrap();
        // Independent route: plain diagonalization of the block matrix.
        let eig = nalgebra::SymmetricEigen::new(block_hamiltonian(1.0, delta).unwrap());
        let mut e: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
        e.sort_by(f64::total_cmp);
        assert!((e[0] - f.e_b).abs() < 1e-10, "Δ = {delta}");
        assert!((e[1] - f.e_b).abs() < 1e-10);
        let (_, lib) = block_doublet(1.0, delta).unwrap();
        assert!((lib[0] - f.e_b).abs() < 1e-10);
    }
}

#[test]
fn boundary_factors_match_closed_form() {
    for delta in DELTAS {
        let c = HeisenbergCouplings::new(6, 1.0, delta).unwrap();
        let e = build_embedding_heisenberg(&c).unwrap();
        let report = verify_boundary_factors(&e, &c).unwrap();
        assert!(report.max_deviation() <= 1e-8, "Δ = {delta}: {:e}", report.max_deviation());
        for b in &report.blocks {
            assert!((b.xi_x[0] - report.closed_form.xi_x).abs() < 1e-8);
            assert!((b.xi_z[1] - report.closed_form.xi_z).abs() < 1e-8);
        }
    }
}

#[test]
fn embedding_is_isometric_on_delta_grid() {
    for delta in DELTAS {
        let c = HeisenbergCouplings::new(9, 1.0, delta).unwrap();
        let e = build_embedding_heisenberg(&c).unwrap();
        assert!(e.isometry_defect() < 1e-13);
        let t = t_dense(&e);
        let id = DMatrix::identity(8, 8);
        assert!(max_abs_diff(&(t.adjoint() * &t), &id) < 1e-13);
    }
}

#[test]
fn projection_identity_dense() {
    for (n, deltas) in [(6, &[0.0, 0.5, 1.0][..]), (9, &[0.0, 0.5, 1.0][..]), (12, &[0.5][..])] {
        for &delta in deltas {
            let c = HeisenbergCouplings::new(n, 1.0, delta).unwrap();
            let rg = renormalize_heisenberg(&c).unwrap();
            let t = t_dense(&rg.embedding);
            let projected = t.adjoint() * op_dense(&build_heisenberg(&c)) * &t;
            let err = max_abs_diff(&projected, &op_dense(&rg.hamiltonian()));
            assert!(err < 1e-12, "N = {n}, Δ = {delta}: {err:e}");
        }
    }
}

#[test]
fn worked_examples() {
    let rg = renormalize_heisenberg(&HeisenbergCouplings::new(12, 1.0, 1.0).unwrap()).unwrap();
    assert_eq!(rg.couplings.n_spins(), 4);
    assert_eq!(rg.energy_offset, -4.0);
    assert!((rg.couplings.j() - 4.0 / 9.0).abs() < 1e-15);

    let rg = renormalize_heisenberg(&HeisenbergCouplings::new(24, 1.0, 0.0).unwrap()).unwrap();
    assert_eq!(rg.couplings.n_spins(), 8);
    assert!((rg.couplings.j() - 0.5).abs() < 1e-12);
    assert_eq!(rg.couplings.delta(), 0.0);
}

#[test]
fn anisotropy_flows_monotonically_below_one() {
    let mut prev = -1.0;
    for k in 0..=100 {
        let delta = k as f64 / 100.0;
        let f = rg_factors(1.0, delta).unwrap();
        assert!(f.delta_prime > prev);
        // Anisotropy below the isotropic point moves towards the XY point.
        assert!(f.delta_prime <= delta + 1e-15);
        prev = f.delta_prime;
    }
}

#[test]
fn all_up_has_no_overlap_with_doublets() {
    let c = HeisenbergCouplings::new(6, 1.0, 1.0).unwrap();
    let e = build_embedding_heisenberg(&c).unwrap();
    assert!(e.apply_t_dagger(&StateVector::all_up(6), true).is_err());
    assert!(e.apply_t_dagger(&StateVector::neel(6), true).is_ok());
}

#[test]
fn invalid_lengths_rejected() {
    for n in [3, 7, 10] {
        let c = HeisenbergCouplings::new(n, 1.0, 1.0).unwrap();
        assert!(renormalize_heisenberg(&c).is_err());
    }
    assert!(HeisenbergCouplings::new(6, -1.0, 1.0).is_err());
}
