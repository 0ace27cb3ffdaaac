//! Acceptance gate. One line per criterion; exits non-zero if any fails.
//!
//! Run with `cargo test -p spinrg --release --test acceptance`.

use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spinrg::analysis::{chi_squared, epsilon_delta_h, fit_exponential};
use spinrg::dense::diagonalize;
use spinrg::embedding::EmbeddingMap;
use spinrg::heisenberg::{
    block_doublet, build_embedding_heisenberg, rg_factors, verify_boundary_factors,
};
use spinrg::ising::{block_eigensystem, intrablock_matrix, renormalize_ising};
use spinrg::models::{build_heisenberg, build_ising, HeisenbergCouplings, IsingCouplings};
use spinrg::observables::*;
use spinrg::{evolve, EvolveConfig, OperatorSum, StateVector};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn observables() -> [ObservableKind; 3] {
    [
        ObservableKind::Magnetization,
        ObservableKind::Correlation { i: 1, r: 1 },
        ObservableKind::Entropy { n_sub: 1 },
    ]
}

/// χ² per observable for each N.
fn chi2_table(
    ns: &[usize],
    model: impl Fn(usize) -> ChainModel,
    initial: InitialState,
) -> Vec<(usize, [f64; 3])> {
    let grid = TimeGrid::default();
    let opts = ComparisonOptions::default();
    ns.iter()
        .map(|&n| {
            let cmp = run_comparison(&model(n), &initial, &grid, &observables(), &opts)
                .expect("comparison run");
            let mut chi = [0.0; 3];
            for (k, (o, r)) in cmp.pairs().enumerate() {
                chi[k] = chi_squared(o, r).expect("chi2");
            }
            (n, chi)
        })
        .collect()
}

fn format_table(table: &[(usize, [f64; 3])]) -> String {
    table
        .iter()
        .map(|(n, c)| format!("N={n}:[{:.4},{:.4},{:.4}]", c[0], c[1], c[2]))
        .collect::<Vec<_>>()
        .join(" ")
}

fn column(table: &[(usize, [f64; 3])], k: usize) -> Vec<f64> {
    table.iter().map(|(_, c)| c[k]).collect()
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn non_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] <= w[0])
}

fn t_columns(t: &EmbeddingMap) -> Vec<StateVector> {
    let ns = t.source_spins();
    (0..1usize << ns)
        .map(|k| t.apply_t(&StateVector::basis(ns, k).unwrap()).unwrap())
        .collect()
}

fn isometry_and_projection() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut worst_iso, mut worst_proj) = (0.0f64, 0.0f64);
    for n in [4, 6, 8, 10, 12] {
        for _ in 0..50 {
            let j = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let g = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let c = IsingCouplings::new(j, g).unwrap();
            let rg = renormalize_ising(&c).unwrap();
            let cols = t_columns(&rg.embedding);
            let h = build_ising(&c);
            let hcols: Vec<StateVector> = cols.iter().map(|v| h.apply(v).unwrap()).collect();
            let closed = rg.hamiltonian().dense_matrix().unwrap();
            for (a, ca) in cols.iter().enumerate() {
                for (b, cb) in cols.iter().enumerate() {
                    let id = if a == b { 1.0 } else { 0.0 };
                    worst_iso = worst_iso.max((ca.inner(cb).unwrap() - C64::new(id, 0.0)).norm());
                    let proj = ca.inner(&hcols[b]).unwrap();
                    worst_proj = worst_proj.max((proj - closed[(a, b)]).norm());
                }
            }
        }
    }
    outcome(
        worst_iso <= 1e-13 && worst_proj <= 1e-12,
        format!("max |T†T−I| = {worst_iso:.2e}, max |T†HT − H_RG| = {worst_proj:.2e}"),
    )
}

fn block_states() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let j = rng.gen_range(-2.0..2.0);
        let g = rng.gen_range(-2.0..2.0);
        let m = intrablock_matrix(j, g);
        let e = block_eigensystem(j, g).unwrap();
        for (s, en) in [(e.state_one(), e.energies[0]), (e.state_two(), e.energies[1])] {
            let v = nalgebra::Vector4::from(s);
            worst = worst.max((m * v - v * en).amax());
        }
    }
    outcome(worst <= 1e-13, format!("max residual = {worst:.2e}"))
}

fn evolution_oracle() -> Outcome {
    let hs: [(&str, OperatorSum); 2] = [
        ("ising", build_ising(&IsingCouplings::homogeneous(8, 1.0, 0.5).unwrap())),
        ("heisenberg", build_heisenberg(&HeisenbergCouplings::new(8, 1.0, 0.5).unwrap())),
    ];
    let mut worst = 1.0f64;
    for (_, h) in &hs {
        let spec = diagonalize(h).unwrap();
        let v0 = StateVector::neel(8);
        for t in [0.5, 1.0, 5.0, 10.0] {
            let k = evolve(h, &v0, t, &EvolveConfig::default()).unwrap();
            let d = spec.evolve(&v0, t).unwrap();
            worst = worst.min(k.fidelity(&d).unwrap());
        }
    }
    outcome(worst >= 1.0 - 1e-10, format!("min fidelity = 1 − {:.2e}", 1.0 - worst))
}

fn ising_convergence() -> Outcome {
    let ns = [6, 8, 10, 12, 14, 16];
    let table = chi2_table(
        &ns,
        |n| ChainModel::Ising(IsingCouplings::homogeneous(n, 1.0, 0.5).unwrap()),
        InitialState::AllUp,
    );
    let mut pass = true;
    let mut fits = Vec::new();
    for k in 0..3 {
        let col = column(&table, k);
        let pts: Vec<(f64, f64)> = ns.iter().map(|&n| n as f64).zip(col.iter().copied()).collect();
        let fit = fit_exponential(&pts, false).unwrap();
        let r2 = fit.r_squared.unwrap_or(f64::NAN);
        pass &= strictly_decreasing(&col) && r2 >= 0.9 && (0.1..=0.6).contains(&fit.b);
        fits.push(format!("{}: b={:.3} R²={:.3}", observables()[k].name(), fit.b, r2));
    }
    outcome(pass, format!("{} | {}", fits.join(", "), format_table(&table)))
}

fn critical_point() -> Outcome {
    let table = chi2_table(
        &[8, 16],
        |n| ChainModel::Ising(IsingCouplings::homogeneous(n, 1.0, 1.0).unwrap()),
        InitialState::AllUp,
    );
    let (m8, m16) = (table[0].1[0], table[1].1[0]);
    outcome(
        m16 * 4.0 <= m8,
        format!("χ²_M(8) = {m8:.4}, χ²_M(16) = {m16:.4}, ratio = {:.3}", m8 / m16),
    )
}

fn strict_decrease_for_all(table: &[(usize, [f64; 3])]) -> Outcome {
    let pass = (0..3).all(|k| strictly_decreasing(&column(table, k)));
    outcome(pass, format_table(table))
}

fn random_couplings() -> Outcome {
    let table = chi2_table(
        &[8, 12, 16],
        |n| ChainModel::Ising(IsingCouplings::random(n, 7).unwrap()),
        InitialState::AllUp,
    );
    strict_decrease_for_all(&table)
}

fn neel_state() -> Outcome {
    let table = chi2_table(
        &[8, 12, 16],
        |n| ChainModel::Ising(IsingCouplings::homogeneous(n, 1.0, 0.5).unwrap()),
        InitialState::Neel,
    );
    strict_decrease_for_all(&table)
}

fn heisenberg_closed_forms() -> Outcome {
    let f = rg_factors(1.0, 1.0).unwrap();
    let exact = f.x == 0.0
        && f.xi_x == 2.0 / 3.0
        && f.xi_z == 2.0 / 3.0
        && f.j_prime == 4.0 / 9.0
        && f.delta_prime == 1.0
        && f.e_b == -1.0;
    let (mut worst_e, mut worst_xi) = (0.0f64, 0.0f64);
    for delta in [0.0, 0.25, 0.5, 1.0, 2.0] {
        let (_, e) = block_doublet(1.0, delta).unwrap();
        worst_e = worst_e.max((e[0] - rg_factors(1.0, delta).unwrap().e_b).abs());
        let c = HeisenbergCouplings::new(6, 1.0, delta).unwrap();
        let emb = build_embedding_heisenberg(&c).unwrap();
        worst_xi = worst_xi.max(verify_boundary_factors(&emb, &c).unwrap().max_deviation());
    }
    outcome(
        exact && worst_e <= 1e-10 && worst_xi <= 1e-8,
        format!("isotropic exact = {exact}, max |E − E_B| = {worst_e:.2e}, max ξ deviation = {worst_xi:.2e}"),
    )
}

fn heisenberg_convergence() -> Outcome {
    let ns = [6, 9, 12, 15];
    let mut pass = true;
    let mut parts = Vec::new();
    for delta in [1.0, 0.0, 0.5] {
        let table = chi2_table(
            &ns,
            |n| ChainModel::Heisenberg(HeisenbergCouplings::new(n, 1.0, delta).unwrap()),
            InitialState::Neel,
        );
        for k in 0..3 {
            let col = column(&table, k);
            let pts: Vec<(f64, f64)> =
                ns.iter().map(|&n| n as f64).zip(col.iter().copied()).collect();
            let ok_fit = match fit_exponential(&pts, true) {
                Ok(fit) => {
                    parts.push(format!(
                        "Δ={delta} {}: b={:.3} c={:.2e}",
                        observables()[k].name(),
                        fit.b,
                        fit.c
                    ));
                    fit.c >= 0.0 && fit.b > 0.0
                }
                Err(e) => {
                    parts.push(format!("Δ={delta} {}: fit error {e}", observables()[k].name()));
                    false
                }
            };
            pass &= non_increasing(&col) && ok_fit;
        }
        parts.push(format!("Δ={delta} {}", format_table(&table)));
    }
    outcome(pass, parts.join(" | "))
}

fn epsilon_decay() -> Outcome {
    let ns = [4, 6, 8, 10, 12];
    let eps: Vec<f64> = ns
        .iter()
        .map(|&n| {
            let m = ChainModel::Ising(IsingCouplings::homogeneous(n, 1.0, 1.0).unwrap());
            epsilon_delta_h(&m).unwrap().epsilon
        })
        .collect();
    let pts: Vec<(f64, f64)> = ns.iter().map(|&n| n as f64).zip(eps.iter().copied()).collect();
    let fit = fit_exponential(&pts, false).unwrap();
    let zero = epsilon_delta_h(&ChainModel::Ising(
        IsingCouplings::homogeneous(8, 1.0, 0.0).unwrap(),
    ))
    .unwrap()
    .epsilon;
    outcome(
        strictly_decreasing(&eps)
            && (fit.b - 0.5).abs() <= 0.1
            && (fit.a - 0.25).abs() <= 0.1
            && zero.abs() <= 1e-12,
        format!(
            "ε = {:?}, a = {:.4}, b = {:.4}, ε(Γ=0) = {zero:.2e}",
            eps.iter().map(|e| format!("{e:.6}")).collect::<Vec<_>>(),
            fit.a,
            fit.b
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("isometry and projection identity", isometry_and_projection),
        ("block kept states", block_states),
        ("evolution oracle", evolution_oracle),
        ("ising convergence", ising_convergence),
        ("critical point", critical_point),
        ("random couplings", random_couplings),
        ("neel initial state", neel_state),
        ("heisenberg closed forms", heisenberg_closed_forms),
        ("heisenberg convergence", heisenberg_convergence),
        ("epsilon decay", epsilon_decay),
    ];
    let mut failures = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let o = check();
        if !o.pass {
            failures += 1;
        }
        println!(
            "{} {name} ({:.1}s): {}",
            if o.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            o.detail
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
