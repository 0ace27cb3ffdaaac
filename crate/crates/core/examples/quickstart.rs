//! Compare a 12-spin transverse-field Ising chain with its 6-spin coarse image.

use spinrg::analysis::{chi_squared, epsilon_delta_h};
use spinrg::observables::{
    run_comparison, ChainModel, ComparisonOptions, InitialState, ObservableKind, TimeGrid,
};
use spinrg::IsingCouplings;

fn main() -> spinrg::Result<()> {
    let model = ChainModel::Ising(IsingCouplings::homogeneous(12, 1.0, 0.5)?);
    let grid = TimeGrid::new(0.0, 5.0, 51)?;
    let kinds = [
        ObservableKind::Magnetization,
        ObservableKind::Correlation { i: 1, r: 1 },
        ObservableKind::Entropy { n_sub: 2 },
    ];
    let cmp = run_comparison(
        &model,
        &InitialState::AllUp,
        &grid,
        &kinds,
        &ComparisonOptions::default(),
    )?;
    println!(
        "N = {} -> {}, truncation fidelity {:.6}",
        cmp.n_spins, cmp.n_coarse, cmp.truncation_fidelity
    );
    for (o, r) in cmp.pairs() {
        println!("{:<14} chi2 = {:.6}", o.label.kind.name(), chi_squared(o, r)?);
    }
    println!("epsilon(delta H) = {:.6e}", epsilon_delta_h(&model)?.epsilon);
    Ok(())
}
