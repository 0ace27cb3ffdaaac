//! Paired original/coarse evolutions on a shared grid.

use crate::density::LogBase;
use crate::embedding::EmbeddingMap;
use crate::error::{Result, SpinError};
use crate::evolve::{evolve, EvolveConfig};
use crate::heisenberg::renormalize_heisenberg;
use crate::ising::renormalize_ising;
use crate::models::{build_heisenberg, build_ising, HeisenbergCouplings, IsingCouplings};
use crate::operator::OperatorSum;
use crate::state::StateVector;

use super::{
    native_probe, run_observable_series, ChainTag, ObservableKind, Probe, SeriesLabel,
    SeriesRequest, TimeGrid, TimeSeries,
};

#[derive(Debug, Clone, PartialEq)]
pub enum ChainModel {
    Ising(IsingCouplings),
    Heisenberg(HeisenbergCouplings),
}

impl ChainModel {
    pub fn n_spins(&self) -> usize {
        match self {
            ChainModel::Ising(c) => c.n_spins(),
            ChainModel::Heisenberg(c) => c.n_spins(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ChainModel::Ising(_) => "ising",
            ChainModel::Heisenberg(_) => "heisenberg",
        }
    }

    /// Sites per block of one renormalization step.
    pub fn block_size(&self) -> usize {
        match self {
            ChainModel::Ising(_) => 2,
            ChainModel::Heisenberg(_) => 3,
        }
    }

    pub fn hamiltonian(&self) -> OperatorSum {
        match self {
            ChainModel::Ising(c) => build_ising(c),
            ChainModel::Heisenberg(c) => build_heisenberg(c),
        }
    }
}

/// One blocking step: the coarse model, its full Hamiltonian and the embedding.
#[derive(Debug, Clone)]
pub struct RgStep {
    pub coarse: ChainModel,
    /// Closed-form coarse Hamiltonian, constant offset included.
    pub hamiltonian: OperatorSum,
    pub embedding: EmbeddingMap,
}

pub fn rg_step(model: &ChainModel) -> Result<RgStep> {
    match model {
        ChainModel::Ising(c) => {
            let rg = renormalize_ising(c)?;
            Ok(RgStep {
                hamiltonian: rg.hamiltonian(),
                coarse: ChainModel::Ising(rg.couplings),
                embedding: rg.embedding,
            })
        }
        ChainModel::Heisenberg(c) => {
            let rg = renormalize_heisenberg(c)?;
            Ok(RgStep {
                hamiltonian: rg.hamiltonian(),
                coarse: ChainModel::Heisenberg(rg.couplings),
                embedding: rg.embedding,
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InitialState {
    AllUp,
    Neel,
    /// `0` = up, `1` = down, site 1 first.
    Bitstring(String),
}

impl InitialState {
    pub fn build(&self, n_spins: usize) -> Result<StateVector> {
        match self {
            InitialState::AllUp => Ok(StateVector::all_up(n_spins)),
            InitialState::Neel => Ok(StateVector::neel(n_spins)),
            InitialState::Bitstring(s) => {
                if s.len() != n_spins {
                    return Err(SpinError::DimensionMismatch {
                        expected: n_spins,
                        found: s.len(),
                    });
                }
                StateVector::from_bitstring(s)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ObservableMode {
    /// `A' = T†AT`
    #[default]
    Projected,
    /// Plain Pauli operators on the coarse chain.
    Native,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonOptions {
    pub normalize_truncated_state: bool,
    pub observable_mode: ObservableMode,
    pub rg_steps: usize,
    pub entropy_base: LogBase,
    pub evolve: EvolveConfig,
}

impl Default for ComparisonOptions {
    fn default() -> Self {
        Self {
            normalize_truncated_state: true,
            observable_mode: ObservableMode::Projected,
            rg_steps: 1,
            entropy_base: LogBase::Natural,
            evolve: EvolveConfig::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Comparison {
    pub n_spins: usize,
    pub n_coarse: usize,
    pub coarse: ChainModel,
    /// `‖T†ψ₀‖` (product over steps).
    pub truncation_fidelity: f64,
    /// Largest change of any coarse observable after the first grid interval
    /// when the constant offset of the coarse Hamiltonian is dropped.
    pub offset_deviation: f64,
    pub original: Vec<TimeSeries>,
    pub renormalized: Vec<TimeSeries>,
}

impl Comparison {
    /// `(original, renormalized)` series for each requested observable.
    pub fn pairs(&self) -> impl Iterator<Item = (&TimeSeries, &TimeSeries)> {
        self.original.iter().zip(&self.renormalized)
    }
}

/// Coarse subsystem size for an entropy cut of `n_sub` original sites.
fn coarse_cut(n_sub: usize, shrink: usize, n_coarse: usize) -> usize {
    (n_sub / shrink).clamp(1, n_coarse.saturating_sub(1).max(1))
}

pub fn run_comparison(
    model: &ChainModel,
    initial: &InitialState,
    grid: &TimeGrid,
    kinds: &[ObservableKind],
    opts: &ComparisonOptions,
) -> Result<Comparison> {
    if opts.rg_steps == 0 {
        return Err(SpinError::InvalidCouplings("rg_steps must be at least 1".into()));
    }
    let n = model.n_spins();
    let h = model.hamiltonian();
    let v0 = initial.build(n)?;

    let mut steps = Vec::with_capacity(opts.rg_steps);
    let mut current = model.clone();
    for _ in 0..opts.rg_steps {
        let step = rg_step(&current)?;
        current = step.coarse.clone();
        steps.push(step);
    }
    let last = steps.last().expect("at least one step");
    let h_rg = last.hamiltonian.clone();
    // The offsets of earlier steps only shift the energy; add them for the record.
    let mut h_rg_total = h_rg.clone();
    for s in &steps[..steps.len() - 1] {
        h_rg_total.add_identity(s.hamiltonian.identity_offset());
    }
    let n_coarse = current.n_spins();

    let mut v0_coarse = v0.clone();
    let mut fidelity = 1.0;
    for s in &steps {
        let tr = s.embedding.apply_t_dagger(&v0_coarse, opts.normalize_truncated_state)?;
        fidelity *= if opts.normalize_truncated_state {
            tr.kept_norm
        } else {
            tr.kept_norm / v0_coarse.norm()
        };
        v0_coarse = tr.state;
    }

    let shrink = n / n_coarse;
    let mut original_req = Vec::with_capacity(kinds.len());
    let mut coarse_req = Vec::with_capacity(kinds.len());
    for &kind in kinds {
        let probe = native_probe(kind, n, opts.entropy_base)?;
        let coarse_probe = match (kind, opts.observable_mode) {
            (ObservableKind::Entropy { n_sub }, _) => native_probe(
                ObservableKind::Entropy {
                    n_sub: coarse_cut(n_sub, shrink, n_coarse),
                },
                n_coarse,
                opts.entropy_base,
            )?,
            (_, ObservableMode::Native) => native_probe(kind, n_coarse, opts.entropy_base)?,
            (_, ObservableMode::Projected) => {
                let project = |op: &OperatorSum| -> Result<OperatorSum> {
                    let mut a = op.clone();
                    for s in &steps {
                        a = s.embedding.project_observable(&a)?;
                    }
                    Ok(a)
                };
                probe.map_operators(&project)?
            }
        };
        original_req.push(SeriesRequest {
            label: SeriesLabel {
                kind,
                chain: ChainTag::Original,
            },
            probe,
        });
        coarse_req.push(SeriesRequest {
            label: SeriesLabel {
                kind,
                chain: ChainTag::Renormalized,
            },
            probe: coarse_probe,
        });
    }

    let offset_deviation = offset_check(&h_rg_total, &v0_coarse, grid, &coarse_req, &opts.evolve)?;

    let original = run_observable_series(&h, &v0, grid, &original_req, &opts.evolve)?;
    let renormalized =
        run_observable_series(&h_rg_total, &v0_coarse, grid, &coarse_req, &opts.evolve)?;

    Ok(Comparison {
        n_spins: n,
        n_coarse,
        coarse: current,
        truncation_fidelity: fidelity,
        offset_deviation,
        original,
        renormalized,
    })
}

/// Evolves over the first grid interval with and without the constant
/// offset and returns the largest observable difference.
fn offset_check(
    h: &OperatorSum,
    v0: &StateVector,
    grid: &TimeGrid,
    requests: &[SeriesRequest],
    cfg: &EvolveConfig,
) -> Result<f64> {
    if requests.is_empty() {
        return Ok(0.0);
    }
    let times = grid.times();
    let t = times[1];
    let mut shifted = h.clone();
    shifted.add_identity(-h.identity_offset());
    let a = evolve(h, v0, t, cfg)?;
    let b = evolve(&shifted, v0, t, cfg)?;
    let mut dev: f64 = 0.0;
    for r in requests {
        let pa: &Probe = &r.probe;
        dev = dev.max((pa.evaluate(&a)? - pa.evaluate(&b)?).abs());
    }
    Ok(dev)
}
