//! Experiment configuration: the JSON schema and its translation into library types.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use spinrg::density::LogBase;
use spinrg::models::{HeisenbergCouplings, IsingCouplings};
use spinrg::observables::{
    rg_step, ChainModel, ComparisonOptions, InitialState, ObservableKind, ObservableMode, TimeGrid,
};
use spinrg::EvolveConfig;

use crate::error::CliError;

/// Spins above which a run needs `--allow-large`.
pub const LARGE_N: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelName {
    Ising,
    Heisenberg,
}

impl ModelName {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelName::Ising => "ising",
            ModelName::Heisenberg => "heisenberg",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CouplingSpec {
    /// Ising uses `j` and `gamma`; Heisenberg uses `j` and `delta`.
    Homogeneous {
        j: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gamma: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        delta: Option<f64>,
    },
    /// Ising only: `J_i` then `Γ_i` drawn uniformly from `[0, 1)`.
    Random { seed: u64 },
    /// Ising only: one entry per site; every N in the run must match the length.
    Explicit { j: Vec<f64>, gamma: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialStateSpec {
    AllUp,
    Neel,
    Bitstring(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub t_start: f64,
    pub t_end: f64,
    pub n_points: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            t_start: 0.0,
            t_end: 10.0,
            n_points: 201,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ObservableSpec {
    Magnetization,
    Correlation {
        #[serde(default = "one")]
        i: usize,
        #[serde(default = "one")]
        r: usize,
    },
    Entropy {
        #[serde(default = "one")]
        n_sub: usize,
    },
}

fn one() -> usize {
    1
}

impl From<ObservableSpec> for ObservableKind {
    fn from(s: ObservableSpec) -> Self {
        match s {
            ObservableSpec::Magnetization => ObservableKind::Magnetization,
            ObservableSpec::Correlation { i, r } => ObservableKind::Correlation { i, r },
            ObservableSpec::Entropy { n_sub } => ObservableKind::Entropy { n_sub },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeSpec {
    Projected,
    Native,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntropyBaseSpec {
    Natural,
    Two,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveSpec {
    pub krylov_dim: usize,
    pub dt_max: f64,
    pub tolerance: f64,
}

impl Default for EvolveSpec {
    fn default() -> Self {
        let d = EvolveConfig::default();
        Self {
            krylov_dim: d.krylov_dim,
            dt_max: d.dt_max,
            tolerance: d.tolerance,
        }
    }
}

fn default_observables() -> Vec<ObservableSpec> {
    vec![
        ObservableSpec::Magnetization,
        ObservableSpec::Correlation { i: 1, r: 1 },
        ObservableSpec::Entropy { n_sub: 1 },
    ]
}

fn default_true() -> bool {
    true
}

fn default_mode() -> ModeSpec {
    ModeSpec::Projected
}

fn default_base() -> EntropyBaseSpec {
    EntropyBaseSpec::Natural
}

fn default_budget() -> u64 {
    16 << 30
}

/// The on-disk experiment description. Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelName,
    pub couplings: CouplingSpec,
    pub n_values: Vec<usize>,
    /// Defaults to `all_up` for Ising and `neel` for Heisenberg.
    #[serde(default)]
    pub initial_state: Option<InitialStateSpec>,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default = "default_observables")]
    pub observables: Vec<ObservableSpec>,
    #[serde(default = "default_true")]
    pub normalize_truncated_state: bool,
    #[serde(default = "default_mode")]
    pub observable_mode: ModeSpec,
    #[serde(default = "one")]
    pub rg_steps: usize,
    #[serde(default = "default_base")]
    pub entropy_base: EntropyBaseSpec,
    #[serde(default)]
    pub evolve: EvolveSpec,
    /// Peak memory the run may use, in bytes.
    #[serde(default = "default_budget")]
    pub memory_budget_bytes: u64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let mut cfg: Self =
            serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        if cfg.initial_state.is_none() {
            cfg.initial_state = Some(match cfg.model {
                ModelName::Ising => InitialStateSpec::AllUp,
                ModelName::Heisenberg => InitialStateSpec::Neel,
            });
        }
        Ok(cfg)
    }

    pub fn initial_state(&self) -> InitialState {
        match self.initial_state.clone().unwrap_or(InitialStateSpec::AllUp) {
            InitialStateSpec::AllUp => InitialState::AllUp,
            InitialStateSpec::Neel => InitialState::Neel,
            InitialStateSpec::Bitstring(s) => InitialState::Bitstring(s),
        }
    }

    pub fn grid(&self) -> Result<TimeGrid, CliError> {
        TimeGrid::new(self.grid.t_start, self.grid.t_end, self.grid.n_points)
            .map_err(|e| CliError::Config(format!("grid: {e}")))
    }

    pub fn kinds(&self) -> Vec<ObservableKind> {
        self.observables.iter().map(|&o| o.into()).collect()
    }

    pub fn options(&self) -> ComparisonOptions {
        ComparisonOptions {
            normalize_truncated_state: self.normalize_truncated_state,
            observable_mode: match self.observable_mode {
                ModeSpec::Projected => ObservableMode::Projected,
                ModeSpec::Native => ObservableMode::Native,
            },
            rg_steps: self.rg_steps,
            entropy_base: match self.entropy_base {
                EntropyBaseSpec::Natural => LogBase::Natural,
                EntropyBaseSpec::Two => LogBase::Two,
            },
            evolve: EvolveConfig {
                krylov_dim: self.evolve.krylov_dim,
                dt_max: self.evolve.dt_max,
                tolerance: self.evolve.tolerance,
            },
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self.couplings {
            CouplingSpec::Random { seed } => Some(seed),
            _ => None,
        }
    }

    pub fn chain(&self, n: usize) -> Result<ChainModel, CliError> {
        let bad = |msg: String| CliError::Config(format!("couplings for N = {n}: {msg}"));
        match (self.model, &self.couplings) {
            (ModelName::Ising, CouplingSpec::Homogeneous { j, gamma, delta }) => {
                if delta.is_some() {
                    return Err(bad("`delta` is a Heisenberg parameter".into()));
                }
                let gamma = gamma.ok_or_else(|| bad("Ising needs `gamma`".into()))?;
                IsingCouplings::homogeneous(n, *j, gamma)
                    .map(ChainModel::Ising)
                    .map_err(|e| bad(e.to_string()))
            }
            (ModelName::Ising, CouplingSpec::Random { seed }) => IsingCouplings::random(n, *seed)
                .map(ChainModel::Ising)
                .map_err(|e| bad(e.to_string())),
            (ModelName::Ising, CouplingSpec::Explicit { j, gamma }) => {
                if j.len() != n {
                    return Err(bad(format!("explicit arrays have {} sites", j.len())));
                }
                IsingCouplings::new(j.clone(), gamma.clone())
                    .map(ChainModel::Ising)
                    .map_err(|e| bad(e.to_string()))
            }
            (ModelName::Heisenberg, CouplingSpec::Homogeneous { j, gamma, delta }) => {
                if gamma.is_some() {
                    return Err(bad("`gamma` is an Ising parameter".into()));
                }
                let delta = delta.ok_or_else(|| bad("Heisenberg needs `delta`".into()))?;
                HeisenbergCouplings::new(n, *j, delta)
                    .map(ChainModel::Heisenberg)
                    .map_err(|e| bad(e.to_string()))
            }
            (ModelName::Heisenberg, _) => Err(bad(
                "Heisenberg chains take homogeneous couplings only".into(),
            )),
        }
    }

    /// Checks everything that can be checked before any evolution starts.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.n_values.is_empty() {
            return Err(CliError::Config("`n_values` is empty".into()));
        }
        let mut sorted = self.n_values.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.n_values.len() {
            return Err(CliError::Config("`n_values` has duplicates".into()));
        }
        if self.rg_steps == 0 {
            return Err(CliError::Config("`rg_steps` must be at least 1".into()));
        }
        if self.observables.is_empty() {
            return Err(CliError::Config("`observables` is empty".into()));
        }
        let kinds = self.kinds();
        for (k, a) in kinds.iter().enumerate() {
            if kinds[..k].iter().any(|b| b.name() == a.name()) {
                return Err(CliError::Config(format!(
                    "observable `{}` requested twice; output files are keyed by observable name",
                    a.name()
                )));
            }
        }
        let e = &self.evolve;
        let positive = |x: f64| x > 0.0 && x.is_finite();
        if e.krylov_dim < 2 || !positive(e.dt_max) || !positive(e.tolerance) {
            return Err(CliError::Config(
                "`evolve` needs krylov_dim >= 2, dt_max > 0 and tolerance > 0".into(),
            ));
        }
        self.grid()?;
        for &n in &self.n_values {
            let mut model = self.chain(n)?;
            for _ in 0..self.rg_steps {
                model = rg_step(&model)
                    .map_err(|e| CliError::Config(format!("N = {n} cannot be blocked: {e}")))?
                    .coarse;
            }
            self.initial_state()
                .build(n)
                .map_err(|e| CliError::Config(format!("initial state for N = {n}: {e}")))?;
            for kind in &kinds {
                check_observable(*kind, n)?;
            }
        }
        Ok(())
    }

    /// Peak bytes for one evolution at `n` spins: the Krylov basis plus a few work vectors.
    pub fn memory_estimate(&self, n: usize) -> u64 {
        16u64
            .saturating_mul(1u64 << n.min(62))
            .saturating_mul(self.evolve.krylov_dim as u64 + 4)
    }

    /// Refuses oversize runs before anything is computed.
    pub fn check_resources(&self, allow_large: bool) -> Result<u64, CliError> {
        let largest = self.n_values.iter().copied().max().unwrap_or(0);
        // Runs over N execute concurrently, so their footprints add up.
        let total = self
            .n_values
            .iter()
            .fold(0u64, |acc, &n| acc.saturating_add(self.memory_estimate(n)));
        if largest > LARGE_N && !allow_large {
            return Err(CliError::Resource(format!(
                "N = {largest} exceeds {LARGE_N} spins; estimated peak memory {} \
                 (pass --allow-large to run anyway)",
                human_bytes(total)
            )));
        }
        if total > self.memory_budget_bytes {
            return Err(CliError::Resource(format!(
                "estimated peak memory {} exceeds the budget of {}",
                human_bytes(total),
                human_bytes(self.memory_budget_bytes)
            )));
        }
        Ok(total)
    }
}

fn check_observable(kind: ObservableKind, n: usize) -> Result<(), CliError> {
    let ok = match kind {
        ObservableKind::Magnetization => true,
        ObservableKind::Correlation { i, .. } => (1..=n).contains(&i),
        ObservableKind::Entropy { n_sub } => n_sub >= 1 && n_sub < n,
    };
    if ok {
        Ok(())
    } else {
        Err(CliError::Config(format!("observable {kind} is out of range for N = {n}")))
    }
}

pub fn human_bytes(b: u64) -> String {
    const UNITS: [&str; 5] = ["B", "KiB", "MiB", "GiB", "TiB"];
    let mut v = b as f64;
    let mut u = 0;
    while v >= 1024.0 && u + 1 < UNITS.len() {
        v /= 1024.0;
        u += 1;
    }
    format!("{v:.1} {}", UNITS[u])
}
