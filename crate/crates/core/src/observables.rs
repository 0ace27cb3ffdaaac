//! Magnetization, connected `zz` correlation and entanglement entropy
//! sampled along a time evolution, for the original and coarse chains.

use std::fmt;

use crate::density::{partial_trace_prefix, LogBase};
use crate::error::{Result, SpinError};
use crate::evolve::{evolve, EvolveConfig};
use crate::operator::{OperatorSum, Pauli, PauliTerm};
use crate::state::{site_bit, StateVector};

/// Uniform sampling times `t_start, …, t_end`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    t_start: f64,
    t_end: f64,
    n_points: usize,
}

impl TimeGrid {
    pub fn new(t_start: f64, t_end: f64, n_points: usize) -> Result<Self> {
        if n_points < 2 {
            return Err(SpinError::InvalidGrid(format!(
                "need at least 2 points, got {n_points}"
            )));
        }
        if !(t_start >= 0.0) || !(t_end > t_start) || !t_end.is_finite() {
            return Err(SpinError::InvalidGrid(format!(
                "need 0 <= t_start < t_end, got [{t_start}, {t_end}]"
            )));
        }
        Ok(Self {
            t_start,
            t_end,
            n_points,
        })
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn times(&self) -> Vec<f64> {
        let step = (self.t_end - self.t_start) / (self.n_points - 1) as f64;
        (0..self.n_points)
            .map(|k| {
                if k + 1 == self.n_points {
                    self.t_end
                } else {
                    self.t_start + k as f64 * step
                }
            })
            .collect()
    }
}

impl Default for TimeGrid {
    fn default() -> Self {
        Self::new(0.0, 10.0, 201).expect("valid default grid")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ObservableKind {
    Magnetization,
    /// `C^i_r`, sites wrap periodically.
    Correlation { i: usize, r: usize },
    /// Entropy of the first `n_sub` sites.
    Entropy { n_sub: usize },
}

impl ObservableKind {
    /// Short name used in file names.
    pub fn name(&self) -> &'static str {
        match self {
            ObservableKind::Magnetization => "magnetization",
            ObservableKind::Correlation { .. } => "correlation",
            ObservableKind::Entropy { .. } => "entropy",
        }
    }
}

impl fmt::Display for ObservableKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObservableKind::Magnetization => f.write_str("magnetization"),
            ObservableKind::Correlation { i, r } => write!(f, "correlation(i={i},r={r})"),
            ObservableKind::Entropy { n_sub } => write!(f, "entropy(n_sub={n_sub})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChainTag {
    Original,
    Renormalized,
}

impl ChainTag {
    pub fn name(&self) -> &'static str {
        match self {
            ChainTag::Original => "original",
            ChainTag::Renormalized => "renormalized",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesLabel {
    pub kind: ObservableKind,
    pub chain: ChainTag,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub grid: TimeGrid,
    pub label: SeriesLabel,
    pub values: Vec<f64>,
}

/// How an observable is evaluated on a state.
#[derive(Debug, Clone)]
pub enum Probe {
    Expectation(OperatorSum),
    /// `⟨pair⟩ − ⟨left⟩⟨right⟩`
    Connected {
        pair: OperatorSum,
        left: OperatorSum,
        right: OperatorSum,
    },
    Entropy { n_sub: usize, base: LogBase },
}

impl Probe {
    pub fn evaluate(&self, v: &StateVector) -> Result<f64> {
        match self {
            Probe::Expectation(op) => op.expectation(v),
            Probe::Connected { pair, left, right } => {
                Ok(pair.expectation(v)? - left.expectation(v)? * right.expectation(v)?)
            }
            Probe::Entropy { n_sub, base } => {
                let norm = v.norm();
                if (norm - 1.0).abs() > 1e-12 && norm > 0.0 {
                    let mut u = v.clone();
                    u.normalize();
                    entanglement_entropy_in(&u, *n_sub, *base)
                } else {
                    entanglement_entropy_in(v, *n_sub, *base)
                }
            }
        }
    }

    /// Maps the probe through `A ↦ f(A)`; entropy probes are left as they are.
    fn map_operators<F>(&self, f: &F) -> Result<Probe>
    where
        F: Fn(&OperatorSum) -> Result<OperatorSum>,
    {
        Ok(match self {
            Probe::Expectation(op) => Probe::Expectation(f(op)?),
            Probe::Connected { pair, left, right } => Probe::Connected {
                pair: f(pair)?,
                left: f(left)?,
                right: f(right)?,
            },
            Probe::Entropy { .. } => self.clone(),
        })
    }
}

/// A series to record: its label and how to evaluate it.
#[derive(Debug, Clone)]
pub struct SeriesRequest {
    pub label: SeriesLabel,
    pub probe: Probe,
}

fn wrap_site(i: usize, r: usize, n: usize) -> usize {
    (i - 1 + r) % n + 1
}

/// `(1/N) Σ σ^z_i` as an operator.
pub fn magnetization_operator(n_spins: usize) -> OperatorSum {
    let mut op = OperatorSum::new(n_spins);
    for s in 1..=n_spins {
        op.push(PauliTerm::single(1.0 / n_spins as f64, s, Pauli::Z))
            .expect("in range");
    }
    op
}

pub fn z_operator(n_spins: usize, site: usize) -> Result<OperatorSum> {
    if site == 0 || site > n_spins {
        return Err(SpinError::SiteOutOfRange { site, n_spins });
    }
    OperatorSum::new(n_spins).with_term(PauliTerm::single(1.0, site, Pauli::Z))
}

/// `σ^z_a σ^z_b`; the identity when `a == b`.
pub fn zz_operator(n_spins: usize, a: usize, b: usize) -> Result<OperatorSum> {
    for site in [a, b] {
        if site == 0 || site > n_spins {
            return Err(SpinError::SiteOutOfRange { site, n_spins });
        }
    }
    let term = if a == b {
        PauliTerm::identity(1.0)
    } else {
        PauliTerm::new(1.0, vec![(a, Pauli::Z), (b, Pauli::Z)])?
    };
    OperatorSum::new(n_spins).with_term(term)
}

/// Plain operators for `kind` on an `n_spins` chain.
pub fn native_probe(kind: ObservableKind, n_spins: usize, base: LogBase) -> Result<Probe> {
    Ok(match kind {
        ObservableKind::Magnetization => Probe::Expectation(magnetization_operator(n_spins)),
        ObservableKind::Correlation { i, r } => {
            if i == 0 || i > n_spins {
                return Err(SpinError::SiteOutOfRange { site: i, n_spins });
            }
            let j = wrap_site(i, r, n_spins);
            Probe::Connected {
                pair: zz_operator(n_spins, i, j)?,
                left: z_operator(n_spins, i)?,
                right: z_operator(n_spins, j)?,
            }
        }
        ObservableKind::Entropy { n_sub } => {
            if n_sub == 0 || n_sub >= n_spins {
                return Err(SpinError::SubsystemOutOfRange { n_sub, n_spins });
            }
            Probe::Entropy { n_sub, base }
        }
    })
}

/// `(1/N) Σ_i ⟨σ^z_i⟩`
pub fn magnetization(v: &StateVector) -> f64 {
    let n = v.n_spins();
    v.amplitudes()
        .iter()
        .enumerate()
        .map(|(b, a)| a.norm_sqr() * (n as f64 - 2.0 * b.count_ones() as f64))
        .sum::<f64>()
        / n as f64
}

/// `⟨σ^z_i σ^z_{i+r}⟩ − ⟨σ^z_i⟩⟨σ^z_{i+r}⟩` with periodic wrap.
pub fn correlation(v: &StateVector, i: usize, r: usize) -> Result<f64> {
    let n = v.n_spins();
    if i == 0 || i > n {
        return Err(SpinError::SiteOutOfRange { site: i, n_spins: n });
    }
    let j = wrap_site(i, r, n);
    let (mut zz, mut zi, mut zj) = (0.0, 0.0, 0.0);
    for (b, a) in v.amplitudes().iter().enumerate() {
        let p = a.norm_sqr();
        let si = 1.0 - 2.0 * site_bit(b, i, n) as f64;
        let sj = 1.0 - 2.0 * site_bit(b, j, n) as f64;
        zz += p * si * sj;
        zi += p * si;
        zj += p * sj;
    }
    Ok(zz - zi * zj)
}

/// Natural-log von Neumann entropy of the first `n_sub` sites.
pub fn entanglement_entropy(v: &StateVector, n_sub: usize) -> Result<f64> {
    entanglement_entropy_in(v, n_sub, LogBase::Natural)
}

pub fn entanglement_entropy_in(v: &StateVector, n_sub: usize, base: LogBase) -> Result<f64> {
    Ok(partial_trace_prefix(v, n_sub)?.von_neumann_entropy(base))
}

/// Evolves `v0` once across the grid and samples every request at each point.
pub fn run_observable_series(
    h: &OperatorSum,
    v0: &StateVector,
    grid: &TimeGrid,
    requests: &[SeriesRequest],
    cfg: &EvolveConfig,
) -> Result<Vec<TimeSeries>> {
    if v0.n_spins() != h.n_spins() {
        return Err(SpinError::DimensionMismatch {
            expected: h.n_spins(),
            found: v0.n_spins(),
        });
    }
    if requests.is_empty() {
        return Ok(Vec::new());
    }
    let times = grid.times();
    let mut values: Vec<Vec<f64>> = vec![Vec::with_capacity(times.len()); requests.len()];
    let mut state = evolve(h, v0, grid.t_start(), cfg)?;
    let mut now = grid.t_start();
    for &t in &times {
        if t > now {
            state = evolve(h, &state, t - now, cfg)?;
            now = t;
        }
        for (req, out) in requests.iter().zip(values.iter_mut()) {
            out.push(req.probe.evaluate(&state)?);
        }
    }
    Ok(requests
        .iter()
        .zip(values)
        .map(|(req, values)| TimeSeries {
            grid: grid.clone(),
            label: req.label.clone(),
            values,
        })
        .collect())
}

pub mod comparison;
pub use comparison::*;
