use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpinError {
    #[error("dimension mismatch: expected {expected} spins, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("amplitude array has length {len}, expected 2^{n_spins}")]
    BadLength { n_spins: usize, len: usize },

    #[error("site {site} out of range for a chain of {n_spins} spins")]
    SiteOutOfRange { site: usize, n_spins: usize },

    #[error("invalid couplings: {0}")]
    InvalidCouplings(String),

    #[error("block {block} is degenerate (J = Gamma = 0); truncation undefined")]
    DegenerateBlock { block: usize },

    #[error("unexpected block spectrum: {0}")]
    UnexpectedSpectrum(String),

    #[error("truncated state vanishes: the initial state has no weight in the kept subspace")]
    ZeroTruncatedState,

    #[error("subsystem size {n_sub} must satisfy 1 <= n_sub < {n_spins}")]
    SubsystemOutOfRange { n_sub: usize, n_spins: usize },

    #[error("dense matrix of {n_spins} spins exceeds the cap of {cap}")]
    DenseCapExceeded { n_spins: usize, cap: usize },

    #[error("negative evolution time {0}")]
    NegativeTime(f64),

    #[error("Krylov evolution did not converge: residual estimate {residual:e} at dimension {dim}")]
    KrylovNotConverged { residual: f64, dim: usize },

    #[error("operator term spans {blocks} blocks; at most two are supported")]
    TermSpansTooManyBlocks { blocks: usize },

    #[error("series mismatch: {0}")]
    SeriesMismatch(String),

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("fit error: {0}")]
    Fit(String),

    #[error("fit did not converge after {iterations} iterations (a = {a}, b = {b}, c = {c})")]
    FitNotConverged { iterations: usize, a: f64, b: f64, c: f64 },
}

pub type Result<T> = std::result::Result<T, SpinError>;
