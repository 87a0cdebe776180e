//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid coefficient arguments: n = {n}, k = {k}")]
    InvalidCoefficient { n: i64, k: i64 },

    #[error("tensor rank {rank} unsupported (max 4)")]
    UnsupportedRank { rank: usize },

    #[error("rank {rank} has no irreducible decomposition here (expected 2..=4)")]
    UndecomposableRank { rank: usize },

    #[error("dimension mismatch: {0}")]
    DimMismatch(String),

    #[error("temperature must be positive, got {0}")]
    NonPositiveTheta(f64),

    #[error("scale factor must be nonzero")]
    ZeroScale,

    #[error("relaxation time must be positive, got {0}")]
    NonPositiveTau(f64),

    #[error("conserved order {order} must vanish, has norm {norm:.3e}")]
    NonzeroConservedOrder { order: usize, norm: f64 },

    #[error("moments up to order {order} need quadrature degree >= {needed}, set `{set}` has degree {degree}")]
    OrderDegreeMismatch {
        order: usize,
        needed: u32,
        degree: u32,
        set: String,
    },

    #[error("population count {got} does not match velocity set size {expected}")]
    PopulationLength { got: usize, expected: usize },

    #[error("no positive-weight quadrature found (best residual {residual:.3e})")]
    InfeasibleWeights { residual: f64 },

    #[error("non-positive density {rho:.3e}{}", fmt_site(.site))]
    NonPositiveDensity { rho: f64, site: Option<Vec<usize>> },

    #[error("negative internal energy {energy:.3e}{}", fmt_site(.site))]
    NegativeInternalEnergy { energy: f64, site: Option<Vec<usize>> },

    #[error("simulation blew up at step {step}: {source}")]
    BlowUp {
        step: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("exponential fit is ill-conditioned (condition estimate {condition:.3e})")]
    IllConditionedFit { condition: f64 },

    #[error("time series too short: {len} samples, need at least {needed}")]
    SeriesTooShort { len: usize, needed: usize },

    #[error("perturbation amplitude {amplitude:.3e} exceeds the linear-regime bound {bound:.3e}")]
    AmplitudeTooLarge { amplitude: f64, bound: f64 },

    #[error("invalid experiment: {0}")]
    InvalidExperiment(String),

    #[error("velocity set file, line {line}: {msg}")]
    VelocitySetFile { line: usize, msg: String },

    #[error("velocity set construction failed: {0}")]
    SetConstruction(String),

    #[error("checkpoint: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn fmt_site(site: &Option<Vec<usize>>) -> String {
    match site {
        Some(cell) => format!(" at cell {:?}", cell),
        None => String::new(),
    }
}
