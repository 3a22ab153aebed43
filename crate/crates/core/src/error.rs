//! Error type shared by the whole library.

use thiserror::Error;

/// Everything that can go wrong when building operators, evolving states
/// or evaluating dispersion relations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not unitary: residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    NotUnitary { residual: f64, tol: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("representation fails the algebra check: worst residual {residual:.3e} (tolerance {tol:.3e})")]
    InvalidRepresentation { residual: f64, tol: f64 },

    #[error("representation carries no third anticommuting element, required for the lambda = 2 coin family")]
    MissingAlpha2,

    #[error("momentum {k} lies outside the Brillouin zone [-{edge}, {edge}]")]
    OutsideBrillouinZone { k: f64, edge: f64 },

    #[error("internal cross-check `{name}` failed with residual {residual:.3e}")]
    CrossCheckFailed { name: &'static str, residual: f64 },

    #[error("no real frequency exists at k = {k} (defining relation value {value} > 1)")]
    NoRealFrequency { k: f64, value: f64 },

    #[error("state has zero norm; observables are undefined")]
    ZeroState,

    #[error("trajectory too short: need at least {need} steps, got {got}")]
    TooFewSteps { need: usize, got: usize },

    #[error("lattice needs at least 3 sites so the coin band does not self-overlap, got {0}")]
    LatticeTooSmall(usize),

    #[error("dense materialization is a test oracle, limited to 64 sites (requested {0})")]
    DenseTooLarge(usize),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
