use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A matrix that must be symmetric is not.
    #[error("realizability violation: matrix not symmetric, max asymmetry {asymmetry:.3e} at ({row}, {col})")]
    RealizabilityViolation { row: usize, col: usize, asymmetry: f64 },

    /// `−½ΘA` is not symmetric, so `A` is not the drift of a closed system.
    #[error("drift is not physically realizable: asymmetry norm {asymmetry:.3e} exceeds {tolerance:.1e}")]
    NotRealizable { asymmetry: f64, tolerance: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("unknown port: {0}")]
    UnknownPort(String),

    #[error("invalid interconnection: {0}")]
    InvalidLink(String),

    #[error("algebraic loop is singular through ports [{}]", cycle.join(", "))]
    AlgebraicLoop { cycle: Vec<String> },

    #[error("construction inconsistency: steady-vector residual {residual:.3e} exceeds {tolerance:.1e}")]
    ConstructionInconsistency { residual: f64, tolerance: f64 },

    #[error("readout orientation error: C_o x̄_o deviates from all-ones by {deviation:.3e}")]
    ReadoutOrientation { deviation: f64 },

    #[error("positivity certificate violated: {0}")]
    LemmaViolation(String),

    #[error("integrator accuracy: z_p drifted by {drift:.3e} (tolerance {tolerance:.1e})")]
    IntegratorAccuracy { drift: f64, tolerance: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),
}
