use thiserror::Error;

/// Errors produced by the analysis pipeline.
///
/// State indices carried in variants are 0-based; `Display` renders them
/// 1-based so messages line up with model files and reports.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum NessError {
    #[error("model parse error: {0}")]
    Parse(String),

    #[error("invalid process: {}", .0.join("; "))]
    InvalidProcess(Vec<String>),

    #[error("state index {index} out of range for {n} states")]
    StateOutOfRange { index: usize, n: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("numerical failure: {what} (residual {residual:e})")]
    Numerical { what: String, residual: f64 },

    #[error("edge {}→{} has zero rate", .from + 1, .to + 1)]
    ZeroRateEdge { from: usize, to: usize },

    #[error("path must contain at least two vertices")]
    EmptyPath,

    #[error("process is not detailed balanced (max |I| = {max_current:e})")]
    DetailedBalanceRequired { max_current: f64 },

    #[error("path-ratio inconsistency {discrepancy:e} on edge {}→{}", .from + 1, .to + 1)]
    PathRatioInconsistency {
        from: usize,
        to: usize,
        discrepancy: f64,
    },

    #[error("state {} is unreachable (zero total flux)", .0 + 1)]
    UnreachableState(usize),

    #[error("flux field violates the node condition at state {} (imbalance {imbalance:e})", .state + 1)]
    NotSteadyState { state: usize, imbalance: f64 },

    #[error("cycle vertex {} repeated", .0 + 1)]
    NotSelfAvoiding(usize),

    #[error("cycle needs at least two vertices, got {0}")]
    CycleTooShort(usize),

    #[error("cycle catalog exceeds cap of {cap} cycles; restrict the graph or raise the cap")]
    CycleExplosion { cap: usize },

    #[error("{count} orderings exceed the cap of {cap}; use sampling mode with a seed instead")]
    TooManyOrderings { count: f64, cap: usize },

    #[error("ordering is not a permutation of the {0} catalog cycles")]
    BadOrdering(usize),

    #[error("internal consistency violated: {0}")]
    Internal(String),

    #[error("decomposition inconsistent at state {}: zero cycle weight but nonzero flux", .0 + 1)]
    DecompositionInconsistency(usize),

    #[error("normalization Σ m τ = {value} deviates from 1")]
    Normalization { value: f64 },

    #[error("cycle observable missing for cycle {0}")]
    MissingCycleValue(String),

    #[error("entropy production diverges: edge {}→{} has no reverse transition", .from + 1, .to + 1)]
    DivergentEntropy { from: usize, to: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl NessError {
    /// Process exit code used by the CLI for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            NessError::Parse(_) => 2,
            NessError::InvalidProcess(_)
            | NessError::StateOutOfRange { .. }
            | NessError::Dimension { .. }
            | NessError::ZeroRateEdge { .. }
            | NessError::EmptyPath
            | NessError::DetailedBalanceRequired { .. }
            | NessError::UnreachableState(_)
            | NessError::NotSteadyState { .. }
            | NessError::NotSelfAvoiding(_)
            | NessError::CycleTooShort(_)
            | NessError::BadOrdering(_)
            | NessError::MissingCycleValue(_)
            | NessError::DivergentEntropy { .. }
            | NessError::InvalidArgument(_) => 3,
            NessError::CycleExplosion { .. } | NessError::TooManyOrderings { .. } => 4,
            NessError::Numerical { .. }
            | NessError::PathRatioInconsistency { .. }
            | NessError::Internal(_)
            | NessError::DecompositionInconsistency(_)
            | NessError::Normalization { .. } => 5,
        }
    }
}

pub type Result<T> = std::result::Result<T, NessError>;
