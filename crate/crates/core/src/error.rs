use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("malformed graph: {0}")]
    MalformedGraph(String),

    #[error("iteration cap of {cap} reached (last value {last}, residual {residual:e})")]
    IterationCap { cap: usize, last: f64, residual: f64 },

    #[error("search budget of {budget} connected sets exceeded")]
    BudgetExceeded { budget: u64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("origin vertex {0} is never occupied")]
    OriginNeverOccupied(usize),

    #[error("degenerate offspring law: P(xi < {k}) > 0, so the critical probability is 1")]
    DegenerateOffspring { k: usize },

    #[error("anchored bound inapplicable: h + 2k = {lhs} does not exceed d = {d}")]
    AnchoredInapplicable { lhs: f64, d: usize },

    #[error("pruning collapsed to a single vertex after {completed} of {requested} rounds")]
    PruneCollapsed { completed: usize, requested: usize },

    #[error("non-monotone sample path at p = {p}")]
    NonMonotone { p: f64 },
}

impl Error {
    /// Stable snake_case name of the variant, for machine-readable reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Self::InvalidParameter(_) => "invalid_parameter",
            Self::Parse { .. } => "parse",
            Self::MalformedGraph(_) => "malformed_graph",
            Self::IterationCap { .. } => "iteration_cap",
            Self::BudgetExceeded { .. } => "budget_exceeded",
            Self::Precondition(_) => "precondition",
            Self::Inconclusive(_) => "inconclusive",
            Self::OriginNeverOccupied(_) => "origin_never_occupied",
            Self::DegenerateOffspring { .. } => "degenerate_offspring",
            Self::AnchoredInapplicable { .. } => "anchored_inapplicable",
            Self::PruneCollapsed { .. } => "prune_collapsed",
            Self::NonMonotone { .. } => "non_monotone",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
