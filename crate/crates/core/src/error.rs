use thiserror::Error;

use crate::network::Violation;
use crate::tropical::Semiring;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{op}: dimension mismatch between {left:?} and {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("{op}: expected a {expected} matrix, found {found}")]
    SemiringMismatch {
        op: &'static str,
        expected: Semiring,
        found: Semiring,
    },

    #[error("{semiring} matrix may not contain {entry} (at row {row}, column {col})")]
    ForbiddenInfinity {
        semiring: Semiring,
        entry: &'static str,
        row: usize,
        col: usize,
    },

    #[error("matrix of shape {rows}x{cols} needs {} entries, got {len}", rows * cols)]
    ShapeData { rows: usize, cols: usize, len: usize },

    #[error("shapes must be non-empty")]
    EmptyShape,

    #[error("scalar must be finite, got {0}")]
    NonFiniteScalar(String),

    #[error("agents {u} and {v} are not trading partners")]
    NotAnEdge { u: usize, v: usize },

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("global state contains +inf at agent {agent}, alternative {alternative}")]
    TopInState { agent: usize, alternative: usize },

    #[error("invalid range [{lo}, {hi}]")]
    InvalidRange { lo: f64, hi: f64 },

    #[error("edge probability must lie in [0, 1], got {0}")]
    InvalidProbability(f64),

    #[error("invalid run configuration: {0}")]
    InvalidConfig(String),

    #[error("malformed document: {0}")]
    Format(String),

    #[error("network violates modelling assumptions: {}", display_violations(.0))]
    AssumptionViolations(Vec<Violation>),

    #[error("trial {trial}: alpha increased at t = {t}")]
    NonMonotoneAlpha { trial: usize, t: usize },

    #[error("oracle misconfigured: {0}")]
    Oracle(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn display_violations(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}
