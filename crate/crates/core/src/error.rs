//! Error types shared across the library.

use thiserror::Error;

/// Errors produced by graph construction, numerics, and search.
#[derive(Debug, Error)]
pub enum Error {
    /// Ragged or empty biadjacency input.
    #[error("input shape error: {0}")]
    InputShape(String),

    /// A biadjacency entry outside {0, 1}.
    #[error("input value error: {0}")]
    InputValue(String),

    /// Arguments outside an operation's stated domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// An operation precondition (e.g. connectivity) does not hold.
    #[error("precondition error: {0}")]
    Precondition(String),

    /// A vertex partition that is not disjoint, nonempty, and covering.
    #[error("invalid partition: {0}")]
    Partition(String),

    /// Matrix dimension above the small-eigensolver limit.
    #[error("matrix dimension {dim} exceeds limit {limit}")]
    Dimension { dim: usize, limit: usize },

    /// Power iteration hit the iteration cap; carries the last bracketing
    /// interval on the squared spectral radius.
    #[error("power iteration did not converge; last interval [{low}, {high}]")]
    Convergence { low: f64, high: f64 },

    /// A scaled row sum exceeded phi^2 + tol. This never happens on valid
    /// inputs; it signals an implementation bug.
    #[error("certificate violation: max row sum {max_row_sum} > phi^2 {phi_sq} + {tol}")]
    CertificateViolation {
        max_row_sum: f64,
        phi_sq: f64,
        tol: f64,
    },

    /// Numeric tightness and the structural decomposition disagreed. This
    /// never happens on valid inputs; it signals an implementation bug.
    #[error("theorem violation: {0}")]
    TheoremViolation(String),

    /// Desk-scale cap exceeded.
    #[error("scale cap exceeded: {0}")]
    Scale(String),

    /// Graph file syntax error.
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse {
        line: usize,
        col: usize,
        msg: String,
    },

    /// Result-log I/O failure.
    #[error("log i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// Result-log record that does not parse.
    #[error("log format error: {0}")]
    LogFormat(String),
}

pub type Result<T> = std::result::Result<T, Error>;
