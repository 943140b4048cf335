//! Error type shared by the whole crate.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, DsdError>;

/// Everything that can go wrong across parsing, validation, fitting and the
/// study harnesses.
#[derive(Debug, Error)]
pub enum DsdError {
    /// An interval with `lower > upper`, or a non-finite bound.
    #[error("invalid interval [{lower}, {upper}]{}: {reason}", fmt_ctx(.context))]
    InvalidInterval {
        lower: f64,
        upper: f64,
        /// Where the interval came from (unit label, row number, …).
        context: String,
        reason: &'static str,
    },

    /// A variable or table that does not satisfy a structural invariant
    /// (empty variable, mismatched lengths, duplicate labels, …).
    #[error("invalid data: {0}")]
    InvalidData(String),

    /// An argument outside its domain (quantile level outside `[0, 1]`,
    /// too few quadrature subintervals, zero shift, …).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// `ln(x + shift)` applied where `lower + shift <= 0`.
    #[error("log-shift transform undefined for unit {unit}: lower bound {lower} + shift {shift} is not positive")]
    LogShiftDomain { unit: String, lower: f64, shift: f64 },

    /// The design does not admit the requested fit (all-degenerate or
    /// all-symmetric column where strict convexity is required, constant
    /// centres in the single-predictor closed form, …).
    #[error("degenerate design: {0}")]
    DegenerateDesign(String),

    /// A baseline least-squares subproblem with a rank-deficient design.
    #[error("singular fit: {0}")]
    SingularFit(String),

    /// The active-set iteration cap was exceeded. The cap is generous
    /// (10 · (2p + 1)); hitting it indicates a malformed system rather than a
    /// hard problem, so no truncated answer is returned.
    #[error("active-set solver failed to converge within {cap} iterations")]
    Convergence { cap: usize },

    /// Malformed interval-table CSV. `row` is 1-based and counts the header.
    #[error("table parse error at row {row}{}: {message}", fmt_col(.column))]
    TableFormat {
        row: usize,
        column: Option<String>,
        message: String,
    },

    /// Malformed model file.
    #[error("model file error: {0}")]
    ModelFormat(String),

    /// Malformed study configuration.
    #[error("study config error: {0}")]
    ConfigFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

fn fmt_ctx(context: &str) -> String {
    if context.is_empty() {
        String::new()
    } else {
        format!(" ({context})")
    }
}

fn fmt_col(column: &Option<String>) -> String {
    match column {
        Some(c) => format!(", column {c}"),
        None => String::new(),
    }
}
