//! Crate-wide error type.

use thiserror::Error;

/// Errors reported by the rating, calibration and monitoring routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument violated a precondition (non-finite value, mismatched
    /// scales, grade outside the scale, malformed probability vector).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A value was outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The portfolio-level default probability is 0 or 1, so the
    /// conditional grade distributions are undefined.
    #[error("degenerate portfolio: unconditional default probability is {p}")]
    DegeneratePortfolio { p: f64 },

    /// A grade carries zero unconditional mass, so its conditional PD
    /// is undefined.
    #[error("grade {grade} has zero probability mass")]
    UndefinedGrade { grade: usize },

    /// Root bracketing failed: no sign change over the interval.
    #[error("no sign change of the objective over [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },

    /// A numerical routine produced or encountered a non-finite value.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// The requested accuracy ratio cannot be reached on the given
    /// discrete profile; `attainable` is the supremum of the reachable
    /// accuracy ratios (the perfect-separation limit).
    #[error(
        "calibration infeasible: target accuracy ratio {target} is at or above \
         the attainable supremum {attainable} for this profile"
    )]
    CalibrationInfeasible { target: f64, attainable: f64 },

    /// The optimal split put every grade on one side, so one super-grade
    /// is empty. The average PD of the nonempty side equals the
    /// portfolio PD, reported here.
    #[error(
        "degenerate super-grade split: the {} side is empty (the nonempty side has average PD {portfolio_pd})",
        if *.risky_is_empty { "risky" } else { "safe" }
    )]
    SplitDegenerate {
        portfolio_pd: f64,
        risky_is_empty: bool,
    },

    /// An operation that needs at least one record received none.
    #[error("empty input: {0}")]
    EmptyInput(String),

    /// An empirical estimate needs at least one default and one survivor.
    #[error("insufficient outcomes: {defaults} defaults, {survivors} survivors observed")]
    InsufficientOutcomes { defaults: usize, survivors: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
