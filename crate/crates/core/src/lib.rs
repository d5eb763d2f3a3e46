//! Natural error rate of statistical credit-rating models.
//!
//! A statistical rating model proposes grades which credit experts may
//! override. This crate computes the misclassification rate of the
//! cost-optimal two-super-grade ("risky"/"safe") overlay of a rating
//! model — its *natural error rate* — and uses it as an upper bound for
//! observed override rates.
//!
//! The bound can be obtained three ways:
//!
//! - from the conditional grade distributions of defaulters and
//!   survivors ([`error_rate::optimal_split`]),
//! - ex ante from the rating profile and the PD curve alone, via Bayes
//!   inversion ([`error_rate::natural_error_rate`]),
//! - from the accuracy ratio, in the binormal equal-variance case
//!   ([`error_rate::natural_error_rate_from_ar`]).
//!
//! [`calibration`] builds synthetic rating models (correlated-binomial
//! profiles with quasi-moment-matched logit PD curves) for ex-ante
//! studies, and [`monitoring`] turns override records plus the bound
//! into a structured assessment report.

pub mod calibration;
pub mod error;
pub mod error_rate;
pub mod monitoring;
pub mod numerics;
pub mod rating;

pub use error::{Error, Result};
pub use numerics::Probability;
