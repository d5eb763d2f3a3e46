//! Special functions and low-level numerical routines shared by the
//! other modules: standard normal CDF/quantile/density, Gaussian-weighted
//! quadrature and bracketed root finding.

mod normal;
mod quadrature;
mod roots;

pub use normal::{std_normal_cdf, std_normal_pdf, std_normal_quantile};
pub use quadrature::{integrate_gaussian, QuadratureRule, DEFAULT_GAUSS_HERMITE_NODES};
pub use roots::find_root;

pub(crate) use normal::{cdf, quantile};

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// A probability, guaranteed finite and inside `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Probability(f64);

impl Probability {
    /// Wraps `value`, rejecting anything outside `[0, 1]`.
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() || !(0.0..=1.0).contains(&value) {
            return Err(Error::InvalidArgument(format!(
                "probability must lie in [0, 1], got {value}"
            )));
        }
        Ok(Self(value))
    }

    /// Wraps an internally computed value, forgiving floating-point
    /// excursions of up to 1e-9 beyond the boundaries.
    pub(crate) fn from_computed(value: f64) -> Self {
        debug_assert!(
            value.is_finite() && (-1e-9..=1.0 + 1e-9).contains(&value),
            "computed probability out of range: {value}"
        );
        Self(value.clamp(0.0, 1.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `1 − p`.
    pub fn complement(self) -> Self {
        Self(1.0 - self.0)
    }
}

impl From<Probability> for f64 {
    fn from(p: Probability) -> f64 {
        p.0
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}
