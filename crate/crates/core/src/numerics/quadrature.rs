//! Gaussian-weighted quadrature: deterministic evaluation of
//! ∫ φ(y) f(y) dy over the real line.
//!
//! Nodes and weights come from a fixed Gauss–Hermite rule (roots of the
//! Hermite polynomial found by Newton iteration on the orthonormal
//! recurrence) rescaled from the physicists' weight e^{-t²} to the
//! standard normal density, so the weights sum to one.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Node count of the shared default rule. Integrands appearing in the
/// rating-profile construction are smooth, so 128 nodes leave a wide
/// margin over the required 1e-10 relative accuracy.
pub const DEFAULT_GAUSS_HERMITE_NODES: usize = 128;

/// A fixed quadrature rule against the standard normal weight:
/// ∫ φ(y) f(y) dy ≈ Σᵢ wᵢ f(yᵢ) with Σᵢ wᵢ = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    /// Builds the `n`-node Gauss–Hermite rule, exact for polynomials of
    /// degree up to `2n − 1` under the Gaussian weight.
    pub fn gauss_hermite(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "quadrature rule needs at least one node".into(),
            ));
        }
        let (t, w) = hermite_nodes(n)?;
        let sqrt2 = std::f64::consts::SQRT_2;
        let total: f64 = w.iter().sum();
        let nodes: Vec<f64> = t.iter().map(|&x| sqrt2 * x).collect();
        // Dividing by the actual sum (analytically sqrt(pi)) normalizes
        // the weights to exactly Σw = 1 within roundoff.
        let weights: Vec<f64> = w.iter().map(|&x| x / total).collect();
        debug_assert!(nodes.windows(2).all(|p| p[0] < p[1]));
        Ok(Self { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Evaluates ∫ φ(y) f(y) dy.
    pub fn integrate<F>(&self, f: F) -> Result<f64>
    where
        F: Fn(f64) -> f64,
    {
        let mut acc = 0.0;
        for (&y, &w) in self.nodes.iter().zip(&self.weights) {
            let v = f(y);
            if !v.is_finite() {
                return Err(Error::Numeric(format!(
                    "integrand returned {v} at node {y}"
                )));
            }
            acc += w * v;
        }
        Ok(acc)
    }
}

/// Integrates against the shared [`DEFAULT_GAUSS_HERMITE_NODES`]-node rule.
pub fn integrate_gaussian<F>(f: F) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    default_rule().integrate(f)
}

pub(crate) fn default_rule() -> &'static QuadratureRule {
    static RULE: OnceLock<QuadratureRule> = OnceLock::new();
    RULE.get_or_init(|| {
        QuadratureRule::gauss_hermite(DEFAULT_GAUSS_HERMITE_NODES)
            .expect("default Gauss-Hermite rule is well-formed")
    })
}

/// Roots and weights of the physicists' Hermite polynomial H_n.
///
/// Newton iteration on the orthonormal three-term recurrence; weights
/// are 2 / H'ₙ(tᵢ)² in the orthonormal normalization and sum to √π.
fn hermite_nodes(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    const PI_POW_NEG_QUARTER: f64 = 0.751_125_544_464_942_5;
    const MAX_NEWTON: usize = 200;

    let mut t = vec![0.0; n];
    let mut w = vec![0.0; n];
    let half = n.div_ceil(2);
    let nf = n as f64;

    let mut z = 0.0f64;
    for i in 0..half {
        // Asymptotic initial guesses for the i-th largest root.
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * t[n - 1],
            3 => 1.91 * z - 0.91 * t[n - 2],
            _ => 2.0 * z - t[n - i + 1],
        };

        let mut deriv = 0.0;
        let mut converged = false;
        for _ in 0..MAX_NEWTON {
            // Evaluate the orthonormal Hermite polynomial at z.
            let mut p1 = PI_POW_NEG_QUARTER;
            let mut p2 = 0.0;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
            }
            deriv = (2.0 * nf).sqrt() * p2;
            let z_next = z - p1 / deriv;
            let done = (z - z_next).abs() <= 1e-15 * z.abs().max(1.0);
            z = z_next;
            if done {
                converged = true;
                break;
            }
        }
        if !converged || !z.is_finite() {
            return Err(Error::Numeric(format!(
                "Hermite root {i} of {n} did not converge"
            )));
        }

        t[n - 1 - i] = z;
        t[i] = -z;
        w[n - 1 - i] = 2.0 / (deriv * deriv);
        w[i] = w[n - 1 - i];
    }
    Ok((t, w))
}
