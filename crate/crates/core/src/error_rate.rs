//! Misclassification-cost-optimal super-grade split and the natural
//! error rate, in both the discrete and the binormal closed forms.
//!
//! The split overlays a coarse two-grade system ("risky"/"safe") onto
//! the rating scale. With cost parameters inversely proportional to the
//! class probabilities, the risky set is simply the set of grades where
//! the defaulter likelihood exceeds the survivor likelihood, and the
//! misclassification rate of the overlay — the natural error rate — is
//! the proposed upper bound for rating-override rates.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{self, Probability};
use crate::rating::{bayes_invert, ConditionalDistributions, PdCurve, RatingProfile};

/// Misclassification costs: `cost_default_missed` (c_D) for classifying
/// a defaulter as safe, `cost_survivor_flagged` (c_N) for classifying a
/// survivor as risky.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostModel {
    cost_default_missed: f64,
    cost_survivor_flagged: f64,
}

impl CostModel {
    pub fn new(cost_default_missed: f64, cost_survivor_flagged: f64) -> Result<Self> {
        if !(cost_default_missed.is_finite() && cost_default_missed > 0.0)
            || !(cost_survivor_flagged.is_finite() && cost_survivor_flagged > 0.0)
        {
            return Err(Error::InvalidArgument(format!(
                "misclassification costs must be positive, got ({cost_default_missed}, {cost_survivor_flagged})"
            )));
        }
        Ok(Self {
            cost_default_missed,
            cost_survivor_flagged,
        })
    }

    pub fn cost_default_missed(&self) -> f64 {
        self.cost_default_missed
    }

    pub fn cost_survivor_flagged(&self) -> f64 {
        self.cost_survivor_flagged
    }
}

/// The standard cost choice, inversely proportional to the class
/// probabilities: (c_D, c_N) = (1/p, 1/(1−p)).
pub fn default_cost_model(p: Probability) -> Result<CostModel> {
    let p = p.value();
    if p <= 0.0 || p >= 1.0 {
        return Err(Error::Domain(format!(
            "inverse-probability costs need p strictly inside (0, 1), got {p}"
        )));
    }
    CostModel::new(1.0 / p, 1.0 / (1.0 - p))
}

/// The risky/safe partition of a rating scale with its expected
/// misclassification cost and error rate at inverse-probability costs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuperGradeSplit {
    risky_grades: BTreeSet<usize>,
    grade_count: usize,
    expected_cost: f64,
    error_rate: Probability,
}

impl SuperGradeSplit {
    /// The set J of grades classified as risky.
    pub fn risky_grades(&self) -> &BTreeSet<usize> {
        &self.risky_grades
    }

    /// The complementary safe set.
    pub fn safe_grades(&self) -> BTreeSet<usize> {
        (1..=self.grade_count)
            .filter(|g| !self.risky_grades.contains(g))
            .collect()
    }

    /// Expected misclassification cost at the split, with
    /// inverse-probability costs.
    pub fn expected_cost(&self) -> f64 {
        self.expected_cost
    }

    /// Misclassification rate of the two-grade overlay.
    pub fn error_rate(&self) -> Probability {
        self.error_rate
    }

    /// True when every grade landed on one side.
    pub fn is_degenerate(&self) -> bool {
        self.risky_grades.is_empty() || self.risky_grades.len() == self.grade_count
    }
}

/// Expected misclassification cost of flagging exactly the grades in
/// `risky`:
///
/// C = c_D p P[S ∉ risky | D] + c_N (1−p) P[S ∈ risky | N].
pub fn expected_cost(
    cond: &ConditionalDistributions,
    risky: &BTreeSet<usize>,
    costs: &CostModel,
) -> Result<f64> {
    for &grade in risky {
        if !cond.scale().contains(grade) {
            return Err(Error::InvalidArgument(format!(
                "risky set contains grade {grade}, outside the scale of {} grades",
                cond.scale().grade_count()
            )));
        }
    }
    let p = cond.unconditional_pd().value();
    let mut missed_defaulters = 0.0;
    let mut flagged_survivors = 0.0;
    for grade in cond.scale().grades() {
        if risky.contains(&grade) {
            flagged_survivors += cond.lik_survive()[grade - 1];
        } else {
            missed_defaulters += cond.lik_default()[grade - 1];
        }
    }
    Ok(costs.cost_default_missed() * p * missed_defaulters
        + costs.cost_survivor_flagged() * (1.0 - p) * flagged_survivors)
}

/// The cost-minimal split: risky set J = { s : ℓ_D(s) > ℓ_N(s) }
/// (strict; ties go to the safe side), with its error rate
///
/// ε = p Σ_{j∉J} ℓ_D(j) + (1−p) Σ_{j∈J} ℓ_N(j)
///
/// and its expected cost at inverse-probability costs.
pub fn optimal_split(cond: &ConditionalDistributions) -> SuperGradeSplit {
    let p = cond.unconditional_pd().value();
    let mut risky_grades = BTreeSet::new();
    let mut missed_defaulters = 0.0;
    let mut flagged_survivors = 0.0;
    for grade in cond.scale().grades() {
        let ld = cond.lik_default()[grade - 1];
        let ln = cond.lik_survive()[grade - 1];
        if ld > ln {
            risky_grades.insert(grade);
            flagged_survivors += ln;
        } else {
            missed_defaulters += ld;
        }
    }
    SuperGradeSplit {
        risky_grades,
        grade_count: cond.scale().grade_count(),
        // Inverse-probability costs make the cost the plain sum of the
        // two misclassified shares.
        expected_cost: missed_defaulters + flagged_survivors,
        error_rate: Probability::from_computed(
            p * missed_defaulters + (1.0 - p) * flagged_survivors,
        ),
    }
}

/// Natural error rate of a rating model given ex ante by its profile and
/// PD curve: Bayes inversion followed by the optimal split.
pub fn natural_error_rate(profile: &RatingProfile, curve: &PdCurve) -> Result<Probability> {
    let cond = bayes_invert(profile, curve)?;
    Ok(optimal_split(&cond).error_rate())
}

/// Average conditional PDs on the risky and safe super-grades,
/// (E[P[D|S] | S risky], E[P[D|S] | S safe]).
pub fn super_grade_pds(
    profile: &RatingProfile,
    curve: &PdCurve,
) -> Result<(Probability, Probability)> {
    let cond = bayes_invert(profile, curve)?;
    let p = cond.unconditional_pd().value();
    let split = optimal_split(&cond);
    if split.is_degenerate() {
        return Err(Error::SplitDegenerate {
            portfolio_pd: p,
            risky_is_empty: split.risky_grades().is_empty(),
        });
    }
    let mut risky_mass = 0.0;
    let mut risky_defaults = 0.0;
    let mut safe_mass = 0.0;
    let mut safe_defaults = 0.0;
    for grade in profile.scale().grades() {
        let m = profile.mass()[grade - 1];
        let d = m * curve.pd()[grade - 1];
        if split.risky_grades().contains(&grade) {
            risky_mass += m;
            risky_defaults += d;
        } else {
            safe_mass += m;
            safe_defaults += d;
        }
    }
    Ok((
        Probability::from_computed(risky_defaults / risky_mass),
        Probability::from_computed(safe_defaults / safe_mass),
    ))
}

/// Kolmogorov–Smirnov statistic of the two conditional distributions:
/// max_s |F_D(s) − F_N(s)|.
pub fn ks_statistic(cond: &ConditionalDistributions) -> f64 {
    let mut fd = 0.0;
    let mut fn_ = 0.0;
    let mut best = 0.0f64;
    for (ld, ln) in cond.lik_default().iter().zip(cond.lik_survive()) {
        fd += ld;
        fn_ += ln;
        best = best.max((fd - fn_).abs());
    }
    best
}

/// Equal-variance binormal score model: S_D ~ N(μ_D, σ), S_N ~ N(μ_N, σ)
/// with μ_D ≤ μ_N.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinormalModel {
    mu_default: f64,
    mu_survive: f64,
    sigma: f64,
}

impl BinormalModel {
    pub fn new(mu_default: f64, mu_survive: f64, sigma: f64) -> Result<Self> {
        if !(mu_default.is_finite() && mu_survive.is_finite() && sigma.is_finite()) {
            return Err(Error::InvalidArgument(
                "binormal parameters must be finite".into(),
            ));
        }
        if sigma <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "binormal sigma must be positive, got {sigma}"
            )));
        }
        if mu_default > mu_survive {
            return Err(Error::InvalidArgument(format!(
                "defaulter mean {mu_default} must not exceed survivor mean {mu_survive}"
            )));
        }
        Ok(Self {
            mu_default,
            mu_survive,
            sigma,
        })
    }

    pub fn mu_default(&self) -> f64 {
        self.mu_default
    }

    pub fn mu_survive(&self) -> f64 {
        self.mu_survive
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

/// AR = 2 Φ((μ_N − μ_D) / (√2 σ)) − 1.
pub fn accuracy_ratio_binormal(model: &BinormalModel) -> f64 {
    let d = (model.mu_survive - model.mu_default) / (std::f64::consts::SQRT_2 * model.sigma);
    2.0 * numerics::cdf(d) - 1.0
}

/// ε = Φ((μ_D − μ_N) / (2σ)); independent of the unconditional PD.
pub fn natural_error_rate_binormal(model: &BinormalModel) -> Probability {
    let d = (model.mu_default - model.mu_survive) / (2.0 * model.sigma);
    Probability::from_computed(numerics::cdf(d))
}

/// The binormal link between discriminatory power and the natural error
/// rate: ε = Φ(−Φ⁻¹((AR+1)/2) / √2).
///
/// Accepts any AR strictly inside (−1, 1); slightly negative empirical
/// estimates map through the same formula.
pub fn natural_error_rate_from_ar(ar: f64) -> Result<Probability> {
    if !ar.is_finite() || ar <= -1.0 || ar >= 1.0 {
        return Err(Error::Domain(format!(
            "accuracy ratio must lie strictly inside (-1, 1), got {ar}"
        )));
    }
    let q = numerics::quantile((ar + 1.0) / 2.0);
    Ok(Probability::from_computed(numerics::cdf(
        -q * std::f64::consts::FRAC_1_SQRT_2,
    )))
}

/// Binormal average conditional PDs on the risky and safe sides, given
/// the unconditional PD and the accuracy ratio:
///
/// risky = p(1−ε) / (p(1−ε) + (1−p)ε), safe = pε / (pε + (1−p)(1−ε)).
pub fn super_grade_pds_binormal(p: Probability, ar: f64) -> Result<(Probability, Probability)> {
    let p = p.value();
    if p <= 0.0 || p >= 1.0 {
        return Err(Error::Domain(format!(
            "unconditional PD must lie strictly inside (0, 1), got {p}"
        )));
    }
    let eps = natural_error_rate_from_ar(ar)?.value();
    let risky = p * (1.0 - eps) / (p * (1.0 - eps) + (1.0 - p) * eps);
    let safe = p * eps / (p * eps + (1.0 - p) * (1.0 - eps));
    Ok((
        Probability::from_computed(risky),
        Probability::from_computed(safe),
    ))
}
