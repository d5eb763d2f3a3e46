//! Synthetic rating models for ex-ante studies: correlated-binomial
//! rating profiles and logit PD curves fitted by quasi-moment matching.
//!
//! The profile of grades `1..=k_trials+1` comes from mixing a binomial
//! over a Gaussian systematic factor,
//!
//! P[X = x] = ∫ φ(y) C(k, x) G(λ, ϱ, y)ˣ (1 − G(λ, ϱ, y))^{k−x} dy,
//! G(λ, ϱ, y) = Φ((Φ⁻¹(λ) − √ϱ y) / √(1 − ϱ)),
//!
//! with S = X + 1. Quasi-moment matching then solves the logit
//! parameters (a, b) of P[D|S=s] = 1 / (1 + e^{a+bs}) so that the
//! implied unconditional PD and ex-ante accuracy ratio hit prescribed
//! targets.

use crate::error::{Error, Result};
use crate::numerics::{self, integrate_gaussian, Probability};
use crate::rating::{
    accuracy_ratio_ex_ante, unconditional_pd, PdCurve, RatingProfile, RatingScale,
};

/// Bracket-width tolerance of the nested one-dimensional solves.
const SOLVER_TOL: f64 = 1e-13;
/// Verified tolerance on the matched (PD, AR) targets.
const TARGET_TOL: f64 = 1e-9;
/// The slope bracket starts at [0, 50] and doubles up to this cap; the
/// logit curve is numerically a step function long before the cap.
const SLOPE_CAP: f64 = 1e5;

/// Parameters of the correlated binomial rating profile: `k_trials`
/// (grades minus one), `lambda` (mean driver) and `rho` (overdispersion
/// driver).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelatedBinomialParams {
    k_trials: usize,
    lambda: f64,
    rho: f64,
}

impl CorrelatedBinomialParams {
    pub fn new(k_trials: usize, lambda: f64, rho: f64) -> Result<Self> {
        if k_trials == 0 {
            return Err(Error::InvalidArgument(
                "the correlated binomial needs at least one trial".into(),
            ));
        }
        if !lambda.is_finite() || lambda <= 0.0 || lambda >= 1.0 {
            return Err(Error::InvalidArgument(format!(
                "lambda must lie strictly inside (0, 1), got {lambda}"
            )));
        }
        if !rho.is_finite() || !(0.0..1.0).contains(&rho) {
            return Err(Error::InvalidArgument(format!(
                "rho must lie in [0, 1), got {rho}"
            )));
        }
        Ok(Self {
            k_trials,
            lambda,
            rho,
        })
    }

    pub fn k_trials(&self) -> usize {
        self.k_trials
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// The mixing success probability G(λ, ϱ, y) at systematic factor y.
    fn mixing_probability(&self, y: f64) -> f64 {
        if self.rho == 0.0 {
            return self.lambda;
        }
        let z = (numerics::quantile(self.lambda) - self.rho.sqrt() * y) / (1.0 - self.rho).sqrt();
        numerics::cdf(z)
    }
}

/// Builds the rating profile on grades `1..=k_trials+1` with
/// mass(s) = P[X = s − 1] from the Gaussian-mixed binomial.
pub fn correlated_binomial_profile(params: &CorrelatedBinomialParams) -> Result<RatingProfile> {
    let k = params.k_trials;
    let mut mass = Vec::with_capacity(k + 1);
    for (x, c) in binomial_coefficients(k).into_iter().enumerate() {
        let pmf = integrate_gaussian(|y| {
            let g = params.mixing_probability(y);
            c * g.powi(x as i32) * (1.0 - g).powi((k - x) as i32)
        })?;
        // Quadrature can undershoot zero by roundoff on far-tail cells.
        if pmf < -1e-12 {
            return Err(Error::Numeric(format!(
                "correlated binomial mass at x={x} came out negative: {pmf}"
            )));
        }
        mass.push(pmf.max(0.0));
    }
    let total: f64 = mass.iter().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::Numeric(format!(
            "correlated binomial masses sum to {total}, expected 1"
        )));
    }
    let scale = RatingScale::new(k + 1)?;
    RatingProfile::new(scale, mass.into_iter().map(|m| m / total).collect())
}

fn binomial_coefficients(k: usize) -> Vec<f64> {
    let mut c = Vec::with_capacity(k + 1);
    let mut value = 1.0f64;
    c.push(value);
    for i in 0..k {
        value = value * (k - i) as f64 / (i + 1) as f64;
        c.push(value);
    }
    c
}

/// The logit PD curve P[D|S=s] = 1 / (1 + e^{a + b s}); with grades
/// ascending in creditworthiness, a nonnegative slope keeps the curve
/// nonincreasing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogitPdCurve {
    scale: RatingScale,
    intercept: f64,
    slope: f64,
}

impl LogitPdCurve {
    pub fn new(scale: RatingScale, intercept: f64, slope: f64) -> Result<Self> {
        if !intercept.is_finite() || !slope.is_finite() {
            return Err(Error::InvalidArgument(
                "logit parameters must be finite".into(),
            ));
        }
        if slope < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "logit slope must be nonnegative, got {slope}"
            )));
        }
        Ok(Self {
            scale,
            intercept,
            slope,
        })
    }

    pub fn scale(&self) -> RatingScale {
        self.scale
    }

    pub fn intercept(&self) -> f64 {
        self.intercept
    }

    pub fn slope(&self) -> f64 {
        self.slope
    }

    /// Materializes the curve as a per-grade [`PdCurve`].
    pub fn to_pd_curve(&self) -> PdCurve {
        let pd = self
            .scale
            .grades()
            .map(|s| inverse_logit(self.intercept + self.slope * s as f64))
            .collect();
        PdCurve::new(self.scale, pd).expect("inverse logit stays inside [0, 1]")
    }
}

/// The PD of one grade under the curve.
pub fn logit_pd(curve: &LogitPdCurve, grade: usize) -> Result<Probability> {
    if !curve.scale.contains(grade) {
        return Err(Error::InvalidArgument(format!(
            "grade {grade} outside the scale of {} grades",
            curve.scale.grade_count()
        )));
    }
    Ok(Probability::from_computed(inverse_logit(
        curve.intercept + curve.slope * grade as f64,
    )))
}

/// 1 / (1 + e^t), evaluated without overflow for any t.
fn inverse_logit(t: f64) -> f64 {
    if t >= 0.0 {
        let e = (-t).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + t.exp())
    }
}

/// Supremum of the accuracy ratios reachable on `profile` at a fixed
/// unconditional PD: the AR of the perfect-separation limit, where
/// defaulters fill the lowest grades up to total mass `target_pd`.
pub fn attainable_ar_supremum(profile: &RatingProfile, target_pd: Probability) -> Result<f64> {
    let p = target_pd.value();
    if p <= 0.0 || p >= 1.0 {
        return Err(Error::Domain(format!(
            "target PD must lie strictly inside (0, 1), got {p}"
        )));
    }
    let mut below = 0.0; // cumulative mass strictly below the crossing grade
    for grade in profile.scale().grades() {
        let m = profile.mass()[grade - 1];
        let cum = below + m;
        if cum >= p {
            let p_lt = (cum - p) / (1.0 - p) * (below / p) + (1.0 - cum) / (1.0 - p);
            let p_eq = (p - below) * (cum - p) / (p * (1.0 - p));
            return Ok(2.0 * p_lt + p_eq - 1.0);
        }
        below = cum;
    }
    // Unreachable: the profile sums to 1 > p.
    Err(Error::Numeric(
        "profile mass never reached the target PD".into(),
    ))
}

/// Solves the logit parameters (a, b) so that the model built from
/// `profile` and the fitted curve has unconditional PD `target_pd` and
/// ex-ante accuracy ratio `target_ar`, both within 1e-9.
///
/// The two-dimensional system is solved as nested one-dimensional root
/// finds: for each candidate slope the intercept is matched to the PD
/// (the PD is strictly monotone in the intercept), and the outer solve
/// matches the accuracy ratio, which grows from 0 at zero slope towards
/// the profile's perfect-separation supremum.
pub fn quasi_moment_match(
    profile: &RatingProfile,
    target_pd: Probability,
    target_ar: f64,
) -> Result<LogitPdCurve> {
    let p = target_pd.value();
    if p <= 0.0 || p >= 1.0 {
        return Err(Error::Domain(format!(
            "target PD must lie strictly inside (0, 1), got {p}"
        )));
    }
    if !target_ar.is_finite() || target_ar < 0.0 {
        return Err(Error::Domain(format!(
            "target accuracy ratio must be nonnegative, got {target_ar}"
        )));
    }
    let supremum = attainable_ar_supremum(profile, target_pd)?;
    if target_ar >= supremum {
        return Err(Error::CalibrationInfeasible {
            target: target_ar,
            attainable: supremum,
        });
    }
    let scale = profile.scale();

    // A flat curve carries no ranking information: AR is exactly 0.
    if target_ar == 0.0 {
        return LogitPdCurve::new(scale, ((1.0 - p) / p).ln(), 0.0);
    }

    let intercept_for = |slope: f64| -> Result<f64> { match_intercept(profile, p, slope) };
    let ar_at = |slope: f64| -> Result<f64> {
        let a = intercept_for(slope)?;
        let curve = LogitPdCurve::new(scale, a, slope)?.to_pd_curve();
        accuracy_ratio_ex_ante(profile, &curve)
    };

    // Bracket the slope: AR is 0 at b = 0 and approaches the supremum as
    // the curve steepens into a step function.
    let mut hi = 50.0;
    while ar_at(hi)? < target_ar {
        hi *= 2.0;
        if hi > SLOPE_CAP {
            return Err(Error::CalibrationInfeasible {
                target: target_ar,
                attainable: ar_at(SLOPE_CAP)?,
            });
        }
    }
    let mut ar_err = Ok(());
    let slope = numerics::find_root(
        |b| match ar_at(b) {
            Ok(ar) => ar - target_ar,
            Err(e) => {
                ar_err = Err(e);
                f64::NAN
            }
        },
        0.0,
        hi,
        SOLVER_TOL.max(1e-11 * hi.max(1.0)),
    );
    ar_err?;
    let slope = slope?;
    let intercept = intercept_for(slope)?;
    let fitted = LogitPdCurve::new(scale, intercept, slope)?;

    // Verify both matched moments before handing the curve out.
    let curve = fitted.to_pd_curve();
    let got_pd = unconditional_pd(profile, &curve)?.value();
    let got_ar = accuracy_ratio_ex_ante(profile, &curve)?;
    if (got_pd - p).abs() > TARGET_TOL || (got_ar - target_ar).abs() > TARGET_TOL {
        return Err(Error::Numeric(format!(
            "quasi-moment matching left residuals (PD {:+.2e}, AR {:+.2e})",
            got_pd - p,
            got_ar - target_ar
        )));
    }
    Ok(fitted)
}

/// Solves the intercept for a fixed slope so that the implied
/// unconditional PD hits `target_pd`. The PD is strictly decreasing in
/// the intercept with limits 1 and 0, so a sign change always exists;
/// the initial bracket [−60, 60] widens geometrically when the slope
/// term pushes the root outside.
fn match_intercept(profile: &RatingProfile, target_pd: f64, slope: f64) -> Result<f64> {
    let pd_at = |a: f64| -> f64 {
        profile
            .scale()
            .grades()
            .map(|s| profile.mass()[s - 1] * inverse_logit(a + slope * s as f64))
            .sum()
    };
    let mut lo = -60.0;
    let mut hi = 60.0;
    while pd_at(lo) < target_pd {
        lo *= 2.0;
        if lo < -1e9 {
            return Err(Error::Numeric(
                "intercept bracket expansion failed on the low side".into(),
            ));
        }
    }
    while pd_at(hi) > target_pd {
        hi *= 2.0;
        if hi > 1e9 {
            return Err(Error::Numeric(
                "intercept bracket expansion failed on the high side".into(),
            ));
        }
    }
    numerics::find_root(|a| pd_at(a) - target_pd, lo, hi, SOLVER_TOL)
}
