//! Reproduction grids: the published natural-error-rate tables and the
//! data behind the distribution/PD-curve/error-rate figures, all from
//! the 17-grade correlated-binomial example model.

use override_bound::calibration::{
    correlated_binomial_profile, quasi_moment_match, CorrelatedBinomialParams,
};
use override_bound::error_rate::{
    natural_error_rate, natural_error_rate_from_ar, super_grade_pds, super_grade_pds_binormal,
};
use override_bound::rating::{bayes_invert, RatingProfile};
use override_bound::{Probability, Result};

use crate::output::{fmt6, Table};

/// The example model's profile parameters: 17 grades, mean driver 0.55,
/// overdispersion 0.1.
pub fn example_profile() -> Result<RatingProfile> {
    let params = CorrelatedBinomialParams::new(16, 0.55, 0.1)?;
    correlated_binomial_profile(&params)
}

/// Discrete quantities at target AR exactly 0 are evaluated in the
/// vanishing-slope limit: a perfectly flat curve is uninformative (the
/// risky set collapses and the error rate equals p), while the limit of
/// steepening curves is what the published AR=0 grid rows show. The
/// floor keeps the whole grid on the limit branch.
pub const AR_GRID_FLOOR: f64 = 1e-6;

fn grid_ar(ar: f64) -> f64 {
    ar.max(AR_GRID_FLOOR)
}

fn discrete_error_rate(profile: &RatingProfile, pd: f64, ar: f64) -> Result<f64> {
    let curve = quasi_moment_match(profile, Probability::new(pd)?, grid_ar(ar))?;
    Ok(natural_error_rate(profile, &curve.to_pd_curve())?.value())
}

/// Natural error rate as a function of AR: binormal closed form next to
/// the discrete example model at 1% and 10% portfolio PD.
pub fn table2() -> Result<Table> {
    error_rate_grid((0..=9).map(|i| i as f64 / 10.0))
}

/// The same three curves on a fine grid for plotting.
pub fn fig2() -> Result<Table> {
    error_rate_grid((0..=99).map(|i| i as f64 / 100.0))
}

fn error_rate_grid(ars: impl Iterator<Item = f64>) -> Result<Table> {
    let profile = example_profile()?;
    let mut table = Table::new(vec![
        "ar",
        "binormal",
        "discrete_pd_1pct",
        "discrete_pd_10pct",
    ]);
    for ar in ars {
        let binormal = natural_error_rate_from_ar(ar)?;
        table.row(vec![
            format!("{ar:.2}"),
            fmt6(binormal.value()),
            fmt6(discrete_error_rate(&profile, 0.01, ar)?),
            fmt6(discrete_error_rate(&profile, 0.10, ar)?),
        ]);
    }
    Ok(table)
}

/// Average safe/risky super-grade PDs (percent) as a function of AR at a
/// 1% portfolio PD, binormal and discrete.
pub fn table3() -> Result<Table> {
    let profile = example_profile()?;
    let p = Probability::new(0.01)?;
    let mut table = Table::new(vec![
        "ar_pct",
        "binormal_safe_pd_pct",
        "binormal_risky_pd_pct",
        "discrete_safe_pd_pct",
        "discrete_risky_pd_pct",
    ]);
    for ar_pct in (0..=90).step_by(10) {
        let ar = ar_pct as f64 / 100.0;
        let (b_risky, b_safe) = super_grade_pds_binormal(p, ar)?;
        let curve = quasi_moment_match(&profile, p, grid_ar(ar))?;
        let (d_risky, d_safe) = super_grade_pds(&profile, &curve.to_pd_curve())?;
        table.row(vec![
            ar_pct.to_string(),
            fmt6(b_safe.value() * 100.0),
            fmt6(b_risky.value() * 100.0),
            fmt6(d_safe.value() * 100.0),
            fmt6(d_risky.value() * 100.0),
        ]);
    }
    Ok(table)
}

/// Unconditional rating distribution next to the conditional ones
/// implied by a 5% portfolio PD at low (25%) and high (75%) AR.
pub fn fig1() -> Result<Table> {
    let profile = example_profile()?;
    let p = Probability::new(0.05)?;
    let low = bayes_invert(
        &profile,
        &quasi_moment_match(&profile, p, 0.25)?.to_pd_curve(),
    )?;
    let high = bayes_invert(
        &profile,
        &quasi_moment_match(&profile, p, 0.75)?.to_pd_curve(),
    )?;
    let mut table = Table::new(vec![
        "grade",
        "unconditional",
        "cond_default_ar25",
        "cond_survival_ar25",
        "cond_default_ar75",
        "cond_survival_ar75",
    ]);
    for grade in profile.scale().grades() {
        let i = grade - 1;
        table.row(vec![
            grade.to_string(),
            fmt6(profile.mass()[i]),
            fmt6(low.lik_default()[i]),
            fmt6(low.lik_survive()[i]),
            fmt6(high.lik_default()[i]),
            fmt6(high.lik_survive()[i]),
        ]);
    }
    Ok(table)
}

/// The fitted PD curves behind [`fig1`].
pub fn fig3() -> Result<Table> {
    let profile = example_profile()?;
    let p = Probability::new(0.05)?;
    let low = quasi_moment_match(&profile, p, 0.25)?.to_pd_curve();
    let high = quasi_moment_match(&profile, p, 0.75)?.to_pd_curve();
    let mut table = Table::new(vec!["grade", "pd_ar25", "pd_ar75"]);
    for grade in profile.scale().grades() {
        table.row(vec![
            grade.to_string(),
            fmt6(low.pd()[grade - 1]),
            fmt6(high.pd()[grade - 1]),
        ]);
    }
    Ok(table)
}
