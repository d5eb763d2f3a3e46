//! Rating-scale data model and the Bayes relations between the
//! unconditional rating profile, the PD curve and the grade
//! distributions conditional on default and survival.
//!
//! By convention grades are `1..=k` with high grades meaning high
//! creditworthiness, so a sound PD curve is nonincreasing in the grade.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::Probability;

/// Tolerance for probability-vector sums on construction (file inputs
/// arrive with CSV round-off); vectors are renormalized afterwards.
const SUM_TOLERANCE: f64 = 1e-9;

/// A rating scale with performing grades `1..=k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RatingScale {
    grade_count: usize,
}

impl RatingScale {
    pub fn new(grade_count: usize) -> Result<Self> {
        if grade_count < 2 {
            return Err(Error::InvalidArgument(format!(
                "a rating scale needs at least 2 grades, got {grade_count}"
            )));
        }
        Ok(Self { grade_count })
    }

    pub fn grade_count(&self) -> usize {
        self.grade_count
    }

    /// Iterates the grades `1..=k`.
    pub fn grades(&self) -> impl Iterator<Item = usize> {
        1..=self.grade_count
    }

    pub fn contains(&self, grade: usize) -> bool {
        (1..=self.grade_count).contains(&grade)
    }
}

fn validate_probability_vector(scale: RatingScale, values: &[f64], what: &str) -> Result<()> {
    if values.len() != scale.grade_count() {
        return Err(Error::InvalidArgument(format!(
            "{what} has {} entries but the scale has {} grades",
            values.len(),
            scale.grade_count()
        )));
    }
    for (i, &v) in values.iter().enumerate() {
        if !v.is_finite() || !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidArgument(format!(
                "{what} entry for grade {} must lie in [0, 1], got {v}",
                i + 1
            )));
        }
    }
    Ok(())
}

/// The unconditional grade distribution P[S = s].
#[derive(Debug, Clone, PartialEq)]
pub struct RatingProfile {
    scale: RatingScale,
    mass: Vec<f64>,
}

impl RatingProfile {
    /// Validates that `mass` is a probability vector over the scale
    /// (sum within 1e-9 of one), then renormalizes it exactly.
    pub fn new(scale: RatingScale, mass: Vec<f64>) -> Result<Self> {
        validate_probability_vector(scale, &mass, "rating profile")?;
        let sum: f64 = mass.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidArgument(format!(
                "rating profile masses sum to {sum}, expected 1"
            )));
        }
        let mass = mass.into_iter().map(|m| m / sum).collect();
        Ok(Self { scale, mass })
    }

    pub fn scale(&self) -> RatingScale {
        self.scale
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    /// P[S = grade]; grades are 1-based.
    pub fn mass_at(&self, grade: usize) -> Result<f64> {
        self.mass
            .get(grade.wrapping_sub(1))
            .copied()
            .ok_or_else(|| Error::InvalidArgument(format!("grade {grade} outside the scale")))
    }
}

/// The PD curve: P[D | S = s] per grade.
#[derive(Debug, Clone, PartialEq)]
pub struct PdCurve {
    scale: RatingScale,
    pd: Vec<f64>,
}

impl PdCurve {
    pub fn new(scale: RatingScale, pd: Vec<f64>) -> Result<Self> {
        validate_probability_vector(scale, &pd, "PD curve")?;
        Ok(Self { scale, pd })
    }

    pub fn scale(&self) -> RatingScale {
        self.scale
    }

    pub fn pd(&self) -> &[f64] {
        &self.pd
    }

    pub fn pd_at(&self, grade: usize) -> Result<f64> {
        self.pd
            .get(grade.wrapping_sub(1))
            .copied()
            .ok_or_else(|| Error::InvalidArgument(format!("grade {grade} outside the scale")))
    }
}

/// Grade distributions conditional on default and on survival, together
/// with the unconditional PD that links them to the profile.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalDistributions {
    scale: RatingScale,
    lik_default: Vec<f64>,
    lik_survive: Vec<f64>,
    p: f64,
}

impl ConditionalDistributions {
    /// Builds the pair from externally estimated distributions; both
    /// vectors must sum to one within 1e-9 and are renormalized.
    pub fn new(
        scale: RatingScale,
        lik_default: Vec<f64>,
        lik_survive: Vec<f64>,
        p: Probability,
    ) -> Result<Self> {
        validate_probability_vector(scale, &lik_default, "default-conditional distribution")?;
        validate_probability_vector(scale, &lik_survive, "survival-conditional distribution")?;
        let p = p.value();
        if p <= 0.0 || p >= 1.0 {
            return Err(Error::DegeneratePortfolio { p });
        }
        let mut lik_default = lik_default;
        let mut lik_survive = lik_survive;
        for (vec, what) in [
            (&mut lik_default, "default-conditional distribution"),
            (&mut lik_survive, "survival-conditional distribution"),
        ] {
            let sum: f64 = vec.iter().sum();
            if (sum - 1.0).abs() > SUM_TOLERANCE {
                return Err(Error::InvalidArgument(format!(
                    "{what} sums to {sum}, expected 1"
                )));
            }
            vec.iter_mut().for_each(|v| *v /= sum);
        }
        Ok(Self {
            scale,
            lik_default,
            lik_survive,
            p,
        })
    }

    fn from_inversion(
        scale: RatingScale,
        lik_default: Vec<f64>,
        lik_survive: Vec<f64>,
        p: f64,
    ) -> Self {
        Self {
            scale,
            lik_default,
            lik_survive,
            p,
        }
    }

    pub fn scale(&self) -> RatingScale {
        self.scale
    }

    /// ℓ_D(s) = P[S = s | D].
    pub fn lik_default(&self) -> &[f64] {
        &self.lik_default
    }

    /// ℓ_N(s) = P[S = s | N].
    pub fn lik_survive(&self) -> &[f64] {
        &self.lik_survive
    }

    /// The unconditional default probability p.
    pub fn unconditional_pd(&self) -> Probability {
        Probability::from_computed(self.p)
    }

    /// F_D: cumulative distribution conditional on default.
    pub fn cdf_default(&self) -> Vec<f64> {
        cumsum(&self.lik_default)
    }

    /// F_N: cumulative distribution conditional on survival.
    pub fn cdf_survive(&self) -> Vec<f64> {
        cumsum(&self.lik_survive)
    }
}

fn cumsum(values: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    values
        .iter()
        .map(|v| {
            acc += v;
            acc
        })
        .collect()
}

fn check_scales(profile: &RatingProfile, curve: &PdCurve) -> Result<()> {
    if profile.scale() != curve.scale() {
        return Err(Error::InvalidArgument(format!(
            "profile has {} grades but the PD curve has {}",
            profile.scale().grade_count(),
            curve.scale().grade_count()
        )));
    }
    Ok(())
}

/// Portfolio-level default probability p = Σ_s P[D|S=s] P[S=s].
pub fn unconditional_pd(profile: &RatingProfile, curve: &PdCurve) -> Result<Probability> {
    check_scales(profile, curve)?;
    let p = profile
        .mass()
        .iter()
        .zip(curve.pd())
        .map(|(m, pd)| m * pd)
        .sum::<f64>();
    Ok(Probability::from_computed(p))
}

/// Inverts the Bayes relation: from the profile and the PD curve to the
/// grade distributions conditional on default and survival,
///
/// ℓ_D(s) = P[D|S=s] P[S=s] / p and ℓ_N(s) = (1 − P[D|S=s]) P[S=s] / (1 − p),
///
/// normalized only by the analytic p.
pub fn bayes_invert(profile: &RatingProfile, curve: &PdCurve) -> Result<ConditionalDistributions> {
    let p = unconditional_pd(profile, curve)?.value();
    if p <= 0.0 || p >= 1.0 {
        return Err(Error::DegeneratePortfolio { p });
    }
    let lik_default = profile
        .mass()
        .iter()
        .zip(curve.pd())
        .map(|(m, pd)| pd * m / p)
        .collect();
    let lik_survive = profile
        .mass()
        .iter()
        .zip(curve.pd())
        .map(|(m, pd)| (1.0 - pd) * m / (1.0 - p))
        .collect();
    Ok(ConditionalDistributions::from_inversion(
        profile.scale(),
        lik_default,
        lik_survive,
        p,
    ))
}

/// The Bayes posterior PD of a grade,
/// P[D|S=s] = p ℓ_D(s) / (p ℓ_D(s) + (1−p) ℓ_N(s)).
pub fn conditional_pd(cond: &ConditionalDistributions, grade: usize) -> Result<Probability> {
    if !cond.scale().contains(grade) {
        return Err(Error::InvalidArgument(format!(
            "grade {grade} outside the scale of {} grades",
            cond.scale().grade_count()
        )));
    }
    let idx = grade - 1;
    let num = cond.p * cond.lik_default[idx];
    let den = num + (1.0 - cond.p) * cond.lik_survive[idx];
    if den <= 0.0 {
        return Err(Error::UndefinedGrade { grade });
    }
    Ok(Probability::from_computed(num / den))
}

/// Accuracy ratio AR = 2 P[S_D < S_N] + P[S_D = S_N] − 1 for independent
/// draws S_D ~ ℓ_D and S_N ~ ℓ_N. The tie term is always included.
pub fn accuracy_ratio(cond: &ConditionalDistributions) -> f64 {
    let mut cdf_default_below = 0.0;
    let mut acc = 0.0;
    for (ld, ln) in cond.lik_default.iter().zip(&cond.lik_survive) {
        acc += ln * (2.0 * cdf_default_below + ld);
        cdf_default_below += ld;
    }
    acc - 1.0
}

/// Accuracy ratio predicted ex ante from the profile and the PD curve,
/// without estimating the conditional distributions first:
///
/// AR = [2 Σ_s (1−PD_s) m_s Σ_{t<s} PD_t m_t + Σ_s PD_s (1−PD_s) m_s²] / (p(1−p)) − 1.
pub fn accuracy_ratio_ex_ante(profile: &RatingProfile, curve: &PdCurve) -> Result<f64> {
    let p = unconditional_pd(profile, curve)?.value();
    if p <= 0.0 || p >= 1.0 {
        return Err(Error::DegeneratePortfolio { p });
    }
    let mut default_mass_below = 0.0;
    let mut acc = 0.0;
    for (m, pd) in profile.mass().iter().zip(curve.pd()) {
        let default_here = pd * m;
        let survive_here = (1.0 - pd) * m;
        acc += survive_here * (2.0 * default_mass_below + default_here);
        default_mass_below += default_here;
    }
    Ok(acc / (p * (1.0 - p)) - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn three_grade_example() -> (RatingProfile, PdCurve) {
        let scale = RatingScale::new(3).unwrap();
        let profile = RatingProfile::new(scale, vec![0.2, 0.5, 0.3]).unwrap();
        let curve = PdCurve::new(scale, vec![0.10, 0.05, 0.01]).unwrap();
        (profile, curve)
    }

    #[test]
    fn scale_rejects_fewer_than_two_grades() {
        assert!(RatingScale::new(0).is_err());
        assert!(RatingScale::new(1).is_err());
        assert_eq!(RatingScale::new(2).unwrap().grade_count(), 2);
    }

    #[test]
    fn profile_validates_and_renormalizes() {
        let scale = RatingScale::new(2).unwrap();
        assert!(RatingProfile::new(scale, vec![0.5, 0.6]).is_err());
        assert!(RatingProfile::new(scale, vec![-0.1, 1.1]).is_err());
        assert!(RatingProfile::new(scale, vec![0.5]).is_err());
        // CSV-grade round-off within 1e-9 is accepted and normalized away.
        let p = RatingProfile::new(scale, vec![0.5 + 3e-10, 0.5]).unwrap();
        let sum: f64 = p.mass().iter().sum();
        assert!((sum - 1.0).abs() < 1e-15);
    }

    #[test]
    fn unconditional_pd_weighted_sum() {
        let (profile, curve) = three_grade_example();
        let p = unconditional_pd(&profile, &curve).unwrap().value();
        assert!((p - 0.048).abs() <= 1e-15);

        let scale = RatingScale::new(2).unwrap();
        let uniform = RatingProfile::new(scale, vec![0.5, 0.5]).unwrap();
        let flat = PdCurve::new(scale, vec![0.02, 0.02]).unwrap();
        assert!((unconditional_pd(&uniform, &flat).unwrap().value() - 0.02).abs() < 1e-15);
    }

    #[test]
    fn mismatched_scales_are_rejected() {
        let profile = RatingProfile::new(RatingScale::new(2).unwrap(), vec![0.5, 0.5]).unwrap();
        let curve = PdCurve::new(RatingScale::new(3).unwrap(), vec![0.1, 0.05, 0.01]).unwrap();
        assert!(unconditional_pd(&profile, &curve).is_err());
    }

    #[test]
    fn bayes_invert_three_grade_example() {
        // Hand-arithmetic oracle: p = 0.048,
        // ℓ_D = (0.02, 0.025, 0.003)/0.048, ℓ_N = (0.18, 0.475, 0.297)/0.952.
        let (profile, curve) = three_grade_example();
        let cond = bayes_invert(&profile, &curve).unwrap();
        let want_default = [0.416_666_666_666_667, 0.520_833_333_333_333, 0.0625];
        let want_survive = [
            0.189_075_630_252_101,
            0.498_949_579_831_933,
            0.311_974_789_915_966,
        ];
        for i in 0..3 {
            assert!((cond.lik_default()[i] - want_default[i]).abs() < 1e-12);
            assert!((cond.lik_survive()[i] - want_survive[i]).abs() < 1e-12);
        }
        assert!((cond.unconditional_pd().value() - 0.048).abs() < 1e-15);
    }

    #[test]
    fn constant_curve_gives_uninformative_conditionals() {
        let scale = RatingScale::new(3).unwrap();
        let profile = RatingProfile::new(scale, vec![0.2, 0.5, 0.3]).unwrap();
        let curve = PdCurve::new(scale, vec![0.05, 0.05, 0.05]).unwrap();
        let cond = bayes_invert(&profile, &curve).unwrap();
        for i in 0..3 {
            assert!((cond.lik_default()[i] - profile.mass()[i]).abs() < 1e-14);
            assert!((cond.lik_survive()[i] - profile.mass()[i]).abs() < 1e-14);
        }
        assert!((accuracy_ratio(&cond)).abs() < 1e-14);
    }

    #[test]
    fn degenerate_portfolio_is_an_error() {
        let scale = RatingScale::new(2).unwrap();
        let profile = RatingProfile::new(scale, vec![0.5, 0.5]).unwrap();
        let all_default = PdCurve::new(scale, vec![1.0, 1.0]).unwrap();
        let none_default = PdCurve::new(scale, vec![0.0, 0.0]).unwrap();
        assert!(matches!(
            bayes_invert(&profile, &all_default),
            Err(Error::DegeneratePortfolio { .. })
        ));
        assert!(matches!(
            bayes_invert(&profile, &none_default),
            Err(Error::DegeneratePortfolio { .. })
        ));
    }

    #[test]
    fn per_grade_pd_of_zero_or_one_is_legal() {
        let scale = RatingScale::new(3).unwrap();
        let profile = RatingProfile::new(scale, vec![0.2, 0.5, 0.3]).unwrap();
        let curve = PdCurve::new(scale, vec![1.0, 0.5, 0.0]).unwrap();
        let cond = bayes_invert(&profile, &curve).unwrap();
        assert!((conditional_pd(&cond, 1).unwrap().value() - 1.0).abs() < 1e-15);
        assert!(conditional_pd(&cond, 3).unwrap().value() < 1e-15);
    }

    #[test]
    fn conditional_pd_round_trip() {
        let (profile, curve) = three_grade_example();
        let cond = bayes_invert(&profile, &curve).unwrap();
        for grade in profile.scale().grades() {
            let back = conditional_pd(&cond, grade).unwrap().value();
            assert!(
                (back - curve.pd_at(grade).unwrap()).abs() <= 1e-12,
                "grade {grade}"
            );
        }
    }

    #[test]
    fn conditional_pd_edge_cases() {
        let scale = RatingScale::new(2).unwrap();
        // Uninformative grade returns p; pure-defaulter grade returns 1.
        let cond = ConditionalDistributions::new(
            scale,
            vec![0.6, 0.4],
            vec![0.6, 0.4],
            Probability::new(0.07).unwrap(),
        )
        .unwrap();
        assert!((conditional_pd(&cond, 1).unwrap().value() - 0.07).abs() < 1e-15);

        let cond = ConditionalDistributions::new(
            scale,
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            Probability::new(0.07).unwrap(),
        )
        .unwrap();
        assert!((conditional_pd(&cond, 1).unwrap().value() - 1.0).abs() < 1e-15);
        // A grade with no mass on either side has no posterior.
        let cond = ConditionalDistributions::new(
            RatingScale::new(3).unwrap(),
            vec![1.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0],
            Probability::new(0.07).unwrap(),
        )
        .unwrap();
        assert!(matches!(
            conditional_pd(&cond, 2),
            Err(Error::UndefinedGrade { grade: 2 })
        ));
        assert!(conditional_pd(&cond, 9).is_err());
    }

    #[test]
    fn accuracy_ratio_three_grade_example() {
        // Brute-force oracle over all (s_D, s_N) pairs gives 0.358894,
        // identical through the ex-ante route.
        let (profile, curve) = three_grade_example();
        let cond = bayes_invert(&profile, &curve).unwrap();
        let want = 0.358_893_557_422_969;
        assert!((accuracy_ratio(&cond) - want).abs() < 1e-12);
        assert!((accuracy_ratio_ex_ante(&profile, &curve).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn accuracy_ratio_perfect_separation() {
        let scale = RatingScale::new(2).unwrap();
        let cond = ConditionalDistributions::new(
            scale,
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            Probability::new(0.1).unwrap(),
        )
        .unwrap();
        assert!((accuracy_ratio(&cond) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn empty_grades_do_not_change_the_accuracy_ratio() {
        let (profile, curve) = three_grade_example();
        let base = accuracy_ratio_ex_ante(&profile, &curve).unwrap();

        let padded_scale = RatingScale::new(5).unwrap();
        let padded_profile =
            RatingProfile::new(padded_scale, vec![0.2, 0.0, 0.5, 0.3, 0.0]).unwrap();
        let padded_curve = PdCurve::new(padded_scale, vec![0.10, 0.07, 0.05, 0.01, 0.001]).unwrap();
        let padded = accuracy_ratio_ex_ante(&padded_profile, &padded_curve).unwrap();
        assert!((base - padded).abs() < 1e-14);
    }
}
