//! Override monitoring: observed override rates, policy checks,
//! direction imbalance, empirical discriminatory power pre and post
//! overrides, and the period-end assessment against the natural-error-
//! rate bound.

use std::collections::BTreeMap;
use std::fmt;

use chrono::NaiveDate;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::error_rate::natural_error_rate;
use crate::numerics::Probability;
use crate::rating::{PdCurve, RatingProfile, RatingScale};

/// One rating action: the model's proposal, the experts' final grade,
/// and optionally the borrower's one-period default outcome.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OverrideRecord {
    pub borrower_id: String,
    pub rating_date: NaiveDate,
    pub proposed_grade: usize,
    pub final_grade: usize,
    pub reason_code: Option<String>,
    pub default_within_period: Option<bool>,
}

impl OverrideRecord {
    /// True when the final rating differs from the proposal.
    pub fn is_override(&self) -> bool {
        self.final_grade != self.proposed_grade
    }
}

/// Restrictions a bank may impose on overrides. High grades mean high
/// creditworthiness, so `no_override_at_or_above` protects proposals at
/// or better than the threshold grade, and a downgrade means a lower
/// final grade.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct OverridePolicy {
    /// Proposals at or above this grade must not be overridden (k*).
    pub no_override_at_or_above: Option<usize>,
    /// Overrides must move at least this many grades: |g − g*| ≥ band.
    pub min_band: Option<usize>,
    /// Only downgrades (final below proposed) are allowed.
    pub downgrade_only: bool,
}

impl OverridePolicy {
    pub fn validate(&self, scale: RatingScale) -> Result<()> {
        if let Some(threshold) = self.no_override_at_or_above {
            if threshold >= scale.grade_count() || threshold < 1 {
                return Err(Error::InvalidArgument(format!(
                    "no-override threshold {threshold} must lie in 1..{}",
                    scale.grade_count()
                )));
            }
        }
        if let Some(band) = self.min_band {
            if band < 1 {
                return Err(Error::InvalidArgument(
                    "minimum override band must be at least 1".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Which restriction a record breached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PolicyRule {
    /// Override of a proposal at or above the protected grade.
    ProtectedGradeOverridden,
    /// Override moved fewer grades than the minimum band.
    BandTooNarrow,
    /// Upgrade under a downgrade-only policy.
    UpgradeNotAllowed,
}

/// A reference to a record that breached a restriction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PolicyViolation {
    /// Index into the assessed record slice.
    pub record_index: usize,
    pub borrower_id: String,
    pub rule: PolicyRule,
    pub detail: String,
}

/// Thresholds of the assessment, for the knobs the monitoring framework
/// leaves to the institution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ToleranceConfig {
    /// Slack added to the bound before the breach comparison; the bound
    /// is a hard upper limit, so the default is 0.
    pub bound_slack: f64,
    /// Minimum drop of the post-override AR below the pre-override AR
    /// before it is flagged. No standard default exists; 0 flags any drop.
    pub ar_drop_tolerance: f64,
    /// An imbalance is flagged when the minority direction falls below
    /// this share of all overrides ...
    pub imbalance_minority_share: f64,
    /// ... and at least this many overrides were observed.
    pub imbalance_min_overrides: usize,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            bound_slack: 0.0,
            ar_drop_tolerance: 0.0,
            imbalance_minority_share: 0.25,
            imbalance_min_overrides: 20,
        }
    }
}

/// Structured findings of the period-end assessment.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "code")]
pub enum Verdict {
    /// The observed override rate breached the bound: either too many
    /// overrides or lower discriminatory power than predicted — the
    /// rating process needs corrective action.
    OverrideRateAboveBound { observed: f64, bound: f64 },
    /// Informational: the rate is within the bound; confirm due process
    /// is followed, the model may be better than predicted.
    OverrideRateBelowBoundNote { observed: f64, bound: f64 },
    /// Discriminatory power after overrides fell below the power before
    /// overrides by more than the tolerance.
    PostArBelowPreAr { ar_pre: f64, ar_post: f64 },
    /// Mostly upward overrides: possible PD overestimation.
    UpwardImbalance {
        n_upgrades: usize,
        n_downgrades: usize,
    },
    /// Mostly downward overrides: possible PD underestimation.
    DownwardImbalance {
        n_upgrades: usize,
        n_downgrades: usize,
    },
    /// One or more records breached the override policy.
    PolicyViolations { count: usize },
}

impl Verdict {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Verdict::OverrideRateAboveBound { .. } => "OVERRIDE_RATE_ABOVE_BOUND",
            Verdict::OverrideRateBelowBoundNote { .. } => "OVERRIDE_RATE_BELOW_BOUND_NOTE",
            Verdict::PostArBelowPreAr { .. } => "POST_AR_BELOW_PRE_AR",
            Verdict::UpwardImbalance { .. } => "UPWARD_IMBALANCE",
            Verdict::DownwardImbalance { .. } => "DOWNWARD_IMBALANCE",
            Verdict::PolicyViolations { .. } => "POLICY_VIOLATIONS",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::OverrideRateAboveBound { observed, bound } => write!(
                f,
                "{}: observed rate {observed:.6} exceeds the natural error rate {bound:.6}",
                self.code()
            ),
            Verdict::OverrideRateBelowBoundNote { observed, bound } => write!(
                f,
                "{}: observed rate {observed:.6} is within the natural error rate {bound:.6}",
                self.code()
            ),
            Verdict::PostArBelowPreAr { ar_pre, ar_post } => write!(
                f,
                "{}: AR fell from {ar_pre:.6} before overrides to {ar_post:.6} after",
                self.code()
            ),
            Verdict::UpwardImbalance {
                n_upgrades,
                n_downgrades,
            } => write!(
                f,
                "{}: {n_upgrades} upgrades vs {n_downgrades} downgrades; possible PD overestimation",
                self.code()
            ),
            Verdict::DownwardImbalance {
                n_upgrades,
                n_downgrades,
            } => write!(
                f,
                "{}: {n_upgrades} upgrades vs {n_downgrades} downgrades; possible PD underestimation",
                self.code()
            ),
            Verdict::PolicyViolations { count } => {
                write!(f, "{}: {count} records breached the override policy", self.code())
            }
        }
    }
}

/// The period-end monitoring report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonitoringReport {
    pub n_actions: usize,
    pub n_overrides: usize,
    pub override_rate: f64,
    /// Ex-ante natural error rate of the model, the bound for the rate.
    pub natural_error_rate: f64,
    pub bound_breached: bool,
    pub n_upgrades: usize,
    pub n_downgrades: usize,
    /// Empirical AR of proposed grades vs outcomes, when outcomes allow.
    pub ar_pre: Option<f64>,
    /// Empirical AR of final grades vs outcomes, when outcomes allow.
    pub ar_post: Option<f64>,
    pub policy_violations: Vec<PolicyViolation>,
    pub verdicts: Vec<Verdict>,
}

/// Share of rating actions whose final grade differs from the proposal.
pub fn override_rate(records: &[OverrideRecord]) -> Result<Probability> {
    if records.is_empty() {
        return Err(Error::EmptyInput(
            "override rate needs at least one rating action".into(),
        ));
    }
    let overrides = records.iter().filter(|r| r.is_override()).count();
    Ok(Probability::from_computed(
        overrides as f64 / records.len() as f64,
    ))
}

/// One violation entry per record breaching an active restriction.
pub fn check_policy(records: &[OverrideRecord], policy: &OverridePolicy) -> Vec<PolicyViolation> {
    let mut violations = Vec::new();
    for (index, record) in records.iter().enumerate() {
        if !record.is_override() {
            continue;
        }
        let g_star = record.proposed_grade;
        let g = record.final_grade;
        if let Some(threshold) = policy.no_override_at_or_above {
            if g_star >= threshold {
                violations.push(PolicyViolation {
                    record_index: index,
                    borrower_id: record.borrower_id.clone(),
                    rule: PolicyRule::ProtectedGradeOverridden,
                    detail: format!("proposed grade {g_star} is protected at or above {threshold}"),
                });
            }
        }
        if let Some(band) = policy.min_band {
            if g.abs_diff(g_star) < band {
                violations.push(PolicyViolation {
                    record_index: index,
                    borrower_id: record.borrower_id.clone(),
                    rule: PolicyRule::BandTooNarrow,
                    detail: format!(
                        "override moved {} grades, policy requires at least {band}",
                        g.abs_diff(g_star)
                    ),
                });
            }
        }
        if policy.downgrade_only && g > g_star {
            violations.push(PolicyViolation {
                record_index: index,
                borrower_id: record.borrower_id.clone(),
                rule: PolicyRule::UpgradeNotAllowed,
                detail: format!("upgrade from {g_star} to {g} under a downgrade-only policy"),
            });
        }
    }
    violations
}

/// Counts of upgrades (final above proposed) and downgrades (final
/// below proposed).
pub fn direction_balance(records: &[OverrideRecord]) -> (usize, usize) {
    let mut upgrades = 0;
    let mut downgrades = 0;
    for record in records {
        if record.final_grade > record.proposed_grade {
            upgrades += 1;
        } else if record.final_grade < record.proposed_grade {
            downgrades += 1;
        }
    }
    (upgrades, downgrades)
}

/// Accuracy ratio estimated from observed (grade, defaulted) pairs: the
/// tie-including rank statistic on the empirical conditional frequency
/// distributions. Needs at least one default and one survivor.
pub fn empirical_ar(grade_outcome_pairs: &[(usize, bool)]) -> Result<f64> {
    let mut counts: BTreeMap<usize, (u64, u64)> = BTreeMap::new();
    let mut defaults = 0u64;
    let mut survivors = 0u64;
    for &(grade, defaulted) in grade_outcome_pairs {
        let entry = counts.entry(grade).or_insert((0, 0));
        if defaulted {
            entry.0 += 1;
            defaults += 1;
        } else {
            entry.1 += 1;
            survivors += 1;
        }
    }
    if defaults == 0 || survivors == 0 {
        return Err(Error::InsufficientOutcomes {
            defaults: defaults as usize,
            survivors: survivors as usize,
        });
    }
    let mut default_mass_below = 0.0;
    let mut acc = 0.0;
    for (d, n) in counts.values() {
        let ld = *d as f64 / defaults as f64;
        let ln = *n as f64 / survivors as f64;
        acc += ln * (2.0 * default_mass_below + ld);
        default_mass_below += ld;
    }
    Ok(acc - 1.0)
}

/// Runs the period-end checks and assembles the report: override rate
/// against the ex-ante natural error rate, policy compliance, direction
/// imbalance, and discriminatory power before and after overrides when
/// outcome flags permit.
pub fn assess(
    records: &[OverrideRecord],
    profile: &RatingProfile,
    curve: &PdCurve,
    policy: &OverridePolicy,
    config: &ToleranceConfig,
) -> Result<MonitoringReport> {
    if records.is_empty() {
        return Err(Error::EmptyInput(
            "assessment needs at least one rating action".into(),
        ));
    }
    let scale = profile.scale();
    policy.validate(scale)?;
    for (index, record) in records.iter().enumerate() {
        if !scale.contains(record.proposed_grade) || !scale.contains(record.final_grade) {
            return Err(Error::InvalidArgument(format!(
                "record {index} ({}) has grades ({}, {}) outside the scale of {} grades",
                record.borrower_id,
                record.proposed_grade,
                record.final_grade,
                scale.grade_count()
            )));
        }
    }

    let bound = natural_error_rate(profile, curve)?.value();
    let observed = override_rate(records)?.value();
    let n_actions = records.len();
    let n_overrides = records.iter().filter(|r| r.is_override()).count();
    let (n_upgrades, n_downgrades) = direction_balance(records);
    let bound_breached = observed > bound + config.bound_slack;

    // Records without an outcome flag contribute to the rate and
    // imbalance statistics but not to the AR estimates.
    let pre_pairs: Vec<(usize, bool)> = records
        .iter()
        .filter_map(|r| r.default_within_period.map(|d| (r.proposed_grade, d)))
        .collect();
    let post_pairs: Vec<(usize, bool)> = records
        .iter()
        .filter_map(|r| r.default_within_period.map(|d| (r.final_grade, d)))
        .collect();
    let ar_pre = empirical_ar(&pre_pairs).ok();
    let ar_post = empirical_ar(&post_pairs).ok();

    let policy_violations = check_policy(records, policy);

    let mut verdicts = Vec::new();
    if bound_breached {
        verdicts.push(Verdict::OverrideRateAboveBound { observed, bound });
    } else {
        verdicts.push(Verdict::OverrideRateBelowBoundNote { observed, bound });
    }
    if let (Some(pre), Some(post)) = (ar_pre, ar_post) {
        if pre - post > config.ar_drop_tolerance {
            verdicts.push(Verdict::PostArBelowPreAr {
                ar_pre: pre,
                ar_post: post,
            });
        }
    }
    if n_overrides >= config.imbalance_min_overrides {
        let minority = n_upgrades.min(n_downgrades) as f64;
        if minority < config.imbalance_minority_share * n_overrides as f64 {
            if n_upgrades > n_downgrades {
                verdicts.push(Verdict::UpwardImbalance {
                    n_upgrades,
                    n_downgrades,
                });
            } else if n_downgrades > n_upgrades {
                verdicts.push(Verdict::DownwardImbalance {
                    n_upgrades,
                    n_downgrades,
                });
            }
        }
    }
    if !policy_violations.is_empty() {
        verdicts.push(Verdict::PolicyViolations {
            count: policy_violations.len(),
        });
    }

    Ok(MonitoringReport {
        n_actions,
        n_overrides,
        override_rate: observed,
        natural_error_rate: bound,
        bound_breached,
        n_upgrades,
        n_downgrades,
        ar_pre,
        ar_post,
        policy_violations,
        verdicts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(id: &str, proposed: usize, final_grade: usize) -> OverrideRecord {
        OverrideRecord {
            borrower_id: id.to_string(),
            rating_date: NaiveDate::from_ymd_opt(2024, 6, 30).unwrap(),
            proposed_grade: proposed,
            final_grade,
            reason_code: None,
            default_within_period: None,
        }
    }

    fn record_with_outcome(
        id: &str,
        proposed: usize,
        final_grade: usize,
        defaulted: bool,
    ) -> OverrideRecord {
        OverrideRecord {
            default_within_period: Some(defaulted),
            ..record(id, proposed, final_grade)
        }
    }

    #[test]
    fn override_rate_counts_changes() {
        let mut records: Vec<OverrideRecord> =
            (0..7).map(|i| record(&format!("b{i}"), 3, 3)).collect();
        records.push(record("x1", 3, 2));
        records.push(record("x2", 3, 5));
        records.push(record("x3", 4, 3));
        assert!((override_rate(&records).unwrap().value() - 0.3).abs() < 1e-15);

        let unchanged: Vec<OverrideRecord> =
            (0..4).map(|i| record(&format!("u{i}"), 2, 2)).collect();
        assert_eq!(override_rate(&unchanged).unwrap().value(), 0.0);

        let all: Vec<OverrideRecord> = (0..4).map(|i| record(&format!("a{i}"), 2, 3)).collect();
        assert_eq!(override_rate(&all).unwrap().value(), 1.0);

        assert!(matches!(override_rate(&[]), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn policy_checks_each_active_rule() {
        let downgrade_only = OverridePolicy {
            downgrade_only: true,
            ..OverridePolicy::default()
        };
        let upgraded = [record("u", 3, 5)];
        let violations = check_policy(&upgraded, &downgrade_only);
        assert_eq!(violations.len(), 1);
        assert_eq!(violations[0].rule, PolicyRule::UpgradeNotAllowed);
        assert_eq!(violations[0].record_index, 0);

        let banded = OverridePolicy {
            min_band: Some(2),
            ..OverridePolicy::default()
        };
        let narrow = [record("n", 3, 4)];
        let violations = check_policy(&narrow, &banded);
        assert_eq!(violations.len(), 1);
        assert_eq!(violations[0].rule, PolicyRule::BandTooNarrow);

        let protected = OverridePolicy {
            no_override_at_or_above: Some(5),
            ..OverridePolicy::default()
        };
        let touched = [record("p", 6, 4), record("ok", 4, 2)];
        let violations = check_policy(&touched, &protected);
        assert_eq!(violations.len(), 1);
        assert_eq!(violations[0].rule, PolicyRule::ProtectedGradeOverridden);

        // Confirmations never violate anything.
        let quiet = [record("q", 6, 6)];
        assert!(check_policy(&quiet, &downgrade_only).is_empty());
        assert!(check_policy(&quiet, &banded).is_empty());
        assert!(check_policy(&quiet, &protected).is_empty());
    }

    #[test]
    fn direction_balance_counts() {
        let records = [record("a", 3, 5), record("b", 3, 2), record("c", 3, 3)];
        assert_eq!(direction_balance(&records), (1, 1));
        assert_eq!(direction_balance(&[record("x", 2, 2)]), (0, 0));

        let mut biased = Vec::new();
        for i in 0..8 {
            biased.push(record(&format!("d{i}"), 5, 3));
        }
        for i in 0..2 {
            biased.push(record(&format!("u{i}"), 5, 7));
        }
        assert_eq!(direction_balance(&biased), (2, 8));
    }

    #[test]
    fn empirical_ar_examples() {
        // Perfect separation: all defaulters below all survivors.
        let pairs = [(1, true), (1, true), (2, false), (2, false)];
        assert!((empirical_ar(&pairs).unwrap() - 1.0).abs() < 1e-15);

        // Identical distributions carry no ranking information.
        let pairs = [(1, true), (2, true), (1, false), (2, false)];
        assert!(empirical_ar(&pairs).unwrap().abs() < 1e-15);

        // Brute-force oracle over the 6 defaulter/survivor pairs:
        // P[<] = 5/6, P[=] = 1/6, AR = 2·5/6 + 1/6 − 1 = 5/6.
        let pairs = [(1, true), (2, true), (2, false), (3, false), (3, false)];
        assert!((empirical_ar(&pairs).unwrap() - 5.0 / 6.0).abs() < 1e-12);

        assert!(matches!(
            empirical_ar(&[(1, true), (2, true)]),
            Err(Error::InsufficientOutcomes {
                defaults: 2,
                survivors: 0
            })
        ));
        assert!(empirical_ar(&[]).is_err());
    }

    fn small_model() -> (RatingProfile, PdCurve) {
        let scale = RatingScale::new(5).unwrap();
        let profile = RatingProfile::new(scale, vec![0.1, 0.2, 0.4, 0.2, 0.1]).unwrap();
        let curve = PdCurve::new(scale, vec![0.20, 0.10, 0.04, 0.01, 0.002]).unwrap();
        (profile, curve)
    }

    #[test]
    fn assess_flags_a_breach() {
        let (profile, curve) = small_model();
        let mut records: Vec<OverrideRecord> = Vec::new();
        for i in 0..60 {
            records.push(record(&format!("k{i}"), 3, 3));
        }
        for i in 0..40 {
            records.push(record(&format!("o{i}"), 3, 2));
        }
        let report = assess(
            &records,
            &profile,
            &curve,
            &OverridePolicy::default(),
            &ToleranceConfig::default(),
        )
        .unwrap();
        assert_eq!(report.n_actions, 100);
        assert_eq!(report.n_overrides, 40);
        assert!((report.override_rate - 0.40).abs() < 1e-15);
        assert!(report.natural_error_rate < 0.40);
        assert!(report.bound_breached);
        assert_eq!(report.verdicts[0].code(), "OVERRIDE_RATE_ABOVE_BOUND");
        // 40 downgrades, 0 upgrades: a downward imbalance.
        assert!(report
            .verdicts
            .iter()
            .any(|v| v.code() == "DOWNWARD_IMBALANCE"));
        assert!(report.ar_pre.is_none() && report.ar_post.is_none());
    }

    #[test]
    fn assess_below_bound_is_informational() {
        let (profile, curve) = small_model();
        let mut records: Vec<OverrideRecord> = Vec::new();
        for i in 0..95 {
            records.push(record(&format!("k{i}"), 3, 3));
        }
        for i in 0..5 {
            records.push(record(&format!("o{i}"), 3, 2));
        }
        let report = assess(
            &records,
            &profile,
            &curve,
            &OverridePolicy::default(),
            &ToleranceConfig::default(),
        )
        .unwrap();
        assert!(!report.bound_breached);
        assert_eq!(report.verdicts[0].code(), "OVERRIDE_RATE_BELOW_BOUND_NOTE");
        // Five downgrades only, below the 20-override floor: no imbalance.
        assert!(!report
            .verdicts
            .iter()
            .any(|v| v.code() == "DOWNWARD_IMBALANCE"));
    }

    #[test]
    fn assess_reports_ar_drop_with_outcomes() {
        let (profile, curve) = small_model();
        let mut records = Vec::new();
        // Proposals separate defaulters (grade 1-2) from survivors
        // (grade 4-5); the overrides scramble final grades.
        for i in 0..10 {
            records.push(record_with_outcome(&format!("d{i}"), 1, 4, true));
        }
        for i in 0..10 {
            records.push(record_with_outcome(&format!("e{i}"), 2, 2, true));
        }
        for i in 0..40 {
            records.push(record_with_outcome(&format!("s{i}"), 4, 4, false));
        }
        for i in 0..40 {
            records.push(record_with_outcome(&format!("t{i}"), 5, 1, false));
        }
        let report = assess(
            &records,
            &profile,
            &curve,
            &OverridePolicy::default(),
            &ToleranceConfig::default(),
        )
        .unwrap();
        let pre = report.ar_pre.unwrap();
        let post = report.ar_post.unwrap();
        assert!(pre > post, "pre {pre} post {post}");
        assert!(report
            .verdicts
            .iter()
            .any(|v| v.code() == "POST_AR_BELOW_PRE_AR"));
    }

    #[test]
    fn assess_validates_scale_and_rejects_empty() {
        let (profile, curve) = small_model();
        assert!(matches!(
            assess(
                &[],
                &profile,
                &curve,
                &OverridePolicy::default(),
                &ToleranceConfig::default()
            ),
            Err(Error::EmptyInput(_))
        ));
        let bad = [record("z", 9, 3)];
        assert!(assess(
            &bad,
            &profile,
            &curve,
            &OverridePolicy::default(),
            &ToleranceConfig::default()
        )
        .is_err());
    }

    #[test]
    fn assess_is_deterministic() {
        let (profile, curve) = small_model();
        let records: Vec<OverrideRecord> = (0..30)
            .map(|i| record_with_outcome(&format!("r{i}"), 1 + i % 5, 1 + (i + 1) % 5, i % 7 == 0))
            .collect();
        let a = assess(
            &records,
            &profile,
            &curve,
            &OverridePolicy::default(),
            &ToleranceConfig::default(),
        )
        .unwrap();
        let b = assess(
            &records,
            &profile,
            &curve,
            &OverridePolicy::default(),
            &ToleranceConfig::default(),
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn upgrades_plus_downgrades_equal_overrides() {
        let records: Vec<OverrideRecord> = (0..25)
            .map(|i| record(&format!("r{i}"), 1 + i % 4, 1 + (i * 3) % 4))
            .collect();
        let n_overrides = records.iter().filter(|r| r.is_override()).count();
        let (up, down) = direction_balance(&records);
        assert_eq!(up + down, n_overrides);
    }
}
