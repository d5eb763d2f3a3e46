//! Command-line surface for natural-error-rate bounds, PD-curve
//! calibration and override monitoring.

mod io;
mod output;
mod repro;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use override_bound::calibration::{
    correlated_binomial_profile, quasi_moment_match, CorrelatedBinomialParams,
};
use override_bound::error_rate::optimal_split;
use override_bound::error_rate::{natural_error_rate, natural_error_rate_from_ar, super_grade_pds};
use override_bound::monitoring::{assess, OverridePolicy, ToleranceConfig};
use override_bound::rating::{accuracy_ratio_ex_ante, bayes_invert, unconditional_pd};
use override_bound::{Error, Probability};

use output::{Document, Field, OutputFormat};

const EXIT_INPUT: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;
const EXIT_NUMERIC: u8 = 4;

#[derive(Parser)]
#[command(
    name = "override-bound",
    version,
    about = "Natural error rates of credit-rating models and override-rate monitoring"
)]
struct Cli {
    /// Output format for all subcommands.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Plain)]
    format: OutputFormat,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Natural-error-rate bounds for override rates.
    #[command(subcommand)]
    Bound(BoundCommand),
    /// Fit a logit PD curve to target PD and AR by quasi-moment matching.
    Calibrate(CalibrateArgs),
    /// Assess observed override records against the bound.
    Monitor(MonitorArgs),
    /// Emit the published reference grids as CSV.
    Repro(ReproArgs),
}

#[derive(Subcommand)]
enum BoundCommand {
    /// Bound from the accuracy ratio alone (binormal relation).
    FromAr {
        /// Accuracy ratio, strictly inside (-1, 1).
        #[arg(long, allow_hyphen_values = true)]
        ar: f64,
    },
    /// Bound inferred ex ante from a rating profile and a PD curve.
    FromModel {
        /// Rating-profile CSV (grade,probability).
        #[arg(long)]
        profile: PathBuf,
        /// PD-curve CSV (grade,pd).
        #[arg(long)]
        curve: PathBuf,
    },
}

#[derive(Args)]
struct CalibrateArgs {
    /// Target unconditional PD, strictly inside (0, 1).
    #[arg(long)]
    pd: f64,
    /// Target accuracy ratio, 0 <= ar < the profile's supremum.
    #[arg(long)]
    ar: f64,
    /// Number of rating grades (correlated binomial on grades-1 trials).
    #[arg(long, default_value_t = 17)]
    grades: usize,
    /// Mean driver of the correlated binomial.
    #[arg(long, default_value_t = 0.55)]
    lambda: f64,
    /// Overdispersion driver of the correlated binomial.
    #[arg(long, default_value_t = 0.1)]
    rho: f64,
    /// Write the fitted PD curve here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the profile used for the calibration.
    #[arg(long)]
    profile_out: Option<PathBuf>,
}

#[derive(Args)]
struct MonitorArgs {
    /// Override-record CSV.
    #[arg(long)]
    records: PathBuf,
    /// Rating-profile CSV (grade,probability).
    #[arg(long)]
    profile: PathBuf,
    /// PD-curve CSV (grade,pd).
    #[arg(long)]
    curve: PathBuf,
    /// Forbid overrides of proposals at or above this grade.
    #[arg(long)]
    no_override_at_or_above: Option<usize>,
    /// Require overrides to move at least this many grades.
    #[arg(long)]
    min_band: Option<usize>,
    /// Allow downgrades only.
    #[arg(long)]
    downgrade_only: bool,
    /// Slack added to the bound before the breach comparison.
    #[arg(long, default_value_t = 0.0)]
    bound_slack: f64,
    /// Minimum drop of post-override AR below pre-override AR to flag.
    #[arg(long, default_value_t = 0.0)]
    ar_drop_tolerance: f64,
}

#[derive(Args)]
struct ReproArgs {
    /// Which grid to emit.
    #[arg(value_parser = ["table2", "table3", "fig1", "fig2", "fig3"])]
    target: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(stdout) => {
            print!("{stdout}");
            ExitCode::SUCCESS
        }
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.exit_code)
        }
    }
}

struct Failure {
    exit_code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let exit_code = match e {
            Error::CalibrationInfeasible { .. } => EXIT_INFEASIBLE,
            Error::Numeric(_) | Error::NoBracket { .. } => EXIT_NUMERIC,
            _ => EXIT_INPUT,
        };
        Failure {
            exit_code,
            message: e.to_string(),
        }
    }
}

impl From<io::InputError> for Failure {
    fn from(e: io::InputError) -> Self {
        Failure {
            exit_code: EXIT_INPUT,
            message: e.to_string(),
        }
    }
}

fn run(cli: &Cli) -> Result<String, Failure> {
    match &cli.command {
        Command::Bound(BoundCommand::FromAr { ar }) => bound_from_ar(*ar, cli.format),
        Command::Bound(BoundCommand::FromModel { profile, curve }) => {
            bound_from_model(profile, curve, cli.format)
        }
        Command::Calibrate(args) => calibrate(args, cli.format),
        Command::Monitor(args) => monitor(args, cli.format),
        Command::Repro(args) => repro(args, cli.format),
    }
}

fn bound_from_ar(ar: f64, format: OutputFormat) -> Result<String, Failure> {
    let bound = natural_error_rate_from_ar(ar)?;
    let doc = Document::default()
        .field("accuracy_ratio", Field::Rate(ar))
        .field("natural_error_rate", Field::Rate(bound.value()));
    Ok(doc.render(format))
}

fn bound_from_model(
    profile_path: &Path,
    curve_path: &Path,
    format: OutputFormat,
) -> Result<String, Failure> {
    let profile = io::read_profile(profile_path)?;
    let curve = io::read_pd_curve(curve_path)?;
    let p = unconditional_pd(&profile, &curve)?;
    let ar = accuracy_ratio_ex_ante(&profile, &curve)?;
    let bound = natural_error_rate(&profile, &curve)?;
    let split = optimal_split(&bayes_invert(&profile, &curve)?);

    let grades = |set: &std::collections::BTreeSet<usize>| {
        if set.is_empty() {
            "none".to_string()
        } else {
            set.iter()
                .map(|g| g.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        }
    };
    let mut doc = Document::default()
        .field("unconditional_pd", Field::Rate(p.value()))
        .field("accuracy_ratio_ex_ante", Field::Rate(ar))
        .field("natural_error_rate", Field::Rate(bound.value()))
        .field("risky_grades", Field::Text(grades(split.risky_grades())))
        .field("safe_grades", Field::Text(grades(&split.safe_grades())));
    doc = match super_grade_pds(&profile, &curve) {
        Ok((risky, safe)) => doc
            .field("risky_pd", Field::Rate(risky.value()))
            .field("safe_pd", Field::Rate(safe.value())),
        // One side empty: the nonempty side's average PD is p itself.
        Err(Error::SplitDegenerate {
            portfolio_pd,
            risky_is_empty,
        }) => {
            if risky_is_empty {
                doc.field("risky_pd", Field::Missing)
                    .field("safe_pd", Field::Rate(portfolio_pd))
            } else {
                doc.field("risky_pd", Field::Rate(portfolio_pd))
                    .field("safe_pd", Field::Missing)
            }
        }
        Err(e) => return Err(e.into()),
    };
    Ok(doc.render(format))
}

fn calibrate(args: &CalibrateArgs, format: OutputFormat) -> Result<String, Failure> {
    if args.grades < 2 {
        return Err(Failure {
            exit_code: EXIT_INPUT,
            message: format!("--grades must be at least 2, got {}", args.grades),
        });
    }
    let params = CorrelatedBinomialParams::new(args.grades - 1, args.lambda, args.rho)?;
    let profile = correlated_binomial_profile(&params)?;
    let target_pd = Probability::new(args.pd)?;
    let fitted = quasi_moment_match(&profile, target_pd, args.ar)?;
    let curve = fitted.to_pd_curve();

    let curve_csv = io::pd_curve_to_csv(&curve);
    if let Some(path) = &args.profile_out {
        io::write_file(path, &io::profile_to_csv(&profile))?;
    }
    let echo = Document::default()
        .field("intercept", Field::Number(fitted.intercept()))
        .field("slope", Field::Number(fitted.slope()))
        .field("target_pd", Field::Rate(args.pd))
        .field("target_ar", Field::Rate(args.ar));
    match &args.out {
        Some(path) => {
            io::write_file(path, &curve_csv)?;
            Ok(echo.render(format))
        }
        None => {
            // Curve to stdout; the parameter echo goes to stderr so the
            // CSV stays pipeable.
            eprint!("{}", echo.render(format));
            Ok(curve_csv)
        }
    }
}

fn monitor(args: &MonitorArgs, format: OutputFormat) -> Result<String, Failure> {
    let profile = io::read_profile(&args.profile)?;
    let curve = io::read_pd_curve(&args.curve)?;
    let (records, issues) = io::read_override_records(&args.records, profile.scale())?;
    for issue in &issues {
        eprintln!("warning: skipped malformed row — {issue}");
    }
    if records.is_empty() {
        return Err(Failure {
            exit_code: EXIT_INPUT,
            message: format!(
                "{}: no valid override records ({} malformed rows)",
                args.records.display(),
                issues.len()
            ),
        });
    }
    let policy = OverridePolicy {
        no_override_at_or_above: args.no_override_at_or_above,
        min_band: args.min_band,
        downgrade_only: args.downgrade_only,
    };
    let config = ToleranceConfig {
        bound_slack: args.bound_slack,
        ar_drop_tolerance: args.ar_drop_tolerance,
        ..ToleranceConfig::default()
    };
    let report = assess(&records, &profile, &curve, &policy, &config)?;

    let optional_rate = |v: Option<f64>| v.map(Field::Rate).unwrap_or(Field::Missing);
    let verdict_values = report
        .verdicts
        .iter()
        .map(|v| json!({ "code": v.code(), "message": v.to_string() }))
        .collect();
    let verdict_lines = report.verdicts.iter().map(|v| v.to_string()).collect();
    let violation_values = report
        .policy_violations
        .iter()
        .map(|v| serde_json::to_value(v).expect("violation serializes"))
        .collect();
    let violation_lines = report
        .policy_violations
        .iter()
        .map(|v| {
            format!(
                "record {} (borrower {}): {}",
                v.record_index, v.borrower_id, v.detail
            )
        })
        .collect();

    let doc = Document::default()
        .field("n_actions", Field::Count(report.n_actions))
        .field("n_overrides", Field::Count(report.n_overrides))
        .field("override_rate", Field::Rate(report.override_rate))
        .field("natural_error_rate", Field::Rate(report.natural_error_rate))
        .field("bound_breached", Field::Flag(report.bound_breached))
        .field("n_upgrades", Field::Count(report.n_upgrades))
        .field("n_downgrades", Field::Count(report.n_downgrades))
        .field("ar_pre", optional_rate(report.ar_pre))
        .field("ar_post", optional_rate(report.ar_post))
        .field(
            "n_policy_violations",
            Field::Count(report.policy_violations.len()),
        )
        .list("verdict", verdict_values, verdict_lines)
        .list("violation", violation_values, violation_lines);
    Ok(doc.render(format))
}

fn repro(args: &ReproArgs, format: OutputFormat) -> Result<String, Failure> {
    let table = match args.target.as_str() {
        "table2" => repro::table2()?,
        "table3" => repro::table3()?,
        "fig1" => repro::fig1()?,
        "fig2" => repro::fig2()?,
        "fig3" => repro::fig3()?,
        other => {
            return Err(Failure {
                exit_code: EXIT_INPUT,
                message: format!("unknown repro target {other}"),
            })
        }
    };
    Ok(table.render(format))
}
