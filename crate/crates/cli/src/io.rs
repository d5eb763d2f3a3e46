//! File formats: rating-profile, PD-curve and override-record CSVs.
//!
//! Profile files carry the header `grade,probability`, PD curves
//! `grade,pd`, both with one row per grade, grades ascending from 1.
//! Override files carry
//! `borrower_id,rating_date,proposed_grade,final_grade,reason_code,default_within_period`
//! with ISO-8601 dates and empty strings for missing optionals.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use chrono::NaiveDate;
use override_bound::monitoring::OverrideRecord;
use override_bound::rating::{PdCurve, RatingProfile, RatingScale};

/// An input-file problem, carrying the file and (1-based) line number.
#[derive(Debug)]
pub struct InputError {
    pub path: String,
    pub line: Option<u64>,
    pub message: String,
}

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.line {
            Some(line) => write!(f, "{}:{line}: {}", self.path, self.message),
            None => write!(f, "{}: {}", self.path, self.message),
        }
    }
}

impl std::error::Error for InputError {}

fn input_error(path: &Path, line: Option<u64>, message: impl Into<String>) -> InputError {
    InputError {
        path: path.display().to_string(),
        line,
        message: message.into(),
    }
}

/// Reads a two-column grade/value CSV with the given header, enforcing
/// grades 1..k in ascending order.
fn read_grade_value_csv(path: &Path, expected_header: [&str; 2]) -> Result<Vec<f64>, InputError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| input_error(path, None, e.to_string()))?;

    let headers = reader
        .headers()
        .map_err(|e| input_error(path, Some(1), e.to_string()))?
        .clone();
    let got: Vec<&str> = headers.iter().collect();
    if got != expected_header {
        return Err(input_error(
            path,
            Some(1),
            format!(
                "expected header \"{}\", found \"{}\"",
                expected_header.join(","),
                got.join(",")
            ),
        ));
    }

    let mut values = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| input_error(path, None, e.to_string()))?;
        let line = record.position().map(|p| p.line());
        if record.len() != 2 {
            return Err(input_error(
                path,
                line,
                format!("expected 2 fields, found {}", record.len()),
            ));
        }
        let grade: usize = record[0].parse().map_err(|_| {
            input_error(
                path,
                line,
                format!("grade \"{}\" is not an integer", &record[0]),
            )
        })?;
        if grade != values.len() + 1 {
            return Err(input_error(
                path,
                line,
                format!(
                    "expected grade {}, found {grade} (grades must ascend from 1)",
                    values.len() + 1
                ),
            ));
        }
        let value: f64 = record[1]
            .parse()
            .map_err(|_| input_error(path, line, format!("\"{}\" is not a number", &record[1])))?;
        values.push(value);
    }
    if values.is_empty() {
        return Err(input_error(path, None, "file contains no data rows"));
    }
    Ok(values)
}

pub fn read_profile(path: &Path) -> Result<RatingProfile, InputError> {
    let mass = read_grade_value_csv(path, ["grade", "probability"])?;
    let scale = RatingScale::new(mass.len()).map_err(|e| input_error(path, None, e.to_string()))?;
    RatingProfile::new(scale, mass).map_err(|e| input_error(path, None, e.to_string()))
}

pub fn read_pd_curve(path: &Path) -> Result<PdCurve, InputError> {
    let pd = read_grade_value_csv(path, ["grade", "pd"])?;
    let scale = RatingScale::new(pd.len()).map_err(|e| input_error(path, None, e.to_string()))?;
    PdCurve::new(scale, pd).map_err(|e| input_error(path, None, e.to_string()))
}

pub const OVERRIDE_HEADER: [&str; 6] = [
    "borrower_id",
    "rating_date",
    "proposed_grade",
    "final_grade",
    "reason_code",
    "default_within_period",
];

/// Reads override records, collecting malformed rows (with line numbers)
/// instead of failing; grades are checked against `scale`.
pub fn read_override_records(
    path: &Path,
    scale: RatingScale,
) -> Result<(Vec<OverrideRecord>, Vec<InputError>), InputError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(path)
        .map_err(|e| input_error(path, None, e.to_string()))?;

    let headers = reader
        .headers()
        .map_err(|e| input_error(path, Some(1), e.to_string()))?
        .clone();
    let got: Vec<&str> = headers.iter().collect();
    if got != OVERRIDE_HEADER {
        return Err(input_error(
            path,
            Some(1),
            format!(
                "expected header \"{}\", found \"{}\"",
                OVERRIDE_HEADER.join(","),
                got.join(",")
            ),
        ));
    }

    let mut records = Vec::new();
    let mut issues = Vec::new();
    for record in reader.records() {
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                issues.push(input_error(path, None, e.to_string()));
                continue;
            }
        };
        let line = record.position().map(|p| p.line());
        match parse_override_row(&record, scale) {
            Ok(parsed) => records.push(parsed),
            Err(message) => issues.push(input_error(path, line, message)),
        }
    }
    Ok((records, issues))
}

fn parse_override_row(
    record: &csv::StringRecord,
    scale: RatingScale,
) -> Result<OverrideRecord, String> {
    if record.len() != 6 {
        return Err(format!("expected 6 fields, found {}", record.len()));
    }
    let borrower_id = record[0].to_string();
    if borrower_id.is_empty() {
        return Err("borrower_id must not be empty".into());
    }
    let rating_date: NaiveDate = record[1]
        .parse()
        .map_err(|_| format!("\"{}\" is not an ISO-8601 date", &record[1]))?;
    let proposed_grade: usize = record[2]
        .parse()
        .map_err(|_| format!("proposed grade \"{}\" is not an integer", &record[2]))?;
    let final_grade: usize = record[3]
        .parse()
        .map_err(|_| format!("final grade \"{}\" is not an integer", &record[3]))?;
    for (what, grade) in [("proposed", proposed_grade), ("final", final_grade)] {
        if !scale.contains(grade) {
            return Err(format!(
                "{what} grade {grade} outside the scale of {} grades",
                scale.grade_count()
            ));
        }
    }
    let reason_code = match &record[4] {
        "" => None,
        code => Some(code.to_string()),
    };
    let default_within_period = match record[5].to_ascii_lowercase().as_str() {
        "" => None,
        "true" | "1" => Some(true),
        "false" | "0" => Some(false),
        other => return Err(format!("default flag \"{other}\" is not true/false/empty")),
    };
    Ok(OverrideRecord {
        borrower_id,
        rating_date,
        proposed_grade,
        final_grade,
        reason_code,
        default_within_period,
    })
}

/// Renders a PD curve as its CSV file content (full-precision values,
/// so a re-read reproduces the curve bit for bit).
pub fn pd_curve_to_csv(curve: &PdCurve) -> String {
    let mut out = String::from("grade,pd\n");
    for grade in curve.scale().grades() {
        let _ = writeln!(out, "{grade},{}", curve.pd()[grade - 1]);
    }
    out
}

/// Renders a rating profile as its CSV file content.
pub fn profile_to_csv(profile: &RatingProfile) -> String {
    let mut out = String::from("grade,probability\n");
    for grade in profile.scale().grades() {
        let _ = writeln!(out, "{grade},{}", profile.mass()[grade - 1]);
    }
    out
}

pub fn write_file(path: &Path, content: &str) -> Result<(), InputError> {
    fs::write(path, content).map_err(|e| input_error(path, None, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn temp_csv(content: &str) -> tempfile::NamedTempFile {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        file.write_all(content.as_bytes()).unwrap();
        file
    }

    #[test]
    fn profile_round_trip() {
        let file = temp_csv("grade,probability\n1,0.2\n2,0.5\n3,0.3\n");
        let profile = read_profile(file.path()).unwrap();
        assert_eq!(profile.scale().grade_count(), 3);
        assert!((profile.mass()[1] - 0.5).abs() < 1e-15);

        let rendered = profile_to_csv(&profile);
        let file2 = temp_csv(&rendered);
        let again = read_profile(file2.path()).unwrap();
        assert_eq!(profile.mass(), again.mass());
    }

    #[test]
    fn profile_errors_carry_line_numbers() {
        let file = temp_csv("grade,probability\n1,0.5\n3,0.5\n");
        let err = read_profile(file.path()).unwrap_err();
        assert_eq!(err.line, Some(3));
        assert!(err.message.contains("expected grade 2"));

        let file = temp_csv("grade,probability\n1,not-a-number\n");
        let err = read_profile(file.path()).unwrap_err();
        assert_eq!(err.line, Some(2));

        let file = temp_csv("grade,mass\n1,1.0\n");
        let err = read_profile(file.path()).unwrap_err();
        assert_eq!(err.line, Some(1));
        assert!(err.message.contains("expected header"));
    }

    #[test]
    fn profile_sum_validation_comes_from_core() {
        let file = temp_csv("grade,probability\n1,0.5\n2,0.6\n");
        let err = read_profile(file.path()).unwrap_err();
        assert!(err.message.contains("sum"));
    }

    #[test]
    fn pd_curve_reads() {
        let file = temp_csv("grade,pd\n1,0.10\n2,0.05\n3,0.01\n");
        let curve = read_pd_curve(file.path()).unwrap();
        assert_eq!(curve.pd(), &[0.10, 0.05, 0.01]);
    }

    #[test]
    fn override_records_skip_and_report_bad_rows() {
        let scale = RatingScale::new(5).unwrap();
        let file = temp_csv(
            "borrower_id,rating_date,proposed_grade,final_grade,reason_code,default_within_period\n\
             b1,2024-03-31,4,4,,\n\
             b2,2024-03-31,4,2,RC1,true\n\
             b3,not-a-date,4,4,,\n\
             b4,2024-03-31,9,4,,\n\
             b5,2024-03-31,3,3,,false\n",
        );
        let (records, issues) = read_override_records(file.path(), scale).unwrap();
        assert_eq!(records.len(), 3);
        assert_eq!(issues.len(), 2);
        assert_eq!(issues[0].line, Some(4));
        assert!(issues[0].message.contains("ISO-8601"));
        assert_eq!(issues[1].line, Some(5));
        assert!(issues[1].message.contains("outside the scale"));
        assert_eq!(records[1].reason_code.as_deref(), Some("RC1"));
        assert_eq!(records[1].default_within_period, Some(true));
        assert_eq!(records[2].default_within_period, Some(false));
        assert_eq!(records[0].default_within_period, None);
    }

    #[test]
    fn override_header_is_checked() {
        let scale = RatingScale::new(5).unwrap();
        let file = temp_csv("id,date,proposed,final,reason,default\nb1,2024-03-31,4,4,,\n");
        assert!(read_override_records(file.path(), scale).is_err());
    }
}
