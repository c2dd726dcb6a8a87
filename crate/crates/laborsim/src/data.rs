//! Tabular input and output: ingestion of empirical cumulative-employment
//! CSV files and stable CSV/JSON serialization of every result type.
//!
//! Every floating-point value passes through one shared 12-significant-digit
//! renderer, so identical inputs always serialize to identical bytes, on any
//! platform.

use std::io::Read;

use serde::Serialize;

use crate::analytics::{learning_curve, CumulativeSeries, StagewiseSeries, Trajectory};
use crate::calibration::CalibrationResult;
use crate::error::{Error, Result};
use crate::stages::StageRecord;

// ── number rendering ──────────────────────────────────────────────────────

/// Renders a float with 12 significant digits.
///
/// Values whose decimal exponent lies in `[-4, 12)` use fixed notation with
/// trailing zeros trimmed (`0.3`, `1.28`, `200`); everything else uses
/// compact scientific notation (`1.5e-7`, `1.23456789012e14`). Zero renders
/// as `0`; the sign of negative zero is dropped so equal values always
/// render identically.
pub fn fmt_sig(value: f64) -> String {
    if value == 0.0 {
        return "0".to_string();
    }
    if !value.is_finite() {
        return value.to_string();
    }
    // 11 fractional digits in scientific form = 12 significant digits
    let scientific = format!("{value:.11e}");
    let (mantissa, exponent_text) = scientific.split_once('e').expect("scientific form");
    let exponent: i32 = exponent_text.parse().expect("scientific exponent");
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    debug_assert_eq!(digits.len(), 12);
    if (-4..12).contains(&exponent) {
        let mut out = String::new();
        if mantissa.starts_with('-') {
            out.push('-');
        }
        if exponent < 0 {
            out.push_str("0.");
            for _ in 0..(-exponent - 1) {
                out.push('0');
            }
            out.push_str(&digits);
        } else {
            let split = exponent as usize + 1;
            out.push_str(&digits[..split]);
            if split < digits.len() {
                out.push('.');
                out.push_str(&digits[split..]);
            }
        }
        if out.contains('.') {
            let trimmed = out.trim_end_matches('0');
            let trimmed = trimmed.strip_suffix('.').unwrap_or(trimmed);
            out = trimmed.to_string();
        }
        out
    } else {
        let trimmed = if mantissa.contains('.') {
            let t = mantissa.trim_end_matches('0');
            t.strip_suffix('.').unwrap_or(t)
        } else {
            mantissa
        };
        format!("{trimmed}e{exponent}")
    }
}

/// Rounds a float to the value its 12-significant-digit rendering parses
/// back to, making in-memory values agree exactly with serialized ones.
pub fn round_sig(value: f64) -> f64 {
    fmt_sig(value).parse().unwrap_or(value)
}

fn round_json_floats(value: &mut serde_json::Value) {
    match value {
        serde_json::Value::Number(number) if number.is_f64() => {
            let rounded = round_sig(number.as_f64().expect("checked f64"));
            if let Some(replacement) = serde_json::Number::from_f64(rounded) {
                *number = replacement;
            }
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(round_json_floats),
        serde_json::Value::Object(map) => map.values_mut().for_each(round_json_floats),
        _ => {}
    }
}

/// Pretty-prints any serializable value as JSON with all floats rounded to
/// 12 significant digits and a trailing newline.
pub fn to_rounded_json_pretty<T: Serialize>(value: &T) -> Result<String> {
    let mut tree = serde_json::to_value(value)?;
    round_json_floats(&mut tree);
    let mut out = serde_json::to_string_pretty(&tree)?;
    out.push('\n');
    Ok(out)
}

// ── empirical dataset ─────────────────────────────────────────────────────

/// A collection of per-year cumulative-employment series plus the free-text
/// source note carried as leading `#` comment lines in the CSV form.
#[derive(Debug, Clone, PartialEq)]
pub struct YearDataset {
    /// One validated series per year, in input order; year labels unique.
    pub records: Vec<CumulativeSeries>,
    /// Source note; empty when the input carried no comment lines.
    pub provenance: String,
}

struct RawRow {
    line: usize,
    year: String,
    alpha0: f64,
    rates: Vec<f64>,
}

/// Parses an employment CSV: header `year,alpha0,cum_emp_0,...` (trailing
/// stage columns optional but contiguous), one year per row.
///
/// Leading `#` lines are captured as the dataset's provenance note. Rate
/// columns are accepted either as fractions in `[0, 1]` or as percentages:
/// a column whose largest value exceeds 1.5 is treated as percentages and
/// divided by 100 (the `alpha0` column is never rescaled). Rows may stop
/// early — later stages simply missing — but may not skip a stage. Every
/// rejection names the offending physical row and column; nothing is
/// silently coerced besides the documented percent detection.
pub fn parse_employment_csv(mut input: impl Read) -> Result<YearDataset> {
    let mut text = String::new();
    input.read_to_string(&mut text).map_err(|e| {
        if e.kind() == std::io::ErrorKind::InvalidData {
            Error::Parse {
                row: 1,
                column: "file".into(),
                message: "input is not valid UTF-8".into(),
            }
        } else {
            Error::Io(e)
        }
    })?;

    // split off the leading comment block before the csv reader sees it
    let mut provenance_lines: Vec<String> = Vec::new();
    let mut body_start = 0;
    for line in text.split_inclusive('\n') {
        let trimmed = line.trim_start();
        if let Some(commented) = trimmed.strip_prefix('#') {
            let content = commented.strip_prefix(' ').unwrap_or(commented);
            provenance_lines.push(content.trim_end().to_string());
            body_start += line.len();
        } else {
            break;
        }
    }
    let provenance = provenance_lines.join("\n");
    let comment_offset = provenance_lines.len();
    let body = &text[body_start..];
    let header_row = comment_offset + 1;
    if body.trim().is_empty() {
        return Err(Error::Parse {
            row: header_row,
            column: "header".into(),
            message: "missing header `year,alpha0,cum_emp_0,...`".into(),
        });
    }

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(body.as_bytes());

    // ── header ──
    let headers = reader.headers()?.clone();
    let fields: Vec<&str> = headers.iter().collect();
    if fields.len() < 2 || fields[0] != "year" || fields[1] != "alpha0" {
        return Err(Error::Parse {
            row: header_row,
            column: "header".into(),
            message: format!(
                "expected header starting `year,alpha0`, got `{}`",
                fields.join(",")
            ),
        });
    }
    for (index, field) in fields.iter().enumerate().skip(2) {
        let expected = format!("cum_emp_{}", index - 2);
        if *field != expected {
            return Err(Error::Parse {
                row: header_row,
                column: expected.clone(),
                message: format!("expected column `{expected}`, got `{field}`"),
            });
        }
    }
    let n_stage_columns = fields.len() - 2;

    // ── cells ──
    let mut raw_rows: Vec<RawRow> = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = comment_offset
            + record
                .position()
                .map(|p| p.line() as usize)
                .unwrap_or(raw_rows.len() + 2);
        if record.len() > fields.len() {
            return Err(Error::Parse {
                row: line,
                column: format!("column {}", record.len()),
                message: format!(
                    "row has {} fields but the header declares {}",
                    record.len(),
                    fields.len()
                ),
            });
        }
        let year = record.get(0).unwrap_or("").to_string();
        if year.is_empty() {
            return Err(Error::Parse {
                row: line,
                column: "year".into(),
                message: "missing year label".into(),
            });
        }
        if raw_rows.iter().any(|r| r.year == year) {
            return Err(Error::Parse {
                row: line,
                column: "year".into(),
                message: format!("duplicate year label `{year}`"),
            });
        }
        let alpha_text = record.get(1).unwrap_or("");
        if alpha_text.is_empty() {
            return Err(Error::Parse {
                row: line,
                column: "alpha0".into(),
                message: "missing job-offer ratio".into(),
            });
        }
        let alpha0: f64 = alpha_text.parse().map_err(|_| Error::Parse {
            row: line,
            column: "alpha0".into(),
            message: format!("expected a number, got `{alpha_text}`"),
        })?;
        if !alpha0.is_finite() || alpha0 <= 0.0 {
            return Err(Error::Parse {
                row: line,
                column: "alpha0".into(),
                message: format!("job-offer ratio must be positive and finite, got {alpha_text}"),
            });
        }

        let mut rates = Vec::new();
        let mut prefix_ended = false;
        for stage in 0..n_stage_columns {
            let cell = record.get(stage + 2).unwrap_or("");
            let column = format!("cum_emp_{stage}");
            if cell.is_empty() {
                prefix_ended = true;
                continue;
            }
            if prefix_ended {
                return Err(Error::Parse {
                    row: line,
                    column,
                    message: "value appears after a missing stage; stages must form a \
                              contiguous prefix"
                        .into(),
                });
            }
            let value: f64 = cell.parse().map_err(|_| Error::Parse {
                row: line,
                column: column.clone(),
                message: format!("expected a number, got `{cell}`"),
            })?;
            if !value.is_finite() || value < 0.0 {
                return Err(Error::Parse {
                    row: line,
                    column,
                    message: format!(
                        "cumulative employment must be a finite non-negative number, got {cell}"
                    ),
                });
            }
            rates.push(value);
        }
        raw_rows.push(RawRow {
            line,
            year,
            alpha0,
            rates,
        });
    }

    // ── per-column percent auto-detection ──
    for stage in 0..n_stage_columns {
        let mut max_value = f64::NEG_INFINITY;
        let mut max_line = 0;
        for row in &raw_rows {
            if let Some(&value) = row.rates.get(stage) {
                if value > max_value {
                    max_value = value;
                    max_line = row.line;
                }
            }
        }
        if max_value == f64::NEG_INFINITY {
            continue; // column entirely absent
        }
        if max_value > 100.0 {
            return Err(Error::Parse {
                row: max_line,
                column: format!("cum_emp_{stage}"),
                message: format!(
                    "rate {max_value} exceeds 100: neither a fraction in [0, 1] nor a \
                     percentage in (1, 100]"
                ),
            });
        }
        if max_value > 1.5 {
            for row in &mut raw_rows {
                if let Some(value) = row.rates.get_mut(stage) {
                    *value /= 100.0;
                }
            }
        }
    }

    // ── structural validation, with exact coordinates ──
    let mut records = Vec::with_capacity(raw_rows.len());
    for row in raw_rows {
        for (stage, &value) in row.rates.iter().enumerate() {
            let column = format!("cum_emp_{stage}");
            if value > 1.0 {
                return Err(Error::Parse {
                    row: row.line,
                    column,
                    message: format!("cumulative employment must lie in [0, 1], got {value}"),
                });
            }
            if stage > 0 && value < row.rates[stage - 1] {
                return Err(Error::Parse {
                    row: row.line,
                    column,
                    message: format!(
                        "cumulative employment decreased from {} to {value}; the series \
                         must be non-decreasing",
                        row.rates[stage - 1]
                    ),
                });
            }
            if row.alpha0 < 1.0 && value > row.alpha0 {
                return Err(Error::Parse {
                    row: row.line,
                    column,
                    message: format!(
                        "cumulative rate {value} exceeds the job-offer ratio {}; \
                         employment cannot outgrow the vacancies",
                        row.alpha0
                    ),
                });
            }
        }
        let line = row.line;
        let series =
            CumulativeSeries::new(row.year, row.alpha0, row.rates).map_err(|e| Error::Parse {
                row: line,
                column: "series".into(),
                message: e.to_string(),
            })?;
        records.push(series);
    }
    Ok(YearDataset {
        records,
        provenance,
    })
}

/// Serializes a dataset back to the CSV form [`parse_employment_csv`] reads:
/// provenance as leading `#` lines, the widest header the records need, and
/// short rows padded with empty trailing cells.
pub fn write_employment_csv(dataset: &YearDataset) -> Result<String> {
    let width = dataset.records.iter().map(|r| r.len()).max().unwrap_or(0);
    let mut out = String::new();
    for line in dataset.provenance.lines() {
        if line.is_empty() {
            out.push_str("#\n");
        } else {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
    }
    let mut buffer = Vec::new();
    {
        let mut writer = csv::Writer::from_writer(&mut buffer);
        let mut header = vec!["year".to_string(), "alpha0".to_string()];
        for stage in 0..width {
            header.push(format!("cum_emp_{stage}"));
        }
        writer.write_record(&header)?;
        for series in &dataset.records {
            let mut row = vec![series.year_label().to_string(), fmt_sig(series.alpha0())];
            for &rate in series.cum_employment() {
                row.push(fmt_sig(rate));
            }
            row.resize(width + 2, String::new());
            writer.write_record(&row)?;
        }
        writer.flush()?;
    }
    out.push_str(&String::from_utf8(buffer).expect("csv output is UTF-8"));
    Ok(out)
}

// ── result serialization ──────────────────────────────────────────────────

/// Column order of the stage-record CSV schema.
pub const STAGE_CSV_HEADER: [&str; 8] = [
    "stage",
    "alpha_stage",
    "u_stage",
    "omega_stage",
    "cum_employment",
    "error",
    "remaining_students",
    "remaining_vacancies",
];

/// Writes stage records as CSV under [`STAGE_CSV_HEADER`]; an empty list
/// yields a header-only file.
pub fn write_stage_records_csv(records: &[StageRecord]) -> Result<String> {
    let mut buffer = Vec::new();
    {
        let mut writer = csv::Writer::from_writer(&mut buffer);
        writer.write_record(STAGE_CSV_HEADER)?;
        for record in records {
            writer.write_record(&[
                record.stage.to_string(),
                fmt_sig(record.alpha_stage),
                fmt_sig(record.u_stage),
                fmt_sig(record.omega_stage),
                fmt_sig(record.cum_employment),
                fmt_sig(record.error),
                record.remaining_students.to_string(),
                record.remaining_vacancies.to_string(),
            ])?;
        }
        writer.flush()?;
    }
    Ok(String::from_utf8(buffer).expect("csv output is UTF-8"))
}

/// Writes stage records as a pretty JSON array mirroring the CSV fields.
pub fn write_stage_records_json(records: &[StageRecord]) -> Result<String> {
    to_rounded_json_pretty(&records)
}

/// One flattened row of a stage-wise decomposition, shared by the CSV and
/// JSON renderings; `identity_residual` is the self-check column
/// `alpha*omega + 1 − alpha − u`, zero up to floating point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StagewiseRow {
    pub year: String,
    pub stage: usize,
    pub alpha_stage: f64,
    pub u_stage: f64,
    pub omega_stage: f64,
    pub identity_residual: f64,
}

/// Flattens per-year stage-wise series into rows, keeping input order.
pub fn stagewise_rows(series_list: &[StagewiseSeries]) -> Vec<StagewiseRow> {
    let mut rows = Vec::new();
    for series in series_list {
        for triple in &series.triples {
            rows.push(StagewiseRow {
                year: series.year_label.clone(),
                stage: triple.stage,
                alpha_stage: triple.alpha_stage,
                u_stage: triple.u_stage,
                omega_stage: triple.omega_stage,
                identity_residual: triple.identity_residual(),
            });
        }
    }
    rows
}

/// Writes stage-wise rows as CSV:
/// `year,stage,alpha_stage,u_stage,omega_stage,identity_residual`.
pub fn write_stagewise_csv(series_list: &[StagewiseSeries]) -> Result<String> {
    let mut buffer = Vec::new();
    {
        let mut writer = csv::Writer::from_writer(&mut buffer);
        writer.write_record([
            "year",
            "stage",
            "alpha_stage",
            "u_stage",
            "omega_stage",
            "identity_residual",
        ])?;
        for row in stagewise_rows(series_list) {
            writer.write_record(&[
                row.year,
                row.stage.to_string(),
                fmt_sig(row.alpha_stage),
                fmt_sig(row.u_stage),
                fmt_sig(row.omega_stage),
                fmt_sig(row.identity_residual),
            ])?;
        }
        writer.flush()?;
    }
    Ok(String::from_utf8(buffer).expect("csv output is UTF-8"))
}

/// Writes stage-wise rows as a pretty JSON array.
pub fn write_stagewise_json(series_list: &[StagewiseSeries]) -> Result<String> {
    to_rounded_json_pretty(&stagewise_rows(series_list))
}

/// Writes a trajectory's points as CSV: `year,stage,omega,u`.
/// Skipped years carry no point and are reported only in the JSON form.
pub fn write_trajectory_csv(trajectory: &Trajectory) -> Result<String> {
    let mut buffer = Vec::new();
    {
        let mut writer = csv::Writer::from_writer(&mut buffer);
        writer.write_record(["year", "stage", "omega", "u"])?;
        for point in &trajectory.points {
            writer.write_record(&[
                point.year_label.clone(),
                point.stage.to_string(),
                fmt_sig(point.omega),
                fmt_sig(point.u),
            ])?;
        }
        writer.flush()?;
    }
    Ok(String::from_utf8(buffer).expect("csv output is UTF-8"))
}

/// Writes the full trajectory (points plus skipped years) as pretty JSON.
pub fn write_trajectory_json(trajectory: &Trajectory) -> Result<String> {
    to_rounded_json_pretty(trajectory)
}

/// One learning-curve sample: residual employment `error` at a stage.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LearningCurveRow {
    pub year: String,
    pub stage: usize,
    pub error: f64,
}

/// Evaluates the learning curve of every series, flattened to rows in
/// input order.
pub fn learning_curve_rows(series_list: &[CumulativeSeries]) -> Vec<LearningCurveRow> {
    let mut rows = Vec::new();
    for series in series_list {
        for (stage, error) in learning_curve(series).into_iter().enumerate() {
            rows.push(LearningCurveRow {
                year: series.year_label().to_string(),
                stage,
                error,
            });
        }
    }
    rows
}

/// Writes learning-curve rows as CSV: `year,stage,error`.
pub fn write_learning_curves_csv(series_list: &[CumulativeSeries]) -> Result<String> {
    let mut buffer = Vec::new();
    {
        let mut writer = csv::Writer::from_writer(&mut buffer);
        writer.write_record(["year", "stage", "error"])?;
        for row in learning_curve_rows(series_list) {
            writer.write_record(&[row.year, row.stage.to_string(), fmt_sig(row.error)])?;
        }
        writer.flush()?;
    }
    Ok(String::from_utf8(buffer).expect("csv output is UTF-8"))
}

/// Writes learning-curve rows as a pretty JSON array.
pub fn write_learning_curves_json(series_list: &[CumulativeSeries]) -> Result<String> {
    to_rounded_json_pretty(&learning_curve_rows(series_list))
}

/// Writes a calibration result (including its trace) as pretty JSON.
pub fn write_calibration_json(result: &CalibrationResult) -> Result<String> {
    to_rounded_json_pretty(result)
}

// ── tests ─────────────────────────────────────────────────────────────────

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::{stagewise_from_cumulative, uv_trajectory, TrajectoryMode};

    // ── number rendering ──

    #[test]
    fn renders_twelve_significant_digits_in_fixed_notation() {
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(-0.0), "0");
        assert_eq!(fmt_sig(0.3), "0.3");
        assert_eq!(fmt_sig(1.28), "1.28");
        assert_eq!(fmt_sig(200.0), "200");
        assert_eq!(fmt_sig(-0.25), "-0.25");
        assert_eq!(fmt_sig(0.0001), "0.0001");
        assert_eq!(fmt_sig(1.7000000000000002), "1.7");
        assert_eq!(fmt_sig(12.0 / 17.0), "0.705882352941");
        assert_eq!(fmt_sig(2.0 / 3.0), "0.666666666667");
    }

    #[test]
    fn renders_extreme_magnitudes_in_scientific_notation() {
        assert_eq!(fmt_sig(1e-7), "1e-7");
        assert_eq!(fmt_sig(1.5e-7), "1.5e-7");
        assert_eq!(fmt_sig(-1.5e-7), "-1.5e-7");
        assert_eq!(fmt_sig(1e-5), "1e-5");
        assert_eq!(fmt_sig(123456789012345.0), "1.23456789012e14");
        assert_eq!(fmt_sig(1e12), "1e12");
        assert_eq!(fmt_sig(999999999999.5), "1e12");
        assert_eq!(fmt_sig(123456789012.0), "123456789012");
    }

    #[test]
    fn rounding_to_rendered_precision_is_idempotent() {
        for &value in &[
            0.3,
            1.28,
            12.0 / 17.0,
            2.0 / 3.0,
            1e-7,
            -9.876543210987654e-3,
            6.02214076e23,
            123456789012345.0,
        ] {
            let once = round_sig(value);
            assert_eq!(round_sig(once), once, "value {value}");
            assert_eq!(fmt_sig(once), fmt_sig(value), "value {value}");
            assert!((once - value).abs() <= value.abs() * 5e-12, "value {value}");
        }
    }

    // ── parsing ──

    fn parse(text: &str) -> Result<YearDataset> {
        parse_employment_csv(text.as_bytes())
    }

    #[test]
    fn parses_a_fraction_row_into_one_series() {
        let dataset = parse(
            "year,alpha0,cum_emp_0,cum_emp_1,cum_emp_2,cum_emp_3\n\
             2012,1.28,0.60,0.75,0.85,0.94\n",
        )
        .unwrap();
        assert_eq!(dataset.records.len(), 1);
        assert_eq!(dataset.provenance, "");
        let series = &dataset.records[0];
        assert_eq!(series.year_label(), "2012");
        assert_eq!(series.alpha0(), 1.28);
        assert_eq!(series.cum_employment(), &[0.60, 0.75, 0.85, 0.94]);
    }

    #[test]
    fn detects_percent_columns_and_rescales_them() {
        let as_percent = parse(
            "year,alpha0,cum_emp_0,cum_emp_1,cum_emp_2,cum_emp_3\n\
             2012,1.28,60,75,85,94\n",
        )
        .unwrap();
        let as_fraction = parse(
            "year,alpha0,cum_emp_0,cum_emp_1,cum_emp_2,cum_emp_3\n\
             2012,1.28,0.60,0.75,0.85,0.94\n",
        )
        .unwrap();
        assert_eq!(
            as_percent.records[0].cum_employment(),
            as_fraction.records[0].cum_employment()
        );
        // the job-offer ratio column is never rescaled
        assert_eq!(as_percent.records[0].alpha0(), 1.28);
    }

    #[test]
    fn percent_detection_is_per_column() {
        let dataset = parse(
            "year,alpha0,cum_emp_0,cum_emp_1\n\
             1996,1.08,0.58,73\n\
             2005,1.37,0.62,77\n",
        )
        .unwrap();
        assert_eq!(dataset.records[0].cum_employment(), &[0.58, 0.73]);
        assert_eq!(dataset.records[1].cum_employment(), &[0.62, 0.77]);
    }

    #[test]
    fn rejects_rates_above_one_hundred() {
        let err = parse(
            "year,alpha0,cum_emp_0\n\
             2012,1.28,250\n",
        )
        .unwrap_err();
        match err {
            Error::Parse { row, column, .. } => {
                assert_eq!(row, 2);
                assert_eq!(column, "cum_emp_0");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn rejects_rates_exceeding_a_scarce_market_ratio() {
        // employment can never exceed the vacancies when alpha < 1
        let err = parse(
            "year,alpha0,cum_emp_0,cum_emp_1\n\
             2000,0.99,0.55,0.995\n",
        )
        .unwrap_err();
        match err {
            Error::Parse {
                row,
                column,
                message,
            } => {
                assert_eq!(row, 2);
                assert_eq!(column, "cum_emp_1");
                assert!(message.contains("job-offer ratio"), "{message}");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn rejects_decreasing_series_naming_the_cell() {
        let err = parse(
            "year,alpha0,cum_emp_0,cum_emp_1\n\
             2012,1.28,0.75,0.60\n",
        )
        .unwrap_err();
        match err {
            Error::Parse {
                row,
                column,
                message,
            } => {
                assert_eq!(row, 2);
                assert_eq!(column, "cum_emp_1");
                assert!(message.contains("non-decreasing"), "{message}");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn rejects_non_numeric_cells_naming_the_cell() {
        let err = parse(
            "year,alpha0,cum_emp_0\n\
             2012,1.28,sixty\n",
        )
        .unwrap_err();
        match err {
            Error::Parse { row, column, .. } => {
                assert_eq!(row, 2);
                assert_eq!(column, "cum_emp_0");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn rejects_non_positive_job_offer_ratios() {
        for bad in ["0", "-1.2", "nan"] {
            let text = format!("year,alpha0,cum_emp_0\n2012,{bad},0.5\n");
            let err = parse(&text).unwrap_err();
            match err {
                Error::Parse { column, .. } => assert_eq!(column, "alpha0"),
                other => panic!("unexpected error {other:?}"),
            }
        }
    }

    #[test]
    fn rejects_malformed_headers() {
        for bad in [
            "years,alpha0,cum_emp_0",
            "year,alpha,cum_emp_0",
            "year,alpha0,cum_emp_1",
            "year,alpha0,cum_emp_0,cum_emp_2",
            "year",
        ] {
            let text = format!("{bad}\n2012,1.28,0.5\n");
            let err = parse(&text).unwrap_err();
            match err {
                Error::Parse { row, .. } => assert_eq!(row, 1, "header `{bad}`"),
                other => panic!("unexpected error {other:?}"),
            }
        }
    }

    #[test]
    fn rejects_duplicate_year_labels() {
        let err = parse(
            "year,alpha0,cum_emp_0\n\
             2012,1.28,0.60\n\
             2012,1.30,0.62\n",
        )
        .unwrap_err();
        match err {
            Error::Parse { row, column, .. } => {
                assert_eq!(row, 3);
                assert_eq!(column, "year");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn short_rows_are_legal_but_gaps_are_not() {
        let dataset = parse(
            "year,alpha0,cum_emp_0,cum_emp_1,cum_emp_2\n\
             1996,1.08,0.58,0.73\n",
        )
        .unwrap();
        assert_eq!(dataset.records[0].len(), 2);

        let err = parse(
            "year,alpha0,cum_emp_0,cum_emp_1,cum_emp_2\n\
             1996,1.08,0.58,,0.85\n",
        )
        .unwrap_err();
        match err {
            Error::Parse { row, column, .. } => {
                assert_eq!(row, 2);
                assert_eq!(column, "cum_emp_2");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn captures_leading_comments_and_offsets_row_numbers() {
        let dataset = parse(
            "# Source: national survey.\n\
             # Rates approximate.\n\
             year,alpha0,cum_emp_0\n\
             2012,1.28,0.60\n",
        )
        .unwrap();
        assert_eq!(dataset.provenance, "Source: national survey.\nRates approximate.");

        let err = parse(
            "# one comment line\n\
             year,alpha0,cum_emp_0\n\
             2012,1.28,bad\n",
        )
        .unwrap_err();
        match err {
            Error::Parse { row, .. } => assert_eq!(row, 3),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn empty_input_reports_a_missing_header() {
        assert!(parse("").is_err());
        assert!(parse("# only a comment\n").is_err());
    }

    // ── dataset roundtrip ──

    fn sample_dataset() -> YearDataset {
        YearDataset {
            records: vec![
                CumulativeSeries::new("2000", 0.99, vec![0.55, 0.70, 0.81]).unwrap(),
                CumulativeSeries::new("2012", 1.28, vec![0.60, 0.75, 0.85, 0.94]).unwrap(),
            ],
            provenance: "Illustrative figures.".to_string(),
        }
    }

    #[test]
    fn employment_csv_roundtrips_exactly() {
        let dataset = sample_dataset();
        let written = write_employment_csv(&dataset).unwrap();
        let reparsed = parse_employment_csv(written.as_bytes()).unwrap();
        assert_eq!(reparsed, dataset);
        // the serialized form is canonical: writing again is byte-identical
        assert_eq!(write_employment_csv(&reparsed).unwrap(), written);
    }

    #[test]
    fn employment_csv_pads_short_rows_to_the_widest_header() {
        let written = write_employment_csv(&sample_dataset()).unwrap();
        let lines: Vec<&str> = written.lines().collect();
        assert_eq!(lines[0], "# Illustrative figures.");
        assert_eq!(lines[1], "year,alpha0,cum_emp_0,cum_emp_1,cum_emp_2,cum_emp_3");
        assert_eq!(lines[2], "2000,0.99,0.55,0.7,0.81,");
        assert_eq!(lines[3], "2012,1.28,0.6,0.75,0.85,0.94");
    }

    // ── stage records ──

    fn one_record() -> StageRecord {
        StageRecord {
            stage: 1,
            alpha_stage: 1.7,
            u_stage: 0.5,
            omega_stage: 12.0 / 17.0,
            cum_employment: 0.75,
            error: 0.25,
            remaining_students: 500,
            remaining_vacancies: 600,
        }
    }

    #[test]
    fn empty_record_list_writes_a_header_only_file() {
        let written = write_stage_records_csv(&[]).unwrap();
        assert_eq!(
            written,
            "stage,alpha_stage,u_stage,omega_stage,cum_employment,error,\
             remaining_students,remaining_vacancies\n"
        );
    }

    #[test]
    fn stage_record_csv_rows_render_with_twelve_significant_digits() {
        let written = write_stage_records_csv(&[one_record()]).unwrap();
        let lines: Vec<&str> = written.lines().collect();
        assert_eq!(lines[1], "1,1.7,0.5,0.705882352941,0.75,0.25,500,600");
    }

    #[test]
    fn stage_record_json_roundtrips_field_identically() {
        let record = one_record();
        let written = write_stage_records_json(std::slice::from_ref(&record)).unwrap();
        let reparsed: Vec<StageRecord> = serde_json::from_str(&written).unwrap();
        assert_eq!(reparsed.len(), 1);
        let back = &reparsed[0];
        assert_eq!(back.stage, record.stage);
        assert_eq!(back.alpha_stage, record.alpha_stage);
        assert_eq!(back.u_stage, record.u_stage);
        assert_eq!(back.cum_employment, record.cum_employment);
        assert_eq!(back.error, record.error);
        assert_eq!(back.remaining_students, record.remaining_students);
        assert_eq!(back.remaining_vacancies, record.remaining_vacancies);
        // the one rounded field still agrees to rendered precision
        assert!((back.omega_stage - record.omega_stage).abs() <= 1e-12);
        assert_eq!(back.omega_stage, round_sig(record.omega_stage));
    }

    #[test]
    fn serialization_is_byte_stable() {
        let records = [one_record(), one_record()];
        assert_eq!(
            write_stage_records_csv(&records).unwrap(),
            write_stage_records_csv(&records).unwrap()
        );
        assert_eq!(
            write_stage_records_json(&records).unwrap(),
            write_stage_records_json(&records).unwrap()
        );
    }

    // ── analysis writers ──

    #[test]
    fn stagewise_csv_carries_the_identity_check_column() {
        let series = CumulativeSeries::new("2012", 1.28, vec![0.60, 0.75]).unwrap();
        let stagewise = stagewise_from_cumulative(&series);
        let written = write_stagewise_csv(std::slice::from_ref(&stagewise)).unwrap();
        let lines: Vec<&str> = written.lines().collect();
        assert_eq!(
            lines[0],
            "year,stage,alpha_stage,u_stage,omega_stage,identity_residual"
        );
        assert!(lines[1].starts_with("2012,0,1.28,0.4,0.53125,"));
        assert!(lines[2].starts_with("2012,1,1.7,0.625,"));
        // the trailing column is the identity self-check, zero up to rounding
        for line in &lines[1..] {
            let residual: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
            assert!(residual.abs() <= 1e-15, "residual {residual} in {line}");
        }
    }

    #[test]
    fn trajectory_csv_lists_one_point_per_year() {
        let list = vec![
            CumulativeSeries::new("2012", 1.28, vec![0.60, 0.75]).unwrap(),
            CumulativeSeries::new("2000", 0.99, vec![0.55]).unwrap(),
        ];
        let trajectory = uv_trajectory(&list, 0, TrajectoryMode::Cumulative);
        let written = write_trajectory_csv(&trajectory).unwrap();
        let lines: Vec<&str> = written.lines().collect();
        assert_eq!(lines[0], "year,stage,omega,u");
        assert!(lines[1].starts_with("2000,0,"));
        assert!(lines[2].starts_with("2012,0,"));
    }

    #[test]
    fn learning_curve_rows_cap_at_full_employment_per_regime() {
        let list = vec![
            CumulativeSeries::new("a", 2.0, vec![0.8]).unwrap(),
            CumulativeSeries::new("b", 0.6, vec![0.2]).unwrap(),
        ];
        let rows = learning_curve_rows(&list);
        assert_eq!(rows.len(), 2);
        assert!((rows[0].error - 0.2).abs() < 1e-15);
        assert!((rows[1].error - 0.4).abs() < 1e-15);
        let written = write_learning_curves_csv(&list).unwrap();
        assert!(written.starts_with("year,stage,error\n"));
    }

    #[test]
    fn json_floats_are_rounded_to_rendered_precision() {
        #[derive(Serialize)]
        struct Holder {
            x: f64,
            n: u64,
        }
        let text = to_rounded_json_pretty(&Holder {
            x: 12.0 / 17.0,
            n: 7,
        })
        .unwrap();
        assert!(text.contains("0.705882352941"), "{text}");
        assert!(text.contains("\"n\": 7"), "{text}");
        assert!(text.ends_with('\n'));
    }
}
