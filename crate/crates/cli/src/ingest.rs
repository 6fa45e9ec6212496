//! Force and ground-motion records: parsing, serialization, resampling.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use tfem_core::model::{ForceTable, RecordKind};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IngestError {
    #[error("line {line}: cannot parse {token:?} as a number")]
    BadNumber { line: usize, token: String },
    #[error("line {line}: expected two columns (time, value), found {found}")]
    Columns { line: usize, found: usize },
    #[error("line {line}: time {time} does not increase on the previous sample {previous}")]
    NonMonotonic { line: usize, time: f64, previous: f64 },
    #[error("record has {0} samples; at least 2 are required")]
    TooShort(usize),
    #[error("sample spacing must be positive and finite, got {0}")]
    BadDt(f64),
    #[error("record covers t <= {last_time} but the grid needs t = {requested}")]
    Coverage { requested: f64, last_time: f64 },
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error(transparent)]
    Table(#[from] tfem_core::Error),
}

/// A record as read from text, before any unit scaling.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordFormat {
    /// `time value` pairs, whitespace or comma separated.
    TwoColumn,
    /// Header lines, then values wrapped over any number of columns at a
    /// fixed spacing.
    FixedDt,
}

impl RecordFormat {
    pub fn name(self) -> &'static str {
        match self {
            RecordFormat::TwoColumn => "two-column",
            RecordFormat::FixedDt => "fixed-dt",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecordMeta {
    pub source: PathBuf,
    pub n_points: usize,
    /// Spacing for fixed-dt records; `None` when times came from a column.
    pub native_dt: Option<f64>,
    pub explicit_times: bool,
    pub scale: f64,
    pub kind: RecordKind,
}

/// Result of reading a fixed-spacing record.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedDtRecord {
    pub record: Record,
    pub warnings: Vec<String>,
}

fn tokens(line: &str) -> impl Iterator<Item = &str> {
    line.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty())
}

fn number(token: &str, line: usize) -> Result<f64, IngestError> {
    // Fortran-style exponents show up in older strong-motion files.
    let normalized = token.replace(['D', 'd'], "e");
    match normalized.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(IngestError::BadNumber { line, token: token.to_string() }),
    }
}

/// Parses `time value` pairs. Blank lines and lines starting with `#` are
/// skipped; line numbers in errors are 1-based.
pub fn parse_two_column(text: &str) -> Result<Record, IngestError> {
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = tokens(trimmed).collect();
        if toks.len() != 2 {
            return Err(IngestError::Columns { line, found: toks.len() });
        }
        let t = number(toks[0], line)?;
        let v = number(toks[1], line)?;
        if let Some(&previous) = times.last() {
            if t <= previous {
                return Err(IngestError::NonMonotonic { line, time: t, previous });
            }
        }
        times.push(t);
        values.push(v);
    }
    if times.len() < 2 {
        return Err(IngestError::TooShort(times.len()));
    }
    Ok(Record { times, values })
}

/// Parses a fixed-spacing record: skips `header_lines`, then reads every
/// number row-major. `declared` is the sample count stated by the file's
/// header, if known; a shortfall is reported as a warning.
pub fn parse_fixed_dt(
    text: &str,
    header_lines: usize,
    dt: f64,
    declared: Option<usize>,
) -> Result<FixedDtRecord, IngestError> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(IngestError::BadDt(dt));
    }
    let mut values = Vec::new();
    for (i, raw) in text.lines().enumerate().skip(header_lines) {
        for tok in tokens(raw) {
            values.push(number(tok, i + 1)?);
        }
    }
    let mut warnings = Vec::new();
    if let Some(n) = declared {
        if values.len() < n {
            warnings.push(format!("record declares {n} values but only {} were read", values.len()));
        }
    }
    if values.len() < 2 {
        return Err(IngestError::TooShort(values.len()));
    }
    let times = (0..values.len()).map(|n| n as f64 * dt).collect();
    Ok(FixedDtRecord { record: Record { times, values }, warnings })
}

/// Writes `time value` pairs with 17 significant digits.
pub fn serialize_two_column(record: &Record) -> String {
    let mut out = String::with_capacity(record.times.len() * 48);
    for (t, v) in record.times.iter().zip(&record.values) {
        let _ = writeln!(out, "{t:.16e} {v:.16e}");
    }
    out
}

/// Linear interpolation of `record` at `t_n = n·h`, `n = 0..=n_steps`.
/// Never extrapolates past the last sample.
pub fn resample_to_grid(record: &Record, h: f64, n_steps: usize) -> Result<Vec<f64>, IngestError> {
    let table = ForceTable::new(record.times.clone(), record.values.clone(), RecordKind::Force, 1.0)?;
    table.resample(h, n_steps).map_err(|e| match e {
        tfem_core::Error::Coverage { requested, last_time } => IngestError::Coverage { requested, last_time },
        other => IngestError::Table(other),
    })
}

/// How to read a record file.
#[derive(Debug, Clone, PartialEq)]
pub struct RecordSource {
    pub path: PathBuf,
    pub format: RecordFormat,
    pub dt: Option<f64>,
    pub header_lines: usize,
    pub declared_points: Option<usize>,
    pub kind: RecordKind,
    pub scale: f64,
}

/// Loads a record file into a forcing table. Warnings are returned for the
/// caller to report.
pub fn load_record(src: &RecordSource) -> Result<(ForceTable, RecordMeta, Vec<String>), IngestError> {
    let text = read(&src.path)?;
    let (record, warnings, native_dt) = match src.format {
        RecordFormat::TwoColumn => (parse_two_column(&text)?, Vec::new(), None),
        RecordFormat::FixedDt => {
            let dt = src.dt.ok_or(IngestError::BadDt(f64::NAN))?;
            let parsed = parse_fixed_dt(&text, src.header_lines, dt, src.declared_points)?;
            (parsed.record, parsed.warnings, Some(dt))
        }
    };
    let meta = RecordMeta {
        source: src.path.clone(),
        n_points: record.times.len(),
        native_dt,
        explicit_times: native_dt.is_none(),
        scale: src.scale,
        kind: src.kind,
    };
    let table = ForceTable::new(record.times, record.values, src.kind, src.scale)?;
    Ok((table, meta, warnings))
}

fn read(path: &Path) -> Result<String, IngestError> {
    std::fs::read_to_string(path).map_err(|e| IngestError::Io { path: path.to_path_buf(), message: e.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_column_basic() {
        let r = parse_two_column("0 0\n0.02 1.5\n0.04 -0.5").unwrap();
        assert_eq!(r.times, vec![0.0, 0.02, 0.04]);
        assert_eq!(r.values, vec![0.0, 1.5, -0.5]);
    }

    #[test]
    fn two_column_comments_and_commas() {
        let r = parse_two_column("# t, ag\n\n0, 1\n1,2\n").unwrap();
        assert_eq!(r.values, vec![1.0, 2.0]);
    }

    #[test]
    fn duplicate_time_names_line() {
        let err = parse_two_column("# header\n0 0\n0.02 1\n0.02 2\n").unwrap_err();
        assert_eq!(err, IngestError::NonMonotonic { line: 4, time: 0.02, previous: 0.02 });
        assert!(err.to_string().starts_with("line 4"));
    }

    #[test]
    fn bad_token_names_line() {
        let err = parse_two_column("0 0\n0.1 abc\n").unwrap_err();
        assert_eq!(err, IngestError::BadNumber { line: 2, token: "abc".into() });
    }

    #[test]
    fn fixed_dt_times() {
        let r = parse_fixed_dt("1 2 3", 0, 0.02, None).unwrap().record;
        assert_eq!(r.times, vec![0.0, 0.02, 0.04]);
    }

    #[test]
    fn fixed_dt_wrapped_and_header() {
        let text = "h1\nh2\nh3\nh4\n1 2 3 4 5\n6 7 8 9 10\n11 12\n";
        let r = parse_fixed_dt(text, 4, 0.01, Some(12)).unwrap();
        assert_eq!(r.record.values, (1..=12).map(f64::from).collect::<Vec<_>>());
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn fixed_dt_shortfall_warns() {
        let r = parse_fixed_dt("0.1 0.2 0.3\n", 0, 0.01, Some(5)).unwrap();
        assert_eq!(r.warnings, vec!["record declares 5 values but only 3 were read".to_string()]);
    }

    #[test]
    fn fortran_exponents() {
        let r = parse_fixed_dt("1.0D-02 -2.5E+00", 0, 0.1, None).unwrap().record;
        assert_eq!(r.values, vec![0.01, -2.5]);
    }

    #[test]
    fn resample_identity_and_midpoints() {
        let r = parse_two_column("0 0\n0.02 1.5\n0.04 -0.5").unwrap();
        assert_eq!(resample_to_grid(&r, 0.02, 2).unwrap(), vec![0.0, 1.5, -0.5]);
        let half = resample_to_grid(&r, 0.01, 4).unwrap();
        assert_eq!(half[1], 0.75);
        assert!((half[3] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn resample_rejects_past_end() {
        let r = parse_two_column("0 0\n0.02 1.5\n0.04 -0.5").unwrap();
        assert!(matches!(resample_to_grid(&r, 0.02, 3), Err(IngestError::Coverage { last_time, .. }) if last_time == 0.04));
    }
}
