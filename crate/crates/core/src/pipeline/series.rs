use std::fmt;
use std::io::{Read, Write};
use std::path::Path;

use chrono::{DateTime, NaiveDate, NaiveDateTime, TimeZone, Utc};

use crate::roles::TimeSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesKind {
    PriceUsd,
    Difficulty,
}

impl SeriesKind {
    pub fn name(self) -> &'static str {
        match self {
            SeriesKind::PriceUsd => "price-usd",
            SeriesKind::Difficulty => "difficulty",
        }
    }
}

impl fmt::Display for SeriesKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeriesError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("line {line}: {message}")]
    BadRow { line: u64, message: String },
    #[error("series has no data rows")]
    Empty,
}

/// An externally sourced daily (or finer) series, such as price or mining
/// difficulty. Points are strictly increasing in time with values >= 0.
#[derive(Debug, Clone, PartialEq)]
pub struct ExternalSeries {
    pub kind: SeriesKind,
    /// `(unix seconds, value)`.
    pub points: Vec<(i64, f64)>,
}

/// Result of ingestion plus non-fatal notes (duplicate dates).
#[derive(Debug, Clone, PartialEq)]
pub struct IngestedSeries {
    pub series: ExternalSeries,
    pub warnings: Vec<String>,
}

pub const SERIES_HEADER: [&str; 2] = ["date_iso8601", "value"];

/// Accepts `YYYY-MM-DD` (midnight UTC), `YYYY-MM-DDTHH:MM:SS` (UTC) or a
/// full RFC 3339 timestamp.
pub fn parse_iso8601(s: &str) -> Option<i64> {
    if let Ok(d) = NaiveDate::parse_from_str(s, "%Y-%m-%d") {
        return Some(d.and_hms_opt(0, 0, 0)?.and_utc().timestamp());
    }
    if let Ok(t) = DateTime::parse_from_rfc3339(s) {
        return Some(t.timestamp());
    }
    NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M:%S")
        .ok()
        .map(|t| t.and_utc().timestamp())
}

/// Inverse of [`parse_iso8601`]: a bare date at midnight, RFC 3339 otherwise.
pub fn format_iso8601(ts: i64) -> String {
    let t = Utc.timestamp_opt(ts, 0).single().expect("timestamp in chrono range");
    if ts.rem_euclid(86_400) == 0 {
        t.format("%Y-%m-%d").to_string()
    } else {
        t.format("%Y-%m-%dT%H:%M:%SZ").to_string()
    }
}

pub fn ingest_external_series(path: &Path, kind: SeriesKind) -> Result<IngestedSeries, SeriesError> {
    let file = std::fs::File::open(path).map_err(|e| SeriesError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    read_external_series(file, kind)
}

/// Parses CSV `date_iso8601,value`. The header line is optional. Rows are
/// sorted by date; when a date repeats the later row wins and a warning
/// naming both lines is recorded.
pub fn read_external_series<R: Read>(r: R, kind: SeriesKind) -> Result<IngestedSeries, SeriesError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(r);
    let mut rows: Vec<(i64, f64, u64)> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| SeriesError::BadRow {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let bad = |message: String| SeriesError::BadRow { line, message };
        if i == 0 && rec.get(0) == Some(SERIES_HEADER[0]) {
            continue;
        }
        if rec.len() != 2 {
            return Err(bad(format!("expected 2 fields, found {}", rec.len())));
        }
        let ts = parse_iso8601(&rec[0]).ok_or_else(|| bad(format!("unparseable date {:?}", &rec[0])))?;
        let value: f64 = rec[1]
            .parse()
            .map_err(|_| bad(format!("unparseable value {:?}", &rec[1])))?;
        if !value.is_finite() {
            return Err(bad(format!("non-finite value {:?}", &rec[1])));
        }
        if value < 0.0 {
            return Err(bad(format!("negative value {value}")));
        }
        rows.push((ts, value, line));
    }
    if rows.is_empty() {
        return Err(SeriesError::Empty);
    }
    rows.sort_by_key(|r| (r.0, r.2));
    let mut warnings = Vec::new();
    let mut points: Vec<(i64, f64)> = Vec::with_capacity(rows.len());
    let mut last_line = 0;
    for (ts, value, line) in rows {
        match points.last_mut() {
            Some(p) if p.0 == ts => {
                let msg = format!(
                    "{kind}: line {line} repeats the date {} of line {last_line}; keeping line {line}",
                    format_iso8601(ts)
                );
                log::warn!("{msg}");
                warnings.push(msg);
                p.1 = value;
            }
            _ => points.push((ts, value)),
        }
        last_line = line;
    }
    Ok(IngestedSeries {
        series: ExternalSeries { kind, points },
        warnings,
    })
}

impl ExternalSeries {
    pub fn write_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(SERIES_HEADER)?;
        for &(ts, v) in &self.points {
            wtr.write_record([format_iso8601(ts), v.to_string()])?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn to_time_series(&self) -> TimeSeries {
        let (grid, values) = self.points.iter().copied().unzip();
        TimeSeries::from_values(grid, values).expect("points are strictly increasing")
    }
}
