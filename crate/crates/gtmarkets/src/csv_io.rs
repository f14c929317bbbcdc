//! CSV input/output for the shared series schema.
//!
//! Every tabular file in the pipeline uses one header:
//!
//! ```text
//! date,country,source,kind,value
//! ```
//!
//! Dates are ISO-8601 (`YYYY-MM-DD`), the decimal separator is a point with
//! no thousands separators, `source` is empty for non-search series, and a
//! missing value is an empty field.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::timeseries::{Panel, SeriesKey, SeriesKind, TimeSeries};

pub const HEADER: [&str; 5] = ["date", "country", "source", "kind", "value"];

/// Read a schema CSV into per-key series, preserving file order per key.
pub fn read_series_csv(path: &Path) -> Result<Vec<(SeriesKey, TimeSeries)>> {
    let file_label = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)?;
    {
        let headers = reader.headers()?;
        let got: Vec<&str> = headers.iter().collect();
        if got != HEADER {
            return Err(Error::Schema {
                file: file_label,
                line: 1,
                message: format!("expected header {:?}, got {:?}", HEADER.join(","), got.join(",")),
            });
        }
    }

    let mut grouped: BTreeMap<SeriesKey, Vec<(NaiveDate, f64)>> = BTreeMap::new();
    for (idx, record) in reader.records().enumerate() {
        let line = idx as u64 + 2;
        let record = record?;
        let schema_err = |message: String| Error::Schema {
            file: file_label.clone(),
            line,
            message,
        };
        if record.len() != 5 {
            return Err(schema_err(format!("expected 5 fields, got {}", record.len())));
        }
        let date: NaiveDate = record[0]
            .parse()
            .map_err(|e| schema_err(format!("bad date {:?}: {e}", &record[0])))?;
        let country = record[1]
            .parse()
            .map_err(|e| schema_err(format!("{e}")))?;
        let source = if record[2].is_empty() {
            None
        } else {
            Some(record[2].parse().map_err(|e| schema_err(format!("{e}")))?)
        };
        let kind: SeriesKind = record[3]
            .parse()
            .map_err(|e| schema_err(format!("{e}")))?;
        let value = if record[4].is_empty() {
            f64::NAN
        } else {
            record[4]
                .parse()
                .map_err(|e| schema_err(format!("bad value {:?}: {e}", &record[4])))?
        };
        let key = SeriesKey {
            country,
            kind,
            source,
        };
        let rows = grouped.entry(key).or_default();
        if rows.iter().any(|(d, _)| *d == date) {
            return Err(Error::Duplicate(format!(
                "{file_label} line {line}: second row for {key} on {date}"
            )));
        }
        rows.push((date, value));
    }

    let mut out = Vec::with_capacity(grouped.len());
    for (key, mut rows) in grouped {
        rows.sort_by_key(|(d, _)| *d);
        let (dates, values) = rows.into_iter().unzip();
        let series = TimeSeries::new(key.kind, dates, values).map_err(|e| Error::Schema {
            file: file_label.clone(),
            line: 0,
            message: format!("series {key}: {e}"),
        })?;
        out.push((key, series));
    }
    Ok(out)
}

/// Write series in deterministic key order, full float precision.
pub fn write_series_csv<'a, W, I>(writer: W, entries: I) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = (&'a SeriesKey, &'a TimeSeries)>,
{
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(HEADER)?;
    for (key, series) in entries {
        let source = key.source.map(|s| s.short_name()).unwrap_or("");
        for (date, value) in series.iter() {
            let rendered = if value.is_nan() {
                String::new()
            } else {
                format!("{value}")
            };
            w.write_record([
                date.to_string().as_str(),
                key.country.code(),
                source,
                key.kind.name(),
                rendered.as_str(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Serialize a whole panel to the schema CSV.
pub fn panel_to_csv_string(panel: &Panel) -> Result<String> {
    let mut buf = Vec::new();
    write_series_csv(&mut buf, panel.iter())?;
    String::from_utf8(buf).map_err(|e| Error::Validation(format!("non-utf8 csv: {e}")))
}

/// Load a panel from a schema CSV written by [`panel_to_csv_string`].
///
/// The shared calendar is recovered from the price series, which every
/// persisted panel contains.
pub fn panel_from_csv(path: &Path) -> Result<Panel> {
    let entries = read_series_csv(path)?;
    let calendar = entries
        .iter()
        .find(|(k, _)| k.kind == SeriesKind::Price)
        .map(|(_, s)| s.dates().to_vec())
        .ok_or_else(|| {
            Error::Validation(format!(
                "{}: panel file contains no price series to define the calendar",
                path.display()
            ))
        })?;
    let mut panel = Panel::new(calendar)?;
    for (key, series) in entries {
        panel.insert(key, series)?;
    }
    Ok(panel)
}
