//! Core data types: countries, data sources, dated series, and aligned panels.
//!
//! A [`TimeSeries`] is a strictly date-ordered vector of observations with a
//! kind tag that carries the series' unit contract (prices are positive,
//! scaled search-volume indices are integers in `[0, 100]`, and so on).
//! Missing observations are stored as `NaN` and are only legal for kinds
//! where gaps occur in practice (case counts, implied vol, growth rates).
//!
//! A [`Panel`] bundles per-country series over one shared trading calendar.
//! Everything here is immutable after construction and safe to share across
//! threads.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The six panel countries, in the canonical reporting order.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(try_from = "String", into = "String")]
pub enum Country {
    De,
    Fr,
    Gb,
    Us,
    It,
    Es,
}

impl Country {
    /// All countries in canonical column order (DE, FR, GB, US, IT, ES).
    pub const ALL: [Country; 6] = [
        Country::De,
        Country::Fr,
        Country::Gb,
        Country::Us,
        Country::It,
        Country::Es,
    ];

    /// Two-letter uppercase code.
    pub fn code(self) -> &'static str {
        match self {
            Country::De => "DE",
            Country::Fr => "FR",
            Country::Gb => "GB",
            Country::Us => "US",
            Country::It => "IT",
            Country::Es => "ES",
        }
    }
}

impl fmt::Display for Country {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Country {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "DE" => Ok(Country::De),
            "FR" => Ok(Country::Fr),
            "GB" => Ok(Country::Gb),
            "US" => Ok(Country::Us),
            "IT" => Ok(Country::It),
            "ES" => Ok(Country::Es),
            other => Err(Error::Validation(format!("unknown country code {other:?}"))),
        }
    }
}

impl TryFrom<String> for Country {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Country> for String {
    fn from(c: Country) -> String {
        c.code().to_string()
    }
}

/// Search-volume data source.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(try_from = "String", into = "String")]
pub enum Source {
    Youtube,
    News,
    Search,
}

impl Source {
    /// All sources in canonical table row order.
    pub const ALL: [Source; 3] = [Source::Youtube, Source::News, Source::Search];

    /// Short machine-readable name used in CSV files and CLI flags.
    pub fn short_name(self) -> &'static str {
        match self {
            Source::Youtube => "youtube",
            Source::News => "news",
            Source::Search => "search",
        }
    }

    /// Human-readable label used in rendered tables.
    pub fn label(self) -> &'static str {
        match self {
            Source::Youtube => "YouTube",
            Source::News => "Google News",
            Source::Search => "Google Search",
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for Source {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "youtube" => Ok(Source::Youtube),
            "news" => Ok(Source::News),
            "search" => Ok(Source::Search),
            other => Err(Error::Validation(format!("unknown source {other:?}"))),
        }
    }
}

impl TryFrom<String> for Source {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Source> for String {
    fn from(s: Source) -> String {
        s.short_name().to_string()
    }
}

/// Unit contract of a [`TimeSeries`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SeriesKind {
    /// Closing prices; strictly positive.
    Price,
    /// Log-returns `ln(P_t) - ln(P_{t-1})`.
    LogReturn,
    /// Raw search-volume values before rescaling.
    GtRaw,
    /// Rescaled search-volume index: integers in `[0, 100]`.
    GtScaled,
    /// Unit-interval search-volume index: values in `[0, 1]`.
    GtUnit,
    /// New-case counts; nonnegative, gaps allowed.
    Cases,
    /// Market implied volatility; gaps allowed.
    ImpliedVol,
    /// Percent growth of case counts; gaps allowed (zero denominators).
    GrowthRate,
}

impl SeriesKind {
    pub fn name(self) -> &'static str {
        match self {
            SeriesKind::Price => "price",
            SeriesKind::LogReturn => "log_return",
            SeriesKind::GtRaw => "gt_raw",
            SeriesKind::GtScaled => "gt_scaled",
            SeriesKind::GtUnit => "gt_unit",
            SeriesKind::Cases => "cases",
            SeriesKind::ImpliedVol => "implied_vol",
            SeriesKind::GrowthRate => "growth_rate",
        }
    }

    /// Kinds where a missing observation (`NaN`) is legal.
    pub fn allows_missing(self) -> bool {
        matches!(
            self,
            SeriesKind::Cases | SeriesKind::ImpliedVol | SeriesKind::GrowthRate
        )
    }

    /// Series of this kind start one calendar step late (differenced data).
    pub fn is_differenced(self) -> bool {
        matches!(self, SeriesKind::LogReturn | SeriesKind::GrowthRate)
    }
}

impl fmt::Display for SeriesKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SeriesKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "price" => Ok(SeriesKind::Price),
            "log_return" => Ok(SeriesKind::LogReturn),
            "gt_raw" => Ok(SeriesKind::GtRaw),
            "gt_scaled" => Ok(SeriesKind::GtScaled),
            "gt_unit" => Ok(SeriesKind::GtUnit),
            "cases" => Ok(SeriesKind::Cases),
            "implied_vol" => Ok(SeriesKind::ImpliedVol),
            "growth_rate" => Ok(SeriesKind::GrowthRate),
            other => Err(Error::Validation(format!("unknown series kind {other:?}"))),
        }
    }
}

/// A date-indexed real-valued series with a unit contract.
///
/// Dates are strictly increasing and pair one-to-one with values. `NaN`
/// encodes a missing observation and is rejected for kinds whose contract
/// requires complete data.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    kind: SeriesKind,
    dates: Vec<NaiveDate>,
    values: Vec<f64>,
}

impl TimeSeries {
    /// Build a series, enforcing the kind's invariants.
    pub fn new(kind: SeriesKind, dates: Vec<NaiveDate>, values: Vec<f64>) -> Result<Self> {
        if dates.len() != values.len() {
            return Err(Error::Validation(format!(
                "dates/values length mismatch: {} vs {}",
                dates.len(),
                values.len()
            )));
        }
        for w in dates.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::Validation(format!(
                    "dates not strictly increasing at {} -> {}",
                    w[0], w[1]
                )));
            }
        }
        for (i, &v) in values.iter().enumerate() {
            if v.is_nan() {
                if !kind.allows_missing() {
                    return Err(Error::Validation(format!(
                        "missing value at {} not allowed for kind {}",
                        dates[i], kind
                    )));
                }
                continue;
            }
            if !v.is_finite() {
                return Err(Error::Validation(format!(
                    "non-finite value {v} at {}",
                    dates[i]
                )));
            }
            match kind {
                SeriesKind::Price if v <= 0.0 => {
                    return Err(Error::Domain(format!(
                        "non-positive price {v} at {}",
                        dates[i]
                    )));
                }
                SeriesKind::GtScaled if v.fract() != 0.0 || !(0.0..=100.0).contains(&v) => {
                    return Err(Error::Domain(format!(
                        "gt_scaled value {v} at {} must be an integer in [0, 100]",
                        dates[i]
                    )));
                }
                SeriesKind::GtUnit if !(0.0..=1.0).contains(&v) => {
                    return Err(Error::Domain(format!(
                        "gt_unit value {v} at {} outside [0, 1]",
                        dates[i]
                    )));
                }
                SeriesKind::Cases if v < 0.0 => {
                    return Err(Error::Domain(format!(
                        "negative case count {v} at {}",
                        dates[i]
                    )));
                }
                _ => {}
            }
        }
        Ok(TimeSeries {
            kind,
            dates,
            values,
        })
    }

    pub fn kind(&self) -> SeriesKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn first_date(&self) -> Option<NaiveDate> {
        self.dates.first().copied()
    }

    pub fn last_date(&self) -> Option<NaiveDate> {
        self.dates.last().copied()
    }

    /// Whether the observation at index `i` is missing.
    pub fn is_missing(&self, i: usize) -> bool {
        self.values[i].is_nan()
    }

    /// Number of missing observations.
    pub fn missing_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_nan()).count()
    }

    /// Value at a given date, if the date is present and the value not missing.
    pub fn value_on(&self, date: NaiveDate) -> Option<f64> {
        let i = self.dates.binary_search(&date).ok()?;
        let v = self.values[i];
        (!v.is_nan()).then_some(v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (NaiveDate, f64)> + '_ {
        self.dates.iter().copied().zip(self.values.iter().copied())
    }

    /// Same values under a different kind tag, re-validated.
    pub fn with_kind(&self, kind: SeriesKind) -> Result<TimeSeries> {
        TimeSeries::new(kind, self.dates.clone(), self.values.clone())
    }
}

/// Identifies one series inside a [`Panel`].
///
/// `source` is set only for search-volume series; market and epidemic series
/// carry `None`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SeriesKey {
    pub country: Country,
    pub kind: SeriesKind,
    pub source: Option<Source>,
}

impl SeriesKey {
    pub fn market(country: Country, kind: SeriesKind) -> Self {
        SeriesKey {
            country,
            kind,
            source: None,
        }
    }

    pub fn gt(country: Country, kind: SeriesKind, source: Source) -> Self {
        SeriesKey {
            country,
            kind,
            source: Some(source),
        }
    }
}

impl fmt::Display for SeriesKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.source {
            Some(s) => write!(f, "{}/{}/{}", self.country, s, self.kind),
            None => write!(f, "{}/{}", self.country, self.kind),
        }
    }
}

/// Aligned per-country series over one shared trading calendar.
///
/// Every series either matches the calendar exactly or, for differenced
/// kinds (log-returns, growth rates), matches the calendar with the first
/// date dropped.
#[derive(Debug, Clone)]
pub struct Panel {
    calendar: Vec<NaiveDate>,
    series: BTreeMap<SeriesKey, TimeSeries>,
}

impl Panel {
    pub fn new(calendar: Vec<NaiveDate>) -> Result<Self> {
        if calendar.is_empty() {
            return Err(Error::Validation("empty panel calendar".into()));
        }
        for w in calendar.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::Validation(format!(
                    "calendar not strictly increasing at {} -> {}",
                    w[0], w[1]
                )));
            }
        }
        Ok(Panel {
            calendar,
            series: BTreeMap::new(),
        })
    }

    pub fn calendar(&self) -> &[NaiveDate] {
        &self.calendar
    }

    /// Insert a series, enforcing calendar alignment.
    pub fn insert(&mut self, key: SeriesKey, series: TimeSeries) -> Result<()> {
        let expected: &[NaiveDate] = if series.kind().is_differenced() {
            &self.calendar[1..]
        } else {
            &self.calendar
        };
        if series.dates() != expected {
            return Err(Error::Validation(format!(
                "series {key} not aligned to the panel calendar \
                 ({} dates vs {} expected)",
                series.len(),
                expected.len()
            )));
        }
        if self.series.contains_key(&key) {
            return Err(Error::Duplicate(format!("panel already contains {key}")));
        }
        self.series.insert(key, series);
        Ok(())
    }

    pub fn get(&self, key: &SeriesKey) -> Option<&TimeSeries> {
        self.series.get(key)
    }

    pub fn require(&self, key: &SeriesKey) -> Result<&TimeSeries> {
        self.series
            .get(key)
            .ok_or_else(|| Error::Validation(format!("panel is missing series {key}")))
    }

    /// Countries present in any contained series, canonical order.
    pub fn countries(&self) -> Vec<Country> {
        Country::ALL
            .into_iter()
            .filter(|c| self.series.keys().any(|k| k.country == *c))
            .collect()
    }

    /// Sources present in any contained series, canonical order.
    pub fn sources(&self) -> Vec<Source> {
        Source::ALL
            .into_iter()
            .filter(|s| self.series.keys().any(|k| k.source == Some(*s)))
            .collect()
    }

    /// All (key, series) pairs in deterministic key order.
    pub fn iter(&self) -> impl Iterator<Item = (&SeriesKey, &TimeSeries)> {
        self.series.iter()
    }

    pub fn len(&self) -> usize {
        self.series.len()
    }

    pub fn is_empty(&self) -> bool {
        self.series.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn d(s: &str) -> NaiveDate {
        s.parse().unwrap()
    }

    fn days(start: &str, n: usize) -> Vec<NaiveDate> {
        let mut out = Vec::with_capacity(n);
        let mut cur = d(start);
        for _ in 0..n {
            out.push(cur);
            cur = cur.succ_opt().unwrap();
        }
        out
    }

    #[test]
    fn country_round_trip() {
        for c in Country::ALL {
            assert_eq!(c.code().parse::<Country>().unwrap(), c);
        }
        assert!("XX".parse::<Country>().is_err());
    }

    #[test]
    fn source_round_trip() {
        for s in Source::ALL {
            assert_eq!(s.short_name().parse::<Source>().unwrap(), s);
        }
        assert!("tiktok".parse::<Source>().is_err());
    }

    #[test]
    fn kind_round_trip() {
        for k in [
            SeriesKind::Price,
            SeriesKind::LogReturn,
            SeriesKind::GtRaw,
            SeriesKind::GtScaled,
            SeriesKind::GtUnit,
            SeriesKind::Cases,
            SeriesKind::ImpliedVol,
            SeriesKind::GrowthRate,
        ] {
            assert_eq!(k.name().parse::<SeriesKind>().unwrap(), k);
        }
    }

    #[test]
    fn rejects_unsorted_dates() {
        let err = TimeSeries::new(
            SeriesKind::Price,
            vec![d("2020-01-02"), d("2020-01-01")],
            vec![1.0, 2.0],
        );
        assert!(err.is_err());
    }

    #[test]
    fn rejects_non_positive_price() {
        let err = TimeSeries::new(SeriesKind::Price, days("2020-01-01", 2), vec![1.0, 0.0]);
        assert!(matches!(err, Err(Error::Domain(_))));
        let err = TimeSeries::new(SeriesKind::Price, days("2020-01-01", 1), vec![-3.0]);
        assert!(matches!(err, Err(Error::Domain(_))));
    }

    #[test]
    fn rejects_fractional_or_out_of_range_gt_scaled() {
        assert!(TimeSeries::new(SeriesKind::GtScaled, days("2020-01-01", 1), vec![33.5]).is_err());
        assert!(TimeSeries::new(SeriesKind::GtScaled, days("2020-01-01", 1), vec![101.0]).is_err());
        assert!(TimeSeries::new(SeriesKind::GtScaled, days("2020-01-01", 1), vec![-1.0]).is_err());
        assert!(TimeSeries::new(SeriesKind::GtScaled, days("2020-01-01", 1), vec![33.0]).is_ok());
    }

    #[test]
    fn rejects_gt_unit_outside_interval() {
        assert!(TimeSeries::new(SeriesKind::GtUnit, days("2020-01-01", 1), vec![1.2]).is_err());
        assert!(TimeSeries::new(SeriesKind::GtUnit, days("2020-01-01", 1), vec![0.33]).is_ok());
    }

    #[test]
    fn missing_only_where_allowed() {
        assert!(
            TimeSeries::new(SeriesKind::Price, days("2020-01-01", 1), vec![f64::NAN]).is_err()
        );
        let ts =
            TimeSeries::new(SeriesKind::Cases, days("2020-01-01", 2), vec![f64::NAN, 5.0]).unwrap();
        assert!(ts.is_missing(0));
        assert_eq!(ts.missing_count(), 1);
        assert_eq!(ts.value_on(d("2020-01-01")), None);
        assert_eq!(ts.value_on(d("2020-01-02")), Some(5.0));
    }

    #[test]
    fn panel_alignment_enforced() {
        let cal = days("2020-01-01", 4);
        let mut panel = Panel::new(cal.clone()).unwrap();
        let prices = TimeSeries::new(SeriesKind::Price, cal.clone(), vec![1.0; 4]).unwrap();
        panel
            .insert(SeriesKey::market(Country::It, SeriesKind::Price), prices)
            .unwrap();

        // Log-returns sit on the calendar minus its first date.
        let rets =
            TimeSeries::new(SeriesKind::LogReturn, cal[1..].to_vec(), vec![0.0; 3]).unwrap();
        panel
            .insert(SeriesKey::market(Country::It, SeriesKind::LogReturn), rets)
            .unwrap();

        // Mis-aligned series is rejected.
        let short = TimeSeries::new(SeriesKind::Price, cal[..2].to_vec(), vec![1.0; 2]).unwrap();
        assert!(panel
            .insert(SeriesKey::market(Country::De, SeriesKind::Price), short)
            .is_err());

        assert_eq!(panel.countries(), vec![Country::It]);
        assert!(panel.sources().is_empty());
    }

    #[test]
    fn panel_rejects_duplicate_key() {
        let cal = days("2020-01-01", 2);
        let mut panel = Panel::new(cal.clone()).unwrap();
        let s = TimeSeries::new(SeriesKind::Price, cal.clone(), vec![1.0, 2.0]).unwrap();
        let key = SeriesKey::market(Country::Us, SeriesKind::Price);
        panel.insert(key, s.clone()).unwrap();
        assert!(matches!(panel.insert(key, s), Err(Error::Duplicate(_))));
    }
}
