//! Search-volume query construction, response parsing, and cached fetching.
//!
//! Queries address a language-independent topic id (for example
//! `/m/01cpyy`) over a date range, optionally filtered by country and by
//! property (YouTube or News; plain web search sends no property filter).
//!
//! The upstream endpoint is unofficial and unstable, so the client targets
//! a configurable base URL and a documented fixture payload:
//!
//! ```json
//! {"timeline": [{"date": "2020-01-01", "value": 42}, ...]}
//! ```
//!
//! Fetched payloads are cached under a key derived from the canonical query
//! string; offline mode reads the cache only, so tests and reproductions
//! never touch the network. Responses come from a sampling procedure
//! upstream, so payloads from different retrievals are never merged: a
//! cache entry is always one whole retrieval.

use std::path::{Path, PathBuf};
use std::time::Duration;

use chrono::{DateTime, NaiveDate, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use url::form_urlencoded;

use crate::error::{Error, Result};
use crate::timeseries::{Country, SeriesKind, Source, TimeSeries};

/// Property filter of a search-volume query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Gprop {
    /// Plain web search; serialized as an absent parameter.
    All,
    Youtube,
    News,
}

impl Gprop {
    fn param_value(self) -> Option<&'static str> {
        match self {
            Gprop::All => None,
            Gprop::Youtube => Some("youtube"),
            Gprop::News => Some("news"),
        }
    }
}

impl From<Source> for Gprop {
    fn from(source: Source) -> Self {
        match source {
            Source::Youtube => Gprop::Youtube,
            Source::News => Gprop::News,
            Source::Search => Gprop::All,
        }
    }
}

/// Canonical search-volume request.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryDescriptor {
    pub topic_id: String,
    pub date_from: NaiveDate,
    pub date_to: NaiveDate,
    /// `None` queries worldwide volume.
    pub geo: Option<Country>,
    pub gprop: Gprop,
}

/// Build a canonical query, validating the date range and topic id.
pub fn build_query(
    topic_id: &str,
    date_from: NaiveDate,
    date_to: NaiveDate,
    geo: Option<Country>,
    gprop: Gprop,
) -> Result<QueryDescriptor> {
    if topic_id.is_empty() {
        return Err(Error::Argument("empty topic id".into()));
    }
    if date_from > date_to {
        return Err(Error::Argument(format!(
            "date_from {date_from} after date_to {date_to}"
        )));
    }
    Ok(QueryDescriptor {
        topic_id: topic_id.to_string(),
        date_from,
        date_to,
        geo,
        gprop,
    })
}

impl QueryDescriptor {
    /// Deterministic canonical serialization with stable parameter order
    /// `q, date, geo, gprop`. Values are form-urlencoded, which makes the
    /// serialization injective over distinct descriptors. `gprop=all` and
    /// an empty geo are omitted.
    pub fn canonical_query(&self) -> String {
        let mut ser = form_urlencoded::Serializer::new(String::new());
        ser.append_pair("q", &self.topic_id);
        ser.append_pair("date", &format!("{} {}", self.date_from, self.date_to));
        if let Some(geo) = self.geo {
            ser.append_pair("geo", geo.code());
        }
        if let Some(gprop) = self.gprop.param_value() {
            ser.append_pair("gprop", gprop);
        }
        ser.finish()
    }

    /// Lowercase hex digest of the canonical query string; used as the
    /// cache file stem.
    pub fn cache_key(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_query().as_bytes()))
    }

    /// Number of days covered, endpoints inclusive.
    pub fn num_days(&self) -> usize {
        (self.date_to - self.date_from).num_days() as usize + 1
    }
}

/// A parsed response tied to the query that produced it.
#[derive(Debug, Clone)]
pub struct FetchResult {
    pub query: QueryDescriptor,
    pub series: TimeSeries,
    pub retrieved_at: DateTime<Utc>,
    pub from_cache: bool,
}

#[derive(Debug, Deserialize, Serialize)]
struct Payload {
    timeline: Vec<PayloadEntry>,
}

#[derive(Debug, Deserialize, Serialize)]
struct PayloadEntry {
    date: String,
    value: i64,
}

/// Render a scaled series as a fixture/cache payload.
pub fn fixture_payload(series: &TimeSeries) -> Result<String> {
    if series.kind() != SeriesKind::GtScaled {
        return Err(Error::Argument(format!(
            "fixture payload expects a gt_scaled series, got {}",
            series.kind()
        )));
    }
    let payload = Payload {
        timeline: series
            .iter()
            .map(|(date, value)| PayloadEntry {
                date: date.to_string(),
                value: value as i64,
            })
            .collect(),
    };
    Ok(serde_json::to_string(&payload)?)
}

fn byte_offset(payload: &str, line: usize, column: usize) -> usize {
    // serde_json reports 1-based line/column.
    let mut offset = 0;
    for (i, l) in payload.split('\n').enumerate() {
        if i + 1 == line {
            return offset + column.saturating_sub(1);
        }
        offset += l.len() + 1;
    }
    offset
}

/// Parse a fixture/response payload into one value per day of the query
/// range, validating coverage and the `[0, 100]` value contract.
pub fn parse_response(payload: &str, query: &QueryDescriptor) -> Result<FetchResult> {
    let parsed: Payload = serde_json::from_str(payload).map_err(|e| Error::Parse {
        offset: Some(byte_offset(payload, e.line(), e.column())),
        message: e.to_string(),
    })?;

    let mut dates = Vec::with_capacity(parsed.timeline.len());
    let mut values = Vec::with_capacity(parsed.timeline.len());
    let mut expected = query.date_from;
    for entry in &parsed.timeline {
        let date: NaiveDate = entry.date.parse().map_err(|e| Error::Parse {
            offset: None,
            message: format!("bad date {:?}: {e}", entry.date),
        })?;
        if date != expected {
            return Err(Error::Parse {
                offset: None,
                message: format!("timeline missing day {expected}, found {date}"),
            });
        }
        if !(0..=100).contains(&entry.value) {
            return Err(Error::Validation(format!(
                "value {} on {date} outside [0, 100]",
                entry.value
            )));
        }
        dates.push(date);
        values.push(entry.value as f64);
        expected = match date.succ_opt() {
            Some(d) => d,
            None => break,
        };
    }
    if dates.len() != query.num_days() {
        return Err(Error::Parse {
            offset: None,
            message: format!(
                "timeline missing day {expected}: covers {} of {} days",
                dates.len(),
                query.num_days()
            ),
        });
    }
    let series = TimeSeries::new(SeriesKind::GtScaled, dates, values)?;
    Ok(FetchResult {
        query: query.clone(),
        series,
        retrieved_at: Utc::now(),
        from_cache: false,
    })
}

/// How [`GtrendsClient::fetch_with_cache`] may satisfy a query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FetchMode {
    /// Use the cache when possible, otherwise perform an HTTP GET and
    /// cache the raw payload.
    Online,
    /// Cache/fixtures only; a miss is an error.
    Offline,
}

/// Cached fetcher against a configurable base URL.
#[derive(Debug, Clone)]
pub struct GtrendsClient {
    base_url: String,
    cache_dir: PathBuf,
    retries: u32,
    backoff: Duration,
}

/// Environment variable that overrides the configured base URL.
pub const BASE_URL_ENV: &str = "GTRENDS_BASE_URL";

impl GtrendsClient {
    pub fn new(base_url: impl Into<String>, cache_dir: impl Into<PathBuf>) -> Self {
        GtrendsClient {
            base_url: base_url.into(),
            cache_dir: cache_dir.into(),
            retries: 3,
            backoff: Duration::from_millis(250),
        }
    }

    pub fn with_retries(mut self, retries: u32, backoff: Duration) -> Self {
        self.retries = retries.max(1);
        self.backoff = backoff;
        self
    }

    /// Apply the `GTRENDS_BASE_URL` override if set.
    pub fn with_env_override(mut self) -> Self {
        if let Ok(url) = std::env::var(BASE_URL_ENV) {
            if !url.is_empty() {
                self.base_url = url;
            }
        }
        self
    }

    pub fn cache_path(&self, query: &QueryDescriptor) -> PathBuf {
        self.cache_dir.join(format!("{}.json", query.cache_key()))
    }

    /// Resolve a query through the cache.
    ///
    /// Both modes serve a cache hit without touching the network, so a
    /// second fetch of an identical query is byte-identical to the first.
    /// Online mode fills a miss with an HTTP GET of the canonical query
    /// against the base URL, writing the raw payload atomically before
    /// parsing it.
    pub fn fetch_with_cache(&self, query: &QueryDescriptor, mode: FetchMode) -> Result<FetchResult> {
        let path = self.cache_path(query);
        if path.exists() {
            let payload = std::fs::read_to_string(&path)?;
            let mut result = parse_response(&payload, query)?;
            result.from_cache = true;
            if let Ok(meta) = std::fs::metadata(&path) {
                if let Ok(modified) = meta.modified() {
                    result.retrieved_at = DateTime::<Utc>::from(modified);
                }
            }
            return Ok(result);
        }
        match mode {
            FetchMode::Offline => Err(Error::CacheMiss {
                key: query.cache_key(),
            }),
            FetchMode::Online => {
                let payload = self.http_get(query)?;
                // Parse before caching so a malformed payload is never
                // mistaken for a valid cache entry later.
                let result = parse_response(&payload, query)?;
                std::fs::create_dir_all(&self.cache_dir)?;
                write_atomic(&path, payload.as_bytes())?;
                Ok(result)
            }
        }
    }

    fn http_get(&self, query: &QueryDescriptor) -> Result<String> {
        let url = format!("{}?{}", self.base_url, query.canonical_query());
        let mut last_err = String::new();
        for attempt in 0..self.retries {
            if attempt > 0 {
                std::thread::sleep(self.backoff);
            }
            match ureq::get(&url).call() {
                Ok(response) => {
                    return response.into_string().map_err(|e| Error::Transport {
                        retries: attempt + 1,
                        message: format!("reading body: {e}"),
                    });
                }
                Err(e) => last_err = e.to_string(),
            }
        }
        Err(Error::Transport {
            retries: self.retries,
            message: last_err,
        })
    }
}

/// Write through a temp file in the target directory and rename into place.
pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .ok_or_else(|| Error::Argument(format!("no parent directory for {}", path.display())))?;
    let tmp = dir.join(format!(
        ".{}.tmp-{}",
        path.file_name().and_then(|n| n.to_str()).unwrap_or("artifact"),
        std::process::id()
    ));
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}
