//! Seeded synthetic fixture generation.
//!
//! The original market and search-volume data cannot be redistributed, so
//! the repository ships a deterministic synthetic set with the same shape:
//! six countries, three sources, and a weekday trading calendar (75 days
//! over the default range). Concern ramps up per country with the
//! reference country leading, so lead-lag scans and regressions on the
//! fixtures produce recognizably structured output.

use std::path::{Path, PathBuf};

use chrono::{Datelike, NaiveDate, Weekday};
use rand::prelude::*;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::csv_io::write_series_csv;
use crate::error::Result;
use crate::gtrends::{build_query, fixture_payload, write_atomic, Gprop};
use crate::timeseries::{Country, SeriesKey, SeriesKind, Source, TimeSeries};
use crate::transforms::gt_rescale;

/// What to generate and where.
#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub seed: u64,
    pub date_from: NaiveDate,
    pub date_to: NaiveDate,
    pub topic_id: String,
    pub out_dir: PathBuf,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            seed: 42,
            date_from: NaiveDate::from_ymd_opt(2020, 1, 1).unwrap(),
            date_to: NaiveDate::from_ymd_opt(2020, 4, 14).unwrap(),
            topic_id: "/m/01cpyy".to_string(),
            out_dir: PathBuf::from("fixtures"),
        }
    }
}

/// Every day in the range, endpoints inclusive.
pub fn daily_calendar(from: NaiveDate, to: NaiveDate) -> Vec<NaiveDate> {
    let mut out = Vec::new();
    let mut cur = from;
    while cur <= to {
        out.push(cur);
        cur = cur.succ_opt().unwrap();
    }
    out
}

/// Weekdays in the range; the synthetic trading calendar.
pub fn weekday_calendar(from: NaiveDate, to: NaiveDate) -> Vec<NaiveDate> {
    daily_calendar(from, to)
        .into_iter()
        .filter(|d| !matches!(d.weekday(), Weekday::Sat | Weekday::Sun))
        .collect()
}

/// Days after the range start at which each country's concern ramps up;
/// the reference country (IT) moves first.
fn ramp_center(country: Country) -> f64 {
    match country {
        Country::It => 52.0,
        Country::Es => 55.0,
        Country::De => 56.0,
        Country::Fr => 58.0,
        Country::Us => 59.0,
        Country::Gb => 60.0,
    }
}

fn source_shift(source: Source) -> f64 {
    match source {
        Source::Youtube => 0.0,
        Source::News => 0.8,
        Source::Search => 1.6,
    }
}

/// Logistic concern level in [0, 1] for a country at day index `t`.
fn concern(country: Country, t: f64) -> f64 {
    1.0 / (1.0 + (-(t - ramp_center(country)) / 5.0).exp())
}

/// Generate the full fixture set; returns the files written.
pub fn generate_fixture_set(config: &SynthConfig) -> Result<Vec<PathBuf>> {
    let mut rng = ChaCha12Rng::seed_from_u64(config.seed);
    let daily = daily_calendar(config.date_from, config.date_to);
    let trading = weekday_calendar(config.date_from, config.date_to);
    let gt_dir = config.out_dir.join("gt");
    std::fs::create_dir_all(&gt_dir)?;

    let mut written = Vec::new();

    // Search-volume fixtures: one payload per (country, source) query.
    let mut index = std::collections::BTreeMap::new();
    for country in Country::ALL {
        for source in Source::ALL {
            let raw: Vec<f64> = daily
                .iter()
                .enumerate()
                .map(|(t, _)| {
                    let level = concern(country, t as f64 - source_shift(source));
                    (level + 0.04 * rng.sample::<f64, _>(StandardNormal)).max(0.0)
                })
                .collect();
            let raw_series = TimeSeries::new(SeriesKind::GtRaw, daily.clone(), raw)?;
            let scaled = gt_rescale(&raw_series)?.series;
            let query = build_query(
                &config.topic_id,
                config.date_from,
                config.date_to,
                Some(country),
                Gprop::from(source),
            )?;
            let path = gt_dir.join(format!("{}.json", query.cache_key()));
            write_atomic(&path, fixture_payload(&scaled)?.as_bytes())?;
            index.insert(query.cache_key(), query.canonical_query());
            written.push(path);
        }
    }
    let index_path = gt_dir.join("index.json");
    write_atomic(
        &index_path,
        serde_json::to_string_pretty(&index)?.as_bytes(),
    )?;
    written.push(index_path);

    // Prices: returns respond negatively to the country's own concern.
    let mut price_entries = Vec::new();
    for (i, country) in Country::ALL.into_iter().enumerate() {
        let mut prices = vec![100.0 * (1.0 + i as f64 / 10.0)];
        for (t, _) in trading.iter().enumerate().skip(1) {
            let day_index = (trading[t] - config.date_from).num_days() as f64;
            let ret = 0.0006 - 0.035 * concern(country, day_index)
                + 0.012 * rng.sample::<f64, _>(StandardNormal);
            prices.push(prices[t - 1] * ret.exp());
        }
        let series = TimeSeries::new(SeriesKind::Price, trading.clone(), prices)?;
        price_entries.push((SeriesKey::market(country, SeriesKind::Price), series));
    }
    let prices_path = config.out_dir.join("prices.csv");
    write_csv(&prices_path, &price_entries)?;
    written.push(prices_path);

    // New-case counts: zero before the outbreak, then concern-shaped.
    let mut case_entries = Vec::new();
    for country in Country::ALL {
        let values: Vec<f64> = daily
            .iter()
            .enumerate()
            .map(|(t, _)| {
                let level = concern(country, t as f64);
                if level < 0.02 {
                    0.0
                } else {
                    (2000.0 * level * level * (1.0 + 0.1 * rng.random::<f64>())).round()
                }
            })
            .collect();
        let series = TimeSeries::new(SeriesKind::Cases, daily.clone(), values)?;
        case_entries.push((SeriesKey::market(country, SeriesKind::Cases), series));
    }
    let cases_path = config.out_dir.join("cases.csv");
    write_csv(&cases_path, &case_entries)?;
    written.push(cases_path);

    // Implied volatility on the trading calendar.
    let mut iv_entries = Vec::new();
    for country in Country::ALL {
        let values: Vec<f64> = trading
            .iter()
            .map(|d| {
                let day_index = (*d - config.date_from).num_days() as f64;
                15.0 + 55.0 * concern(country, day_index)
                    + 2.0 * rng.sample::<f64, _>(StandardNormal)
            })
            .collect();
        let series = TimeSeries::new(SeriesKind::ImpliedVol, trading.clone(), values)?;
        iv_entries.push((SeriesKey::market(country, SeriesKind::ImpliedVol), series));
    }
    let iv_path = config.out_dir.join("implied_vol.csv");
    write_csv(&iv_path, &iv_entries)?;
    written.push(iv_path);

    // A ready-to-run pipeline config next to the data.
    let config_path = config.out_dir.join("config.toml");
    let config_body = format!(
        "# Synthetic fixture pipeline configuration.\n\
         seed = {seed}\n\
         date_from = \"{from}\"\n\
         date_to = \"{to}\"\n\
         topic_id = \"{topic}\"\n\
         offline = true\n\
         output_dir = \"out\"\n\
         \n\
         [data]\n\
         prices_csv = \"prices.csv\"\n\
         gt_cache_dir = \"gt\"\n\
         cases_csv = \"cases.csv\"\n\
         implied_vol_csv = \"implied_vol.csv\"\n\
         \n\
         [se]\n\
         kind = \"hc1\"\n\
         \n\
         [tvp]\n\
         starts = 8\n",
        seed = config.seed,
        from = config.date_from,
        to = config.date_to,
        topic = config.topic_id,
    );
    write_atomic(&config_path, config_body.as_bytes())?;
    written.push(config_path);

    Ok(written)
}

fn write_csv(path: &Path, entries: &[(SeriesKey, TimeSeries)]) -> Result<()> {
    let mut buf = Vec::new();
    write_series_csv(&mut buf, entries.iter().map(|(k, s)| (k, s)))?;
    write_atomic(path, &buf)
}
