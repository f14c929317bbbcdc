//! Build canonical search-volume queries, serialize a fixture payload,
//! and resolve it through the offline cache.
//!
//! ```bash
//! cargo run --example gtrends_offline
//! ```

use chrono::NaiveDate;
use gtmarkets::gtrends::{
    build_query, fixture_payload, parse_response, FetchMode, Gprop, GtrendsClient,
};
use gtmarkets::timeseries::{Country, SeriesKind, TimeSeries};

fn main() -> gtmarkets::Result<()> {
    let from: NaiveDate = "2020-01-01".parse().unwrap();
    let to: NaiveDate = "2020-01-07".parse().unwrap();

    // Canonical queries serialize with a stable parameter order; the
    // all-properties filter and worldwide scope are simply omitted.
    let query = build_query("/m/01cpyy", from, to, Some(Country::It), Gprop::Youtube)?;
    println!("canonical: {}", query.canonical_query());
    println!("cache key: {}", query.cache_key());
    let worldwide = build_query("/m/01cpyy", from, to, None, Gprop::All)?;
    println!("worldwide: {}\n", worldwide.canonical_query());

    // A fixture payload is the documented JSON timeline.
    let series = TimeSeries::new(
        SeriesKind::GtScaled,
        (0..7).map(|i| from + chrono::Duration::days(i)).collect(),
        vec![0.0, 10.0, 25.0, 40.0, 70.0, 100.0, 90.0],
    )?;
    let payload = fixture_payload(&series)?;
    println!("payload: {payload}\n");

    let parsed = parse_response(&payload, &query)?;
    println!("parsed values: {:?}", parsed.series.values());

    // Drop the payload into a cache directory and fetch it offline.
    let cache = tempfile::tempdir().expect("temp cache dir");
    let client = GtrendsClient::new("http://example.invalid/timeline", cache.path());
    std::fs::write(client.cache_path(&query), &payload)?;
    let fetched = client.fetch_with_cache(&query, FetchMode::Offline)?;
    println!(
        "offline fetch: from_cache={} first={} last={}",
        fetched.from_cache,
        fetched.series.values()[0],
        fetched.series.values()[6],
    );

    // A query that was never cached is a hard miss in offline mode.
    let missing = build_query("/m/01cpyy", from, to, Some(Country::Fr), Gprop::News)?;
    match client.fetch_with_cache(&missing, FetchMode::Offline) {
        Err(e) => println!("expected miss: {e}"),
        Ok(_) => unreachable!("cache should not contain this query"),
    }
    Ok(())
}
