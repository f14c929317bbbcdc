//! Tour of the deterministic series transforms: index rescaling,
//! log-returns, case growth, calendar alignment, and the first principal
//! component of a source triple.
//!
//! ```bash
//! cargo run --example transforms_tour
//! ```

use chrono::NaiveDate;
use gtmarkets::timeseries::{SeriesKind, TimeSeries};
use gtmarkets::transforms::{
    align_to_calendar, first_principal_component, growth_rate, gt_rescale, log_returns,
    unit_rescale,
};

fn days(start: &str, n: usize) -> Vec<NaiveDate> {
    let start: NaiveDate = start.parse().unwrap();
    (0..n as i64).map(|i| start + chrono::Duration::days(i)).collect()
}

fn main() -> gtmarkets::Result<()> {
    // Raw search volume -> [0, 100] integer index -> [0, 1] regressor.
    let raw = TimeSeries::new(
        SeriesKind::GtRaw,
        days("2020-02-20", 7),
        vec![3.0, 4.0, 9.0, 21.0, 30.0, 28.0, 33.0],
    )?;
    let rescaled = gt_rescale(&raw)?;
    println!("raw:      {:?}", raw.values());
    println!("scaled:   {:?}", rescaled.series.values());
    println!("degenerate range: {}", rescaled.degenerate);
    let unit = unit_rescale(&rescaled.series)?;
    println!("unit:     {:?}\n", unit.values());

    // Prices -> log-returns (one observation shorter).
    let prices = TimeSeries::new(
        SeriesKind::Price,
        days("2020-02-20", 5),
        vec![100.0, 110.0, 99.0, 97.5, 102.0],
    )?;
    let returns = log_returns(&prices)?;
    println!("prices:   {:?}", prices.values());
    println!("returns:  {:?}\n", returns.values());

    // Case counts -> day-over-day growth; zero denominators come back as
    // flagged missing values.
    let cases = TimeSeries::new(
        SeriesKind::Cases,
        days("2020-02-20", 6),
        vec![0.0, 3.0, 9.0, 20.0, 20.0, 35.0],
    )?;
    let growth = growth_rate(&cases)?;
    println!("cases:    {:?}", cases.values());
    println!(
        "growth:   {:?} ({} missing)\n",
        growth.values(),
        growth.missing_count()
    );

    // Weekend observations disappear under the trading calendar.
    let calendar: Vec<NaiveDate> = days("2020-02-20", 7)
        .into_iter()
        .filter(|d| {
            use chrono::Datelike;
            !matches!(d.weekday(), chrono::Weekday::Sat | chrono::Weekday::Sun)
        })
        .collect();
    let aligned = align_to_calendar(&raw, &calendar)?;
    println!("daily dates:   {}", raw.len());
    println!("trading dates: {}\n", aligned.len());

    // One regressor out of three correlated sources.
    let youtube = unit.clone();
    let news = TimeSeries::new(
        SeriesKind::GtRaw,
        days("2020-02-20", 7),
        vec![5.0, 7.0, 12.0, 19.0, 27.0, 30.0, 31.0],
    )?;
    let search = TimeSeries::new(
        SeriesKind::GtRaw,
        days("2020-02-20", 7),
        vec![1.0, 2.0, 10.0, 18.0, 33.0, 30.0, 36.0],
    )?;
    let component = first_principal_component(&youtube, &news, &search)?;
    println!("first principal component: {:?}", component.values());
    Ok(())
}
