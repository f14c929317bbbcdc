//! Cross-correlation lead-lag detection on a constructed panel where each
//! country's index is the reference index delayed by a known number of
//! days.
//!
//! ```bash
//! cargo run --example leadlag_scan
//! ```

use chrono::NaiveDate;
use gtmarkets::leadlag::{cross_correlation, leadlag_table};
use gtmarkets::timeseries::{Country, Panel, SeriesKey, SeriesKind, Source, TimeSeries};
use rand::prelude::*;
use rand_chacha::ChaCha12Rng;

fn main() -> gtmarkets::Result<()> {
    let mut rng = ChaCha12Rng::seed_from_u64(7);
    let n = 75;
    let reference: Vec<f64> = {
        // A smooth ramp plus noise, in [0, 1].
        (0..n)
            .map(|t| {
                let ramp = 1.0 / (1.0 + (-(t as f64 - 50.0) / 6.0).exp());
                (ramp + 0.05 * (rng.random::<f64>() - 0.5)).clamp(0.0, 1.0)
            })
            .collect()
    };
    let delayed = |d: usize| -> Vec<f64> {
        let mut v = reference[..d].to_vec();
        v.extend_from_slice(&reference[..n - d]);
        v
    };

    // Raw CCF of a delayed copy: the peak sits at minus the delay.
    let ccf = cross_correlation(&delayed(4), &reference, 15)?;
    println!(
        "peak lag {} (correlation {:.4}) for a 4-day delayed copy\n",
        ccf.peak_lag, ccf.peak_value
    );

    // Panel scan: one row per source, one column per country.
    let start: NaiveDate = "2020-01-01".parse().unwrap();
    let dates: Vec<NaiveDate> = (0..n as i64).map(|i| start + chrono::Duration::days(i)).collect();
    let mut panel = Panel::new(dates.clone())?;
    let delays = [
        (Country::It, 0),
        (Country::Es, 3),
        (Country::De, 3),
        (Country::Fr, 4),
        (Country::Us, 5),
        (Country::Gb, 6),
    ];
    for source in Source::ALL {
        for (country, delay) in delays {
            let series = TimeSeries::new(SeriesKind::GtUnit, dates.clone(), delayed(delay))?;
            panel.insert(SeriesKey::gt(country, SeriesKind::GtUnit, source), series)?;
        }
    }
    let table = leadlag_table(&panel, Country::It, 15)?;
    print!("{}", table.render_text());
    print!("\nCSV form:\n{}", table.to_csv_string());
    Ok(())
}
