//! Constant-parameter AR(1)-X regressions with robust standard errors,
//! rendered as a fixed-format table.
//!
//! Simulates returns that load negatively on a shared concern index, fits
//! each country separately, and prints both the per-country table and the
//! coefficient CSV export.
//!
//! ```bash
//! cargo run --example arx_tables
//! ```

use chrono::NaiveDate;
use gtmarkets::regress::{fit_arx, SeKind};
use gtmarkets::tables::{format_results_table, results_to_csv};
use gtmarkets::timeseries::{Country, SeriesKind, TimeSeries};
use rand::prelude::*;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

fn main() -> gtmarkets::Result<()> {
    let mut rng = ChaCha12Rng::seed_from_u64(99);
    let n = 75;
    let start: NaiveDate = "2020-01-01".parse().unwrap();
    let dates: Vec<NaiveDate> = (0..n as i64).map(|i| start + chrono::Duration::days(i)).collect();

    let mut results = Vec::new();
    for (i, country) in Country::ALL.into_iter().enumerate() {
        // Country-specific concern ramp in [0, 1].
        let gt: Vec<f64> = (0..n)
            .map(|t| {
                let ramp = 1.0 / (1.0 + (-(t as f64 - 50.0 - i as f64) / 6.0).exp());
                (ramp + 0.03 * (rng.random::<f64>() - 0.5)).clamp(0.0, 1.0)
            })
            .collect();
        // Returns respond negatively to concern, with an AR(1) term.
        let (alpha, beta, delta) = (0.004, -0.04 - 0.005 * i as f64, -0.2);
        let mut y = vec![0.0];
        for t in 1..n {
            let eps: f64 = rng.sample::<f64, _>(StandardNormal);
            y.push(alpha + beta * gt[t] + delta * y[t - 1] + 0.011 * eps);
        }
        let y = TimeSeries::new(SeriesKind::LogReturn, dates.clone(), y)?;
        let gt = TimeSeries::new(SeriesKind::GtUnit, dates.clone(), gt)?;
        let fit = fit_arx(&y, &gt, SeKind::Hc1)?;
        results.push((country, fit));
    }

    print!("{}", format_results_table(&results, "AR(1)-X on own index (simulated)"));
    println!("\nCSV export (first lines):");
    for line in results_to_csv(&results).lines().take(5) {
        println!("{line}");
    }
    Ok(())
}
