//! Time-varying-parameter estimation: simulate a coefficient path with a
//! sharp level shift, recover it by maximum likelihood plus Kalman
//! smoothing, and mark the reference events on the recovered path.
//!
//! ```bash
//! cargo run --example tvp_paths
//! ```

use chrono::NaiveDate;
use gtmarkets::tvp::{event_overlay, fit_tvp_mle, TvpOptions};
use rand::prelude::*;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

fn main() -> gtmarkets::Result<()> {
    let mut rng = ChaCha12Rng::seed_from_u64(3);
    let n = 300;

    // True coefficient: flat at zero, then a drop to -0.06 at t = 150.
    let true_beta = |t: usize| if t < 150 { 0.0 } else { -0.06 };
    let (alpha, delta, sigma) = (0.002, -0.15, 0.008);
    let mut y = vec![0.0];
    let mut gt = vec![rng.random::<f64>()];
    for t in 1..n {
        let h: f64 = rng.random();
        let eps: f64 = rng.sample::<f64, _>(StandardNormal);
        y.push(alpha + true_beta(t) * h + delta * y[t - 1] + sigma * eps);
        gt.push(h);
    }

    let fit = fit_tvp_mle(&y, &gt, &TvpOptions::default())?;
    println!(
        "estimated alpha={:.4} delta={:.3} sigma2={:.2e} a={:.3} b={:.2e}",
        fit.params.alpha, fit.params.delta, fit.params.sigma2, fit.params.a, fit.params.b
    );
    println!("loglik {:.2}, converged: {}", fit.loglik, fit.converged);
    for warning in &fit.warnings {
        println!("warning: {warning}");
    }

    // Sparse text rendering of the smoothed path around the shift.
    println!("\n  t   true    smoothed (95% band)");
    for t in (120..=180).step_by(10) {
        let sd = fit.smoothed_var[t].sqrt();
        println!(
            "{:>4}  {:>6.3}  {:>7.4}  [{:>7.4}, {:>7.4}]",
            t,
            true_beta(t + 1),
            fit.smoothed_mean[t],
            fit.smoothed_mean[t] - 1.96 * sd,
            fit.smoothed_mean[t] + 1.96 * sd,
        );
    }

    // Event overlay over a calendar that covers the outbreak window.
    let start: NaiveDate = "2020-01-01".parse().unwrap();
    let calendar: Vec<NaiveDate> = (0..104).map(|i| start + chrono::Duration::days(i)).collect();
    println!("\nevents inside the calendar:");
    for (date, label) in event_overlay(&calendar) {
        println!("  {date}  {label}");
    }
    Ok(())
}
