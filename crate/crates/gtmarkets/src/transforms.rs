//! Deterministic series transforms: returns, rescaling, calendar alignment,
//! case growth, and the first principal component of a series triple.
//!
//! All functions are pure. Rounding in [`gt_rescale`] is half-away-from-zero
//! to the nearest integer so fixtures are bit-exact.

use chrono::NaiveDate;
use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::timeseries::{SeriesKind, TimeSeries};

/// Log-returns `r_t = ln(P_t) - ln(P_{t-1})`.
///
/// Output dates are the input dates from the second one onward, so the
/// result is one observation shorter than the input.
pub fn log_returns(prices: &TimeSeries) -> Result<TimeSeries> {
    if prices.kind() != SeriesKind::Price {
        return Err(Error::Domain(format!(
            "log_returns expects a price series, got {}",
            prices.kind()
        )));
    }
    if prices.len() < 2 {
        return Err(Error::InsufficientData(
            "log_returns needs at least 2 prices".into(),
        ));
    }
    let values = prices.values();
    if let Some(&bad) = values.iter().find(|v| **v <= 0.0 || v.is_nan()) {
        return Err(Error::Domain(format!("non-positive price {bad}")));
    }
    let rets: Vec<f64> = values.windows(2).map(|w| w[1].ln() - w[0].ln()).collect();
    TimeSeries::new(SeriesKind::LogReturn, prices.dates()[1..].to_vec(), rets)
}

/// A `[0, 100]`-rescaled series plus a flag for degenerate (constant) input.
#[derive(Debug, Clone)]
pub struct GtRescaled {
    pub series: TimeSeries,
    /// True when the input had zero range; the output is then all zeros.
    pub degenerate: bool,
}

/// Rescale a raw series into the `[0, 100]` integer index:
/// subtract the minimum, divide by the maximum of the shifted series,
/// multiply by 100, and round half-away-from-zero to the nearest integer.
///
/// The minimum always maps to 0 and, for non-constant input, the maximum
/// maps to 100. Constant input yields all zeros with `degenerate` set.
pub fn gt_rescale(raw: &TimeSeries) -> Result<GtRescaled> {
    if raw.is_empty() {
        return Err(Error::InsufficientData("gt_rescale needs data".into()));
    }
    if raw.missing_count() > 0 {
        return Err(Error::Domain("gt_rescale input has missing values".into()));
    }
    let values = raw.values();
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let range = max - min;
    let (scaled, degenerate) = if range == 0.0 {
        (vec![0.0; values.len()], true)
    } else {
        let v = values
            .iter()
            .map(|&v| (100.0 * (v - min) / range).round())
            .collect();
        (v, false)
    };
    let series = TimeSeries::new(SeriesKind::GtScaled, raw.dates().to_vec(), scaled)?;
    Ok(GtRescaled { series, degenerate })
}

/// Divide a `[0, 100]` index by 100, yielding the `[0, 1]` regressor.
///
/// This is a plain division, not a second min-max pass: the scaled index
/// spans `[0, 100]` by construction.
pub fn unit_rescale(scaled: &TimeSeries) -> Result<TimeSeries> {
    if scaled.kind() != SeriesKind::GtScaled {
        return Err(Error::Domain(format!(
            "unit_rescale expects a gt_scaled series, got {}",
            scaled.kind()
        )));
    }
    if let Some(&bad) = scaled.values().iter().find(|v| !(0.0..=100.0).contains(*v)) {
        return Err(Error::Domain(format!(
            "unit_rescale input value {bad} outside [0, 100]"
        )));
    }
    let values = scaled.values().iter().map(|v| v / 100.0).collect();
    TimeSeries::new(SeriesKind::GtUnit, scaled.dates().to_vec(), values)
}

/// Keep only the observations whose date appears in `calendar`.
///
/// The calendar is the master: every calendar date must be present in the
/// series, and anything off-calendar (weekends, holidays) is discarded.
pub fn align_to_calendar(series: &TimeSeries, calendar: &[NaiveDate]) -> Result<TimeSeries> {
    let mut values = Vec::with_capacity(calendar.len());
    for &date in calendar {
        match series
            .dates()
            .binary_search(&date)
            .ok()
            .map(|i| series.values()[i])
        {
            Some(v) => values.push(v),
            None => {
                return Err(Error::MissingObservation {
                    date,
                    context: format!("not present in the {} series", series.kind()),
                });
            }
        }
    }
    TimeSeries::new(series.kind(), calendar.to_vec(), values)
}

/// Day-over-day percent growth `g_t = (CC_t - CC_{t-1}) / CC_{t-1}`.
///
/// A zero (or missing) previous count makes the growth undefined; those
/// entries come back as flagged missing values and are dropped pairwise by
/// downstream regressions.
pub fn growth_rate(cases: &TimeSeries) -> Result<TimeSeries> {
    if cases.kind() != SeriesKind::Cases {
        return Err(Error::Domain(format!(
            "growth_rate expects a cases series, got {}",
            cases.kind()
        )));
    }
    if cases.len() < 2 {
        return Err(Error::InsufficientData(
            "growth_rate needs at least 2 observations".into(),
        ));
    }
    if let Some(&bad) = cases.values().iter().find(|v| **v < 0.0) {
        return Err(Error::Domain(format!("negative case count {bad}")));
    }
    let growth: Vec<f64> = cases
        .values()
        .windows(2)
        .map(|w| {
            let (prev, cur) = (w[0], w[1]);
            if prev.is_nan() || cur.is_nan() || prev == 0.0 {
                f64::NAN
            } else {
                (cur - prev) / prev
            }
        })
        .collect();
    TimeSeries::new(SeriesKind::GrowthRate, cases.dates()[1..].to_vec(), growth)
}

/// First principal component of three equally-dated series, rescaled to
/// `[0, 1]` for use as a search-index-like regressor.
///
/// Each input is standardized to mean zero and unit variance, the leading
/// eigenvector of their 3x3 correlation matrix picks the projection, the
/// sign is fixed so the component correlates positively with the mean of
/// the standardized inputs, and the projection is min-max rescaled.
pub fn first_principal_component(
    a: &TimeSeries,
    b: &TimeSeries,
    c: &TimeSeries,
) -> Result<TimeSeries> {
    let n = a.len();
    if b.len() != n || c.len() != n {
        return Err(Error::Argument(
            "principal component inputs must have equal length".into(),
        ));
    }
    if a.dates() != b.dates() || a.dates() != c.dates() {
        return Err(Error::Argument(
            "principal component inputs must share dates".into(),
        ));
    }
    if n < 3 {
        return Err(Error::InsufficientData(
            "principal component needs at least 3 observations".into(),
        ));
    }
    let std_a = standardize(a.values())?;
    let std_b = standardize(b.values())?;
    let std_c = standardize(c.values())?;
    let cols = [&std_a, &std_b, &std_c];

    // Correlation matrix of the standardized inputs.
    let denom = (n - 1) as f64;
    let mut corr = Matrix3::zeros();
    for i in 0..3 {
        for j in 0..3 {
            let dot: f64 = cols[i].iter().zip(cols[j]).map(|(x, y)| x * y).sum();
            corr[(i, j)] = dot / denom;
        }
    }

    let eigen = corr.symmetric_eigen();
    let mut lead = 0;
    for i in 1..3 {
        if eigen.eigenvalues[i] > eigen.eigenvalues[lead] {
            lead = i;
        }
    }
    let vector: Vector3<f64> = eigen.eigenvectors.column(lead).into_owned();

    let mut projected: Vec<f64> = (0..n)
        .map(|t| vector[0] * std_a[t] + vector[1] * std_b[t] + vector[2] * std_c[t])
        .collect();
    let cross_mean: Vec<f64> = (0..n)
        .map(|t| (std_a[t] + std_b[t] + std_c[t]) / 3.0)
        .collect();
    let orient: f64 = projected.iter().zip(&cross_mean).map(|(p, m)| p * m).sum();
    // Near-zero alignment with the cross-series mean gives no orientation;
    // fall back to a positive dominant loading.
    let flip = if orient.abs() > 1e-12 {
        orient < 0.0
    } else {
        let dominant = (0..3)
            .max_by(|&i, &j| vector[i].abs().total_cmp(&vector[j].abs()))
            .unwrap();
        vector[dominant] < 0.0
    };
    if flip {
        for p in projected.iter_mut() {
            *p = -*p;
        }
    }

    let min = projected.iter().copied().fold(f64::INFINITY, f64::min);
    let max = projected.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let range = max - min;
    if range <= 0.0 {
        return Err(Error::Domain(
            "principal component projection is constant".into(),
        ));
    }
    let unit: Vec<f64> = projected
        .iter()
        .map(|v| ((v - min) / range).clamp(0.0, 1.0))
        .collect();
    TimeSeries::new(SeriesKind::GtUnit, a.dates().to_vec(), unit)
}

fn standardize(values: &[f64]) -> Result<Vec<f64>> {
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::Domain(
            "principal component input has missing values".into(),
        ));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    if var <= 0.0 {
        return Err(Error::Domain(
            "principal component input has zero variance".into(),
        ));
    }
    let sd = var.sqrt();
    Ok(values.iter().map(|v| (v - mean) / sd).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDate;
    use proptest::prelude::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha12Rng;

    fn d(s: &str) -> NaiveDate {
        s.parse().unwrap()
    }

    fn days(n: usize) -> Vec<NaiveDate> {
        let mut out = Vec::with_capacity(n);
        let mut cur = d("2020-01-01");
        for _ in 0..n {
            out.push(cur);
            cur = cur.succ_opt().unwrap();
        }
        out
    }

    fn series(kind: SeriesKind, values: Vec<f64>) -> TimeSeries {
        TimeSeries::new(kind, days(values.len()), values).unwrap()
    }

    #[test]
    fn log_returns_constant_prices() {
        let r = log_returns(&series(SeriesKind::Price, vec![2.0, 2.0, 2.0])).unwrap();
        assert_eq!(r.values(), &[0.0, 0.0]);
        assert_eq!(r.dates(), &days(3)[1..]);
    }

    #[test]
    fn log_returns_match_ln_oracle() {
        // ln(e/1) = 1 and ln(110/100) = ln(1.1), both from a high-precision
        // evaluation of the natural log.
        let r = log_returns(&series(SeriesKind::Price, vec![1.0, std::f64::consts::E])).unwrap();
        assert!((r.values()[0] - 1.0).abs() < 1e-12);

        let r = log_returns(&series(SeriesKind::Price, vec![100.0, 110.0])).unwrap();
        assert!((r.values()[0] - 0.09531017980432493).abs() < 1e-15);
    }

    #[test]
    fn log_returns_needs_two_points() {
        let err = log_returns(&series(SeriesKind::Price, vec![1.0]));
        assert!(matches!(err, Err(Error::InsufficientData(_))));
    }

    #[test]
    fn log_returns_rejects_other_kinds() {
        let err = log_returns(&series(SeriesKind::Cases, vec![1.0, 2.0]));
        assert!(matches!(err, Err(Error::Domain(_))));
    }

    #[test]
    fn gt_rescale_spans_the_interval() {
        let out = gt_rescale(&series(SeriesKind::GtRaw, vec![2.0, 4.0, 6.0])).unwrap();
        assert_eq!(out.series.values(), &[0.0, 50.0, 100.0]);
        assert!(!out.degenerate);
    }

    #[test]
    fn gt_rescale_constant_input_is_degenerate() {
        let out = gt_rescale(&series(SeriesKind::GtRaw, vec![5.0, 5.0])).unwrap();
        assert_eq!(out.series.values(), &[0.0, 0.0]);
        assert!(out.degenerate);
    }

    #[test]
    fn gt_rescale_rounds_to_nearest() {
        // 100 * 1/3 = 33.33.. rounds down to 33.
        let out = gt_rescale(&series(SeriesKind::GtRaw, vec![0.0, 1.0, 3.0])).unwrap();
        assert_eq!(out.series.values(), &[0.0, 33.0, 100.0]);
    }

    #[test]
    fn unit_rescale_divides_by_100() {
        let out = unit_rescale(&series(SeriesKind::GtScaled, vec![0.0, 50.0, 100.0])).unwrap();
        assert_eq!(out.values(), &[0.0, 0.5, 1.0]);
        let out = unit_rescale(&series(SeriesKind::GtScaled, vec![100.0])).unwrap();
        assert_eq!(out.values(), &[1.0]);
        let out = unit_rescale(&series(SeriesKind::GtScaled, vec![33.0])).unwrap();
        assert_eq!(out.values(), &[0.33]);
    }

    #[test]
    fn unit_rescale_rejects_wrong_kind() {
        let err = unit_rescale(&series(SeriesKind::GtRaw, vec![150.0]));
        assert!(matches!(err, Err(Error::Domain(_))));
    }

    #[test]
    fn align_drops_off_calendar_days() {
        let daily = series(SeriesKind::GtRaw, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0]);
        let calendar: Vec<NaiveDate> = days(7)
            .into_iter()
            .enumerate()
            .filter(|(i, _)| *i != 3 && *i != 4)
            .map(|(_, d)| d)
            .collect();
        let aligned = align_to_calendar(&daily, &calendar).unwrap();
        assert_eq!(aligned.values(), &[1.0, 2.0, 3.0, 6.0, 7.0]);
        assert_eq!(aligned.dates(), calendar.as_slice());
    }

    #[test]
    fn align_identity_on_same_calendar() {
        let daily = series(SeriesKind::GtRaw, vec![1.0, 2.0, 3.0]);
        let aligned = align_to_calendar(&daily, daily.dates()).unwrap();
        assert_eq!(&aligned, &daily);
    }

    #[test]
    fn align_reports_missing_date() {
        let daily = series(SeriesKind::GtRaw, vec![1.0, 2.0]);
        let missing = d("2020-02-01");
        let err = align_to_calendar(&daily, &[d("2020-01-01"), missing]);
        match err {
            Err(Error::MissingObservation { date, .. }) => assert_eq!(date, missing),
            other => panic!("expected MissingObservation, got {other:?}"),
        }
    }

    #[test]
    fn growth_rate_arithmetic() {
        let g = growth_rate(&series(SeriesKind::Cases, vec![100.0, 110.0])).unwrap();
        assert!((g.values()[0] - 0.10).abs() < 1e-15);

        let g = growth_rate(&series(SeriesKind::Cases, vec![7.0, 7.0, 7.0])).unwrap();
        assert_eq!(g.values(), &[0.0, 0.0]);
    }

    #[test]
    fn growth_rate_zero_denominator_is_flagged_missing() {
        let g = growth_rate(&series(SeriesKind::Cases, vec![0.0, 5.0])).unwrap();
        assert_eq!(g.len(), 1);
        assert!(g.is_missing(0));
        assert_eq!(g.missing_count(), 1);
    }

    #[test]
    fn pca_collinear_inputs_reduce_to_rescaled_input() {
        let a = series(SeriesKind::GtRaw, vec![1.0, 4.0, 2.0, 8.0, 5.0]);
        let out = first_principal_component(&a, &a, &a).unwrap();
        // With identical inputs the component is the min-max rescale of the
        // (standardized) input itself.
        let vals = a.values();
        let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let max = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for (got, want) in out
            .values()
            .iter()
            .zip(vals.iter().map(|v| (v - min) / (max - min)))
        {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    /// Independent leading-eigenvector oracle: power iteration on the
    /// correlation matrix assembled by literal summation.
    fn pca_oracle(a: &[f64], b: &[f64], c: &[f64]) -> Vec<f64> {
        let n = a.len();
        let std = |v: &[f64]| -> Vec<f64> {
            let mean = v.iter().sum::<f64>() / n as f64;
            let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
            v.iter().map(|x| (x - mean) / var.sqrt()).collect()
        };
        let (sa, sb, sc) = (std(a), std(b), std(c));
        let cols = [&sa, &sb, &sc];
        let mut m = [[0.0f64; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = cols[i]
                    .iter()
                    .zip(cols[j].iter())
                    .map(|(x, y)| x * y)
                    .sum::<f64>()
                    / (n as f64 - 1.0);
            }
        }
        // Power iteration with a shift to make the leading eigenvalue dominant
        // even if eigenvalues are negative (correlation matrices are PSD, so
        // the shift is belt only).
        let mut v = [1.0f64, 0.7, 0.4];
        for _ in 0..20_000 {
            let mut next = [0.0f64; 3];
            for i in 0..3 {
                for j in 0..3 {
                    next[i] += m[i][j] * v[j];
                }
            }
            let norm = next.iter().map(|x| x * x).sum::<f64>().sqrt();
            for x in next.iter_mut() {
                *x /= norm;
            }
            v = next;
        }
        let mut proj: Vec<f64> = (0..n)
            .map(|t| v[0] * sa[t] + v[1] * sb[t] + v[2] * sc[t])
            .collect();
        let orient: f64 = proj
            .iter()
            .enumerate()
            .map(|(t, p)| p * (sa[t] + sb[t] + sc[t]) / 3.0)
            .sum();
        if orient < 0.0 {
            for p in proj.iter_mut() {
                *p = -*p;
            }
        }
        let min = proj.iter().copied().fold(f64::INFINITY, f64::min);
        let max = proj.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        proj.iter().map(|p| (p - min) / (max - min)).collect()
    }

    #[test]
    fn pca_matches_power_iteration_oracle_on_white_noise() {
        let mut rng = ChaCha12Rng::seed_from_u64(42);
        let n = 60;
        let draw = |rng: &mut ChaCha12Rng| -> Vec<f64> {
            (0..n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect()
        };
        let (a, b, c) = (draw(&mut rng), draw(&mut rng), draw(&mut rng));
        let ta = series(SeriesKind::GtRaw, a.clone());
        let tb = series(SeriesKind::GtRaw, b.clone());
        let tc = series(SeriesKind::GtRaw, c.clone());
        let got = first_principal_component(&ta, &tb, &tc).unwrap();
        let want = pca_oracle(&a, &b, &c);
        for (g, w) in got.values().iter().zip(&want) {
            assert!((g - w).abs() < 1e-10, "{g} vs {w}");
        }
    }

    #[test]
    fn pca_sign_rule_with_negated_series() {
        // c = -a, b = a: the leading component spans a, and the sign rule
        // keeps the output positively correlated with the cross-series mean.
        let a: Vec<f64> = vec![0.3, -1.2, 0.8, 2.1, -0.7, 0.1, 1.4, -2.0];
        let neg: Vec<f64> = a.iter().map(|v| -v).collect();
        let ta = series(SeriesKind::GtRaw, a.clone());
        let tb = series(SeriesKind::GtRaw, a.clone());
        let tc = series(SeriesKind::GtRaw, neg.clone());
        let got = first_principal_component(&ta, &tb, &tc).unwrap();
        let want = pca_oracle(&a, &a, &neg);
        for (g, w) in got.values().iter().zip(&want) {
            assert!((g - w).abs() < 1e-10, "{g} vs {w}");
        }
        // Orientation check against the mean of the standardized inputs.
        let sa = standardize(&a).unwrap();
        let mean: Vec<f64> = sa.iter().map(|v| v / 3.0).collect();
        let centered: Vec<f64> = {
            let m = got.values().iter().sum::<f64>() / got.len() as f64;
            got.values().iter().map(|v| v - m).collect()
        };
        let corr: f64 = centered.iter().zip(&mean).map(|(x, y)| x * y).sum();
        assert!(corr >= 0.0);
    }

    #[test]
    fn pca_rejects_zero_variance_input() {
        let a = series(SeriesKind::GtRaw, vec![1.0, 2.0, 3.0]);
        let flat = series(SeriesKind::GtRaw, vec![5.0, 5.0, 5.0]);
        assert!(matches!(
            first_principal_component(&a, &a, &flat),
            Err(Error::Domain(_))
        ));
    }

    proptest! {
        #[test]
        fn gt_rescale_output_is_integral_and_spans(values in prop::collection::vec(-1e6..1e6f64, 1..80)) {
            let out = gt_rescale(&series(SeriesKind::GtRaw, values)).unwrap();
            let vals = out.series.values();
            prop_assert!(vals.iter().all(|v| v.fract() == 0.0));
            prop_assert!(vals.iter().copied().fold(f64::INFINITY, f64::min) == 0.0);
            if !out.degenerate {
                prop_assert!(vals.iter().copied().fold(f64::NEG_INFINITY, f64::max) == 100.0);
            }
        }

        #[test]
        fn unit_after_gt_rescale_hits_both_ends(values in prop::collection::vec(-1e3..1e3f64, 2..60)) {
            prop_assume!(values.iter().copied().fold(f64::INFINITY, f64::min)
                != values.iter().copied().fold(f64::NEG_INFINITY, f64::max));
            let scaled = gt_rescale(&series(SeriesKind::GtRaw, values)).unwrap();
            let unit = unit_rescale(&scaled.series).unwrap();
            let vals = unit.values();
            prop_assert!(vals.iter().all(|v| (0.0..=1.0).contains(v)));
            prop_assert!(vals.iter().copied().fold(f64::INFINITY, f64::min) == 0.0);
            prop_assert!(vals.iter().copied().fold(f64::NEG_INFINITY, f64::max) == 1.0);
        }

        #[test]
        fn log_returns_scale_invariant(
            raw in prop::collection::vec(0.1..100.0f64, 2..40),
            scale in 0.01..50.0f64,
        ) {
            let base = log_returns(&series(SeriesKind::Price, raw.clone())).unwrap();
            let scaled_prices: Vec<f64> = raw.iter().map(|v| v * scale).collect();
            let scaled = log_returns(&series(SeriesKind::Price, scaled_prices)).unwrap();
            for (a, b) in base.values().iter().zip(scaled.values()) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }

        #[test]
        fn growth_rate_scale_invariant(
            raw in prop::collection::vec(1.0..1e5f64, 2..40),
            scale in 0.001..100.0f64,
        ) {
            let base = growth_rate(&series(SeriesKind::Cases, raw.clone())).unwrap();
            let scaled_cases: Vec<f64> = raw.iter().map(|v| v * scale).collect();
            let scaled = growth_rate(&series(SeriesKind::Cases, scaled_cases)).unwrap();
            for (a, b) in base.values().iter().zip(scaled.values()) {
                prop_assert!((a - b).abs() < 1e-9 * (1.0 + a.abs()));
            }
        }
    }

    #[test]
    fn pca_invariant_to_affine_input_changes() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let n = 40;
        let draw = |rng: &mut ChaCha12Rng| -> Vec<f64> {
            (0..n).map(|_| rng.random::<f64>() * 4.0 - 2.0).collect()
        };
        let (a, b, c) = (draw(&mut rng), draw(&mut rng), draw(&mut rng));
        let shifted: Vec<f64> = a.iter().map(|v| 2.0 * v + 5.0).collect();
        let base = first_principal_component(
            &series(SeriesKind::GtRaw, a),
            &series(SeriesKind::GtRaw, b.clone()),
            &series(SeriesKind::GtRaw, c.clone()),
        )
        .unwrap();
        let moved = first_principal_component(
            &series(SeriesKind::GtRaw, shifted),
            &series(SeriesKind::GtRaw, b),
            &series(SeriesKind::GtRaw, c),
        )
        .unwrap();
        for (x, y) in base.values().iter().zip(moved.values()) {
            assert!((x - y).abs() < 1e-10);
        }
    }
}
