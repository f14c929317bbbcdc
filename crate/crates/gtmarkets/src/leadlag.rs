//! Cross-correlation lead-lag analysis against a reference country.
//!
//! `correlation_k` pairs `x_t` with `y_{t+k}`, so when `y` is the reference
//! a negative peak lag means the reference leads. Each lag's correlation is
//! a plain Pearson coefficient over the overlapping index range, with means
//! and variances taken on that window.

use crate::error::{Error, Result};
use crate::timeseries::{Country, Panel, SeriesKey, SeriesKind, Source};

/// Cross-correlation function over lags `-L..=L` plus its peak.
#[derive(Debug, Clone)]
pub struct CcfResult {
    pub lags: Vec<i64>,
    pub correlations: Vec<f64>,
    pub peak_lag: i64,
    pub peak_value: f64,
}

impl CcfResult {
    /// Correlation at a specific lag.
    pub fn at(&self, lag: i64) -> Option<f64> {
        let idx = self.lags.iter().position(|&k| k == lag)?;
        Some(self.correlations[idx])
    }
}

fn pearson(xs: &[f64], ys: &[f64], lag: i64) -> Result<f64> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::UndefinedCorrelation { lag });
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// Pearson cross-correlation of `(x_t, y_{t+k})` for `k` in `[-L, L]`.
///
/// The peak is the maximum signed correlation; exact ties break toward the
/// smallest `|k|`, then toward the negative lag.
pub fn cross_correlation(x: &[f64], y: &[f64], max_lag: usize) -> Result<CcfResult> {
    let n = x.len();
    if y.len() != n {
        return Err(Error::Argument(format!(
            "series lengths differ: {n} vs {}",
            y.len()
        )));
    }
    if n < max_lag + 3 {
        return Err(Error::InsufficientData(format!(
            "need at least max_lag + 3 = {} observations, got {n}",
            max_lag + 3
        )));
    }
    if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
        return Err(Error::Domain("non-finite value in input series".into()));
    }

    let max_lag = max_lag as i64;
    let mut lags = Vec::with_capacity(2 * max_lag as usize + 1);
    let mut correlations = Vec::with_capacity(lags.capacity());
    for k in -max_lag..=max_lag {
        // Overlap of t and t+k inside [0, n).
        let t_start = (-k).max(0) as usize;
        let t_end = n - k.max(0) as usize;
        let xs = &x[t_start..t_end];
        let ys = &y[(t_start as i64 + k) as usize..(t_end as i64 + k) as usize];
        lags.push(k);
        correlations.push(pearson(xs, ys, k)?);
    }

    let mut peak_idx = 0;
    for i in 1..lags.len() {
        let (cand, best) = (correlations[i], correlations[peak_idx]);
        let (k_cand, k_best) = (lags[i], lags[peak_idx]);
        let better = cand > best
            || (cand == best
                && (k_cand.abs() < k_best.abs()
                    || (k_cand.abs() == k_best.abs() && k_cand < k_best)));
        if better {
            peak_idx = i;
        }
    }

    Ok(CcfResult {
        peak_lag: lags[peak_idx],
        peak_value: correlations[peak_idx],
        lags,
        correlations,
    })
}

/// One cell of the lead-lag table: a peak, or a marker for why it failed.
pub type CellOutcome = std::result::Result<i64, String>;

/// Peak lags of every country's unit-interval index versus the reference,
/// one row per source.
#[derive(Debug, Clone)]
pub struct LeadLagTable {
    pub reference: Country,
    pub max_lag: usize,
    pub sources: Vec<Source>,
    pub countries: Vec<Country>,
    /// Indexed `[source][country]`, matching the two vectors above.
    pub cells: Vec<Vec<CellOutcome>>,
}

/// Cross-correlate each country's index (levels) against the reference
/// country per source. Cell failures are recorded in place so one bad
/// series does not sink the table.
pub fn leadlag_table(panel: &Panel, reference: Country, max_lag: usize) -> Result<LeadLagTable> {
    let sources = panel.sources();
    if sources.is_empty() {
        return Err(Error::Validation("panel has no search-volume series".into()));
    }
    let countries: Vec<Country> = panel
        .countries()
        .into_iter()
        .filter(|c| *c != reference)
        .collect();
    if countries.is_empty() {
        return Err(Error::Validation(
            "panel has no non-reference countries".into(),
        ));
    }

    let mut cells = Vec::with_capacity(sources.len());
    for &source in &sources {
        let reference_series =
            panel.require(&SeriesKey::gt(reference, SeriesKind::GtUnit, source))?;
        let mut row = Vec::with_capacity(countries.len());
        for &country in &countries {
            let outcome = panel
                .require(&SeriesKey::gt(country, SeriesKind::GtUnit, source))
                .and_then(|series| {
                    cross_correlation(series.values(), reference_series.values(), max_lag)
                })
                .map(|ccf| ccf.peak_lag)
                .map_err(|e| e.to_string());
            row.push(outcome);
        }
        cells.push(row);
    }

    Ok(LeadLagTable {
        reference,
        max_lag,
        sources,
        countries,
        cells,
    })
}

impl LeadLagTable {
    pub fn cell(&self, source: Source, country: Country) -> Option<&CellOutcome> {
        let r = self.sources.iter().position(|&s| s == source)?;
        let c = self.countries.iter().position(|&k| k == country)?;
        Some(&self.cells[r][c])
    }

    /// CSV with one row per source and one column per country.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("source");
        for country in &self.countries {
            out.push(',');
            out.push_str(country.code());
        }
        out.push('\n');
        for (i, source) in self.sources.iter().enumerate() {
            out.push_str(source.short_name());
            for cell in &self.cells[i] {
                out.push(',');
                match cell {
                    Ok(lag) => out.push_str(&lag.to_string()),
                    Err(_) => out.push_str("NA"),
                }
            }
            out.push('\n');
        }
        out
    }

    /// Aligned plain-text table with source labels on rows.
    pub fn render_text(&self) -> String {
        let label_width = self
            .sources
            .iter()
            .map(|s| s.label().len())
            .max()
            .unwrap_or(0)
            .max("source".len());
        let cell_width = 6;
        let mut out = format!("{:<label_width$}", "");
        for country in &self.countries {
            out.push_str(&format!("{:>cell_width$}", country.code()));
        }
        out.push('\n');
        for (i, source) in self.sources.iter().enumerate() {
            out.push_str(&format!("{:<label_width$}", source.label()));
            for cell in &self.cells[i] {
                match cell {
                    Ok(lag) => out.push_str(&format!("{:>cell_width$}", lag)),
                    Err(_) => out.push_str(&format!("{:>cell_width$}", "NA")),
                }
            }
            out.push('\n');
        }
        out.push_str(&format!(
            "\nPeak daily cross-correlation lag of each series versus {}; negative\n\
             lags mean the {} series leads.\n",
            self.reference, self.reference
        ));
        out
    }
}
