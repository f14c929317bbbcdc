//! Pipeline stages: ingest, lead-lag, regression, TVP, and the aggregated
//! report.
//!
//! Each stage reads what it needs (raw inputs for `ingest`, the persisted
//! panel for everything else), writes its artifacts atomically under the
//! output directory, and reports per-unit failures without aborting the
//! rest of the run.

use std::collections::BTreeSet;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use chrono::NaiveDate;

use crate::csv_io::{panel_from_csv, panel_to_csv_string, read_series_csv};
use crate::error::{Error, Result};
use crate::gtrends::{build_query, write_atomic, FetchMode, Gprop, GtrendsClient};
use crate::leadlag::leadlag_table;
use crate::regress::{fit_arx, fit_arx_controls, RegressionResult};
use crate::tables::{format_results_table, results_to_csv};
use crate::timeseries::{Country, Panel, SeriesKey, SeriesKind, Source, TimeSeries};
use crate::transforms::{align_to_calendar, growth_rate, log_returns, unit_rescale};
use crate::tvp::{event_overlay, fit_tvp_mle, StatePrior, TvpOptions};

use super::config::PipelineConfig;
use super::manifest::RunManifest;

/// Artifacts written and failures tolerated by one stage.
#[derive(Debug, Default)]
pub struct StageOutcome {
    pub artifacts: Vec<PathBuf>,
    pub failures: Vec<String>,
}

impl StageOutcome {
    fn artifact(&mut self, path: PathBuf) {
        self.artifacts.push(path);
    }

    fn fail(&mut self, message: String) {
        self.failures.push(message);
    }
}

/// Which constant-parameter regression to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegModel {
    /// Each country on its own search index.
    OwnGt,
    /// Every country on the reference country's index.
    ReferenceGt,
    /// Reference index plus implied volatility and case growth controls.
    Controls,
}

impl RegModel {
    pub fn slug(self) -> &'static str {
        match self {
            RegModel::OwnGt => "own_gt",
            RegModel::ReferenceGt => "italy_gt",
            RegModel::Controls => "controls",
        }
    }
}

impl FromStr for RegModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "own_gt" => Ok(RegModel::OwnGt),
            "italy_gt" => Ok(RegModel::ReferenceGt),
            "controls" => Ok(RegModel::Controls),
            other => Err(Error::Argument(format!(
                "unknown model {other:?} (expected own_gt, italy_gt, or controls)"
            ))),
        }
    }
}

impl fmt::Display for RegModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

fn ensure_output_dir(config: &PipelineConfig) -> Result<()> {
    std::fs::create_dir_all(&config.output_dir)?;
    Ok(())
}

fn load_panel(config: &PipelineConfig) -> Result<Panel> {
    let path = config.panel_path();
    if !path.exists() {
        return Err(Error::Validation(format!(
            "panel file {} not found; run the ingest stage first",
            path.display()
        )));
    }
    panel_from_csv(&path)
}

/// Ingest: read raw inputs, transform, align to the shared trading
/// calendar, and persist the panel.
pub fn run_ingest(config: &PipelineConfig) -> Result<StageOutcome> {
    ensure_output_dir(config)?;
    let mut outcome = StageOutcome::default();

    // Prices define the calendar: dates present for every country within
    // the configured range.
    let price_entries = read_series_csv(&config.data.prices_csv)?;
    let mut prices = Vec::new();
    for &country in &config.countries {
        let series = price_entries
            .iter()
            .find(|(k, _)| k.country == country && k.kind == SeriesKind::Price)
            .map(|(_, s)| s)
            .ok_or_else(|| {
                Error::Validation(format!(
                    "no price series for {country} in {}",
                    config.data.prices_csv.display()
                ))
            })?;
        let in_range: Vec<(NaiveDate, f64)> = series
            .iter()
            .filter(|(d, _)| *d >= config.date_from && *d <= config.date_to)
            .collect();
        if in_range.len() < 3 {
            return Err(Error::InsufficientData(format!(
                "price series for {country} has {} observations in range",
                in_range.len()
            )));
        }
        let (dates, values): (Vec<_>, Vec<_>) = in_range.into_iter().unzip();
        prices.push((country, TimeSeries::new(SeriesKind::Price, dates, values)?));
    }
    let mut calendar_set: BTreeSet<NaiveDate> = prices[0].1.dates().iter().copied().collect();
    for (_, series) in &prices[1..] {
        let dates: BTreeSet<NaiveDate> = series.dates().iter().copied().collect();
        calendar_set = calendar_set.intersection(&dates).copied().collect();
    }
    let calendar: Vec<NaiveDate> = calendar_set.into_iter().collect();
    if calendar.len() < 3 {
        return Err(Error::InsufficientData(
            "shared trading calendar has fewer than 3 dates".into(),
        ));
    }

    let mut panel = Panel::new(calendar.clone())?;
    for (country, series) in prices {
        let aligned = align_to_calendar(&series, &calendar)?;
        let returns = log_returns(&aligned)?;
        panel.insert(SeriesKey::market(country, SeriesKind::Price), aligned)?;
        panel.insert(SeriesKey::market(country, SeriesKind::LogReturn), returns)?;
    }

    // Search indices through the cached client.
    let base_url = config.gt_base_url.clone().unwrap_or_default();
    let client =
        GtrendsClient::new(base_url.clone(), &config.data.gt_cache_dir).with_env_override();
    let mode = if config.offline {
        FetchMode::Offline
    } else {
        if base_url.is_empty() && std::env::var(crate::gtrends::BASE_URL_ENV).is_err() {
            return Err(Error::Config(
                "online mode needs gt_base_url in the config or GTRENDS_BASE_URL set".into(),
            ));
        }
        FetchMode::Online
    };
    for &country in &config.countries {
        for &source in &config.sources {
            let query = build_query(
                &config.topic_id,
                config.date_from,
                config.date_to,
                Some(country),
                Gprop::from(source),
            )?;
            let fetched = client.fetch_with_cache(&query, mode)?;
            let aligned = align_to_calendar(&fetched.series, &calendar)?;
            let unit = unit_rescale(&aligned)?;
            panel.insert(SeriesKey::gt(country, SeriesKind::GtUnit, source), unit)?;
        }
    }

    // Case counts: growth on the raw daily series, then trading-calendar
    // alignment (the first calendar date carries no growth).
    if let Some(cases_path) = &config.data.cases_csv {
        let entries = read_series_csv(cases_path)?;
        for &country in &config.countries {
            let series = entries
                .iter()
                .find(|(k, _)| k.country == country && k.kind == SeriesKind::Cases)
                .map(|(_, s)| s)
                .ok_or_else(|| {
                    Error::Validation(format!(
                        "no case series for {country} in {}",
                        cases_path.display()
                    ))
                })?;
            let growth = growth_rate(series)?;
            let growth_aligned = align_to_calendar(&growth, &calendar[1..])?;
            let cases_aligned = align_to_calendar(series, &calendar)?;
            panel.insert(SeriesKey::market(country, SeriesKind::Cases), cases_aligned)?;
            panel.insert(
                SeriesKey::market(country, SeriesKind::GrowthRate),
                growth_aligned,
            )?;
        }
    }

    // Implied volatility follows the trading calendar directly.
    if let Some(iv_path) = &config.data.implied_vol_csv {
        let entries = read_series_csv(iv_path)?;
        for &country in &config.countries {
            let series = entries
                .iter()
                .find(|(k, _)| k.country == country && k.kind == SeriesKind::ImpliedVol)
                .map(|(_, s)| s)
                .ok_or_else(|| {
                    Error::Validation(format!(
                        "no implied-vol series for {country} in {}",
                        iv_path.display()
                    ))
                })?;
            let aligned = align_to_calendar(series, &calendar)?;
            panel.insert(SeriesKey::market(country, SeriesKind::ImpliedVol), aligned)?;
        }
    }

    let path = config.panel_path();
    write_atomic(&path, panel_to_csv_string(&panel)?.as_bytes())?;
    outcome.artifact(path);
    Ok(outcome)
}

/// Lead-lag scan of every country against the reference.
pub fn run_ccf(config: &PipelineConfig) -> Result<StageOutcome> {
    ensure_output_dir(config)?;
    let mut outcome = StageOutcome::default();
    let panel = load_panel(config)?;
    let table = leadlag_table(&panel, config.reference, config.max_lag)?;
    for (i, source) in table.sources.iter().enumerate() {
        for (j, country) in table.countries.iter().enumerate() {
            if let Err(marker) = &table.cells[i][j] {
                outcome.fail(format!("ccf {source}/{country}: {marker}"));
            }
        }
    }
    let csv_path = config.output_dir.join("leadlag.csv");
    write_atomic(&csv_path, table.to_csv_string().as_bytes())?;
    outcome.artifact(csv_path);
    let txt_path = config.output_dir.join("leadlag.txt");
    write_atomic(&txt_path, table.render_text().as_bytes())?;
    outcome.artifact(txt_path);
    Ok(outcome)
}

fn reference_label(reference: Country) -> String {
    format!("GT_{{{},t}}", reference.code())
}

/// Constant-parameter regressions for one model and source.
pub fn run_reg(config: &PipelineConfig, model: RegModel, source: Source) -> Result<StageOutcome> {
    ensure_output_dir(config)?;
    let mut outcome = StageOutcome::default();
    let panel = load_panel(config)?;
    let mut results: Vec<(Country, RegressionResult)> = Vec::new();

    for &country in &config.countries {
        let fitted = fit_country(config, &panel, model, source, country);
        match fitted {
            Ok(result) => results.push((country, result)),
            Err(e) => outcome.fail(format!("reg {model}/{source}/{country}: {e}")),
        }
    }
    if results.is_empty() {
        return Err(Error::Validation(format!(
            "regression {model}/{source} produced no results: {:?}",
            outcome.failures
        )));
    }

    let label = match model {
        RegModel::OwnGt => format!("AR(1)-X on own index, {}", source.label()),
        RegModel::ReferenceGt => format!(
            "AR(1)-X on the {} index, {}",
            config.reference,
            source.label()
        ),
        RegModel::Controls => format!(
            "AR(1)-X on the {} index with IV and case-growth controls, {}",
            config.reference,
            source.label()
        ),
    };
    let csv_path = config
        .output_dir
        .join(format!("reg_{}_{}.csv", model.slug(), source));
    write_atomic(&csv_path, results_to_csv(&results).as_bytes())?;
    outcome.artifact(csv_path);
    let txt_path = config
        .output_dir
        .join(format!("reg_{}_{}.txt", model.slug(), source));
    write_atomic(&txt_path, format_results_table(&results, &label).as_bytes())?;
    outcome.artifact(txt_path);
    Ok(outcome)
}

fn fit_country(
    config: &PipelineConfig,
    panel: &Panel,
    model: RegModel,
    source: Source,
    country: Country,
) -> Result<RegressionResult> {
    let y = panel.require(&SeriesKey::market(country, SeriesKind::LogReturn))?;
    let gt_country = match model {
        RegModel::OwnGt => country,
        RegModel::ReferenceGt | RegModel::Controls => config.reference,
    };
    let gt_full = panel.require(&SeriesKey::gt(gt_country, SeriesKind::GtUnit, source))?;
    let gt = align_to_calendar(gt_full, y.dates())?;
    let se_kind = config.se.resolve(y.len().saturating_sub(1))?;

    let mut result = match model {
        RegModel::OwnGt | RegModel::ReferenceGt => fit_arx(y, &gt, se_kind)?,
        RegModel::Controls => {
            let iv_full = panel.require(&SeriesKey::market(country, SeriesKind::ImpliedVol))?;
            let iv = align_to_calendar(iv_full, y.dates())?;
            let dcc = panel.require(&SeriesKey::market(country, SeriesKind::GrowthRate))?;
            fit_arx_controls(y, &gt, &iv, dcc, se_kind)?
        }
    };
    if matches!(model, RegModel::ReferenceGt | RegModel::Controls) {
        result.rename_coef("GT_t", &reference_label(config.reference));
    }
    Ok(result)
}

/// Time-varying-parameter fits with smoothed-path exports and plot data.
pub fn run_tvp(config: &PipelineConfig, source: Source) -> Result<StageOutcome> {
    ensure_output_dir(config)?;
    let mut outcome = StageOutcome::default();
    let panel = load_panel(config)?;
    let events = event_overlay(panel.calendar());

    for &country in &config.countries {
        match fit_tvp_country(config, &panel, source, country, &events, &mut outcome) {
            Ok(()) => {}
            Err(e) => outcome.fail(format!("tvp {source}/{country}: {e}")),
        }
    }
    Ok(outcome)
}

fn fit_tvp_country(
    config: &PipelineConfig,
    panel: &Panel,
    source: Source,
    country: Country,
    events: &[(NaiveDate, &'static str)],
    outcome: &mut StageOutcome,
) -> Result<()> {
    let y = panel.require(&SeriesKey::market(country, SeriesKind::LogReturn))?;
    let gt_full = panel.require(&SeriesKey::gt(country, SeriesKind::GtUnit, source))?;
    let gt = align_to_calendar(gt_full, y.dates())?;
    let options = TvpOptions {
        prior: StatePrior {
            mean0: 0.0,
            var0: config.tvp.prior_var0,
        },
        starts: config.tvp.starts,
        seed: config.tvp_seed_for(country),
        max_iter: config.tvp.max_iter,
        fix_a: None,
        fix_b: None,
    };
    let fit = fit_tvp_mle(y.values(), gt.values(), &options)?;

    // The lag construction drops the first return date.
    let dates = &y.dates()[1..];
    let returns = &y.values()[1..];

    let mut path_csv = String::from("date,smoothed_mean,smoothed_sd,filtered_mean\n");
    for (t, date) in dates.iter().enumerate() {
        path_csv.push_str(&format!(
            "{date},{},{},{}\n",
            fit.smoothed_mean[t],
            fit.smoothed_var[t].sqrt(),
            fit.filtered_mean[t],
        ));
    }
    let csv_path = config
        .output_dir
        .join(format!("tvp_{}_{}.csv", country.code(), source));
    write_atomic(&csv_path, path_csv.as_bytes())?;
    outcome.artifact(csv_path);

    let sidecar = serde_json::json!({
        "country": country.code(),
        "source": source.short_name(),
        "params": fit.params,
        "prior": fit.prior,
        "loglik": fit.loglik,
        "converged": fit.converged,
        "optimizer_trace": fit.optimizer_trace,
        "warnings": fit.warnings,
        "n_effective": fit.smoothed_mean.len(),
    });
    let json_path = config
        .output_dir
        .join(format!("tvp_{}_{}.json", country.code(), source));
    write_atomic(&json_path, serde_json::to_string_pretty(&sidecar)?.as_bytes())?;
    outcome.artifact(json_path);

    // Plot data: smoothed path with a 95% band and event flags.
    let mut tsv = String::from("date\treturn\tbeta_mean\tbeta_lo\tbeta_hi\tevent_flag\n");
    for (t, date) in dates.iter().enumerate() {
        let sd = fit.smoothed_var[t].sqrt();
        let flagged = events.iter().any(|(d, _)| d == date);
        tsv.push_str(&format!(
            "{date}\t{}\t{}\t{}\t{}\t{}\n",
            returns[t],
            fit.smoothed_mean[t],
            fit.smoothed_mean[t] - 1.96 * sd,
            fit.smoothed_mean[t] + 1.96 * sd,
            u8::from(flagged),
        ));
    }
    let tsv_path = config
        .output_dir
        .join(format!("tvp_plot_{}_{}.tsv", country.code(), source));
    write_atomic(&tsv_path, tsv.as_bytes())?;
    outcome.artifact(tsv_path);
    Ok(())
}

/// Outcome of a full `report` run.
#[derive(Debug)]
pub struct ReportOutcome {
    pub artifacts: Vec<PathBuf>,
    pub failures: Vec<String>,
    pub manifest_path: PathBuf,
}

impl ReportOutcome {
    pub fn succeeded(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Run every stage in order and write the manifest last.
///
/// Stage errors are recorded and later stages still run, so a single bad
/// fit does not suppress the remaining artifacts; the overall outcome is a
/// failure if anything failed.
pub fn run_report(config: &PipelineConfig) -> Result<ReportOutcome> {
    ensure_output_dir(config)?;
    let mut artifacts = Vec::new();
    let mut failures = Vec::new();
    let source = config.primary_source();

    let absorb = |label: &str, outcome: Result<StageOutcome>,
                      artifacts: &mut Vec<PathBuf>,
                      failures: &mut Vec<String>| {
        match outcome {
            Ok(stage) => {
                artifacts.extend(stage.artifacts);
                failures.extend(stage.failures);
            }
            Err(e) => failures.push(format!("{label}: {e}")),
        }
    };

    absorb("ingest", run_ingest(config), &mut artifacts, &mut failures);
    absorb("ccf", run_ccf(config), &mut artifacts, &mut failures);
    let mut models = vec![RegModel::OwnGt, RegModel::ReferenceGt];
    // The controls model only runs when its inputs are configured.
    if config.data.cases_csv.is_some() && config.data.implied_vol_csv.is_some() {
        models.push(RegModel::Controls);
    }
    for model in models {
        absorb(
            &format!("reg {model}"),
            run_reg(config, model, source),
            &mut artifacts,
            &mut failures,
        );
    }
    absorb(
        "tvp",
        run_tvp(config, source),
        &mut artifacts,
        &mut failures,
    );

    let mut manifest = RunManifest::new(serde_json::to_value(config)?);
    manifest.failures = failures.clone();
    for input in [
        Some(config.data.prices_csv.clone()),
        config.data.cases_csv.clone(),
        config.data.implied_vol_csv.clone(),
    ]
    .into_iter()
    .flatten()
    {
        if input.exists() {
            manifest.record_input(&input)?;
        }
    }
    if config.data.gt_cache_dir.is_dir() {
        let mut cache_files: Vec<PathBuf> = std::fs::read_dir(&config.data.gt_cache_dir)?
            .filter_map(|e| e.ok())
            .map(|e| e.path())
            .filter(|p| p.is_file())
            .collect();
        cache_files.sort();
        for file in cache_files {
            manifest.record_input(&file)?;
        }
    }
    for artifact in &artifacts {
        manifest.record_artifact(&config.output_dir, artifact)?;
    }
    let manifest_path = config.output_dir.join("manifest.json");
    manifest.write(&manifest_path)?;

    Ok(ReportOutcome {
        artifacts,
        failures,
        manifest_path,
    })
}
