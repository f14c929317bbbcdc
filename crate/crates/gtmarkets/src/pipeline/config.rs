//! Pipeline configuration: a single TOML file plus CLI flag overrides.
//!
//! Input data paths are resolved relative to the config file's directory;
//! the output directory is resolved against the working directory unless
//! absolute. Dates are quoted ISO strings (`date_from = "2020-01-01"`).

use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::regress::{newey_west_default_lags, SeKind};
use crate::timeseries::{Country, Source};

fn default_countries() -> Vec<Country> {
    Country::ALL.to_vec()
}

fn default_sources() -> Vec<Source> {
    Source::ALL.to_vec()
}

fn default_reference() -> Country {
    Country::It
}

fn default_topic() -> String {
    "/m/01cpyy".to_string()
}

fn default_max_lag() -> usize {
    15
}

fn default_true() -> bool {
    true
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

/// Input file locations, relative to the config file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DataPaths {
    pub prices_csv: PathBuf,
    /// Search-volume fixture/cache directory.
    pub gt_cache_dir: PathBuf,
    #[serde(default)]
    pub cases_csv: Option<PathBuf>,
    #[serde(default)]
    pub implied_vol_csv: Option<PathBuf>,
}

/// Standard-error selection: `kind = "hc1"` or `kind = "nw"`, with an
/// optional explicit lag count for the latter.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeConfig {
    pub kind: String,
    #[serde(default)]
    pub nw_lags: Option<usize>,
}

impl Default for SeConfig {
    fn default() -> Self {
        SeConfig {
            kind: "hc1".to_string(),
            nw_lags: None,
        }
    }
}

impl SeConfig {
    /// Resolve against a sample size (the Newey-West bandwidth rule needs
    /// it when no explicit lag count is configured).
    pub fn resolve(&self, n: usize) -> Result<SeKind> {
        match self.kind.as_str() {
            "hc1" => Ok(SeKind::Hc1),
            "nw" => Ok(SeKind::NeweyWest(
                self.nw_lags.unwrap_or_else(|| newey_west_default_lags(n)),
            )),
            other => Err(Error::Config(format!(
                "unknown se kind {other:?} (expected \"hc1\" or \"nw\")"
            ))),
        }
    }
}

/// Time-varying-parameter estimation knobs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TvpConfig {
    #[serde(default = "TvpConfig::default_starts")]
    pub starts: usize,
    #[serde(default = "TvpConfig::default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "TvpConfig::default_prior_var0")]
    pub prior_var0: f64,
    /// Defaults to the pipeline seed when absent.
    #[serde(default)]
    pub seed: Option<u64>,
}

impl TvpConfig {
    fn default_starts() -> usize {
        8
    }
    fn default_max_iter() -> usize {
        4000
    }
    fn default_prior_var0() -> f64 {
        1e6
    }
}

impl Default for TvpConfig {
    fn default() -> Self {
        TvpConfig {
            starts: Self::default_starts(),
            max_iter: Self::default_max_iter(),
            prior_var0: Self::default_prior_var0(),
            seed: None,
        }
    }
}

/// Everything a pipeline run needs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PipelineConfig {
    /// Master seed for every random draw in the run.
    pub seed: u64,
    pub date_from: NaiveDate,
    pub date_to: NaiveDate,
    #[serde(default = "default_countries")]
    pub countries: Vec<Country>,
    #[serde(default = "default_sources")]
    pub sources: Vec<Source>,
    #[serde(default = "default_reference")]
    pub reference: Country,
    #[serde(default = "default_topic")]
    pub topic_id: String,
    #[serde(default = "default_max_lag")]
    pub max_lag: usize,
    #[serde(default = "default_true")]
    pub offline: bool,
    /// Base URL for online fetches; the `GTRENDS_BASE_URL` environment
    /// variable overrides it.
    #[serde(default)]
    pub gt_base_url: Option<String>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    pub data: DataPaths,
    #[serde(default)]
    pub se: SeConfig,
    #[serde(default)]
    pub tvp: TvpConfig,
}

/// Flag-level overrides; flags win over the config file.
#[derive(Debug, Clone, Default)]
pub struct CliOverrides {
    pub se: Option<String>,
    pub out: Option<PathBuf>,
    pub offline: Option<bool>,
}

impl PipelineConfig {
    /// Parse a TOML config and resolve its paths.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("reading {}: {e}", path.display())))?;
        let mut config: PipelineConfig = toml::from_str(&text)
            .map_err(|e| Error::Config(format!("parsing {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        config.data.prices_csv = resolve(base, &config.data.prices_csv);
        config.data.gt_cache_dir = resolve(base, &config.data.gt_cache_dir);
        config.data.cases_csv = config.data.cases_csv.map(|p| resolve(base, &p));
        config.data.implied_vol_csv = config.data.implied_vol_csv.map(|p| resolve(base, &p));
        config.validate()?;
        Ok(config)
    }

    pub fn apply_overrides(&mut self, overrides: &CliOverrides) -> Result<()> {
        if let Some(se) = &overrides.se {
            self.se.kind = se.clone();
        }
        if let Some(out) = &overrides.out {
            self.output_dir = out.clone();
        }
        if let Some(offline) = overrides.offline {
            self.offline = offline;
        }
        self.validate()
    }

    pub fn validate(&self) -> Result<()> {
        if self.date_from > self.date_to {
            return Err(Error::Config(format!(
                "date_from {} after date_to {}",
                self.date_from, self.date_to
            )));
        }
        if self.countries.is_empty() {
            return Err(Error::Config("no countries selected".into()));
        }
        if self.sources.is_empty() {
            return Err(Error::Config("at least one source must be selected".into()));
        }
        if !self.countries.contains(&self.reference) {
            return Err(Error::Config(format!(
                "reference country {} is not among the selected countries",
                self.reference
            )));
        }
        if self.topic_id.is_empty() {
            return Err(Error::Config("empty topic_id".into()));
        }
        self.se.resolve(100)?;
        if self.tvp.starts == 0 {
            return Err(Error::Config("tvp.starts must be positive".into()));
        }
        Ok(())
    }

    /// First configured source; regression and TVP stages report on it
    /// inside `report` runs.
    pub fn primary_source(&self) -> Source {
        self.sources[0]
    }

    /// Seed for one country's TVP fit, stable across runs.
    pub fn tvp_seed_for(&self, country: Country) -> u64 {
        let base = self.tvp.seed.unwrap_or(self.seed);
        let index = Country::ALL.iter().position(|c| *c == country).unwrap_or(0) as u64;
        base.wrapping_mul(1000).wrapping_add(index)
    }

    pub fn panel_path(&self) -> PathBuf {
        self.output_dir.join("panel.csv")
    }
}

fn resolve(base: &Path, path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        base.join(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_config(dir: &Path, body: &str) -> PathBuf {
        let path = dir.join("config.toml");
        let mut f = std::fs::File::create(&path).unwrap();
        f.write_all(body.as_bytes()).unwrap();
        path
    }

    const MINIMAL: &str = r#"
seed = 42
date_from = "2020-01-01"
date_to = "2020-04-14"

[data]
prices_csv = "prices.csv"
gt_cache_dir = "gt"
"#;

    #[test]
    fn minimal_config_fills_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_config(dir.path(), MINIMAL);
        let config = PipelineConfig::load(&path).unwrap();
        assert_eq!(config.countries, Country::ALL.to_vec());
        assert_eq!(config.sources, Source::ALL.to_vec());
        assert_eq!(config.reference, Country::It);
        assert_eq!(config.topic_id, "/m/01cpyy");
        assert_eq!(config.max_lag, 15);
        assert!(config.offline);
        assert_eq!(config.tvp.starts, 8);
        // Data paths resolve against the config directory.
        assert_eq!(config.data.prices_csv, dir.path().join("prices.csv"));
        assert_eq!(config.data.gt_cache_dir, dir.path().join("gt"));
    }

    #[test]
    fn rejects_reversed_dates_and_empty_sources() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_config(
            dir.path(),
            &MINIMAL.replace("\"2020-04-14\"", "\"2019-01-01\""),
        );
        assert!(matches!(PipelineConfig::load(&path), Err(Error::Config(_))));

        let path = write_config(
            dir.path(),
            &MINIMAL.replace("[data]", "sources = []\n\n[data]"),
        );
        assert!(matches!(PipelineConfig::load(&path), Err(Error::Config(_))));
    }

    #[test]
    fn se_resolution() {
        let se = SeConfig {
            kind: "nw".into(),
            nw_lags: None,
        };
        assert_eq!(se.resolve(73).unwrap(), SeKind::NeweyWest(3));
        let se = SeConfig {
            kind: "nw".into(),
            nw_lags: Some(5),
        };
        assert_eq!(se.resolve(73).unwrap(), SeKind::NeweyWest(5));
        let se = SeConfig {
            kind: "hc1".into(),
            nw_lags: None,
        };
        assert_eq!(se.resolve(73).unwrap(), SeKind::Hc1);
        assert!(SeConfig { kind: "huber".into(), nw_lags: None }.resolve(10).is_err());
    }

    #[test]
    fn overrides_win() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_config(dir.path(), MINIMAL);
        let mut config = PipelineConfig::load(&path).unwrap();
        config
            .apply_overrides(&CliOverrides {
                se: Some("nw".into()),
                out: Some(PathBuf::from("/tmp/elsewhere")),
                offline: Some(false),
            })
            .unwrap();
        assert_eq!(config.se.kind, "nw");
        assert_eq!(config.output_dir, PathBuf::from("/tmp/elsewhere"));
        assert!(!config.offline);
    }
}
