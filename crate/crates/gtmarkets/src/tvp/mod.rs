//! Time-varying-parameter regression: scalar-state linear Gaussian model,
//! Kalman filter/smoother, and maximum-likelihood hyperparameters.

mod kalman;
mod mle;

pub use kalman::{
    filter_observations, kalman_filter, log_likelihood, rts_smoother, FilterPass, Smoothed,
    F_FLOOR,
};
pub use mle::{fit_tvp_mle, StartTrace, TvpFit, TvpOptions};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hyperparameters of the time-varying regression.
///
/// `sigma2` is the observation noise variance, `a` the state transition
/// coefficient (no stationarity restriction), and `b` the state innovation
/// variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TvpParams {
    pub alpha: f64,
    pub delta: f64,
    pub sigma2: f64,
    pub a: f64,
    pub b: f64,
}

impl TvpParams {
    pub fn validate(&self) -> Result<()> {
        if !self.sigma2.is_finite() || self.sigma2 <= 0.0 {
            return Err(Error::Domain(format!(
                "sigma2 must be positive and finite, got {}",
                self.sigma2
            )));
        }
        if !self.b.is_finite() || self.b < 0.0 {
            return Err(Error::Domain(format!(
                "state innovation variance must be nonnegative, got {}",
                self.b
            )));
        }
        for (name, v) in [("alpha", self.alpha), ("delta", self.delta), ("a", self.a)] {
            if !v.is_finite() {
                return Err(Error::Domain(format!("non-finite {name}: {v}")));
            }
        }
        Ok(())
    }
}

/// Initial state distribution `beta_0 ~ N(mean0, var0)`.
///
/// The default is numerically diffuse (mean 0, variance 1e6).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatePrior {
    pub mean0: f64,
    pub var0: f64,
}

impl Default for StatePrior {
    fn default() -> Self {
        StatePrior {
            mean0: 0.0,
            var0: 1e6,
        }
    }
}

impl StatePrior {
    pub fn validate(&self) -> Result<()> {
        if !self.var0.is_finite() || self.var0 <= 0.0 {
            return Err(Error::Domain(format!(
                "prior variance must be positive, got {}",
                self.var0
            )));
        }
        if !self.mean0.is_finite() {
            return Err(Error::Domain(format!("non-finite prior mean {}", self.mean0)));
        }
        Ok(())
    }
}

/// The four reference events overlaid on coefficient-path plots.
fn events() -> [(NaiveDate, &'static str); 4] {
    let date = |y, m, d| NaiveDate::from_ymd_opt(y, m, d).expect("valid date");
    [
        (date(2020, 1, 23), "first COVID-19 case in Germany"),
        (date(2020, 2, 24), "lock-down of northern Italian provinces"),
        (date(2020, 3, 9), "lock-down for all Italian citizens"),
        (date(2020, 3, 12), "lock-down of most Italian economic activities"),
    ]
}

/// Events falling inside the calendar's date span, in date order.
pub fn event_overlay(calendar: &[NaiveDate]) -> Vec<(NaiveDate, &'static str)> {
    let (Some(&first), Some(&last)) = (calendar.first(), calendar.last()) else {
        return Vec::new();
    };
    events()
        .into_iter()
        .filter(|(d, _)| *d >= first && *d <= last)
        .collect()
}
