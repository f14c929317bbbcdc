//! Scalar-state Kalman filter and RTS smoother for the time-varying
//! regression
//!
//! ```text
//! y_t = alpha + beta_t * gt_t + delta * y_{t-1} + eps_t,   eps_t ~ N(0, sigma2)
//! beta_t = a * beta_{t-1} + eta_t,                         eta_t ~ N(0, b)
//! ```
//!
//! The filter runs on the adjusted observation `z_t = y_t - alpha - delta *
//! y_{t-1}` with time-varying loading `h_t = gt_t`, so the state stays
//! scalar and variance-form recursions are adequate. An innovation variance
//! at or below `1e-12` raises an instability error instead of being
//! silently clamped.

use crate::error::{Error, Result};

use super::{StatePrior, TvpParams};

/// Hard floor for the innovation variance.
pub const F_FLOOR: f64 = 1e-12;

const LN_2PI: f64 = 1.8378770664093453;

/// Per-step output of a forward filter pass.
#[derive(Debug, Clone)]
pub struct FilterPass {
    /// One-step-ahead state means `E[beta_t | z_{1..t-1}]`.
    pub predicted_mean: Vec<f64>,
    pub predicted_var: Vec<f64>,
    /// Posterior state means `E[beta_t | z_{1..t}]`.
    pub filtered_mean: Vec<f64>,
    pub filtered_var: Vec<f64>,
    /// One-step-ahead prediction errors `v_t`.
    pub innovations: Vec<f64>,
    /// Innovation variances `F_t`.
    pub innovation_var: Vec<f64>,
    /// Gaussian log-density of each innovation.
    pub loglik_terms: Vec<f64>,
}

impl FilterPass {
    pub fn len(&self) -> usize {
        self.filtered_mean.len()
    }

    pub fn is_empty(&self) -> bool {
        self.filtered_mean.is_empty()
    }

    /// Total log-likelihood accumulated over the pass.
    pub fn loglik(&self) -> f64 {
        self.loglik_terms.iter().sum()
    }
}

/// Filter a pre-adjusted observation sequence `z` with loadings `h`.
pub fn filter_observations(
    z: &[f64],
    h: &[f64],
    sigma2: f64,
    a: f64,
    b: f64,
    prior: &StatePrior,
) -> Result<FilterPass> {
    if z.len() != h.len() {
        return Err(Error::Argument(format!(
            "observation/loading length mismatch: {} vs {}",
            z.len(),
            h.len()
        )));
    }
    if z.is_empty() {
        return Err(Error::InsufficientData("empty observation sequence".into()));
    }
    if !sigma2.is_finite() || sigma2 <= 0.0 {
        return Err(Error::Domain(format!("sigma2 must be positive, got {sigma2}")));
    }
    if !b.is_finite() || b < 0.0 {
        return Err(Error::Domain(format!("b must be nonnegative, got {b}")));
    }
    if !a.is_finite() {
        return Err(Error::Domain(format!("non-finite transition coefficient {a}")));
    }
    prior.validate()?;

    let t_max = z.len();
    let mut pass = FilterPass {
        predicted_mean: Vec::with_capacity(t_max),
        predicted_var: Vec::with_capacity(t_max),
        filtered_mean: Vec::with_capacity(t_max),
        filtered_var: Vec::with_capacity(t_max),
        innovations: Vec::with_capacity(t_max),
        innovation_var: Vec::with_capacity(t_max),
        loglik_terms: Vec::with_capacity(t_max),
    };

    let mut mean = prior.mean0;
    let mut var = prior.var0;
    for t in 0..t_max {
        let m_pred = a * mean;
        let p_pred = a * a * var + b;

        let v = z[t] - h[t] * m_pred;
        let f = h[t] * h[t] * p_pred + sigma2;
        if f.is_nan() || f <= F_FLOOR {
            return Err(Error::Instability { step: t, value: f });
        }
        let gain = p_pred * h[t] / f;
        let m_filt = m_pred + gain * v;
        // Joseph form keeps the variance update well behaved under the
        // numerically diffuse prior.
        let one_minus = 1.0 - gain * h[t];
        let p_filt = one_minus * one_minus * p_pred + gain * gain * sigma2;

        pass.predicted_mean.push(m_pred);
        pass.predicted_var.push(p_pred);
        pass.filtered_mean.push(m_filt);
        pass.filtered_var.push(p_filt);
        pass.innovations.push(v);
        pass.innovation_var.push(f);
        pass.loglik_terms.push(-0.5 * (LN_2PI + f.ln() + v * v / f));

        mean = m_filt;
        var = p_filt;
    }
    Ok(pass)
}

/// Full filter pass over raw series: builds `z_t` and `h_t` from the lagged
/// regression and delegates to [`filter_observations`]. One observation is
/// consumed by the lag, so the pass covers `y.len() - 1` steps.
pub fn kalman_filter(
    y: &[f64],
    gt: &[f64],
    params: &TvpParams,
    prior: &StatePrior,
) -> Result<FilterPass> {
    params.validate()?;
    if y.len() != gt.len() {
        return Err(Error::Argument(format!(
            "series length mismatch: {} vs {}",
            y.len(),
            gt.len()
        )));
    }
    if y.len() < 2 {
        return Err(Error::InsufficientData(
            "need at least 2 observations to form the lag".into(),
        ));
    }
    if y.iter().chain(gt.iter()).any(|v| !v.is_finite()) {
        return Err(Error::Domain("non-finite value in input series".into()));
    }
    let z: Vec<f64> = (1..y.len())
        .map(|t| y[t] - params.alpha - params.delta * y[t - 1])
        .collect();
    let h = &gt[1..];
    filter_observations(&z, h, params.sigma2, params.a, params.b, prior)
}

/// Smoothed state moments from a backward pass.
#[derive(Debug, Clone)]
pub struct Smoothed {
    pub mean: Vec<f64>,
    pub var: Vec<f64>,
}

/// Rauch-Tung-Striebel backward recursion over a completed filter pass.
///
/// The last smoothed moment equals the last filtered moment, and smoothed
/// variances never exceed their filtered counterparts.
pub fn rts_smoother(pass: &FilterPass, params: &TvpParams) -> Smoothed {
    let t_max = pass.len();
    let mut mean = pass.filtered_mean.clone();
    let mut var = pass.filtered_var.clone();
    for t in (0..t_max.saturating_sub(1)).rev() {
        let p_pred_next = pass.predicted_var[t + 1];
        // A zero predicted variance means the next state carries no
        // information back (a = 0 and b = 0); the gain is then zero.
        let gain = if p_pred_next > 0.0 {
            pass.filtered_var[t] * params.a / p_pred_next
        } else {
            0.0
        };
        mean[t] = pass.filtered_mean[t] + gain * (mean[t + 1] - pass.predicted_mean[t + 1]);
        var[t] = (pass.filtered_var[t] + gain * gain * (var[t + 1] - pass.predicted_var[t + 1]))
            .max(0.0);
    }
    Smoothed { mean, var }
}

/// Log-likelihood of the parameters on raw series.
pub fn log_likelihood(
    params: &TvpParams,
    y: &[f64],
    gt: &[f64],
    prior: &StatePrior,
) -> Result<f64> {
    Ok(kalman_filter(y, gt, params, prior)?.loglik())
}
