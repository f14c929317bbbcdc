//! Maximum-likelihood estimation of the time-varying-parameter model.
//!
//! The likelihood is maximized over `(alpha, delta, ln sigma2, a, ln b)`
//! with a multi-start Nelder-Mead search seeded around an OLS-based first
//! guess. Optimizing the variances in log space keeps every visited point
//! a valid parameter vector.

use rand::prelude::*;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::optim::{nelder_mead, NelderMeadOptions};
use crate::regress::{ols_fit, DesignMatrix};

use super::kalman::{kalman_filter, rts_smoother};
use super::{StatePrior, TvpParams};

/// Exponent clamp that keeps `exp` finite and positive.
const LOG_CLAMP: f64 = 345.0;

/// Controls for [`fit_tvp_mle`].
#[derive(Debug, Clone)]
pub struct TvpOptions {
    pub prior: StatePrior,
    /// Number of optimizer starts (first start is the OLS-based guess).
    pub starts: usize,
    /// Seed for the deterministic start perturbations.
    pub seed: u64,
    /// Iteration budget per start.
    pub max_iter: usize,
    /// Pin the transition coefficient instead of estimating it.
    pub fix_a: Option<f64>,
    /// Pin the state innovation variance instead of estimating it
    /// (zero gives the constant-coefficient limit).
    pub fix_b: Option<f64>,
}

impl Default for TvpOptions {
    fn default() -> Self {
        TvpOptions {
            prior: StatePrior::default(),
            starts: 8,
            seed: 0,
            max_iter: 4000,
            fix_a: None,
            fix_b: None,
        }
    }
}

/// Outcome of one optimizer start.
#[derive(Debug, Clone, serde::Serialize)]
pub struct StartTrace {
    pub start: usize,
    pub loglik: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

/// A fitted time-varying-parameter model.
#[derive(Debug, Clone)]
pub struct TvpFit {
    pub params: TvpParams,
    pub prior: StatePrior,
    /// Smoothed coefficient path, one entry per effective observation.
    pub smoothed_mean: Vec<f64>,
    pub smoothed_var: Vec<f64>,
    pub filtered_mean: Vec<f64>,
    pub filtered_var: Vec<f64>,
    pub loglik: f64,
    pub converged: bool,
    pub optimizer_trace: Vec<StartTrace>,
    pub warnings: Vec<String>,
}

/// Free-parameter layout: which entries of the full five-vector are
/// optimized, given the pinned values.
struct ParamSpace {
    fix_a: Option<f64>,
    fix_b: Option<f64>,
}

impl ParamSpace {
    fn pack(&self, full: &[f64; 5]) -> Vec<f64> {
        let mut v = vec![full[0], full[1], full[2]];
        if self.fix_a.is_none() {
            v.push(full[3]);
        }
        if self.fix_b.is_none() {
            v.push(full[4]);
        }
        v
    }

    fn unpack(&self, packed: &[f64]) -> TvpParams {
        let mut it = packed.iter().copied();
        let alpha = it.next().unwrap();
        let delta = it.next().unwrap();
        let ln_sigma2 = it.next().unwrap().clamp(-LOG_CLAMP, LOG_CLAMP);
        let a = match self.fix_a {
            Some(a) => a,
            None => it.next().unwrap(),
        };
        let b = match self.fix_b {
            Some(b) => b,
            None => it.next().unwrap().clamp(-LOG_CLAMP, LOG_CLAMP).exp(),
        };
        TvpParams {
            alpha,
            delta,
            sigma2: ln_sigma2.exp(),
            a,
            b,
        }
    }
}

/// OLS-based initialization: `alpha`, `delta`, and the residual variance
/// come from the constant-coefficient AR(1)-X fit; the state innovation
/// variance is seeded from the dispersion of rolling-window slopes.
///
/// A search index that is collinear with the intercept makes the full ARX
/// design singular even though the state-space model itself is fine, so
/// the guess falls back to a plain AR(1) regression in that case.
fn initial_guess(y: &[f64], gt: &[f64]) -> Result<(f64, f64, f64, f64)> {
    let n = y.len();
    let mut response = Vec::with_capacity(n - 1);
    let mut c_const = Vec::with_capacity(n - 1);
    let mut c_gt = Vec::with_capacity(n - 1);
    let mut c_lag = Vec::with_capacity(n - 1);
    for t in 1..n {
        response.push(y[t]);
        c_const.push(1.0);
        c_gt.push(gt[t]);
        c_lag.push(y[t - 1]);
    }
    let arx = DesignMatrix::new(
        vec!["const".into(), "GT_t".into(), "y_{t-1}".into()],
        vec![c_const.clone(), c_gt, c_lag.clone()],
        response.clone(),
    )
    .and_then(|design| ols_fit(&design).map(|fit| (design, fit)));
    let (alpha, delta, sigma2) = match arx {
        Ok((design, fit)) => {
            let rows = design.n_rows();
            let sigma2 = (fit.residuals.norm_squared() / (rows - 3) as f64).max(1e-12);
            (fit.coefficients[0], fit.coefficients[2], sigma2)
        }
        Err(Error::SingularDesign { .. }) => {
            let design = DesignMatrix::new(
                vec!["const".into(), "y_{t-1}".into()],
                vec![c_const, c_lag],
                response,
            )?;
            let fit = ols_fit(&design)?;
            let rows = design.n_rows();
            let sigma2 = (fit.residuals.norm_squared() / (rows - 2) as f64).max(1e-12);
            (fit.coefficients[0], fit.coefficients[1], sigma2)
        }
        Err(other) => return Err(other),
    };

    // Dispersion of no-intercept slopes of z on gt over rolling windows.
    let z: Vec<f64> = (1..n).map(|t| y[t] - alpha - delta * y[t - 1]).collect();
    let h = &gt[1..];
    let window = (z.len() / 8).max(10);
    let mut slopes = Vec::new();
    let mut start = 0;
    while start + window <= z.len() {
        let (mut num, mut den) = (0.0, 0.0);
        for t in start..start + window {
            num += z[t] * h[t];
            den += h[t] * h[t];
        }
        if den > 1e-12 {
            slopes.push(num / den);
        }
        start += window;
    }
    let b0 = if slopes.len() >= 2 {
        let mean = slopes.iter().sum::<f64>() / slopes.len() as f64;
        let var = slopes.iter().map(|s| (s - mean).powi(2)).sum::<f64>()
            / (slopes.len() - 1) as f64;
        (0.01 * var).max(1e-10)
    } else {
        1e-4
    };
    Ok((alpha, delta, sigma2, b0))
}

/// Maximize the likelihood and smooth at the optimum.
///
/// Requires an effective sample (after the lag) of at least 20. A loading
/// series that is identically zero leaves the state dynamics unidentified:
/// the fit then carries a warning, pins `a` and `b`, and reports
/// `converged = false`.
pub fn fit_tvp_mle(y: &[f64], gt: &[f64], options: &TvpOptions) -> Result<TvpFit> {
    if y.len() != gt.len() {
        return Err(Error::Argument(format!(
            "series length mismatch: {} vs {}",
            y.len(),
            gt.len()
        )));
    }
    if y.len() < 21 {
        return Err(Error::InsufficientData(format!(
            "need an effective sample of at least 20, got {}",
            y.len().saturating_sub(1)
        )));
    }
    if y.iter().chain(gt.iter()).any(|v| !v.is_finite()) {
        return Err(Error::Domain("non-finite value in input series".into()));
    }
    options.prior.validate()?;

    let mut warnings = Vec::new();
    let unidentified = gt[1..].iter().all(|h| h.abs() < 1e-12);
    let space = if unidentified {
        warnings.push(
            "loading series is identically zero: state dynamics (a, b) are \
             unidentified and were pinned"
                .to_string(),
        );
        ParamSpace {
            fix_a: Some(options.fix_a.unwrap_or(1.0)),
            fix_b: Some(options.fix_b.unwrap_or(0.0)),
        }
    } else {
        ParamSpace {
            fix_a: options.fix_a,
            fix_b: options.fix_b,
        }
    };

    let (alpha0, delta0, sigma2_0, b0) = initial_guess(y, gt)?;
    let full0 = [
        alpha0,
        delta0,
        sigma2_0.ln(),
        options.fix_a.unwrap_or(0.98),
        options.fix_b.unwrap_or(b0).max(1e-12).ln(),
    ];
    let steps_full = [
        (0.1 * alpha0.abs()).max(0.002),
        0.1,
        0.5,
        0.05,
        1.0,
    ];

    let objective = |packed: &[f64]| -> f64 {
        let params = space.unpack(packed);
        match kalman_filter(y, gt, &params, &options.prior) {
            Ok(pass) => -pass.loglik(),
            Err(_) => f64::INFINITY,
        }
    };

    let nm_opts = NelderMeadOptions {
        max_iter: options.max_iter,
        ..Default::default()
    };
    let mut rng = ChaCha12Rng::seed_from_u64(options.seed);
    let mut best: Option<(Vec<f64>, f64, bool)> = None;
    let mut trace = Vec::with_capacity(options.starts.max(1));
    for start in 0..options.starts.max(1) {
        let mut full = full0;
        if start > 0 {
            let scales = [steps_full[0] * 3.0, 0.25, 1.5, 0.15, 2.5];
            for (v, s) in full.iter_mut().zip(scales) {
                *v += s * rng.sample::<f64, _>(StandardNormal);
            }
        }
        let x0 = space.pack(&full);
        let steps = space.pack(&steps_full);
        let result = nelder_mead(objective, &x0, &steps, &nm_opts);
        trace.push(StartTrace {
            start,
            loglik: -result.fx,
            iterations: result.iterations,
            evaluations: result.evaluations,
            converged: result.converged,
        });
        let replace = match &best {
            Some((_, fx, _)) => result.fx < *fx,
            None => true,
        };
        if result.fx.is_finite() && replace {
            best = Some((result.x, result.fx, result.converged));
        }
    }

    let (x_best, fx_best, nm_converged) = best.ok_or_else(|| {
        Error::OptimizationFailed(format!(
            "no start produced a finite likelihood; trace: {trace:?}"
        ))
    })?;
    let params = space.unpack(&x_best);
    if params.a.abs() > 1.0 {
        warnings.push(format!(
            "estimated transition coefficient |a| = {:.4} exceeds 1; the \
             coefficient path is explosive",
            params.a.abs()
        ));
    }

    let pass = kalman_filter(y, gt, &params, &options.prior)?;
    let smoothed = rts_smoother(&pass, &params);
    Ok(TvpFit {
        params,
        prior: options.prior,
        smoothed_mean: smoothed.mean,
        smoothed_var: smoothed.var,
        filtered_mean: pass.filtered_mean,
        filtered_var: pass.filtered_var,
        loglik: -fx_best,
        converged: nm_converged && !unidentified,
        optimizer_trace: trace,
        warnings,
    })
}
