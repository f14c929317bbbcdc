//! Constant-parameter OLS machinery: AR(1)-X fits with exogenous search
//! indices, heteroskedasticity-robust and HAC (Newey-West) covariance,
//! adjusted R², significance stars, and fixed-format result tables.
//!
//! Least squares goes through a QR factorization, never an explicit normal
//! matrix inverse; the covariance sandwiches reuse the triangular factor.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::timeseries::TimeSeries;

/// Relative singular-value cutoff below which a design is singular.
const RANK_TOL: f64 = 1e-10;

/// Named regressor columns plus the response, aligned row-wise.
#[derive(Debug, Clone)]
pub struct DesignMatrix {
    names: Vec<String>,
    x: DMatrix<f64>,
    y: DVector<f64>,
}

impl DesignMatrix {
    /// Assemble a design from named columns; rejects ragged or missing data.
    pub fn new(names: Vec<String>, columns: Vec<Vec<f64>>, response: Vec<f64>) -> Result<Self> {
        if names.len() != columns.len() {
            return Err(Error::Argument(format!(
                "{} names for {} columns",
                names.len(),
                columns.len()
            )));
        }
        if names.is_empty() {
            return Err(Error::Argument("design needs at least one column".into()));
        }
        let n = response.len();
        for (name, col) in names.iter().zip(&columns) {
            if col.len() != n {
                return Err(Error::Argument(format!(
                    "column {name:?} has {} rows, response has {n}",
                    col.len()
                )));
            }
            if col.iter().any(|v| !v.is_finite()) {
                return Err(Error::Validation(format!(
                    "column {name:?} contains missing or non-finite entries"
                )));
            }
        }
        if response.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation(
                "response contains missing or non-finite entries".into(),
            ));
        }
        let k = names.len();
        let x = DMatrix::from_fn(n, k, |i, j| columns[j][i]);
        Ok(DesignMatrix {
            names,
            x,
            y: DVector::from_vec(response),
        })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn n_rows(&self) -> usize {
        self.x.nrows()
    }

    pub fn n_cols(&self) -> usize {
        self.x.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn response(&self) -> &DVector<f64> {
        &self.y
    }

    /// Singular-value rank check on the column-normalized design.
    ///
    /// Returns the name of a linearly dependent column when the smallest
    /// singular value falls below `1e-10` times the largest.
    fn rank_check(&self) -> Result<()> {
        let n = self.n_rows();
        let k = self.n_cols();
        let mut normalized = self.x.clone();
        for j in 0..k {
            let norm = normalized.column(j).norm();
            if norm == 0.0 {
                return Err(Error::SingularDesign {
                    column: self.names[j].clone(),
                });
            }
            for i in 0..n {
                normalized[(i, j)] /= norm;
            }
        }
        let svals = normalized.clone().svd(false, false).singular_values;
        let max = svals.iter().copied().fold(0.0f64, f64::max);
        let min = svals.iter().copied().fold(f64::INFINITY, f64::min);
        if min >= RANK_TOL * max {
            return Ok(());
        }
        // Name an offending column: one whose removal keeps the rank.
        let rank = |m: &DMatrix<f64>| -> usize {
            let sv = m.clone().svd(false, false).singular_values;
            let top = sv.iter().copied().fold(0.0f64, f64::max);
            sv.iter().filter(|s| **s > RANK_TOL * top).count()
        };
        let full_rank = rank(&normalized);
        for j in (0..k).rev() {
            let reduced = normalized.clone().remove_column(j);
            if rank(&reduced) == full_rank {
                return Err(Error::SingularDesign {
                    column: self.names[j].clone(),
                });
            }
        }
        Err(Error::SingularDesign {
            column: self.names[k - 1].clone(),
        })
    }
}

/// OLS solution with residuals and fitted values.
#[derive(Debug, Clone)]
pub struct OlsFit {
    pub coefficients: DVector<f64>,
    pub residuals: DVector<f64>,
    pub fitted: DVector<f64>,
}

/// Least-squares fit through the QR factorization of the design.
pub fn ols_fit(design: &DesignMatrix) -> Result<OlsFit> {
    let n = design.n_rows();
    let k = design.n_cols();
    if n <= k {
        return Err(Error::InsufficientData(format!(
            "need more rows ({n}) than columns ({k})"
        )));
    }
    design.rank_check()?;

    let qr = design.x.clone().qr();
    let qty = qr.q().transpose() * &design.y;
    let coefficients = qr
        .r()
        .solve_upper_triangular(&qty)
        .ok_or_else(|| Error::SingularDesign {
            column: design.names[k - 1].clone(),
        })?;
    let fitted = &design.x * &coefficients;
    let residuals = &design.y - &fitted;
    Ok(OlsFit {
        coefficients,
        residuals,
        fitted,
    })
}

/// Which sandwich covariance to report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeKind {
    /// White's estimator with the `n/(n-k)` small-sample factor.
    Hc1,
    /// Bartlett-kernel HAC sandwich with the given lag count (no
    /// small-sample factor, so zero lags equals HC0).
    NeweyWest(usize),
}

impl fmt::Display for SeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeKind::Hc1 => write!(f, "HC1"),
            SeKind::NeweyWest(m) => write!(f, "NW({m})"),
        }
    }
}

/// Textbook plug-in bandwidth `floor(4 * (n/100)^(2/9))`.
pub fn newey_west_default_lags(n: usize) -> usize {
    (4.0 * (n as f64 / 100.0).powf(2.0 / 9.0)).floor() as usize
}

/// Robust covariance of the OLS coefficients.
///
/// HC1: `(n/(n-k)) (X'X)^-1 X' diag(e^2) X (X'X)^-1`.
/// Newey-West with `m` lags adds Bartlett-weighted cross products
/// `w_l = 1 - l/(m+1)` of lagged score outer products to the meat.
/// The result is symmetrized before returning.
pub fn robust_covariance(
    design: &DesignMatrix,
    residuals: &DVector<f64>,
    kind: SeKind,
) -> Result<DMatrix<f64>> {
    let n = design.n_rows();
    let k = design.n_cols();
    if residuals.len() != n {
        return Err(Error::Argument(format!(
            "residual length {} does not match {} rows",
            residuals.len(),
            n
        )));
    }
    if let SeKind::NeweyWest(m) = kind {
        if m >= n {
            return Err(Error::Argument(format!("lag count {m} must be below n={n}")));
        }
    }

    // (X'X)^-1 from the triangular factor: R^-1 R^-T.
    let qr = design.x.clone().qr();
    let r_inv = qr
        .r()
        .solve_upper_triangular(&DMatrix::identity(k, k))
        .ok_or_else(|| Error::SingularDesign {
            column: design.names[k - 1].clone(),
        })?;
    let xtx_inv = &r_inv * r_inv.transpose();

    let x = &design.x;
    let mut meat = DMatrix::zeros(k, k);
    for t in 0..n {
        let w = residuals[t] * residuals[t];
        for i in 0..k {
            for j in 0..k {
                meat[(i, j)] += w * x[(t, i)] * x[(t, j)];
            }
        }
    }

    let covariance = match kind {
        SeKind::Hc1 => {
            let factor = n as f64 / (n - k) as f64;
            factor * &xtx_inv * meat * &xtx_inv
        }
        SeKind::NeweyWest(m) => {
            for lag in 1..=m {
                let weight = 1.0 - lag as f64 / (m as f64 + 1.0);
                for t in lag..n {
                    let w = weight * residuals[t] * residuals[t - lag];
                    for i in 0..k {
                        for j in 0..k {
                            let cross = x[(t, i)] * x[(t - lag, j)];
                            meat[(i, j)] += w * cross;
                            meat[(j, i)] += w * cross;
                        }
                    }
                }
            }
            &xtx_inv * meat * &xtx_inv
        }
    };
    Ok(0.5 * (&covariance + covariance.transpose()))
}

/// `1 - (RSS/(n-k)) / (TSS/(n-1))` with TSS about the mean of `y`.
pub fn adjusted_r2(y: &[f64], residuals: &[f64], k: usize) -> Result<f64> {
    let n = y.len();
    if residuals.len() != n {
        return Err(Error::Argument("y and residuals lengths differ".into()));
    }
    if n <= k + 1 {
        return Err(Error::InsufficientData(format!(
            "adjusted R2 needs n > k + 1, got n={n}, k={k}"
        )));
    }
    let mean = y.iter().sum::<f64>() / n as f64;
    let tss: f64 = y.iter().map(|v| (v - mean) * (v - mean)).sum();
    if tss == 0.0 {
        return Err(Error::Domain("zero total sum of squares".into()));
    }
    let rss: f64 = residuals.iter().map(|e| e * e).sum();
    Ok(1.0 - (rss / (n - k) as f64) / (tss / (n - 1) as f64))
}

/// Significance stars from a two-sided t test.
///
/// `dof` must be at least 1. Thresholds: p < 0.01 gives `***`,
/// p < 0.05 `**`, p < 0.10 `*`, otherwise empty.
pub fn stars(t_stat: f64, dof: usize) -> &'static str {
    let dof = dof.max(1);
    let dist = StudentsT::new(0.0, 1.0, dof as f64).expect("valid t distribution");
    let p = 2.0 * (1.0 - dist.cdf(t_stat.abs()));
    if p < 0.01 {
        "***"
    } else if p < 0.05 {
        "**"
    } else if p < 0.10 {
        "*"
    } else {
        ""
    }
}

/// One fitted equation: coefficients with robust inference and fit stats.
#[derive(Debug, Clone)]
pub struct RegressionResult {
    pub names: Vec<String>,
    pub coefficients: Vec<f64>,
    pub robust_se: Vec<f64>,
    pub t_stats: Vec<f64>,
    pub stars: Vec<&'static str>,
    pub adj_r2: f64,
    pub residuals: Vec<f64>,
    pub n_obs: usize,
    pub se_kind: SeKind,
}

impl RegressionResult {
    fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn coef(&self, name: &str) -> Option<f64> {
        self.index(name).map(|i| self.coefficients[i])
    }

    pub fn se(&self, name: &str) -> Option<f64> {
        self.index(name).map(|i| self.robust_se[i])
    }

    pub fn t_stat(&self, name: &str) -> Option<f64> {
        self.index(name).map(|i| self.t_stats[i])
    }

    pub fn star(&self, name: &str) -> Option<&'static str> {
        self.index(name).map(|i| self.stars[i])
    }

    /// Residual degrees of freedom `n - k`.
    pub fn dof(&self) -> usize {
        self.n_obs - self.names.len()
    }

    /// Two-sided p-values recomputed from the stored t statistics.
    pub fn p_values(&self) -> Vec<f64> {
        let dist = StudentsT::new(0.0, 1.0, self.dof().max(1) as f64).expect("valid t");
        self.t_stats
            .iter()
            .map(|t| 2.0 * (1.0 - dist.cdf(t.abs())))
            .collect()
    }

    /// Rename a coefficient row (for example the search-index regressor when
    /// the reference country's index substitutes the country-specific one).
    pub fn rename_coef(&mut self, from: &str, to: &str) {
        if let Some(i) = self.index(from) {
            self.names[i] = to.to_string();
        }
    }
}

fn finish_fit(design: DesignMatrix, se_kind: SeKind) -> Result<RegressionResult> {
    let n = design.n_rows();
    let k = design.n_cols();
    let fit = ols_fit(&design)?;
    let covariance = robust_covariance(&design, &fit.residuals, se_kind)?;
    let dof = n - k;
    let mut robust_se = Vec::with_capacity(k);
    let mut t_stats = Vec::with_capacity(k);
    let mut star_vec = Vec::with_capacity(k);
    for i in 0..k {
        let se = covariance[(i, i)].max(0.0).sqrt();
        let t = fit.coefficients[i] / se;
        robust_se.push(se);
        t_stats.push(t);
        star_vec.push(stars(t, dof));
    }
    let y: Vec<f64> = design.response().iter().copied().collect();
    let residuals: Vec<f64> = fit.residuals.iter().copied().collect();
    let adj = adjusted_r2(&y, &residuals, k)?;
    Ok(RegressionResult {
        names: design.names().to_vec(),
        coefficients: fit.coefficients.iter().copied().collect(),
        robust_se,
        t_stats,
        stars: star_vec,
        adj_r2: adj,
        residuals,
        n_obs: n,
        se_kind,
    })
}

fn check_aligned(y: &TimeSeries, other: &TimeSeries, what: &str) -> Result<()> {
    if y.dates() != other.dates() {
        return Err(Error::Argument(format!(
            "{what} series is not aligned to the return series"
        )));
    }
    Ok(())
}

/// Fit `y_t = alpha + beta * GT_t + delta * y_{t-1} + e_t`.
///
/// Inputs must share dates; the first observation is consumed by the lag.
/// Rows with any missing entry are dropped listwise.
pub fn fit_arx(y: &TimeSeries, gt: &TimeSeries, se_kind: SeKind) -> Result<RegressionResult> {
    check_aligned(y, gt, "search-index")?;
    if y.len() < 10 {
        return Err(Error::InsufficientData(format!(
            "AR(1)-X fit needs at least 10 observations, got {}",
            y.len()
        )));
    }
    let yv = y.values();
    let gv = gt.values();
    let mut response = Vec::new();
    let mut c_const = Vec::new();
    let mut c_gt = Vec::new();
    let mut c_lag = Vec::new();
    for t in 1..y.len() {
        let row = [yv[t], gv[t], yv[t - 1]];
        if row.iter().any(|v| v.is_nan()) {
            continue;
        }
        response.push(yv[t]);
        c_const.push(1.0);
        c_gt.push(gv[t]);
        c_lag.push(yv[t - 1]);
    }
    if response.len() < 8 {
        return Err(Error::InsufficientData(format!(
            "only {} usable rows after listwise dropping",
            response.len()
        )));
    }
    let design = DesignMatrix::new(
        vec!["const".into(), "GT_t".into(), "y_{t-1}".into()],
        vec![c_const, c_gt, c_lag],
        response,
    )?;
    finish_fit(design, se_kind)
}

/// Fit the controls model
/// `y_t = alpha + beta * GT_t + delta * y_{t-1} + gamma * IV_t + omega * dCC_t + e_t`.
///
/// Missing growth-rate entries drop their whole row; an all-missing growth
/// series is an error.
pub fn fit_arx_controls(
    y: &TimeSeries,
    gt: &TimeSeries,
    iv: &TimeSeries,
    dcc: &TimeSeries,
    se_kind: SeKind,
) -> Result<RegressionResult> {
    check_aligned(y, gt, "search-index")?;
    check_aligned(y, iv, "implied-volatility")?;
    check_aligned(y, dcc, "case-growth")?;
    if y.len() < 10 {
        return Err(Error::InsufficientData(format!(
            "controls fit needs at least 10 observations, got {}",
            y.len()
        )));
    }
    if dcc.missing_count() == dcc.len() {
        return Err(Error::InsufficientData(
            "case-growth series is entirely missing".into(),
        ));
    }
    let yv = y.values();
    let gv = gt.values();
    let iv_v = iv.values();
    let dv = dcc.values();
    let mut response = Vec::new();
    let mut cols: [Vec<f64>; 5] = Default::default();
    for t in 1..y.len() {
        let row = [yv[t], gv[t], yv[t - 1], iv_v[t], dv[t]];
        if row.iter().any(|v| v.is_nan()) {
            continue;
        }
        response.push(yv[t]);
        cols[0].push(1.0);
        cols[1].push(gv[t]);
        cols[2].push(yv[t - 1]);
        cols[3].push(iv_v[t]);
        cols[4].push(dv[t]);
    }
    if response.len() < 10 {
        return Err(Error::InsufficientData(format!(
            "only {} usable rows after listwise dropping",
            response.len()
        )));
    }
    let [c0, c1, c2, c3, c4] = cols;
    let design = DesignMatrix::new(
        vec![
            "const".into(),
            "GT_t".into(),
            "y_{t-1}".into(),
            "IV_t".into(),
            "Δ%CC_t".into(),
        ],
        vec![c0, c1, c2, c3, c4],
        response,
    )?;
    finish_fit(design, se_kind)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timeseries::SeriesKind;
    use chrono::NaiveDate;
    use proptest::prelude::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha12Rng;

    fn design(cols: Vec<(&str, Vec<f64>)>, y: Vec<f64>) -> DesignMatrix {
        let names = cols.iter().map(|(n, _)| n.to_string()).collect();
        let columns = cols.into_iter().map(|(_, c)| c).collect();
        DesignMatrix::new(names, columns, y).unwrap()
    }

    fn noise(seed: u64, n: usize) -> Vec<f64> {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        (0..n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect()
    }

    #[test]
    fn exact_two_column_recovery() {
        let x1 = noise(1, 30);
        let x2 = noise(2, 30);
        let y: Vec<f64> = x1.iter().zip(&x2).map(|(a, b)| 3.0 * a - 2.0 * b).collect();
        let fit = ols_fit(&design(vec![("x1", x1), ("x2", x2)], y)).unwrap();
        assert!((fit.coefficients[0] - 3.0).abs() < 1e-10);
        assert!((fit.coefficients[1] + 2.0).abs() < 1e-10);
    }

    #[test]
    fn intercept_only_fits_the_mean() {
        let y = vec![1.0, 2.0, 3.0, 6.0];
        let fit = ols_fit(&design(vec![("const", vec![1.0; 4])], y)).unwrap();
        assert!((fit.coefficients[0] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn duplicated_column_is_singular() {
        let x = noise(3, 20);
        let err = ols_fit(&design(
            vec![("a", x.clone()), ("a_again", x)],
            noise(4, 20),
        ));
        match err {
            Err(Error::SingularDesign { column }) => assert_eq!(column, "a_again"),
            other => panic!("expected singular design, got {other:?}"),
        }
    }

    #[test]
    fn residuals_are_orthogonal_to_the_design() {
        let d = design(
            vec![
                ("const", vec![1.0; 40]),
                ("x1", noise(5, 40)),
                ("x2", noise(6, 40)),
            ],
            noise(7, 40),
        );
        let fit = ols_fit(&d).unwrap();
        let xte = d.matrix().transpose() * &fit.residuals;
        assert!(xte.amax() < 1e-8, "X'e = {xte}");
    }

    /// Literal summation sandwich: explicit inverse and explicit meat.
    fn sandwich_oracle(
        x: &DMatrix<f64>,
        e: &DVector<f64>,
        kind: SeKind,
    ) -> DMatrix<f64> {
        let n = x.nrows();
        let k = x.ncols();
        let xtx_inv = (x.transpose() * x).try_inverse().unwrap();
        let mut meat = DMatrix::zeros(k, k);
        for t in 0..n {
            let xt = x.row(t).transpose();
            meat += e[t] * e[t] * &xt * xt.transpose();
        }
        match kind {
            SeKind::Hc1 => (n as f64 / (n - k) as f64) * &xtx_inv * meat * &xtx_inv,
            SeKind::NeweyWest(m) => {
                for lag in 1..=m {
                    let w = 1.0 - lag as f64 / (m as f64 + 1.0);
                    for t in lag..n {
                        let xt = x.row(t).transpose();
                        let xl = x.row(t - lag).transpose();
                        let gamma = e[t] * e[t - lag] * &xt * xl.transpose();
                        meat += w * (&gamma + gamma.transpose());
                    }
                }
                &xtx_inv * meat * &xtx_inv
            }
        }
    }

    fn rel_close(a: &DMatrix<f64>, b: &DMatrix<f64>, tol: f64) -> bool {
        let scale = b.amax().max(1e-300);
        (a - b).amax() <= tol * scale
    }

    #[test]
    fn newey_west_zero_lags_equals_hc0() {
        let d = design(
            vec![("const", vec![1.0; 25]), ("x", noise(8, 25))],
            noise(9, 25),
        );
        let fit = ols_fit(&d).unwrap();
        let nw0 = robust_covariance(&d, &fit.residuals, SeKind::NeweyWest(0)).unwrap();
        let hc1 = robust_covariance(&d, &fit.residuals, SeKind::Hc1).unwrap();
        let (n, k) = (25.0, 2.0);
        let hc0 = hc1 * ((n - k) / n);
        assert!(rel_close(&nw0, &hc0, 1e-13));
    }

    #[test]
    fn four_observation_instance_matches_literal_oracle() {
        let d = design(
            vec![
                ("x1", vec![1.0, 2.0, -1.0, 0.5]),
                ("x2", vec![0.3, -0.7, 1.1, 0.9]),
            ],
            vec![0.2, 1.4, -0.6, 0.8],
        );
        let fit = ols_fit(&d).unwrap();
        for kind in [SeKind::Hc1, SeKind::NeweyWest(1), SeKind::NeweyWest(2)] {
            let got = robust_covariance(&d, &fit.residuals, kind).unwrap();
            let want = sandwich_oracle(d.matrix(), &fit.residuals, kind);
            assert!(rel_close(&got, &want, 1e-12), "{kind}: {got} vs {want}");
        }
    }

    #[test]
    fn homoskedastic_hc1_collapses_to_scaled_inverse() {
        let d = design(
            vec![("const", vec![1.0; 12]), ("x", noise(10, 12))],
            vec![0.0; 12],
        );
        let c = 0.37;
        let e = DVector::from_element(12, c);
        let got = robust_covariance(&d, &e, SeKind::Hc1).unwrap();
        let want = (c * c * 12.0 / 10.0)
            * (d.matrix().transpose() * d.matrix()).try_inverse().unwrap();
        assert!(rel_close(&got, &want, 1e-12));
    }

    #[test]
    fn lag_count_at_or_above_n_is_rejected() {
        let d = design(vec![("x", noise(11, 6))], noise(12, 6));
        let fit = ols_fit(&d).unwrap();
        assert!(matches!(
            robust_covariance(&d, &fit.residuals, SeKind::NeweyWest(6)),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn adjusted_r2_perfect_fit_is_one() {
        let y = vec![1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(adjusted_r2(&y, &[0.0; 5], 2).unwrap(), 1.0);
    }

    #[test]
    fn adjusted_r2_can_go_negative() {
        // Residuals as large as the centered response with k = 2 burns
        // degrees of freedom for nothing.
        let y = vec![1.0, -1.0, 1.0, -1.0, 1.0, -1.0];
        let residuals = vec![1.0, -1.0, 1.0, -1.0, 1.0, -0.9];
        let r2 = adjusted_r2(&y, &residuals, 2).unwrap();
        assert!(r2 < 0.0, "{r2}");
    }

    #[test]
    fn adjusted_r2_matches_hand_formula() {
        let y = vec![2.0, 4.0, 3.0, 5.0, 6.0];
        let e = vec![0.5, -0.25, 0.1, -0.4, 0.05];
        let n = 5.0;
        let k = 2.0;
        let mean = y.iter().sum::<f64>() / n;
        let tss: f64 = y.iter().map(|v| (v - mean) * (v - mean)).sum();
        let rss: f64 = e.iter().map(|v| v * v).sum();
        let want = 1.0 - (rss / (n - k)) / (tss / (n - 1.0));
        let got = adjusted_r2(&y, &e, 2).unwrap();
        assert!((got - want).abs() < 1e-12);
    }

    #[test]
    fn adjusted_r2_zero_tss_is_undefined() {
        assert!(matches!(
            adjusted_r2(&[3.0; 6], &[0.0; 6], 2),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn star_thresholds_from_t_cdf_oracle() {
        // Frozen from a high-precision t CDF: p(|t|=2.0, 60) = 0.05003 and
        // p(|t|=2.8, 70) = 0.00660.
        assert_eq!(stars(0.0, 50), "");
        assert_eq!(stars(2.0, 60), "*");
        assert_eq!(stars(-2.0, 60), "*");
        assert_eq!(stars(2.8, 70), "***");
    }

    fn dated(kind: SeriesKind, values: Vec<f64>) -> TimeSeries {
        let start: NaiveDate = "2020-01-01".parse().unwrap();
        let dates: Vec<NaiveDate> = (0..values.len() as i64)
            .map(|i| start + chrono::Duration::days(i))
            .collect();
        TimeSeries::new(kind, dates, values).unwrap()
    }

    fn simulate_arx(alpha: f64, beta: f64, delta: f64, gt: &[f64]) -> Vec<f64> {
        let mut y = vec![0.01];
        for t in 1..gt.len() {
            y.push(alpha + beta * gt[t] + delta * y[t - 1]);
        }
        y
    }

    #[test]
    fn zero_noise_arx_recovers_parameters() {
        let gt: Vec<f64> = noise(13, 60).iter().map(|v| (v + 1.0) / 2.0).collect();
        let y = simulate_arx(0.004, -0.05, -0.3, &gt);
        let fit = fit_arx(
            &dated(SeriesKind::LogReturn, y),
            &dated(SeriesKind::GtUnit, gt),
            SeKind::Hc1,
        )
        .unwrap();
        assert!((fit.coef("const").unwrap() - 0.004).abs() < 1e-10);
        assert!((fit.coef("GT_t").unwrap() + 0.05).abs() < 1e-10);
        assert!((fit.coef("y_{t-1}").unwrap() + 0.3).abs() < 1e-10);
        assert_eq!(fit.n_obs, 59);
    }

    #[test]
    fn constant_gt_is_singular() {
        let y = noise(14, 40);
        let gt = vec![0.5; 40];
        let err = fit_arx(
            &dated(SeriesKind::LogReturn, y),
            &dated(SeriesKind::GtUnit, gt),
            SeKind::Hc1,
        );
        assert!(matches!(err, Err(Error::SingularDesign { .. })));
    }

    #[test]
    fn short_series_rejected() {
        let err = fit_arx(
            &dated(SeriesKind::LogReturn, noise(15, 9)),
            &dated(SeriesKind::GtUnit, vec![0.1; 9]),
            SeKind::Hc1,
        );
        assert!(matches!(err, Err(Error::InsufficientData(_))));
    }

    #[test]
    fn controls_model_zero_noise_recovery() {
        let n = 70;
        let gt: Vec<f64> = noise(16, n).iter().map(|v| (v + 1.0) / 2.0).collect();
        let iv: Vec<f64> = noise(17, n).iter().map(|v| v * 0.3 + 0.5).collect();
        let dcc: Vec<f64> = noise(18, n).iter().map(|v| v * 0.2).collect();
        let (alpha, beta, delta, gamma, omega) = (0.002, -0.04, -0.25, 0.03, -0.01);
        let mut y = vec![0.005];
        for t in 1..n {
            y.push(alpha + beta * gt[t] + delta * y[t - 1] + gamma * iv[t] + omega * dcc[t]);
        }
        let fit = fit_arx_controls(
            &dated(SeriesKind::LogReturn, y),
            &dated(SeriesKind::GtUnit, gt),
            &dated(SeriesKind::ImpliedVol, iv),
            &dated(SeriesKind::GrowthRate, dcc),
            SeKind::Hc1,
        )
        .unwrap();
        for (name, want) in [
            ("const", alpha),
            ("GT_t", beta),
            ("y_{t-1}", delta),
            ("IV_t", gamma),
            ("Δ%CC_t", omega),
        ] {
            assert!(
                (fit.coef(name).unwrap() - want).abs() < 1e-9,
                "{name}: {} vs {want}",
                fit.coef(name).unwrap()
            );
        }
    }

    #[test]
    fn controls_all_zero_columns_are_singular() {
        let n = 40;
        let err = fit_arx_controls(
            &dated(SeriesKind::LogReturn, noise(19, n)),
            &dated(SeriesKind::GtUnit, noise(20, n).iter().map(|v| (v + 1.0) / 2.0).collect()),
            &dated(SeriesKind::ImpliedVol, vec![0.0; n]),
            &dated(SeriesKind::GrowthRate, vec![0.0; n]),
            SeKind::Hc1,
        );
        assert!(matches!(err, Err(Error::SingularDesign { .. })));
    }

    #[test]
    fn controls_all_missing_growth_is_insufficient() {
        let n = 40;
        let err = fit_arx_controls(
            &dated(SeriesKind::LogReturn, noise(21, n)),
            &dated(SeriesKind::GtUnit, noise(22, n).iter().map(|v| (v + 1.0) / 2.0).collect()),
            &dated(SeriesKind::ImpliedVol, noise(23, n)),
            &dated(SeriesKind::GrowthRate, vec![f64::NAN; n]),
            SeKind::Hc1,
        );
        assert!(matches!(err, Err(Error::InsufficientData(_))));
    }

    #[test]
    fn missing_growth_rows_drop_listwise() {
        let n = 50;
        let gt: Vec<f64> = noise(24, n).iter().map(|v| (v + 1.0) / 2.0).collect();
        let iv = noise(25, n);
        let mut dcc = noise(26, n);
        dcc[5] = f64::NAN;
        dcc[6] = f64::NAN;
        let y = noise(27, n);
        let fit = fit_arx_controls(
            &dated(SeriesKind::LogReturn, y),
            &dated(SeriesKind::GtUnit, gt),
            &dated(SeriesKind::ImpliedVol, iv),
            &dated(SeriesKind::GrowthRate, dcc),
            SeKind::Hc1,
        )
        .unwrap();
        assert_eq!(fit.n_obs, n - 1 - 2);
    }

    proptest! {
        /// X'e stays orthogonal on random noisy fits.
        #[test]
        fn orthogonality_property(seed in 0u64..200) {
            let n = 50;
            let d = design(
                vec![
                    ("const", vec![1.0; n]),
                    ("x1", noise(seed, n)),
                    ("x2", noise(seed.wrapping_add(1), n)),
                ],
                noise(seed.wrapping_add(2), n),
            );
            let fit = ols_fit(&d).unwrap();
            let xte = d.matrix().transpose() * &fit.residuals;
            prop_assert!(xte.amax() < 1e-8);
        }

        /// Adding a pure-noise regressor never increases the RSS.
        #[test]
        fn extra_regressor_never_hurts_rss(seed in 0u64..200) {
            let n = 40;
            let x1 = noise(seed, n);
            let y = noise(seed.wrapping_add(1), n);
            let small = design(vec![("const", vec![1.0; n]), ("x1", x1.clone())], y.clone());
            let big = design(
                vec![
                    ("const", vec![1.0; n]),
                    ("x1", x1),
                    ("junk", noise(seed.wrapping_add(2), n)),
                ],
                y,
            );
            let rss = |d: &DesignMatrix| {
                ols_fit(d).unwrap().residuals.iter().map(|e| e * e).sum::<f64>()
            };
            prop_assert!(rss(&big) <= rss(&small) + 1e-12);
        }

        /// Scaling a regressor by c scales its coefficient and SE by 1/c and
        /// leaves t statistics (hence stars) unchanged.
        #[test]
        fn scale_equivariance(seed in 0u64..200, c in 0.01..50.0f64) {
            let n = 45;
            let x = noise(seed, n);
            let y = noise(seed.wrapping_add(9), n);
            let base = design(vec![("const", vec![1.0; n]), ("x", x.clone())], y.clone());
            let scaled = design(
                vec![("const", vec![1.0; n]), ("x", x.iter().map(|v| c * v).collect())],
                y,
            );
            let fit_b = ols_fit(&base).unwrap();
            let fit_s = ols_fit(&scaled).unwrap();
            let cov_b = robust_covariance(&base, &fit_b.residuals, SeKind::Hc1).unwrap();
            let cov_s = robust_covariance(&scaled, &fit_s.residuals, SeKind::Hc1).unwrap();
            let b_b = fit_b.coefficients[1];
            let b_s = fit_s.coefficients[1];
            prop_assert!((b_s - b_b / c).abs() < 1e-10 * (1.0 + b_b.abs()));
            let se_b = cov_b[(1, 1)].sqrt();
            let se_s = cov_s[(1, 1)].sqrt();
            prop_assert!((se_s - se_b / c).abs() < 1e-10 * (1.0 + se_b.abs()));
            let t_b = b_b / se_b;
            let t_s = b_s / se_s;
            prop_assert!((t_b - t_s).abs() < 1e-10 * (1.0 + t_b.abs()));
        }

        /// HC1 is symmetric positive semidefinite.
        #[test]
        fn hc1_is_psd(seed in 0u64..200) {
            let n = 30;
            let d = design(
                vec![("const", vec![1.0; n]), ("x", noise(seed, n))],
                noise(seed.wrapping_add(3), n),
            );
            let fit = ols_fit(&d).unwrap();
            let cov = robust_covariance(&d, &fit.residuals, SeKind::Hc1).unwrap();
            prop_assert!((&cov - cov.transpose()).amax() < 1e-14);
            let eig = cov.symmetric_eigen();
            for v in eig.eigenvalues.iter() {
                prop_assert!(*v >= -1e-10);
            }
        }

        /// More extreme t statistics never earn fewer stars.
        #[test]
        fn stars_are_monotone(t1 in 0.0..6.0f64, t2 in 0.0..6.0f64, dof in 1usize..200) {
            let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
            prop_assert!(stars(lo, dof).len() <= stars(hi, dof).len());
        }
    }
}
