//! Fixed-format rendering of regression results.
//!
//! Coefficients print with three decimals and their significance stars,
//! robust standard errors go in parentheses on the following line, and the
//! last row carries the adjusted R². Columns follow the canonical country
//! order DE, FR, GB, US, IT, ES.

use crate::regress::RegressionResult;
use crate::timeseries::Country;

/// Three-decimal fixed formatting.
///
/// Rounds the scaled value to the nearest integer with ties to even, and
/// keeps the sign of small negatives, so `-0.0005` renders as `-0.000`
/// while an exact zero stays signless.
pub fn fmt3(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let scaled = (x * 1000.0).round_ties_even();
    let magnitude = (scaled.abs()) as u64;
    let sign = if x < 0.0 { "-" } else { "" };
    format!("{sign}{}.{:03}", magnitude / 1000, magnitude % 1000)
}

fn pad_left(s: &str, width: usize) -> String {
    let len = s.chars().count();
    if len >= width {
        s.to_string()
    } else {
        format!("{}{}", " ".repeat(width - len), s)
    }
}

fn pad_right(s: &str, width: usize) -> String {
    let len = s.chars().count();
    if len >= width {
        s.to_string()
    } else {
        format!("{}{}", s, " ".repeat(width - len))
    }
}

/// Render per-country results as an aligned plain-text table.
///
/// Row order comes from the first result's coefficient names; a country
/// missing a coefficient gets a blank cell. Results are arranged in the
/// canonical column order regardless of input order.
pub fn format_results_table(results: &[(Country, RegressionResult)], model_label: &str) -> String {
    assert!(!results.is_empty(), "need at least one result");
    let mut ordered: Vec<&(Country, RegressionResult)> = Vec::new();
    for country in Country::ALL {
        for pair in results.iter().filter(|(c, _)| *c == country) {
            ordered.push(pair);
        }
    }
    let names = results[0].1.names.clone();

    // Build the cell grid first, then size the columns.
    let mut rows: Vec<(String, Vec<String>)> = Vec::new();
    for name in &names {
        let mut coef_cells = Vec::new();
        let mut se_cells = Vec::new();
        for (_, result) in &ordered {
            match result.coef(name) {
                Some(c) => {
                    let star = result.star(name).unwrap_or("");
                    coef_cells.push(format!("{}{star}", fmt3(c)));
                    se_cells.push(format!("({})", fmt3(result.se(name).unwrap())));
                }
                None => {
                    coef_cells.push(String::new());
                    se_cells.push(String::new());
                }
            }
        }
        rows.push((name.clone(), coef_cells));
        rows.push((String::new(), se_cells));
    }
    rows.push((
        "adj R²".to_string(),
        ordered.iter().map(|(_, r)| fmt3(r.adj_r2)).collect(),
    ));

    let label_width = rows
        .iter()
        .map(|(l, _)| l.chars().count())
        .max()
        .unwrap_or(0)
        .max(model_label.chars().count().min(16));
    let cell_width = rows
        .iter()
        .flat_map(|(_, cells)| cells.iter())
        .map(|c| c.chars().count())
        .max()
        .unwrap_or(0)
        .max(2)
        + 2;

    let mut out = format!("Model: {model_label}\n");
    out.push_str(&pad_right("", label_width));
    for (country, _) in &ordered {
        out.push_str(&pad_left(country.code(), cell_width));
    }
    out.push('\n');
    let adj_row = rows.len() - 1;
    for (i, (label, cells)) in rows.iter().enumerate() {
        if i == adj_row {
            out.push('\n');
        }
        out.push_str(&pad_right(label, label_width));
        for cell in cells {
            out.push_str(&pad_left(cell, cell_width));
        }
        out.push('\n');
    }
    out.push_str(
        "\nRobust standard errors in parentheses; *, ** and *** mark two-sided\n\
         significance at the 10%, 5% and 1% levels.\n",
    );
    out
}

/// Full-precision CSV export: one row per coefficient.
pub fn results_to_csv(results: &[(Country, RegressionResult)]) -> String {
    let mut out =
        String::from("country,coefficient,estimate,se,t,p,stars,adj_r2,n_obs,se_kind\n");
    let mut ordered: Vec<&(Country, RegressionResult)> = Vec::new();
    for country in Country::ALL {
        for pair in results.iter().filter(|(c, _)| *c == country) {
            ordered.push(pair);
        }
    }
    for (country, result) in ordered {
        let pvals = result.p_values();
        for (i, name) in result.names.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                country.code(),
                name,
                result.coefficients[i],
                result.robust_se[i],
                result.t_stats[i],
                pvals[i],
                result.stars[i],
                result.adj_r2,
                result.n_obs,
                result.se_kind,
            ));
        }
    }
    out
}
