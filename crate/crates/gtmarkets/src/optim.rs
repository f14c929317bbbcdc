//! Derivative-free simplex minimization (Nelder-Mead).
//!
//! Standard reflection/expansion/contraction/shrink moves. Objective values
//! that are NaN are treated as `+inf`, so the simplex walks away from
//! invalid regions instead of wedging on them.

/// Stopping rules and simplex construction.
#[derive(Debug, Clone)]
pub struct NelderMeadOptions {
    pub max_iter: usize,
    /// Converged when the simplex diameter (max pairwise infinity-norm
    /// distance) falls below this...
    pub diameter_tol: f64,
    /// ...and the best value improved by less than this over the trailing
    /// window.
    pub improvement_tol: f64,
    pub improvement_window: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        NelderMeadOptions {
            max_iter: 4000,
            diameter_tol: 1e-8,
            improvement_tol: 1e-10,
            improvement_window: 10,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub fx: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

fn guard(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

/// Minimize `f` from `x0`, stepping `steps[i]` along each axis to build the
/// initial simplex.
pub fn nelder_mead<F>(
    mut f: F,
    x0: &[f64],
    steps: &[f64],
    opts: &NelderMeadOptions,
) -> NelderMeadResult
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = x0.len();
    assert!(dim >= 1, "empty parameter vector");
    assert_eq!(steps.len(), dim, "one step per dimension");

    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);

    let mut evaluations = 0;
    let mut eval = |x: &[f64], count: &mut usize| -> f64 {
        *count += 1;
        guard(f(x))
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    let fx0 = eval(x0, &mut evaluations);
    simplex.push((x0.to_vec(), fx0));
    for i in 0..dim {
        let mut v = x0.to_vec();
        v[i] += if steps[i] != 0.0 { steps[i] } else { 1e-4 };
        let fv = eval(&v, &mut evaluations);
        simplex.push((v, fv));
    }

    let mut best_history: Vec<f64> = Vec::new();
    let mut iterations = 0;
    let mut converged = false;

    for iter in 0..opts.max_iter {
        iterations = iter + 1;
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        best_history.push(simplex[0].1);

        // Convergence: tight simplex plus a stalled best value.
        let mut diameter = 0.0f64;
        for i in 0..simplex.len() {
            for j in (i + 1)..simplex.len() {
                let d = simplex[i]
                    .0
                    .iter()
                    .zip(&simplex[j].0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0f64, f64::max);
                diameter = diameter.max(d);
            }
        }
        let window = opts.improvement_window;
        let stalled = best_history.len() > window && {
            let prev = best_history[best_history.len() - 1 - window];
            let now = *best_history.last().unwrap();
            prev.is_finite() && now.is_finite() && (prev - now) < opts.improvement_tol
        };
        if diameter < opts.diameter_tol && stalled {
            converged = true;
            break;
        }

        // Centroid of all but the worst vertex.
        let worst = simplex.len() - 1;
        let mut centroid = vec![0.0; dim];
        for (v, _) in simplex.iter().take(worst) {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / worst as f64;
            }
        }

        let mix = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> {
            a.iter().zip(b).map(|(p, q)| p + t * (q - p)).collect()
        };

        // Reflect the worst vertex through the centroid.
        let reflected = mix(&centroid, &simplex[worst].0, -alpha);
        let f_reflected = eval(&reflected, &mut evaluations);

        if f_reflected < simplex[0].1 {
            // Try to expand further along the same direction.
            let expanded = mix(&centroid, &simplex[worst].0, -gamma);
            let f_expanded = eval(&expanded, &mut evaluations);
            simplex[worst] = if f_expanded < f_reflected {
                (expanded, f_expanded)
            } else {
                (reflected, f_reflected)
            };
            continue;
        }
        if f_reflected < simplex[worst - 1].1 {
            simplex[worst] = (reflected, f_reflected);
            continue;
        }

        // Contract toward the better of worst/reflected.
        let (anchor, f_anchor) = if f_reflected < simplex[worst].1 {
            (&reflected, f_reflected)
        } else {
            (&simplex[worst].0.clone(), simplex[worst].1)
        };
        let contracted = mix(&centroid, anchor, rho);
        let f_contracted = eval(&contracted, &mut evaluations);
        if f_contracted < f_anchor {
            simplex[worst] = (contracted, f_contracted);
            continue;
        }

        // Shrink everything toward the best vertex.
        let best = simplex[0].0.clone();
        for entry in simplex.iter_mut().skip(1) {
            let shrunk = mix(&best, &entry.0, sigma);
            let f_shrunk = eval(&shrunk, &mut evaluations);
            *entry = (shrunk, f_shrunk);
        }
    }

    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    NelderMeadResult {
        x: simplex[0].0.clone(),
        fx: simplex[0].1,
        iterations,
        evaluations,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimizes_a_quadratic_bowl() {
        let f = |x: &[f64]| (x[0] - 3.0).powi(2) + 2.0 * (x[1] + 1.0).powi(2);
        let result = nelder_mead(f, &[0.0, 0.0], &[0.5, 0.5], &NelderMeadOptions::default());
        assert!(result.converged);
        assert!((result.x[0] - 3.0).abs() < 1e-6, "{:?}", result.x);
        assert!((result.x[1] + 1.0).abs() < 1e-6, "{:?}", result.x);
    }

    #[test]
    fn handles_rosenbrock() {
        let f = |x: &[f64]| {
            let a = 1.0 - x[0];
            let b = x[1] - x[0] * x[0];
            a * a + 100.0 * b * b
        };
        let result = nelder_mead(
            f,
            &[-1.2, 1.0],
            &[0.5, 0.5],
            &NelderMeadOptions {
                max_iter: 10_000,
                ..Default::default()
            },
        );
        assert!((result.x[0] - 1.0).abs() < 1e-5, "{:?}", result.x);
        assert!((result.x[1] - 1.0).abs() < 1e-5, "{:?}", result.x);
    }

    #[test]
    fn walks_out_of_nan_regions() {
        // NaN left of the origin; the minimum at x = 2 is still reachable.
        let f = |x: &[f64]| {
            if x[0] < 0.0 {
                f64::NAN
            } else {
                (x[0] - 2.0).powi(2) + x[1] * x[1]
            }
        };
        let result = nelder_mead(f, &[0.5, 0.3], &[0.2, 0.2], &NelderMeadOptions::default());
        assert!((result.x[0] - 2.0).abs() < 1e-6);
    }

    #[test]
    fn respects_iteration_budget() {
        let f = |x: &[f64]| x[0].powi(2);
        let result = nelder_mead(
            f,
            &[10.0],
            &[1.0],
            &NelderMeadOptions {
                max_iter: 3,
                ..Default::default()
            },
        );
        assert_eq!(result.iterations, 3);
        assert!(!result.converged);
    }
}
