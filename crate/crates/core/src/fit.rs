//! Small bounded Levenberg–Marquardt solver for the few-parameter decay
//! models used throughout the crate.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Residuals and their Jacobian (rows = residuals, columns = parameters).
pub struct Evaluation {
    pub residuals: Vec<f64>,
    pub jacobian: Vec<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct Bounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Self {
        Self { lower, upper }
    }

    fn clamp(&self, p: &mut [f64]) {
        for (i, v) in p.iter_mut().enumerate() {
            *v = v.clamp(self.lower[i], self.upper[i]);
        }
    }
}

#[derive(Debug, Clone)]
pub struct FitOutcome {
    pub params: Vec<f64>,
    /// Sum of squared residuals.
    pub cost: f64,
    pub residuals: Vec<f64>,
    pub iterations: usize,
    /// `s^2 (J^T J)^-1`, present when the problem is over-determined and
    /// the normal matrix is invertible.
    pub covariance: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone)]
pub struct LmOptions {
    pub max_iterations: usize,
    pub step_tolerance: f64,
    pub cost_tolerance: f64,
    /// Sum of squares treated as an exact fit.
    pub cost_floor: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        Self { max_iterations: 500, step_tolerance: 1e-13, cost_tolerance: 1e-20, cost_floor: 1e-28 }
    }
}

fn cost_of(r: &[f64]) -> f64 {
    r.iter().map(|x| x * x).sum()
}

/// Minimises `sum r_i(p)^2` subject to box bounds. Steps are projected onto
/// the box.
pub fn levenberg_marquardt<F>(eval: F, initial: &[f64], bounds: &Bounds, opts: &LmOptions) -> Result<FitOutcome>
where
    F: Fn(&[f64]) -> Evaluation,
{
    let n = initial.len();
    let mut p = initial.to_vec();
    bounds.clamp(&mut p);
    let mut current = eval(&p);
    if current.residuals.iter().any(|r| !r.is_finite()) {
        return Err(Error::Fit {
            message: "non-finite residuals at the initial guess".into(),
            residuals: current.residuals,
        });
    }
    let mut cost = cost_of(&current.residuals);
    let mut lambda = 1e-3;
    let mut iterations = 0;
    let mut converged = false;

    while iterations < opts.max_iterations {
        iterations += 1;
        let m = current.residuals.len();
        let j = DMatrix::from_fn(m, n, |i, k| current.jacobian[i][k]);
        let r = DVector::from_vec(current.residuals.clone());
        let jtj = j.transpose() * &j;
        let g = j.transpose() * &r;
        if g.amax() < 1e-30 || cost <= opts.cost_floor {
            converged = true;
            break;
        }

        let mut accepted = false;
        for _ in 0..40 {
            let mut a = jtj.clone();
            for k in 0..n {
                let d = jtj[(k, k)].max(1e-30);
                a[(k, k)] += lambda * d;
            }
            let Some(step) = a.lu().solve(&(-&g)) else {
                lambda *= 10.0;
                continue;
            };
            let mut trial: Vec<f64> = p.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            bounds.clamp(&mut trial);
            let moved: f64 = trial.iter().zip(&p).map(|(a, b)| (a - b).abs() / (b.abs() + 1e-10)).fold(0.0, f64::max);
            let next = eval(&trial);
            let next_cost = cost_of(&next.residuals);
            if next_cost.is_finite() && next_cost <= cost {
                let improvement = cost - next_cost;
                p = trial;
                current = next;
                cost = next_cost;
                lambda = (lambda / 3.0).max(1e-12);
                accepted = true;
                if moved < opts.step_tolerance || improvement <= opts.cost_tolerance.max(1e-15 * cost) {
                    converged = true;
                }
                break;
            }
            if moved < opts.step_tolerance {
                // Projected step vanished: stationary on the boundary.
                converged = true;
                accepted = true;
                break;
            }
            lambda *= 4.0;
        }
        if !accepted {
            // Damping exhausted without decrease: local minimum to machine precision.
            converged = true;
        }
        if converged {
            break;
        }
    }

    if !converged {
        return Err(Error::Fit {
            message: format!("no convergence after {iterations} iterations"),
            residuals: current.residuals,
        });
    }

    let m = current.residuals.len();
    let covariance = if m > n {
        let j = DMatrix::from_fn(m, n, |i, k| current.jacobian[i][k]);
        let s2 = cost / (m - n) as f64;
        (j.transpose() * &j)
            .try_inverse()
            .map(|inv| (0..n).map(|a| (0..n).map(|b| inv[(a, b)] * s2).collect()).collect())
    } else {
        None
    };

    Ok(FitOutcome { params: p, cost, residuals: current.residuals, iterations, covariance })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exponential_parameters() {
        let xs: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 0.7 * (0.9f64).powf(*x) + 0.2).collect();
        let eval = |p: &[f64]| Evaluation {
            residuals: xs.iter().zip(&ys).map(|(x, y)| p[0] * p[1].powf(*x) + p[2] - y).collect(),
            jacobian: xs.iter().map(|x| vec![p[1].powf(*x), p[0] * x * p[1].powf(x - 1.0), 1.0]).collect(),
        };
        let b = Bounds::new(vec![0.0, 0.0, 0.0], vec![1.0, 1.0, 1.0]);
        let out = levenberg_marquardt(eval, &[0.5, 0.5, 0.5], &b, &LmOptions::default()).unwrap();
        assert!((out.params[0] - 0.7).abs() < 1e-9);
        assert!((out.params[1] - 0.9).abs() < 1e-9);
        assert!((out.params[2] - 0.2).abs() < 1e-9);
    }

    #[test]
    fn respects_bounds() {
        // Unconstrained optimum at p = -1.
        let eval = |p: &[f64]| Evaluation { residuals: vec![p[0] + 1.0], jacobian: vec![vec![1.0]] };
        let b = Bounds::new(vec![0.0], vec![2.0]);
        let out = levenberg_marquardt(eval, &[1.5], &b, &LmOptions::default()).unwrap();
        assert_eq!(out.params[0], 0.0);
    }
}
