//! Quasi-Newton minimization with finite-difference gradients.
//!
//! Objectives here are small (at most 16 parameters) and cheap, so central
//! differences are affordable and keep every caller free of hand-derived
//! gradients.

use rayon::prelude::*;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct BfgsOptions {
    pub max_iter: usize,
    /// Converged when the objective improved by less than `stall_tol` over
    /// this many consecutive iterations.
    pub stall_window: usize,
    pub stall_tol: f64,
    pub grad_tol: f64,
    /// Relative step of the central-difference gradient.
    pub fd_step: f64,
}

impl Default for BfgsOptions {
    fn default() -> Self {
        Self {
            max_iter: 3000,
            stall_window: 25,
            stall_tol: 1e-10,
            grad_tol: 1e-10,
            fd_step: 1e-6,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    /// Objective after each accepted step, starting with the initial point.
    pub history: Vec<f64>,
}

fn gradient<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64], step: f64, evals: &mut usize) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            let h = step * x[i].abs().max(1.0);
            probe[i] = x[i] + h;
            let up = f(&probe);
            probe[i] = x[i] - h;
            let down = f(&probe);
            probe[i] = x[i];
            *evals += 2;
            (up - down) / (2.0 * h)
        })
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Minimizes `f` from `x0` with BFGS and a backtracking Armijo line search.
pub fn minimize<F: Fn(&[f64]) -> f64>(f: F, x0: &[f64], opts: &BfgsOptions) -> Result<Minimum> {
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    let mut evals = 1;
    if !fx.is_finite() {
        return Err(Error::NotConverged {
            iterations: 0,
            best: fx,
            residual: f64::NAN,
            best_params: x,
        });
    }
    let mut g = gradient(&f, &x, opts.fd_step, &mut evals);
    // Inverse Hessian approximation, row-major.
    let identity = |h: &mut Vec<f64>| {
        h.iter_mut().for_each(|v| *v = 0.0);
        (0..n).for_each(|i| h[i * n + i] = 1.0);
    };
    let mut h_inv = vec![0.0; n * n];
    identity(&mut h_inv);
    let mut history = vec![fx];
    let mut reset_once = false;

    for iter in 1..=opts.max_iter {
        let gnorm = dot(&g, &g).sqrt();
        if gnorm < opts.grad_tol {
            return Ok(Minimum { x, value: fx, iterations: iter - 1, evaluations: evals, history });
        }
        let mut d: Vec<f64> = (0..n).map(|i| -dot(&h_inv[i * n..(i + 1) * n], &g)).collect();
        let mut slope = dot(&g, &d);
        if !(slope < 0.0) {
            identity(&mut h_inv);
            d = g.iter().map(|v| -v).collect();
            slope = -gnorm * gnorm;
        }

        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<f64> = x.iter().zip(&d).map(|(xi, di)| xi + t * di).collect();
            let ft = f(&trial);
            evals += 1;
            if ft.is_finite() && ft <= fx + 1e-4 * t * slope {
                accepted = Some((trial, ft));
                break;
            }
            t *= 0.5;
        }

        let Some((x_new, f_new)) = accepted else {
            // No descent at gradient precision: retry once along steepest
            // descent, otherwise this is as far as the finite differences go.
            if reset_once {
                return Ok(Minimum { x, value: fx, iterations: iter - 1, evaluations: evals, history });
            }
            reset_once = true;
            identity(&mut h_inv);
            continue;
        };
        reset_once = false;

        let g_new = gradient(&f, &x_new, opts.fd_step, &mut evals);
        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
            let hy: Vec<f64> = (0..n).map(|i| dot(&h_inv[i * n..(i + 1) * n], &y)).collect();
            let yhy = dot(&y, &hy);
            let rho = 1.0 / sy;
            for i in 0..n {
                for j in 0..n {
                    h_inv[i * n + j] += rho * ((1.0 + rho * yhy) * s[i] * s[j] - hy[i] * s[j] - s[i] * hy[j]);
                }
            }
        }
        x = x_new;
        fx = f_new;
        g = g_new;
        history.push(fx);

        if history.len() > opts.stall_window {
            let past = history[history.len() - 1 - opts.stall_window];
            if past - fx < opts.stall_tol {
                return Ok(Minimum { x, value: fx, iterations: iter, evaluations: evals, history });
            }
        }
    }
    let residual = match history.len() {
        0 | 1 => f64::NAN,
        k => history[k - 2] - history[k - 1],
    };
    Err(Error::NotConverged {
        iterations: opts.max_iter,
        best: fx,
        residual,
        best_params: x,
    })
}

/// Runs [`minimize`] from every start in parallel. Results keep start order,
/// so downstream selection does not depend on scheduling.
pub fn minimize_from_starts<F>(f: &F, starts: &[Vec<f64>], opts: &BfgsOptions) -> Vec<Result<Minimum>>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    starts.par_iter().map(|x0| minimize(f, x0, opts)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let f = |x: &[f64]| (x[0] - 1.0).powi(2) + 10.0 * (x[1] + 2.0).powi(2);
        let m = minimize(f, &[5.0, 5.0], &BfgsOptions::default()).unwrap();
        assert!((m.x[0] - 1.0).abs() < 1e-6 && (m.x[1] + 2.0).abs() < 1e-6);
        assert!(m.value < 1e-12);
    }

    #[test]
    fn rosenbrock_history_is_monotone() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let m = minimize(f, &[-1.2, 1.0], &BfgsOptions::default()).unwrap();
        assert!((m.x[0] - 1.0).abs() < 1e-4, "{:?}", m.x);
        assert!(m.history.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn budget_exhaustion_reports_best() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let opts = BfgsOptions { max_iter: 3, ..Default::default() };
        match minimize(f, &[-1.2, 1.0], &opts) {
            Err(Error::NotConverged { iterations, best, best_params, .. }) => {
                assert_eq!(iterations, 3);
                assert!(best < 24.2);
                assert_eq!(best_params.len(), 2);
            }
            other => panic!("expected NotConverged, got {other:?}"),
        }
    }

    #[test]
    fn parallel_starts_keep_order() {
        let f = |x: &[f64]| (x[0] - 3.0).powi(2);
        let starts: Vec<Vec<f64>> = (0..8).map(|i| vec![i as f64]).collect();
        let out = minimize_from_starts(&f, &starts, &BfgsOptions::default());
        for (i, r) in out.iter().enumerate() {
            let m = r.as_ref().unwrap();
            assert_eq!(m.history[0], (i as f64 - 3.0).powi(2));
        }
    }
}
