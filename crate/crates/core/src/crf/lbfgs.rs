//! Limited-memory BFGS with a backtracking Armijo line search.
//!
//! The search direction comes from the standard two-loop recursion over the last
//! `history` curvature pairs. A pair is kept only when `sᵀy > 0`, which keeps the
//! implicit inverse Hessian positive definite.

use std::collections::VecDeque;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// Relative objective decrease fell below `tol`.
    Converged,
    /// Gradient max-norm fell below `gtol`.
    SmallGradient,
    MaxIterations,
    /// No step along steepest descent satisfied the sufficient-decrease condition.
    LineSearchFailed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    /// Objective at the start point followed by the value after every accepted step.
    pub trace: Vec<f64>,
    pub stop: StopReason,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lbfgs {
    pub history: usize,
    pub max_iter: usize,
    /// Stop when `(f_prev - f) / max(|f_prev|, |f|, 1) < tol`.
    pub tol: f64,
    pub gtol: f64,
    /// Armijo sufficient-decrease constant.
    pub c1: f64,
    pub max_backtracks: usize,
}

impl Default for Lbfgs {
    fn default() -> Self {
        Lbfgs {
            history: 10,
            max_iter: 200,
            tol: 1e-5,
            gtol: 1e-10,
            c1: 1e-4,
            max_backtracks: 40,
        }
    }
}

struct Pair {
    s: Vec<f64>,
    y: Vec<f64>,
    rho: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn direction(grad: &[f64], pairs: &VecDeque<Pair>) -> Vec<f64> {
    let mut q: Vec<f64> = grad.to_vec();
    let mut alphas = Vec::with_capacity(pairs.len());
    for p in pairs.iter().rev() {
        let a = p.rho * dot(&p.s, &q);
        for (qi, yi) in q.iter_mut().zip(&p.y) {
            *qi -= a * yi;
        }
        alphas.push(a);
    }
    if let Some(last) = pairs.back() {
        let gamma = dot(&last.s, &last.y) / dot(&last.y, &last.y);
        q.iter_mut().for_each(|qi| *qi *= gamma);
    }
    for (p, a) in pairs.iter().zip(alphas.into_iter().rev()) {
        let b = p.rho * dot(&p.y, &q);
        for (qi, si) in q.iter_mut().zip(&p.s) {
            *qi += (a - b) * si;
        }
    }
    q.iter_mut().for_each(|qi| *qi = -*qi);
    q
}

impl Lbfgs {
    /// Minimizes `f`, which returns the objective and writes the gradient into its
    /// second argument.
    pub fn minimize<F>(&self, mut f: F, x0: Vec<f64>) -> Outcome
    where
        F: FnMut(&[f64], &mut [f64]) -> f64,
    {
        let n = x0.len();
        let mut x = x0;
        let mut g = vec![0.0; n];
        let mut fx = f(&x, &mut g);
        let mut trace = vec![fx];
        let mut pairs: VecDeque<Pair> = VecDeque::with_capacity(self.history);
        let mut x_new = vec![0.0; n];
        let mut g_new = vec![0.0; n];
        let mut iterations = 0;

        let finish = |x, value, iterations, trace, stop| Outcome {
            x,
            value,
            iterations,
            trace,
            stop,
        };

        loop {
            if max_norm(&g) <= self.gtol {
                return finish(x, fx, iterations, trace, StopReason::SmallGradient);
            }
            if iterations >= self.max_iter {
                return finish(x, fx, iterations, trace, StopReason::MaxIterations);
            }

            let mut accepted = None;
            // First try the quasi-Newton direction, then fall back to steepest descent.
            for attempt in 0..2 {
                if attempt == 1 {
                    if pairs.is_empty() {
                        break;
                    }
                    pairs.clear();
                }
                let mut d = direction(&g, &pairs);
                let mut slope = dot(&d, &g);
                if slope >= 0.0 {
                    pairs.clear();
                    d = g.iter().map(|v| -v).collect();
                    slope = dot(&d, &g);
                }
                let mut step = if pairs.is_empty() {
                    (1.0 / dot(&g, &g).sqrt()).min(1.0)
                } else {
                    1.0
                };
                for _ in 0..self.max_backtracks {
                    for i in 0..n {
                        x_new[i] = x[i] + step * d[i];
                    }
                    let f_new = f(&x_new, &mut g_new);
                    if f_new.is_finite() && f_new <= fx + self.c1 * step * slope {
                        accepted = Some(f_new);
                        break;
                    }
                    // Minimizer of the quadratic through f(0), f'(0) and f(step),
                    // kept within [0.1, 0.5] of the current step.
                    let next = if f_new.is_finite() {
                        let denom = 2.0 * (f_new - fx - slope * step);
                        -slope * step * step / denom
                    } else {
                        0.1 * step
                    };
                    step = next.clamp(0.1 * step, 0.5 * step);
                }
                if accepted.is_some() {
                    break;
                }
            }

            let Some(f_new) = accepted else {
                return finish(x, fx, iterations, trace, StopReason::LineSearchFailed);
            };

            let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
            let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
            let sy = dot(&s, &y);
            if sy > f64::EPSILON * dot(&y, &y).max(f64::MIN_POSITIVE) {
                if pairs.len() == self.history {
                    pairs.pop_front();
                }
                if self.history > 0 {
                    pairs.push_back(Pair { s, y, rho: 1.0 / sy });
                }
            }

            let rel = (fx - f_new) / fx.abs().max(f_new.abs()).max(1.0);
            std::mem::swap(&mut x, &mut x_new);
            std::mem::swap(&mut g, &mut g_new);
            fx = f_new;
            trace.push(fx);
            iterations += 1;

            if rel < self.tol {
                return finish(x, fx, iterations, trace, StopReason::Converged);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rosenbrock(x: &[f64], g: &mut [f64]) -> f64 {
        let (a, b) = (x[0], x[1]);
        g[0] = -2.0 * (1.0 - a) - 400.0 * a * (b - a * a);
        g[1] = 200.0 * (b - a * a);
        (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2)
    }

    #[test]
    fn solves_rosenbrock() {
        let opt = Lbfgs {
            tol: 0.0,
            gtol: 1e-9,
            max_iter: 500,
            ..Lbfgs::default()
        };
        let out = opt.minimize(rosenbrock, vec![-1.2, 1.0]);
        assert!((out.x[0] - 1.0).abs() < 1e-6, "{out:?}");
        assert!((out.x[1] - 1.0).abs() < 1e-6);
        assert!(out.trace.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn solves_ill_conditioned_quadratic() {
        let scales: Vec<f64> = (0..20).map(|i| 10f64.powf(i as f64 / 5.0)).collect();
        let f = |x: &[f64], g: &mut [f64]| {
            let mut v = 0.0;
            for i in 0..x.len() {
                let d = x[i] - i as f64;
                g[i] = scales[i] * d;
                v += 0.5 * scales[i] * d * d;
            }
            v
        };
        let opt = Lbfgs {
            tol: 0.0,
            gtol: 1e-8,
            max_iter: 1000,
            ..Lbfgs::default()
        };
        let out = opt.minimize(f, vec![0.0; 20]);
        assert_eq!(out.stop, StopReason::SmallGradient);
        for (i, xi) in out.x.iter().enumerate() {
            assert!((xi - i as f64).abs() < 1e-6);
        }
    }

    #[test]
    fn stops_at_iteration_cap() {
        let opt = Lbfgs {
            max_iter: 3,
            tol: 0.0,
            ..Lbfgs::default()
        };
        let out = opt.minimize(rosenbrock, vec![-1.2, 1.0]);
        assert_eq!(out.stop, StopReason::MaxIterations);
        assert_eq!(out.iterations, 3);
        assert_eq!(out.trace.len(), 4);
    }

    #[test]
    fn zero_gradient_start() {
        let out = Lbfgs::default().minimize(|x, g| {
            g.copy_from_slice(x);
            0.5 * dot(x, x)
        }, vec![0.0; 3]);
        assert_eq!(out.stop, StopReason::SmallGradient);
        assert_eq!(out.iterations, 0);
    }
}
