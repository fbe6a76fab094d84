//! Strictly convex quadratic programs with box constraints:
//!
//! ```text
//! minimize ½ xᵀHx + gᵀx   subject to   lower ≤ x ≤ upper
//! ```
//!
//! Solved by accelerated projected gradient (step `1/L`, `L` the Gershgorin
//! bound on the largest eigenvalue of `H`) with function-value restarts, plus
//! an exact reduced Newton step on the currently free coordinates once the
//! active set looks settled. Infinite bounds are allowed.

use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix};

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_ITER: usize = 100_000;

/// Try a reduced Newton step every this many gradient iterations.
const POLISH_EVERY: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct BoxQp {
    pub h: Matrix,
    pub g: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QpResult {
    pub x: Vec<f64>,
    pub kkt_residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QpOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for QpOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

impl BoxQp {
    pub fn new(h: Matrix, g: Vec<f64>, lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let n = g.len();
        assert!(
            h.rows() == n && h.cols() == n && lower.len() == n && upper.len() == n,
            "box QP dimension mismatch"
        );
        let qp = Self { h, g, lower, upper };
        qp.check_bounds()?;
        Ok(qp)
    }

    /// Same problem with no bounds at all.
    pub fn unconstrained(h: Matrix, g: Vec<f64>) -> Self {
        let n = g.len();
        Self {
            h,
            g,
            lower: vec![f64::NEG_INFINITY; n],
            upper: vec![f64::INFINITY; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.g.len()
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        let hx = self.h.mul_vec(x);
        0.5 * dot(x, &hx) + dot(&self.g, x)
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut grad = self.h.mul_vec(x);
        for (gi, ci) in grad.iter_mut().zip(&self.g) {
            *gi += ci;
        }
        grad
    }

    pub fn project(&self, x: &mut [f64]) {
        for ((xi, lo), hi) in x.iter_mut().zip(&self.lower).zip(&self.upper) {
            *xi = xi.clamp(*lo, *hi);
        }
    }

    pub fn is_feasible(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(&self.lower)
            .zip(&self.upper)
            .all(|((xi, lo), hi)| lo <= xi && xi <= hi)
    }

    fn check_bounds(&self) -> Result<()> {
        for i in 0..self.dim() {
            if self.lower[i].is_nan() || self.upper[i].is_nan() || self.lower[i] > self.upper[i] {
                return Err(Error::QpBadBounds(i));
            }
        }
        Ok(())
    }
}

/// Projected-gradient optimality violation at a feasible point.
pub fn kkt_residual(problem: &BoxQp, x: &[f64]) -> Result<f64> {
    if let Some(i) = (0..problem.dim())
        .find(|&i| !(problem.lower[i] <= x[i] && x[i] <= problem.upper[i]))
    {
        return Err(Error::QpInfeasiblePoint(i));
    }
    Ok(residual_from_gradient(problem, x, &problem.gradient(x)))
}

fn residual_from_gradient(problem: &BoxQp, x: &[f64], grad: &[f64]) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..problem.dim() {
        let at_lower = x[i] <= problem.lower[i];
        let at_upper = x[i] >= problem.upper[i];
        let v = match (at_lower, at_upper) {
            // fixed variable: any multiplier sign works
            (true, true) => 0.0,
            (true, false) => (-grad[i]).max(0.0),
            (false, true) => grad[i].max(0.0),
            (false, false) => grad[i].abs(),
        };
        worst = worst.max(v);
    }
    worst
}

pub fn solve_box_qp(problem: &BoxQp, opts: QpOptions) -> Result<QpResult> {
    solve_box_qp_observed(problem, opts, |_, _| {})
}

/// [`solve_box_qp`] calling `observer(iteration, objective)` after every
/// accepted iterate.
pub fn solve_box_qp_observed<F>(problem: &BoxQp, opts: QpOptions, mut observer: F) -> Result<QpResult>
where
    F: FnMut(usize, f64),
{
    assert!(opts.tol > 0.0, "tolerance must be positive");
    problem.check_bounds()?;
    if !problem.h.is_positive_definite() {
        return Err(Error::QpNotPositiveDefinite);
    }
    let n = problem.dim();
    let lipschitz = problem.h.gershgorin_bound();
    let step = 1.0 / lipschitz;

    let mut x = vec![0.0; n];
    problem.project(&mut x);
    let mut fx = problem.objective(&x);
    let mut grad_x = problem.gradient(&x);
    let mut residual = residual_from_gradient(problem, &x, &grad_x);
    observer(0, fx);
    if residual < opts.tol {
        return Ok(QpResult {
            x,
            kkt_residual: residual,
            iterations: 0,
        });
    }

    let mut y = x.clone();
    let mut t = 1.0_f64;
    let mut candidate = vec![0.0; n];

    for iter in 1..=opts.max_iter {
        if iter % POLISH_EVERY == 0 {
            if let Some((z, fz, grad_z)) = newton_on_free_set(problem, &x, &grad_x) {
                if fz <= fx {
                    let r = residual_from_gradient(problem, &z, &grad_z);
                    x = z;
                    fx = fz;
                    grad_x = grad_z;
                    residual = r;
                    y.copy_from_slice(&x);
                    t = 1.0;
                    observer(iter, fx);
                    if residual < opts.tol {
                        return Ok(QpResult {
                            x,
                            kkt_residual: residual,
                            iterations: iter,
                        });
                    }
                    continue;
                }
            }
        }

        let grad_y = problem.gradient(&y);
        for i in 0..n {
            candidate[i] = y[i] - step * grad_y[i];
        }
        problem.project(&mut candidate);
        let mut f_cand = problem.objective(&candidate);

        if f_cand > fx {
            // restart from x with a plain projected-gradient step
            t = 1.0;
            for i in 0..n {
                candidate[i] = x[i] - step * grad_x[i];
            }
            problem.project(&mut candidate);
            f_cand = problem.objective(&candidate);
            if f_cand > fx {
                // round-off floor; keep x and let the polish step finish
                y.copy_from_slice(&x);
                observer(iter, fx);
                continue;
            }
            y.copy_from_slice(&candidate);
        } else {
            let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
            let beta = (t - 1.0) / t_next;
            for i in 0..n {
                y[i] = candidate[i] + beta * (candidate[i] - x[i]);
            }
            t = t_next;
        }
        x.copy_from_slice(&candidate);
        fx = f_cand;
        grad_x = problem.gradient(&x);
        residual = residual_from_gradient(problem, &x, &grad_x);
        observer(iter, fx);
        if residual < opts.tol {
            return Ok(QpResult {
                x,
                kkt_residual: residual,
                iterations: iter,
            });
        }
    }
    Err(Error::QpNotConverged {
        iterations: opts.max_iter,
        residual,
    })
}

/// Minimizes over the coordinates not held at a bound by an outward
/// gradient, keeping the held ones fixed. Returns the point only if it is
/// feasible.
fn newton_on_free_set(problem: &BoxQp, x: &[f64], grad: &[f64]) -> Option<(Vec<f64>, f64, Vec<f64>)> {
    let n = problem.dim();
    let held: Vec<bool> = (0..n)
        .map(|i| {
            problem.lower[i] == problem.upper[i]
                || (x[i] <= problem.lower[i] && grad[i] > 0.0)
                || (x[i] >= problem.upper[i] && grad[i] < 0.0)
        })
        .collect();
    let free: Vec<usize> = (0..n).filter(|&i| !held[i]).collect();
    if free.is_empty() {
        return None;
    }
    let mut h_ff = Matrix::zeros(free.len(), free.len());
    let mut rhs = vec![0.0; free.len()];
    for (a, &i) in free.iter().enumerate() {
        for (b, &j) in free.iter().enumerate() {
            h_ff[(a, b)] = problem.h[(i, j)];
        }
        let mut r = -problem.g[i];
        for j in 0..n {
            if held[j] {
                r -= problem.h[(i, j)] * x[j];
            }
        }
        rhs[a] = r;
    }
    let z_free = h_ff.solve_vec(&rhs)?;
    let mut z = x.to_vec();
    for (a, &i) in free.iter().enumerate() {
        z[i] = z_free[a];
    }
    if !problem.is_feasible(&z) {
        return None;
    }
    let fz = problem.objective(&z);
    let grad_z = problem.gradient(&z);
    Some((z, fz, grad_z))
}
