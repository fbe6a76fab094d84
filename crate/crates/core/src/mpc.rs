//! Receding-horizon producer with per-stage motion bounds.
//!
//! Each stage solves a finite-horizon problem over controls `u_0..u_N` (N+1
//! of them), penalizing the predicted states `x_1..x_{N+1}` with `Q` and every
//! control with `R`, subject to `θ_min ≤ u_i ≤ θ_max`. The dynamics are
//! eliminated by forward substitution, leaving a box-constrained QP in the
//! stacked controls; only the first control is applied.

use crate::error::Result;
use crate::geometry::Point2;
use crate::linalg::{dot, Matrix};
use crate::lqr::{ExtendedState, LinearSystem};
use crate::qp::{solve_box_qp, BoxQp, QpOptions};
use crate::scenario::{ThetaBounds, ACTION_DIM, STATE_DIM};

#[derive(Debug, Clone, PartialEq)]
pub struct MpcParams {
    pub sys: LinearSystem,
    pub q: Matrix,
    pub r: Matrix,
    pub horizon: usize,
    pub theta: ThetaBounds,
    pub qp: QpOptions,
}

/// Prediction matrices: stacked states `X = Φ x₀ + Γ z`.
struct Prediction {
    phi: Matrix,
    gamma: Matrix,
}

fn predict(params: &MpcParams) -> Prediction {
    let steps = params.horizon + 1;
    let (n, m) = (STATE_DIM, ACTION_DIM);
    let a = &params.sys.a;
    // powers[j] = A^j
    let mut powers = Vec::with_capacity(steps + 1);
    powers.push(Matrix::identity(n));
    for j in 1..=steps {
        let next = &powers[j - 1] * a;
        powers.push(next);
    }
    let mut phi = Matrix::zeros(n * steps, n);
    let mut gamma = Matrix::zeros(n * steps, m * steps);
    for j in 0..steps {
        phi.set_block(n * j, 0, &powers[j + 1]);
        for i in 0..=j {
            gamma.set_block(n * j, m * i, &(&powers[j - i] * &params.sys.b));
        }
    }
    Prediction { phi, gamma }
}

fn block_diag(block: &Matrix, copies: usize) -> Matrix {
    let (r, c) = (block.rows(), block.cols());
    let mut out = Matrix::zeros(r * copies, c * copies);
    for k in 0..copies {
        out.set_block(r * k, c * k, block);
    }
    out
}

/// Condensed finite-horizon problem `½zᵀHz + gᵀz` over the stacked
/// controls `z = (u_0, …, u_N)`.
pub fn condense_copt(params: &MpcParams, current: ExtendedState) -> BoxQp {
    let steps = params.horizon + 1;
    let pred = predict(params);
    let q_bar = block_diag(&params.q, steps);
    let r_bar = block_diag(&params.r, steps);
    let gt_q = &pred.gamma.transpose() * &q_bar;
    let h = (&(&gt_q * &pred.gamma) + &r_bar).symmetrized();
    let g = (&gt_q * &pred.phi).mul_vec(&current.to_array());
    let th = params.theta;
    let lower = (0..steps).flat_map(|_| [th.min.x, th.min.y]).collect();
    let upper = (0..steps).flat_map(|_| [th.max.x, th.max.y]).collect();
    BoxQp { h, g, lower, upper }
}

/// The part of the finite-horizon cost that does not depend on the controls.
pub fn condensed_constant(params: &MpcParams, current: ExtendedState) -> f64 {
    let steps = params.horizon + 1;
    let pred = predict(params);
    let free = pred.phi.mul_vec(&current.to_array());
    let q_bar = block_diag(&params.q, steps);
    0.5 * dot(&free, &q_bar.mul_vec(&free))
}

/// Finite-horizon cost of a control sequence by explicit simulation.
pub fn simulated_cost(params: &MpcParams, current: ExtendedState, controls: &[Point2]) -> f64 {
    let mut x = current;
    let mut cost = 0.0;
    for &u in controls {
        x = params.sys.step(&x, u);
        let ua = u.to_array();
        cost += 0.5 * (x.quadratic_form(&params.q) + dot(&ua, &params.r.mul_vec(&ua)));
    }
    cost
}

/// Optimal controls `u_0..u_N` of the finite-horizon problem.
pub fn solve_copt(params: &MpcParams, current: ExtendedState) -> Result<Vec<Point2>> {
    let qp = condense_copt(params, current);
    let sol = solve_box_qp(&qp, params.qp)?;
    Ok(sol
        .x
        .chunks_exact(ACTION_DIM)
        .map(|c| Point2::new(c[0], c[1]))
        .collect())
}

/// First control of the finite-horizon solution.
pub fn mpc_policy(params: &MpcParams, current: ExtendedState) -> Result<Point2> {
    Ok(solve_copt(params, current)?[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lqr::build_system;

    fn params(horizon: usize, half_width: f64) -> MpcParams {
        MpcParams {
            sys: build_system(0.3).unwrap(),
            q: Matrix::identity(4),
            r: Matrix::identity(2),
            horizon,
            theta: ThetaBounds::symmetric(half_width),
            qp: QpOptions::default(),
        }
    }

    #[test]
    fn zero_horizon_by_hand() {
        let p = params(0, 1.0);
        let x = ExtendedState::new(Point2::new(2.0, -1.0), Point2::new(0.5, 3.0));
        let qp = condense_copt(&p, x);
        let b = &p.sys.b;
        let bt = b.transpose();
        let h = &(&(&bt * &p.q) * b) + &p.r;
        let g = (&(&bt * &p.q) * &p.sys.a).mul_vec(&x.to_array());
        assert!((&qp.h - &h).max_abs() < 1e-14);
        for (a, b) in qp.g.iter().zip(&g) {
            assert!((a - b).abs() < 1e-14);
        }
        assert_eq!(qp.lower, vec![-1.0, -1.0]);
    }

    #[test]
    fn origin_is_equilibrium() {
        for n in [1, 5, 10] {
            let p = params(n, 1.0);
            let qp = condense_copt(&p, ExtendedState::ORIGIN);
            assert!(qp.g.iter().all(|v| *v == 0.0));
            let u = solve_copt(&p, ExtendedState::ORIGIN).unwrap();
            assert_eq!(u.len(), n + 1);
            assert!(u.iter().all(|c| *c == Point2::ORIGIN));
        }
    }

    #[test]
    fn controls_stay_in_box() {
        let p = params(10, 1.0);
        let x = ExtendedState::new(Point2::new(20.0, 30.0), Point2::new(20.0, 10.0));
        let u = solve_copt(&p, x).unwrap();
        assert!(u.iter().all(|c| c.x.abs() <= 1.0 && c.y.abs() <= 1.0));
        let first = mpc_policy(&p, x).unwrap();
        assert!(first.x.abs() == 1.0 || first.y.abs() == 1.0, "{first:?}");
    }
}
