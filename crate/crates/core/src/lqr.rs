//! Linear reformulation of the spoofing loop and the infinite-horizon LQR
//! producer.
//!
//! With the receiver's proportional policy folded in, the stacked state
//! `(ω, e)` of true position and estimate error evolves as
//!
//! ```text
//! ω_{k+1} = ω_k + K_r e_k
//! e_{k+1} = e_k − u_k
//! ```
//!
//! where `u_k` is the shift the producer imposes on the receiver's estimate.

use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::linalg::Matrix;
use crate::scenario::{ACTION_DIM, STATE_DIM};

/// Pivot threshold for the controllability rank.
pub const RANK_PIVOT_TOL: f64 = 1e-10;
pub const DARE_TOL: f64 = 1e-12;
pub const DARE_MAX_ITER: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem {
    pub a: Matrix,
    pub b: Matrix,
    pub receiver_gain: f64,
}

impl LinearSystem {
    /// Block form without the nonzero-gain check.
    pub fn from_gain_unchecked(receiver_gain: f64) -> Self {
        let mut a = Matrix::identity(STATE_DIM);
        a[(0, 2)] = receiver_gain;
        a[(1, 3)] = receiver_gain;
        let mut b = Matrix::zeros(STATE_DIM, ACTION_DIM);
        b[(2, 0)] = -1.0;
        b[(3, 1)] = -1.0;
        Self { a, b, receiver_gain }
    }

    /// One step of the linear dynamics.
    pub fn step(&self, x: &ExtendedState, u: Point2) -> ExtendedState {
        let ax = self.a.mul_vec(&x.to_array());
        let bu = self.b.mul_vec(&u.to_array());
        ExtendedState::from_slice(&[ax[0] + bu[0], ax[1] + bu[1], ax[2] + bu[2], ax[3] + bu[3]])
    }
}

/// Stacked state `(ω_x, ω_y, e_x, e_y)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ExtendedState {
    pub omega_r: Point2,
    pub e: Point2,
}

impl ExtendedState {
    pub const ORIGIN: ExtendedState = ExtendedState {
        omega_r: Point2::ORIGIN,
        e: Point2::ORIGIN,
    };

    pub fn new(omega_r: Point2, e: Point2) -> Self {
        Self { omega_r, e }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.omega_r.x, self.omega_r.y, self.e.x, self.e.y]
    }

    pub fn from_slice(v: &[f64]) -> Self {
        assert_eq!(v.len(), STATE_DIM);
        Self {
            omega_r: Point2::new(v[0], v[1]),
            e: Point2::new(v[2], v[3]),
        }
    }

    /// `xᵀ M x`.
    pub fn quadratic_form(self, m: &Matrix) -> f64 {
        let x = self.to_array();
        crate::linalg::dot(&x, &m.mul_vec(&x))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LqrSolution {
    pub p: Matrix,
    /// 2×4 feedback gain; the policy is `u = −K x`.
    pub gain: Matrix,
    pub residual: f64,
}

pub fn build_system(receiver_gain: f64) -> Result<LinearSystem> {
    if receiver_gain == 0.0 {
        return Err(Error::ZeroGain);
    }
    Ok(LinearSystem::from_gain_unchecked(receiver_gain))
}

/// Rank of `[B | AB | A²B | A³B]`.
pub fn controllability_rank(sys: &LinearSystem) -> usize {
    let n = sys.a.rows();
    let mut blocks = Vec::with_capacity(n);
    let mut ak_b = sys.b.clone();
    for _ in 0..n {
        let next = &sys.a * &ak_b;
        blocks.push(ak_b);
        ak_b = next;
    }
    let refs: Vec<&Matrix> = blocks.iter().collect();
    Matrix::hstack(&refs).rank(RANK_PIVOT_TOL)
}

/// One Riccati map `Q + Aᵀ(P − PB(R + BᵀPB)⁻¹BᵀP)A`.
fn riccati_map(a: &Matrix, b: &Matrix, q: &Matrix, r: &Matrix, p: &Matrix) -> Result<Matrix> {
    let at = a.transpose();
    let bt = b.transpose();
    let pb = p * b;
    let s = r + &(&bt * &pb);
    let btp = pb.transpose();
    let sinv_btp = s.solve(&btp).ok_or(Error::IllConditioned("R + BᵀPB"))?;
    let inner = p - &(&pb * &sinv_btp);
    Ok((q + &(&(&at * &inner) * a)).symmetrized())
}

/// Max-abs residual of the Riccati equation at `p`.
pub fn dare_residual(a: &Matrix, b: &Matrix, q: &Matrix, r: &Matrix, p: &Matrix) -> Result<f64> {
    Ok((p - &riccati_map(a, b, q, r, p)?).max_abs())
}

/// Stabilizing solution of the discrete algebraic Riccati equation by
/// fixed-point iteration from `P = Q`.
pub fn solve_dare(
    a: &Matrix,
    b: &Matrix,
    q: &Matrix,
    r: &Matrix,
    tol: f64,
    max_iter: usize,
) -> Result<Matrix> {
    assert!(tol > 0.0, "tolerance must be positive");
    let mut p = q.clone();
    let mut change = f64::INFINITY;
    for _ in 0..max_iter {
        let next = riccati_map(a, b, q, r, &p)?;
        change = (&next - &p).max_abs();
        p = next;
        if change < tol {
            if !p.is_positive_definite() {
                return Err(Error::IllConditioned("Riccati solution is not positive-definite"));
            }
            return Ok(p);
        }
        if !change.is_finite() {
            break;
        }
    }
    Err(Error::DareNotConverged {
        iterations: max_iter,
        change,
    })
}

/// Optimal feedback `K = (BᵀPB + R)⁻¹BᵀPA` for the stage cost `xᵀQx + uᵀRu`.
pub fn lqr_gain(sys: &LinearSystem, q: &Matrix, r: &Matrix) -> Result<LqrSolution> {
    let p = solve_dare(&sys.a, &sys.b, q, r, DARE_TOL, DARE_MAX_ITER)?;
    let gain = gain_from_p(&sys.a, &sys.b, r, &p)?;
    let residual = dare_residual(&sys.a, &sys.b, q, r, &p)?;
    Ok(LqrSolution { p, gain, residual })
}

pub(crate) fn gain_from_p(a: &Matrix, b: &Matrix, r: &Matrix, p: &Matrix) -> Result<Matrix> {
    let bt = b.transpose();
    let s = r + &(&(&bt * p) * b);
    s.solve(&(&(&bt * p) * a))
        .ok_or(Error::IllConditioned("BᵀPB + R"))
}

/// `u = −K x`.
pub fn lqr_policy(solution: &LqrSolution, state: ExtendedState) -> Point2 {
    let u = solution.gain.mul_vec(&state.to_array());
    Point2::new(-u[0], -u[1])
}
