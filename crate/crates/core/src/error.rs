use thiserror::Error;

/// Reasons a scenario is rejected. Exactly one is reported per scenario; the
/// checks run in declaration order.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("tower positions are duplicated or collinear (cross product {cross:e})")]
    DegenerateTowers { cross: f64 },
    #[error("calibration intensity of tower {tower} must be positive, got {value}")]
    NonPositiveCalibration { tower: usize, value: f64 },
    #[error("receiver gain must be nonzero")]
    ZeroReceiverGain,
    #[error("weight matrix {name} is not symmetric positive-definite")]
    NotPositiveDefinite { name: &'static str },
    #[error("motion box [{min:?}, {max:?}] must contain the zero action on every axis")]
    BoxExcludesZero { min: [f64; 2], max: [f64; 2] },
    #[error("termination epsilon must be positive, got {0}")]
    NonPositiveEpsilon(f64),
    #[error("max_stages must be at least 1")]
    ZeroMaxStages,
    #[error("mpc horizon must be at least 1")]
    ZeroHorizon,
    #[error("producer mode {mode} requires the {expected} receiver, scenario has {found}")]
    ModeVariantMismatch {
        mode: &'static str,
        expected: &'static str,
        found: &'static str,
    },
    #[error("scenario contains a non-finite number in {0}")]
    NonFinite(&'static str),
    #[error("malformed scenario: {0}")]
    Malformed(String),
}

/// Failures of the numerical routines and the closed loop.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("source intensity of tower {tower} must be positive, got {value}")]
    NonPositiveIntensity { tower: usize, value: f64 },
    #[error("receiver policy called on an empty information state")]
    EmptyIState,
    #[error("receiver gain must be nonzero")]
    ZeroGain,
    #[error("Riccati iteration did not converge in {iterations} iterations (last change {change:e})")]
    DareNotConverged { iterations: usize, change: f64 },
    #[error("ill-conditioned linear solve in {0}")]
    IllConditioned(&'static str),
    #[error("box QP did not converge in {iterations} iterations (kkt residual {residual:e})")]
    QpNotConverged { iterations: usize, residual: f64 },
    #[error("QP Hessian is not positive-definite")]
    QpNotPositiveDefinite,
    #[error("QP bounds are inconsistent at coordinate {0}")]
    QpBadBounds(usize),
    #[error("point is outside the QP box at coordinate {0}")]
    QpInfeasiblePoint(usize),
    #[error("closed-loop identity broken at stage {stage}: estimate off by {gap:e}")]
    ClosedLoopBroken { stage: usize, gap: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
