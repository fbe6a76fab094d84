//! Localization illusions: a planar receiver trilaterates its position from
//! three signal towers while an omniscient producer sets the tower source
//! intensities so that the receiver believes it is heading to its own goal
//! while actually being steered to the producer's.
//!
//! Two producers are provided: an infinite-horizon LQR law for a receiver
//! that trusts every trilateration, and a receding-horizon law with box
//! constraints for a receiver that rejects implausibly large jumps.

pub mod cli;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod lqr;
pub mod mpc;
pub mod qp;
pub mod receiver;
pub mod report;
pub mod scenario;
pub mod signal;
pub mod sim;

pub use error::{Error, Result, ScenarioError};
pub use geometry::Point2;
pub use linalg::Matrix;
pub use lqr::{build_system, controllability_rank, lqr_gain, lqr_policy, solve_dare, ExtendedState, LinearSystem, LqrSolution};
pub use mpc::{condense_copt, mpc_policy, solve_copt, MpcParams};
pub use qp::{kkt_residual, solve_box_qp, BoxQp, QpOptions, QpResult};
pub use receiver::{itf_advanced, itf_simple, receiver_policy, MotionBox};
pub use scenario::{
    default_scenario, validate_scenario, ProducerMode, ReceiverVariant, Scenario, ThetaBounds, TowerArray,
    ValidatedScenario,
};
pub use signal::{measure_intensities, perceived_radius, synthesize_intensities, trilaterate, IState, Observation};
pub use sim::{audit_stage, run_closed_loop, step_universe, StageRecord, TerminationReason, TrajectoryLog, UniverseState};
