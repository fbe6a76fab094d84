//! The closed loop: producer picks the receiver's next estimate, the towers
//! transmit the intensities that realize it, the receiver moves on its current
//! estimate, measures, and updates.

use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::lqr::{build_system, controllability_rank, lqr_gain, lqr_policy, ExtendedState, LqrSolution};
use crate::mpc::{mpc_policy, MpcParams};
use crate::qp::QpOptions;
use crate::receiver::{itf_advanced, itf_simple, receiver_policy};
use crate::scenario::{ProducerMode, ReceiverVariant, Scenario, ValidatedScenario, STATE_DIM};
use crate::signal::{measure_intensities, synthesize_intensities, IState, Observation};

/// Estimates closer than this to the true position are not illusions.
pub const ILLUSION_TOL: f64 = 1e-6;
/// Allowed gap between the producer's intended estimate and the one the
/// receiver actually forms.
pub const CLOSED_LOOP_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniverseState {
    pub omega_r: Point2,
    pub omega_t: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Audit {
    pub plausible: bool,
    pub illusion: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageRecord {
    pub stage: usize,
    pub omega_r: Point2,
    pub iota: IState,
    /// `x_G − ι`; absent when the I-state is empty.
    pub e: Option<Point2>,
    pub u_r: Point2,
    pub u_p: Point2,
    pub intensities: [f64; 3],
    pub observation: [f64; 3],
    pub plausible: bool,
    pub illusion: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminationReason {
    GoalReached,
    ImplausibleIState,
    MaxStages,
}

impl TerminationReason {
    pub fn as_str(self) -> &'static str {
        match self {
            TerminationReason::GoalReached => "goal-reached",
            TerminationReason::ImplausibleIState => "implausible-istate",
            TerminationReason::MaxStages => "max-stages",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryLog {
    pub records: Vec<StageRecord>,
    pub terminated_at: usize,
    pub termination_reason: TerminationReason,
}

impl TrajectoryLog {
    pub fn last(&self) -> &StageRecord {
        self.records.last().expect("a trajectory has at least one stage")
    }
}

/// Moves the receiver and sets new absolute source intensities.
pub fn step_universe(state: UniverseState, u_r: Point2, new_intensities: [f64; 3]) -> Result<UniverseState> {
    for (i, &s) in new_intensities.iter().enumerate() {
        if !(s > 0.0) {
            return Err(Error::NonPositiveIntensity { tower: i + 1, value: s });
        }
    }
    Ok(UniverseState {
        omega_r: state.omega_r + u_r,
        omega_t: new_intensities,
    })
}

pub fn audit_stage(iota: IState, omega_r: Point2, tolerance: f64) -> Audit {
    assert!(tolerance > 0.0, "audit tolerance must be positive");
    match iota {
        IState::Empty => Audit {
            plausible: false,
            illusion: false,
        },
        IState::Singleton(p) => Audit {
            plausible: true,
            illusion: p.distance(omega_r) > tolerance,
        },
    }
}

/// The producer's feedback law on the extended state.
#[derive(Debug, Clone, PartialEq)]
pub enum Producer {
    Lqr(LqrSolution),
    Mpc(MpcParams),
}

impl Producer {
    pub fn from_scenario(scenario: &Scenario) -> Result<Self> {
        let sys = build_system(scenario.receiver.gain)?;
        if controllability_rank(&sys) < STATE_DIM {
            return Err(Error::ZeroGain);
        }
        let p = &scenario.producer;
        Ok(match p.mode {
            ProducerMode::Lqr => Producer::Lqr(lqr_gain(&sys, &p.q, &p.r)?),
            ProducerMode::Mpc => Producer::Mpc(MpcParams {
                sys,
                q: p.q.clone(),
                r: p.r.clone(),
                horizon: p.horizon,
                theta: scenario.receiver.theta,
                qp: QpOptions::default(),
            }),
        })
    }

    pub fn action(&self, state: ExtendedState) -> Result<Point2> {
        match self {
            Producer::Lqr(sol) => Ok(lqr_policy(sol, state)),
            Producer::Mpc(params) => mpc_policy(params, state),
        }
    }
}

pub fn run_closed_loop(scenario: &ValidatedScenario) -> Result<TrajectoryLog> {
    let producer = Producer::from_scenario(scenario)?;
    run_with_producer(scenario, &producer)
}

/// Runs the loop with an already-built producer.
pub fn run_with_producer(scenario: &ValidatedScenario, producer: &Producer) -> Result<TrajectoryLog> {
    let towers = &scenario.towers;
    let goal = scenario.receiver.goal;
    let gain = scenario.receiver.gain;
    let variant = scenario.receiver_variant();

    let mut universe = UniverseState {
        omega_r: scenario.initial_position,
        omega_t: synthesize_intensities(towers, scenario.initial_position, scenario.initial_estimate),
    };
    let mut observation = measure_intensities(towers, universe.omega_r, universe.omega_t)?;
    let mut iota = IState::Singleton(scenario.initial_estimate);
    let mut records = Vec::new();

    for stage in 1.. {
        let audit = audit_stage(iota, universe.omega_r, ILLUSION_TOL);
        let record = |e, u_r, u_p, obs: &Observation| StageRecord {
            stage,
            omega_r: universe.omega_r,
            iota,
            e,
            u_r,
            u_p,
            intensities: universe.omega_t,
            observation: obs.0,
            plausible: audit.plausible,
            illusion: audit.illusion,
        };
        let finish = |mut records: Vec<StageRecord>, last, reason| {
            records.push(last);
            Ok(TrajectoryLog {
                records,
                terminated_at: stage,
                termination_reason: reason,
            })
        };

        let Some(estimate) = iota.point() else {
            let last = record(None, Point2::ORIGIN, Point2::ORIGIN, &observation);
            return finish(records, last, TerminationReason::ImplausibleIState);
        };
        let e = goal - estimate;
        if e.norm() < scenario.termination_epsilon {
            let last = record(Some(e), Point2::ORIGIN, Point2::ORIGIN, &observation);
            return finish(records, last, TerminationReason::GoalReached);
        }
        if stage >= scenario.max_stages {
            let last = record(Some(e), Point2::ORIGIN, Point2::ORIGIN, &observation);
            return finish(records, last, TerminationReason::MaxStages);
        }

        let state = ExtendedState::new(universe.omega_r - scenario.producer.goal, e);
        let u_p = producer.action(state)?;
        let u_r = receiver_policy(iota, goal, gain)?;
        // the producer knows the receiver's policy, so it can aim at the
        // position the receiver is about to occupy
        let predicted = universe.omega_r + gain * e;
        let target = estimate + u_p;
        let next_intensities = synthesize_intensities(towers, predicted, target);
        records.push(record(Some(e), u_r, u_p, &observation));

        universe = step_universe(universe, u_r, next_intensities)?;
        observation = measure_intensities(towers, universe.omega_r, universe.omega_t)?;
        iota = match variant {
            ReceiverVariant::Simple => itf_simple(iota, &observation, towers),
            ReceiverVariant::Advanced => itf_advanced(iota, &observation, towers, scenario.receiver.theta),
        };
        if let IState::Singleton(p) = iota {
            let gap = p.distance(target);
            if gap > CLOSED_LOOP_TOL {
                return Err(Error::ClosedLoopBroken { stage: stage + 1, gap });
            }
        }
    }
    unreachable!("stage counter is unbounded")
}
