//! The receiver: how it updates its position estimate and how it moves.

use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::scenario::{TowerArray, ThetaBounds};
use crate::signal::{trilaterate, IState, Observation};

/// Additive slack on the motion-box bounds.
pub const BOX_TOL: f64 = 1e-9;

/// The set `{center + θ | θ ∈ Θ}` of positions reachable in one stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotionBox {
    pub center: Point2,
    pub bounds: ThetaBounds,
}

impl MotionBox {
    pub fn new(center: Point2, bounds: ThetaBounds) -> Self {
        Self { center, bounds }
    }

    /// Closed membership with [`BOX_TOL`] slack.
    pub fn contains(&self, p: Point2) -> bool {
        let d = p - self.center;
        d.x >= self.bounds.min.x - BOX_TOL
            && d.x <= self.bounds.max.x + BOX_TOL
            && d.y >= self.bounds.min.y - BOX_TOL
            && d.y <= self.bounds.max.y + BOX_TOL
    }
}

/// Memoryless update: the estimate is whatever the readings trilaterate to.
pub fn itf_simple(_prev: IState, observation: &Observation, towers: &TowerArray) -> IState {
    trilaterate(towers, observation)
}

/// Trilateration restricted to the motion box around the previous estimate.
/// Emptiness is absorbing.
pub fn itf_advanced(
    prev: IState,
    observation: &Observation,
    towers: &TowerArray,
    theta: ThetaBounds,
) -> IState {
    let IState::Singleton(center) = prev else {
        return IState::Empty;
    };
    match trilaterate(towers, observation) {
        IState::Singleton(p) if MotionBox::new(center, theta).contains(p) => IState::Singleton(p),
        _ => IState::Empty,
    }
}

/// Proportional step toward the receiver's goal.
pub fn receiver_policy(istate: IState, goal: Point2, gain: f64) -> Result<Point2> {
    match istate {
        IState::Singleton(p) => Ok(gain * (goal - p)),
        IState::Empty => Err(Error::EmptyIState),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::default_scenario;
    use crate::signal::measure_intensities;

    fn obs_at(p: Point2) -> (TowerArray, Observation) {
        let towers = default_scenario().towers;
        let obs = measure_intensities(&towers, p, towers.calibration).unwrap();
        (towers, obs)
    }

    fn close(a: IState, b: Point2) -> bool {
        a.point().is_some_and(|p| p.distance(b) < 1e-9)
    }

    #[test]
    fn simple_itf_trilaterates() {
        let p = Point2::new(20.0, 30.0);
        let (towers, obs) = obs_at(p);
        assert!(close(itf_simple(IState::Singleton(Point2::ORIGIN), &obs, &towers), p));
        // no memory
        assert!(close(itf_simple(IState::Empty, &obs, &towers), p));
    }

    #[test]
    fn simple_itf_implausible() {
        let (towers, mut obs) = obs_at(Point2::new(20.0, 30.0));
        obs.0[2] = 2.0;
        assert_eq!(itf_simple(IState::Empty, &obs, &towers), IState::Empty);
    }

    #[test]
    fn advanced_itf_box() {
        let theta = ThetaBounds::symmetric(1.0);
        let prev = IState::Singleton(Point2::ORIGIN);
        let (towers, obs) = obs_at(Point2::new(0.5, 0.5));
        assert!(close(itf_advanced(prev, &obs, &towers, theta), Point2::new(0.5, 0.5)));
        let (towers, obs) = obs_at(Point2::new(2.0, 0.0));
        assert_eq!(itf_advanced(prev, &obs, &towers, theta), IState::Empty);
        assert_eq!(itf_advanced(IState::Empty, &obs, &towers, theta), IState::Empty);
    }

    #[test]
    fn box_boundary_is_inside() {
        let b = MotionBox::new(Point2::new(3.0, 4.0), ThetaBounds::symmetric(1.0));
        assert!(b.contains(Point2::new(4.0, 3.0)));
        assert!(b.contains(Point2::new(4.0 + 0.5e-9, 4.0)));
        assert!(!b.contains(Point2::new(4.0 + 1e-8, 4.0)));
    }

    #[test]
    fn policy_values() {
        let goal = Point2::new(40.0, 40.0);
        assert_eq!(receiver_policy(IState::Singleton(goal), goal, 0.3).unwrap(), Point2::ORIGIN);
        let u = receiver_policy(IState::Singleton(Point2::new(20.0, 30.0)), goal, 0.3).unwrap();
        assert!((u - Point2::new(6.0, 3.0)).norm() < 1e-12);
        let u2 = receiver_policy(IState::Singleton(Point2::new(20.0, 30.0)), goal, 0.6).unwrap();
        assert!((u2 - 2.0 * u).norm() < 1e-12);
        assert_eq!(receiver_policy(IState::Empty, goal, 0.3), Err(Error::EmptyIState));
    }
}
