//! Tower signal physics and the receiver's localization geometry.
//!
//! Received intensity falls off as `s / (1 + d²)`. A receiver calibrated to
//! source intensities `s_c` inverts each reading to a distance circle and
//! trilaterates; a producer that knows the true position can pick source
//! intensities that make the circles meet at any point it likes.

use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::scenario::TowerArray;

/// Circle-residual tolerance of [`trilaterate`], in length units.
pub const TRILATERATION_TOL: f64 = 1e-6;

/// Measured intensities, one per tower.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation(pub [f64; 3]);

/// Receiver information state: no consistent position, or exactly one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IState {
    Empty,
    Singleton(Point2),
}

impl IState {
    pub fn point(self) -> Option<Point2> {
        match self {
            IState::Empty => None,
            IState::Singleton(p) => Some(p),
        }
    }

    /// Plausible means nonempty.
    pub fn is_plausible(self) -> bool {
        matches!(self, IState::Singleton(_))
    }
}

fn check_intensities(s: &[f64; 3]) -> Result<()> {
    for (i, &v) in s.iter().enumerate() {
        if !(v > 0.0) {
            return Err(Error::NonPositiveIntensity {
                tower: i + 1,
                value: v,
            });
        }
    }
    Ok(())
}

/// Intensity of each tower as seen from `position`.
pub fn measure_intensities(
    towers: &TowerArray,
    position: Point2,
    source: [f64; 3],
) -> Result<Observation> {
    check_intensities(&source)?;
    let mut r = [0.0; 3];
    for i in 0..3 {
        r[i] = source[i] / (1.0 + towers.positions[i].distance_sq(position));
    }
    Ok(Observation(r))
}

/// Squared perceived distance `s_c / r - 1`, or `None` if the reading is
/// stronger than calibration or zero.
fn perceived_radius_sq(calibration: f64, reading: f64) -> Option<f64> {
    if !(reading > 0.0) || reading > calibration {
        return None;
    }
    Some((calibration / reading - 1.0).max(0.0))
}

/// Distance to a tower implied by a reading under calibration `calibration`.
pub fn perceived_radius(calibration: f64, reading: f64) -> Option<f64> {
    perceived_radius_sq(calibration, reading).map(f64::sqrt)
}

/// Common point of the three perceived-distance circles, if there is one.
///
/// Subtracting circle 1 from circles 2 and 3 gives two linear equations in
/// the position; the candidate they determine must also lie on all three
/// circles to within [`TRILATERATION_TOL`].
pub fn trilaterate(towers: &TowerArray, observation: &Observation) -> IState {
    let mut d_sq = [0.0; 3];
    for i in 0..3 {
        match perceived_radius_sq(towers.calibration[i], observation.0[i]) {
            Some(v) => d_sq[i] = v,
            None => return IState::Empty,
        }
    }
    let [t1, t2, t3] = towers.positions;
    // |p - t_i|² - |p - t_1|² = d_i² - d_1², expressed relative to t1 so the
    // arithmetic stays well-scaled for towers far from the origin.
    let a = t2 - t1;
    let b = t3 - t1;
    let rhs_a = 0.5 * (a.norm_sq() + d_sq[0] - d_sq[1]);
    let rhs_b = 0.5 * (b.norm_sq() + d_sq[0] - d_sq[2]);
    let det = a.cross(b);
    if det == 0.0 {
        return IState::Empty;
    }
    let rel = Point2::new(
        (rhs_a * b.y - rhs_b * a.y) / det,
        (a.x * rhs_b - b.x * rhs_a) / det,
    );
    let p = t1 + rel;
    let consistent = (0..3).all(|i| {
        let residual = (towers.positions[i].distance(p) - d_sq[i].sqrt()).abs();
        residual < TRILATERATION_TOL
    });
    if consistent && p.is_finite() {
        IState::Singleton(p)
    } else {
        IState::Empty
    }
}

/// Source intensities that make a receiver at `true_position` perceive
/// itself at `target`.
pub fn synthesize_intensities(towers: &TowerArray, true_position: Point2, target: Point2) -> [f64; 3] {
    let mut s = [0.0; 3];
    for i in 0..3 {
        let t = towers.positions[i];
        s[i] = towers.calibration[i] * (1.0 + t.distance_sq(true_position))
            / (1.0 + t.distance_sq(target));
    }
    s
}
