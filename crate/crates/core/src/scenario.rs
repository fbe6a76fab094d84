//! Scenario configuration: towers, receiver and producer specifications,
//! initial conditions and termination settings.
//!
//! The on-disk form is JSON (see [`ScenarioFile`]); in memory the weights are
//! full matrices and the tower array is fixed at three entries.

use std::fmt;
use std::ops::Deref;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::ScenarioError;
use crate::geometry::Point2;
use crate::linalg::Matrix;

/// Extended-state dimension (position and estimate error, two axes each).
pub const STATE_DIM: usize = 4;
/// Producer action dimension.
pub const ACTION_DIM: usize = 2;

/// Relative tolerance of the general-position test on the tower triangle.
pub const COLLINEARITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct TowerArray {
    pub positions: [Point2; 3],
    pub calibration: [f64; 3],
}

impl TowerArray {
    pub fn new(positions: [Point2; 3], calibration: [f64; 3]) -> Self {
        Self {
            positions,
            calibration,
        }
    }

    fn validate(&self) -> Result<(), ScenarioError> {
        let [a, b, c] = self.positions;
        let scale_sq = [a.distance_sq(b), a.distance_sq(c), b.distance_sq(c)]
            .into_iter()
            .fold(0.0, f64::max);
        let cross = (b - a).cross(c - a);
        if !(cross.abs() > COLLINEARITY_TOL * scale_sq) {
            return Err(ScenarioError::DegenerateTowers { cross });
        }
        for (i, &s) in self.calibration.iter().enumerate() {
            if !(s > 0.0) {
                return Err(ScenarioError::NonPositiveCalibration {
                    tower: i + 1,
                    value: s,
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReceiverVariant {
    /// Estimate is the bare trilateration result.
    Simple,
    /// Estimate is intersected with a motion box around the previous estimate.
    Advanced,
}

impl ReceiverVariant {
    pub fn as_str(self) -> &'static str {
        match self {
            ReceiverVariant::Simple => "simple",
            ReceiverVariant::Advanced => "advanced",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProducerMode {
    Lqr,
    Mpc,
}

impl ProducerMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ProducerMode::Lqr => "lqr",
            ProducerMode::Mpc => "mpc",
        }
    }

    /// The receiver variant each producer is designed against.
    pub fn paired_variant(self) -> ReceiverVariant {
        match self {
            ProducerMode::Lqr => ReceiverVariant::Simple,
            ProducerMode::Mpc => ReceiverVariant::Advanced,
        }
    }
}

impl fmt::Display for ProducerMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ProducerMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lqr" => Ok(ProducerMode::Lqr),
            "mpc" => Ok(ProducerMode::Mpc),
            other => Err(format!("unknown producer mode '{other}' (expected lqr or mpc)")),
        }
    }
}

/// Per-axis bounds of the motion set Θ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaBounds {
    pub min: Point2,
    pub max: Point2,
}

impl ThetaBounds {
    pub fn symmetric(half_width: f64) -> Self {
        Self {
            min: Point2::new(-half_width, -half_width),
            max: Point2::new(half_width, half_width),
        }
    }

    pub fn contains_zero(&self) -> bool {
        self.min.x < 0.0 && 0.0 < self.max.x && self.min.y < 0.0 && 0.0 < self.max.y
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReceiverSpec {
    pub goal: Point2,
    pub gain: f64,
    /// `None` pairs the variant with the producer mode.
    pub variant: Option<ReceiverVariant>,
    pub theta: ThetaBounds,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProducerSpec {
    pub goal: Point2,
    pub q: Matrix,
    pub r: Matrix,
    pub mode: ProducerMode,
    pub horizon: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub towers: TowerArray,
    pub receiver: ReceiverSpec,
    pub producer: ProducerSpec,
    pub initial_position: Point2,
    pub initial_estimate: Point2,
    pub termination_epsilon: f64,
    pub max_stages: usize,
}

impl Scenario {
    pub fn receiver_variant(&self) -> ReceiverVariant {
        self.receiver
            .variant
            .unwrap_or_else(|| self.producer.mode.paired_variant())
    }

    /// Switches the producer mode; an implicit receiver variant follows it.
    pub fn with_mode(mut self, mode: ProducerMode) -> Self {
        self.producer.mode = mode;
        if self.receiver.variant.is_some() {
            self.receiver.variant = Some(mode.paired_variant());
        }
        self
    }

    fn check_finite(&self) -> Result<(), ScenarioError> {
        let points = [
            ("towers", self.towers.positions.iter().all(|p| p.is_finite())),
            ("towers", self.towers.calibration.iter().all(|v| v.is_finite())),
            ("receiver.goal", self.receiver.goal.is_finite()),
            ("receiver.gain", self.receiver.gain.is_finite()),
            (
                "receiver.theta",
                self.receiver.theta.min.is_finite() && self.receiver.theta.max.is_finite(),
            ),
            ("producer.goal", self.producer.goal.is_finite()),
            ("producer.q", self.producer.q.as_slice().iter().all(|v| v.is_finite())),
            ("producer.r", self.producer.r.as_slice().iter().all(|v| v.is_finite())),
            ("initial.position", self.initial_position.is_finite()),
            ("initial.estimate", self.initial_estimate.is_finite()),
            ("termination.epsilon", !self.termination_epsilon.is_nan()),
        ];
        match points.into_iter().find(|(_, ok)| !ok) {
            Some((name, _)) => Err(ScenarioError::NonFinite(name)),
            None => Ok(()),
        }
    }
}

/// A scenario whose invariants have been checked by [`validate_scenario`].
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedScenario(Scenario);

impl ValidatedScenario {
    pub fn into_inner(self) -> Scenario {
        self.0
    }
}

impl Deref for ValidatedScenario {
    type Target = Scenario;

    fn deref(&self) -> &Scenario {
        &self.0
    }
}

impl AsRef<Scenario> for ValidatedScenario {
    fn as_ref(&self) -> &Scenario {
        &self.0
    }
}

/// Checks every scenario invariant and returns the scenario unchanged.
pub fn validate_scenario(raw: Scenario) -> Result<ValidatedScenario, ScenarioError> {
    raw.check_finite()?;
    raw.towers.validate()?;
    if raw.receiver.gain == 0.0 {
        return Err(ScenarioError::ZeroReceiverGain);
    }
    for (name, m, n) in [("Q", &raw.producer.q, STATE_DIM), ("R", &raw.producer.r, ACTION_DIM)] {
        if m.rows() != n || m.cols() != n {
            return Err(ScenarioError::Malformed(format!(
                "{name} must be {n}x{n}, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        if !m.is_positive_definite() {
            return Err(ScenarioError::NotPositiveDefinite { name });
        }
    }
    let variant = raw.receiver_variant();
    if variant == ReceiverVariant::Advanced && !raw.receiver.theta.contains_zero() {
        return Err(ScenarioError::BoxExcludesZero {
            min: raw.receiver.theta.min.to_array(),
            max: raw.receiver.theta.max.to_array(),
        });
    }
    if !(raw.termination_epsilon > 0.0) {
        return Err(ScenarioError::NonPositiveEpsilon(raw.termination_epsilon));
    }
    if raw.max_stages == 0 {
        return Err(ScenarioError::ZeroMaxStages);
    }
    if raw.producer.mode == ProducerMode::Mpc && raw.producer.horizon == 0 {
        return Err(ScenarioError::ZeroHorizon);
    }
    let expected = raw.producer.mode.paired_variant();
    if variant != expected {
        return Err(ScenarioError::ModeVariantMismatch {
            mode: raw.producer.mode.as_str(),
            expected: expected.as_str(),
            found: variant.as_str(),
        });
    }
    Ok(ValidatedScenario(raw))
}

/// The two-experiment configuration: three towers around a receiver starting
/// at [20, 30] with goal [40, 40], producer driving it to the origin.
pub fn default_scenario() -> Scenario {
    Scenario {
        towers: TowerArray::new(
            [
                Point2::new(-5.0, -5.0),
                Point2::new(50.0, 10.0),
                Point2::new(20.0, 60.0),
            ],
            [1.0, 1.0, 1.0],
        ),
        receiver: ReceiverSpec {
            goal: Point2::new(40.0, 40.0),
            gain: 0.3,
            variant: None,
            theta: ThetaBounds::symmetric(1.0),
        },
        producer: ProducerSpec {
            goal: Point2::ORIGIN,
            q: Matrix::identity(STATE_DIM),
            r: Matrix::identity(ACTION_DIM),
            mode: ProducerMode::Lqr,
            horizon: 10,
        },
        initial_position: Point2::new(20.0, 30.0),
        initial_estimate: Point2::new(20.0, 30.0),
        termination_epsilon: 0.005,
        max_stages: 10_000,
    }
}

// ---------------------------------------------------------------------------
// File schema

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightSpec {
    Diagonal(Vec<f64>),
    Matrix(Vec<Vec<f64>>),
}

impl WeightSpec {
    fn to_matrix(&self, name: &str) -> Result<Matrix, ScenarioError> {
        match self {
            WeightSpec::Diagonal(d) => Ok(Matrix::diag(d)),
            WeightSpec::Matrix(rows) => {
                let n = rows.first().map_or(0, Vec::len);
                if rows.iter().any(|r| r.len() != n) {
                    return Err(ScenarioError::Malformed(format!("{name} has ragged rows")));
                }
                Ok(Matrix::from_rows(rows))
            }
        }
    }

    /// Diagonal form when the matrix is diagonal, full rows otherwise.
    fn from_matrix(m: &Matrix) -> Self {
        let off_diag_zero = (0..m.rows())
            .all(|i| (0..m.cols()).all(|j| i == j || m[(i, j)] == 0.0));
        if off_diag_zero && m.is_square() {
            WeightSpec::Diagonal((0..m.rows()).map(|i| m[(i, i)]).collect())
        } else {
            WeightSpec::Matrix(m.to_rows())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TowerEntry {
    pub position: Point2,
    pub calibration: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReceiverEntry {
    pub goal: Point2,
    pub gain: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<ReceiverVariant>,
    #[serde(default = "default_theta_min")]
    pub theta_min: Point2,
    #[serde(default = "default_theta_max")]
    pub theta_max: Point2,
}

fn default_theta_min() -> Point2 {
    Point2::new(-1.0, -1.0)
}

fn default_theta_max() -> Point2 {
    Point2::new(1.0, 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProducerEntry {
    pub goal: Point2,
    #[serde(alias = "q_diag_or_matrix")]
    pub q: WeightSpec,
    #[serde(alias = "r_diag_or_matrix")]
    pub r: WeightSpec,
    pub mode: ProducerMode,
    #[serde(default = "default_horizon")]
    pub horizon: usize,
}

fn default_horizon() -> usize {
    10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialEntry {
    pub position: Point2,
    pub estimate: Point2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TerminationEntry {
    pub epsilon: f64,
    #[serde(default = "default_max_stages")]
    pub max_stages: usize,
}

fn default_max_stages() -> usize {
    10_000
}

/// JSON layout of a scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub towers: Vec<TowerEntry>,
    pub receiver: ReceiverEntry,
    pub producer: ProducerEntry,
    pub initial: InitialEntry,
    pub termination: TerminationEntry,
}

impl TryFrom<ScenarioFile> for Scenario {
    type Error = ScenarioError;

    fn try_from(f: ScenarioFile) -> Result<Self, ScenarioError> {
        let [t1, t2, t3]: [TowerEntry; 3] = f.towers.try_into().map_err(|v: Vec<_>| {
            ScenarioError::Malformed(format!("expected exactly 3 towers, got {}", v.len()))
        })?;
        Ok(Scenario {
            towers: TowerArray::new(
                [t1.position, t2.position, t3.position],
                [t1.calibration, t2.calibration, t3.calibration],
            ),
            receiver: ReceiverSpec {
                goal: f.receiver.goal,
                gain: f.receiver.gain,
                variant: f.receiver.variant,
                theta: ThetaBounds {
                    min: f.receiver.theta_min,
                    max: f.receiver.theta_max,
                },
            },
            producer: ProducerSpec {
                goal: f.producer.goal,
                q: f.producer.q.to_matrix("Q")?,
                r: f.producer.r.to_matrix("R")?,
                mode: f.producer.mode,
                horizon: f.producer.horizon,
            },
            initial_position: f.initial.position,
            initial_estimate: f.initial.estimate,
            termination_epsilon: f.termination.epsilon,
            max_stages: f.termination.max_stages,
        })
    }
}

impl From<&Scenario> for ScenarioFile {
    fn from(s: &Scenario) -> Self {
        ScenarioFile {
            towers: (0..3)
                .map(|i| TowerEntry {
                    position: s.towers.positions[i],
                    calibration: s.towers.calibration[i],
                })
                .collect(),
            receiver: ReceiverEntry {
                goal: s.receiver.goal,
                gain: s.receiver.gain,
                variant: s.receiver.variant,
                theta_min: s.receiver.theta.min,
                theta_max: s.receiver.theta.max,
            },
            producer: ProducerEntry {
                goal: s.producer.goal,
                q: WeightSpec::from_matrix(&s.producer.q),
                r: WeightSpec::from_matrix(&s.producer.r),
                mode: s.producer.mode,
                horizon: s.producer.horizon,
            },
            initial: InitialEntry {
                position: s.initial_position,
                estimate: s.initial_estimate,
            },
            termination: TerminationEntry {
                epsilon: s.termination_epsilon,
                max_stages: s.max_stages,
            },
        }
    }
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Scenario, ScenarioError> {
        let file: ScenarioFile =
            serde_json::from_str(text).map_err(|e| ScenarioError::Malformed(e.to_string()))?;
        file.try_into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ScenarioFile::from(self))
            .expect("scenario file serialization is infallible")
    }
}

/// Reads and parses a scenario file. Validation is left to the caller.
pub fn load_scenario(path: &Path) -> Result<Scenario, LoadError> {
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(Scenario::from_json(&text)?)
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
}
