//! Command implementations behind the `locillusion` binary.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, ScenarioError};
use crate::geometry::Point2;
use crate::lqr::{build_system, lqr_gain, LqrSolution};
use crate::report::{actions_svg, trajectory_svg, write_csv};
use crate::scenario::{default_scenario, load_scenario, validate_scenario, LoadError, ProducerMode};
use crate::sim::{run_closed_loop, TerminationReason, TrajectoryLog};

pub const CSV_FILE: &str = "trajectory.csv";
pub const TRAJECTORY_SVG: &str = "trajectory.svg";
pub const ACTIONS_SVG: &str = "actions.svg";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error("invalid scenario: {0}")]
    Invalid(#[from] ScenarioError),
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
    #[error("solver failure: {0}")]
    Solver(#[from] Error),
    #[error("run ended with an implausible estimate at stage {0}")]
    Implausible(usize),
}

impl CliError {
    /// 1 for input and I/O problems, 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Load(_) | CliError::Invalid(_) | CliError::Write { .. } => 1,
            CliError::Solver(Error::Scenario(_)) => 1,
            CliError::Solver(_) | CliError::Implausible(_) => 2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub csv: PathBuf,
    pub trajectory_svg: PathBuf,
    pub actions_svg: PathBuf,
    pub log: TrajectoryLog,
}

impl RunOutput {
    pub fn summary(&self) -> String {
        let last = self.log.last();
        let estimate = match last.iota.point() {
            Some(p) => fmt_point(p),
            None => "empty".to_string(),
        };
        format!(
            "terminated at stage {} ({}); final estimate {}; final position {}",
            self.log.terminated_at,
            self.log.termination_reason.as_str(),
            estimate,
            fmt_point(last.omega_r)
        )
    }
}

fn fmt_point(p: Point2) -> String {
    format!("[{:.6}, {:.6}]", p.x, p.y)
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Write {
        path: path.display().to_string(),
        source,
    })
}

/// Loads, validates and runs a scenario, writing the CSV log and both plots
/// into `out_dir`. Files are written even when the run ends implausibly.
pub fn cmd_run(scenario_path: &Path, out_dir: &Path, mode: Option<ProducerMode>) -> Result<RunOutput, CliError> {
    let mut scenario = load_scenario(scenario_path)?;
    if let Some(mode) = mode {
        scenario = scenario.with_mode(mode);
    }
    let scenario = validate_scenario(scenario)?;
    let log = run_closed_loop(&scenario)?;

    fs::create_dir_all(out_dir).map_err(|source| CliError::Write {
        path: out_dir.display().to_string(),
        source,
    })?;
    let csv = out_dir.join(CSV_FILE);
    let mut buf = Vec::new();
    write_csv(&log, &mut buf).expect("in-memory write");
    write_file(&csv, &buf)?;
    let trajectory = out_dir.join(TRAJECTORY_SVG);
    write_file(&trajectory, trajectory_svg(&log).as_bytes())?;
    let actions = out_dir.join(ACTIONS_SVG);
    write_file(&actions, actions_svg(&log).as_bytes())?;

    let out = RunOutput {
        csv,
        trajectory_svg: trajectory,
        actions_svg: actions,
        log,
    };
    if out.log.termination_reason == TerminationReason::ImplausibleIState {
        return Err(CliError::Implausible(out.log.terminated_at));
    }
    Ok(out)
}

pub fn cmd_gain(scenario_path: &Path) -> Result<LqrSolution, CliError> {
    let scenario = validate_scenario(load_scenario(scenario_path)?)?;
    let sys = build_system(scenario.receiver.gain)?;
    Ok(lqr_gain(&sys, &scenario.producer.q, &scenario.producer.r)?)
}

/// Full-precision and two-decimal renderings of the gain.
pub fn format_gain(solution: &LqrSolution) -> String {
    let mut s = String::from("K_p =\n");
    for i in 0..solution.gain.rows() {
        let row: Vec<String> = solution.gain.row(i).iter().map(|v| format!("{v:>20.15}")).collect();
        s.push_str(&format!("  [{}]\n", row.join(" ")));
    }
    s.push_str("K_p (2 d.p.) =\n");
    for i in 0..solution.gain.rows() {
        let row: Vec<String> = solution.gain.row(i).iter().map(|v| format!("{:>6}", round2(*v))).collect();
        s.push_str(&format!("  [{}]\n", row.join(" ")));
    }
    s.push_str(&format!("DARE residual = {:e}\n", solution.residual));
    s
}

/// Two-decimal rendering without a negative zero.
pub fn round2(v: f64) -> String {
    let r = (v * 100.0).round() / 100.0;
    let r = if r == 0.0 { 0.0 } else { r };
    format!("{r:.2}")
}

pub fn cmd_default(out_path: &Path) -> Result<(), CliError> {
    let mut text = default_scenario().to_json();
    text.push('\n');
    write_file(out_path, text.as_bytes())
}
