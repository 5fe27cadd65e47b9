//! Pipeline of one configured run: geometry, initial state, flow, monitors,
//! artifacts.
//!
//! Layout under `<output.dir>/<name>/`:
//! `report.json`, `series/<monitor>.csv` (or `series/counterflow.csv`) and
//! `snapshots/state_NNNN.json` (or `snapshots/curve_final.json`).

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Serialize;
use warpmcf_core::counterflow::{run_counterexample, CounterStop, CounterexampleReport, NotionVerdict};
use warpmcf_core::geometry::EstimateConstants;
use warpmcf_core::graphflow::{run_flow, DtPolicy, FlowError, FlowProblem, GraphState, Grid, StopReason, Trajectory};
use warpmcf_core::initial::Perturbation;
use warpmcf_core::monitors::{
    classify, decay_check, frakg_bound_check, gradient_bound_check, graph_property_check, regularization_check,
    run_constants, BoundId, BoundReport, MonitorError, Observation, RegularizationWindow, Verdict,
};
use warpmcf_core::BlowUp;

use crate::config::{CounterexampleConfig, FlowConfig, RunConfig, RunKind};
use crate::snapshot::{save_curve, save_state, SnapshotError};
use crate::timeseries::{write_counterflow_series, write_timeseries, SeriesError};

/// Replaces `output.dir` of every configuration when set.
pub const OUTPUT_DIR_ENV: &str = "WARPMCF_OUTPUT_DIR";

pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExitStatus {
    Pass,
    /// a genuine (or unsettled) bound violation
    Violation,
    BlowUp,
    ConfigError,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        match self {
            ExitStatus::Pass => 0,
            ExitStatus::Violation => 2,
            ExitStatus::BlowUp => 3,
            ExitStatus::ConfigError => 4,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ArtifactError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Snapshot(#[from] SnapshotError),
}

#[derive(Debug, Clone, Serialize)]
pub struct MonitorOutcome {
    pub id: BoundId,
    /// verdict after refinement, when one was needed
    pub verdict: Option<Verdict>,
    pub report: Option<BoundReport>,
    pub refined_worst_margin: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FlowSummary {
    pub constants: Option<EstimateConstants>,
    pub stop: Option<StopReason>,
    pub steps: usize,
    pub nominal_dt: f64,
    pub blow_up: Option<BlowUp>,
    /// start time of a restarted run
    pub restarted_at: Option<f64>,
    pub refined_grid: Option<Grid>,
    pub monitors: Vec<MonitorOutcome>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CounterSummary {
    pub equidistant_verdict: String,
    pub geodesic_verdict: String,
    pub report: CounterexampleReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub version: u32,
    pub name: String,
    pub status: ExitStatus,
    pub exit_code: i32,
    pub config: RunConfig,
    pub flow: Option<FlowSummary>,
    pub counterexample: Option<CounterSummary>,
    pub errors: Vec<String>,
    /// artifact paths relative to the run directory
    pub artifacts: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub status: ExitStatus,
    pub dir: PathBuf,
    pub report: RunReport,
}

/// Options beyond the configuration file.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// continue from this state instead of building the initial data
    pub restart: Option<GraphState>,
}

/// Directory receiving the artifacts of `config`.
pub fn run_dir(config: &RunConfig) -> PathBuf {
    config.output_dir.join(&config.name)
}

/// Applies [`OUTPUT_DIR_ENV`].
pub fn apply_env_overrides(config: &mut RunConfig) {
    if let Some(root) = std::env::var_os(OUTPUT_DIR_ENV).filter(|v| !v.is_empty()) {
        config.output_dir = PathBuf::from(root);
    }
}

pub fn run_scenario(config: &RunConfig) -> Result<Outcome, ArtifactError> {
    run_scenario_with(config, RunOptions::default())
}

pub fn run_scenario_with(config: &RunConfig, options: RunOptions) -> Result<Outcome, ArtifactError> {
    let dir = run_dir(config);
    let series = dir.join("series");
    let snapshots = dir.join("snapshots");
    for d in [&series, &snapshots] {
        // both subdirectories hold only files this function writes
        if d.exists() {
            fs::remove_dir_all(d).map_err(|source| ArtifactError::Io { path: d.clone(), source })?;
        }
        fs::create_dir_all(d).map_err(|source| ArtifactError::Io { path: d.clone(), source })?;
    }
    let mut report = RunReport {
        version: REPORT_VERSION,
        name: config.name.clone(),
        status: ExitStatus::Pass,
        exit_code: 0,
        config: config.clone(),
        flow: None,
        counterexample: None,
        errors: Vec::new(),
        artifacts: Vec::new(),
    };
    let status = match &config.run {
        RunKind::Flow(f) => flow_pipeline(f, config.seed, options, &dir, &mut report)?,
        RunKind::Counterexample(c) => counter_pipeline(c, &dir, &mut report)?,
    };
    report.status = status;
    report.exit_code = status.code();
    let path = dir.join("report.json");
    let json = serde_json::to_vec_pretty(&report).expect("reports serialize");
    fs::write(&path, json).map_err(|source| ArtifactError::Io { path, source })?;
    Ok(Outcome { status, dir, report })
}

fn relative(dir: &Path, p: &Path) -> String {
    p.strip_prefix(dir).unwrap_or(p).display().to_string()
}

/// Twice the nodes per axis; a fixed step shrinks fourfold with `h^2`.
pub fn refine(config: &FlowConfig) -> FlowConfig {
    let mut fine = config.clone();
    fine.grid = match config.grid {
        Grid::Circle { n, length } => Grid::Circle { n: 2 * n, length },
        Grid::Torus { n, lengths } => Grid::Torus { n: [2 * n[0], 2 * n[1]], lengths },
        Grid::Polar { nr, ntheta, radius } => Grid::Polar { nr: 2 * nr, ntheta: 2 * ntheta, radius },
    };
    if let DtPolicy::Fixed { dt } = config.settings.dt_policy {
        fine.settings.dt_policy = DtPolicy::Fixed { dt: dt / 4.0 };
    }
    fine
}

/// Trajectory, constants and monitor reports of one resolution.
pub struct FlowRun {
    pub trajectory: Trajectory,
    pub constants: EstimateConstants,
    pub reports: Vec<(BoundId, Result<BoundReport, MonitorError>)>,
}

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("setup: {0}")]
    Setup(#[from] warpmcf_core::SetupError),
    #[error("constants: {0}")]
    Constants(#[from] warpmcf_core::GeometryError),
    #[error("restart snapshot does not describe the configured problem")]
    RestartMismatch,
}

/// Builds the problem and initial state, integrates and evaluates every
/// enabled monitor. A blow-up is not an error: the partial trajectory is
/// observed and carries it.
pub fn execute_flow(config: &FlowConfig, seed: u64, restart: Option<GraphState>) -> Result<FlowRun, PipelineError> {
    let problem = Arc::new(FlowProblem::with_default_policy(config.base.clone(), config.warp.clone(), config.grid.clone())?);
    let initial = match restart {
        Some(s) => {
            let p = s.problem();
            if p.base() != problem.base() || p.warp() != problem.warp() || p.grid() != problem.grid() || p.policy() != problem.policy() {
                return Err(PipelineError::RestartMismatch);
            }
            s
        }
        None => {
            let perturbation = config.perturbation.map(|amplitude| Perturbation { amplitude, seed });
            config.initial.build(problem, perturbation)?
        }
    };
    let mut constants = run_constants(&initial, config.settings.end_time, config.delta_rule)?;
    if config.nu_shift != 0.0 {
        constants.pinching_excess += config.nu_shift;
        constants.pinching_excess_plus = constants.pinching_excess.max(0.0);
    }
    let trajectory = match run_flow(&initial, &config.settings) {
        Ok(t) => t,
        Err(FlowError::BlowUp { partial, .. }) => *partial,
        Err(FlowError::Setup(e)) => return Err(e.into()),
    };
    let obs = Observation::from_trajectory(&trajectory);
    let window = config.regularization_window.map(|[start, end]| RegularizationWindow { start, end });
    let reports = config
        .monitors
        .iter()
        .map(|&id| {
            let r = match id {
                BoundId::Gradient => gradient_bound_check(&obs, &constants),
                BoundId::CurvatureCeiling => frakg_bound_check(&obs, &constants),
                BoundId::Regularization => regularization_check(&obs, window, Some(&constants)),
                BoundId::Decay => decay_check(&obs, config.decay_ceiling.unwrap_or(-1.0)),
                BoundId::GraphProperty => graph_property_check(&obs),
            };
            (id, r)
        })
        .collect();
    Ok(FlowRun { trajectory, constants, reports })
}

fn flow_pipeline(
    config: &FlowConfig,
    seed: u64,
    options: RunOptions,
    dir: &Path,
    report: &mut RunReport,
) -> Result<ExitStatus, ArtifactError> {
    let restarted_at = options.restart.as_ref().map(GraphState::t);
    let run = match execute_flow(config, seed, options.restart) {
        Ok(r) => r,
        Err(e) => {
            report.errors.push(e.to_string());
            return Ok(ExitStatus::ConfigError);
        }
    };
    let needs_refinement = config.refine && run.reports.iter().any(|(_, r)| matches!(r, Ok(b) if b.verdict == Verdict::Violated));
    let fine_config = needs_refinement.then(|| refine(config));
    let fine = match &fine_config {
        Some(fc) => match execute_flow(fc, seed, None) {
            Ok(f) => Some(f),
            Err(e) => {
                report.errors.push(format!("refined run: {e}"));
                None
            }
        },
        None => None,
    };
    let mut monitors = Vec::new();
    let mut coarse_reports = Vec::new();
    for (k, (id, r)) in run.reports.iter().enumerate() {
        let outcome = match r {
            Ok(b) => {
                coarse_reports.push(b.clone());
                let refined = fine.as_ref().and_then(|f| f.reports[k].1.as_ref().ok());
                let verdict = match refined {
                    Some(fb) => classify(b, fb),
                    None => b.verdict,
                };
                MonitorOutcome {
                    id: *id,
                    verdict: Some(verdict),
                    report: Some(b.clone()),
                    refined_worst_margin: refined.map(BoundReport::worst_margin),
                    error: None,
                }
            }
            Err(e) => {
                report.errors.push(format!("monitor {}: {e}", id.key()));
                MonitorOutcome { id: *id, verdict: None, report: None, refined_worst_margin: None, error: Some(e.to_string()) }
            }
        };
        monitors.push(outcome);
    }
    for p in write_timeseries(&dir.join("series"), &coarse_reports)? {
        report.artifacts.push(relative(dir, &p));
    }
    if config.snapshots {
        for (k, s) in run.trajectory.samples.iter().enumerate() {
            let p = dir.join("snapshots").join(format!("state_{k:04}.json"));
            save_state(&p, s)?;
            report.artifacts.push(relative(dir, &p));
        }
    }
    let blow_up = run.trajectory.blow_up;
    let status = if blow_up.is_some() {
        ExitStatus::BlowUp
    } else if monitors.iter().any(|m| m.error.is_some()) {
        ExitStatus::ConfigError
    } else if monitors.iter().any(|m| m.verdict.is_some_and(Verdict::is_failure)) {
        ExitStatus::Violation
    } else {
        ExitStatus::Pass
    };
    report.flow = Some(FlowSummary {
        constants: Some(run.constants),
        stop: Some(run.trajectory.stop),
        steps: run.trajectory.steps,
        nominal_dt: run.trajectory.nominal_dt,
        blow_up,
        restarted_at,
        refined_grid: fine_config.map(|f| f.grid),
        monitors,
    });
    Ok(status)
}

/// Verdict sentence of one graph notion.
pub fn notion_sentence(notion: &str, verdict: &NotionVerdict) -> String {
    match verdict {
        NotionVerdict::Persistent => format!("{notion} graph persistent"),
        NotionVerdict::Failed { .. } => format!("{notion} graph failed"),
    }
}

fn counter_pipeline(config: &CounterexampleConfig, dir: &Path, report: &mut RunReport) -> Result<ExitStatus, ArtifactError> {
    let result = match run_counterexample(&config.scenario, &config.settings) {
        Ok(r) => r,
        Err(e) => {
            report.errors.push(e.to_string());
            return Ok(ExitStatus::ConfigError);
        }
    };
    let csv = dir.join("series").join("counterflow.csv");
    write_counterflow_series(&csv, &result.history)?;
    report.artifacts.push(relative(dir, &csv));
    if config.snapshots {
        let p = dir.join("snapshots").join("curve_final.json");
        save_curve(&p, &result.final_curve)?;
        report.artifacts.push(relative(dir, &p));
    }
    let status = match &result.stop {
        CounterStop::Aborted { error } => {
            report.errors.push(format!("profile curve aborted: {error}"));
            ExitStatus::BlowUp
        }
        CounterStop::ReachedEnd | CounterStop::Extinct { .. } => ExitStatus::Pass,
    };
    report.counterexample = Some(CounterSummary {
        equidistant_verdict: notion_sentence("equidistant", &result.equidistant),
        geodesic_verdict: notion_sentence("geodesic", &result.geodesic),
        report: result,
    });
    Ok(status)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    #[test]
    fn refinement_doubles_axes_and_quarters_fixed_steps() {
        let c = parse_config("base = hyperbolic-polar\nwarp = cosh-r\ngrid.resolution = 32\ngrid.angular = 16\ngrid.radius = 3\ninitial = constant\ninitial.value = 0.1\ndt = fixed\ndt.value = 0.001\ntime.horizon = 1\n").unwrap();
        let RunKind::Flow(f) = c.run else { panic!("flow expected") };
        let fine = refine(&f);
        assert_eq!(fine.grid, Grid::Polar { nr: 64, ntheta: 32, radius: 3.0 });
        assert_eq!(fine.settings.dt_policy, DtPolicy::Fixed { dt: 0.00025 });
    }

    #[test]
    fn sentences() {
        assert_eq!(notion_sentence("geodesic", &NotionVerdict::Persistent), "geodesic graph persistent");
        let failed = NotionVerdict::Failed { t: 0.0, cause: warpmcf_core::counterflow::FailureCause::SignChange };
        assert_eq!(notion_sentence("geodesic", &failed), "geodesic graph failed");
    }
}
