use alloc::boxed::Box;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::fields::GraphFields;
use super::state::GraphState;
use super::step::{DtPolicy, Integrator, Scheme};
use crate::error::{BlowUp, SetupError};

/// When states are recorded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "schedule", rename_all = "kebab-case")]
pub enum SampleSchedule {
    /// `t = 0, c, 2c, ...` and the end time.
    Uniform { cadence: f64 },
    /// Given times in `(0, end]`, plus `t = 0`.
    Explicit { times: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSettings {
    pub end_time: f64,
    pub schedule: SampleSchedule,
    pub dt_policy: DtPolicy,
    pub scheme: Scheme,
    /// stop once `sup |H|` at a sample falls below this
    pub stop_tolerance: Option<f64>,
}

impl RunSettings {
    pub fn uniform(end_time: f64, samples: usize) -> Self {
        RunSettings {
            end_time,
            schedule: SampleSchedule::Uniform { cadence: end_time / samples as f64 },
            dt_policy: DtPolicy::default(),
            scheme: Scheme::Euler,
            stop_tolerance: None,
        }
    }

    fn sample_times(&self, start: f64) -> Result<Vec<f64>, SetupError> {
        if !(self.end_time > 0.0 && self.end_time.is_finite()) {
            return Err(SetupError::InvalidEndTime(self.end_time));
        }
        let mut times = Vec::new();
        match &self.schedule {
            SampleSchedule::Uniform { cadence } => {
                if !(*cadence > 0.0 && cadence.is_finite()) {
                    return Err(SetupError::InvalidCadence(*cadence));
                }
                let mut k = 1u64;
                loop {
                    let t = k as f64 * cadence;
                    // merge a sample that lands within rounding of the end
                    if t >= self.end_time * (1.0 - 1e-12) {
                        break;
                    }
                    times.push(t);
                    k += 1;
                }
                times.push(self.end_time);
            }
            SampleSchedule::Explicit { times: given } => {
                let mut v: Vec<f64> = given.iter().copied().filter(|&t| t > 0.0 && t <= self.end_time).collect();
                v.sort_by(|a, b| a.total_cmp(b));
                v.dedup();
                if v.last().copied() != Some(self.end_time) {
                    v.push(self.end_time);
                }
                times = v;
            }
        }
        Ok(times.into_iter().filter(|&t| t > start).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "kebab-case")]
pub enum StopReason {
    ReachedEnd,
    /// `sup |H|` dropped below the stop tolerance
    NearLimit { t: f64, max_mean_curvature: f64 },
    BlowUp,
}

/// Recorded states, oldest first.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<GraphState>,
    pub steps: usize,
    pub nominal_dt: f64,
    pub stop: StopReason,
    pub blow_up: Option<BlowUp>,
}

impl Trajectory {
    pub fn first(&self) -> &GraphState {
        &self.samples[0]
    }

    pub fn last(&self) -> &GraphState {
        self.samples.last().expect("trajectory holds the initial state")
    }

    pub fn fields(&self) -> impl Iterator<Item = GraphFields> + '_ {
        self.samples.iter().map(GraphFields::compute)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FlowError {
    #[error(transparent)]
    Setup(#[from] SetupError),
    #[error("{blow_up}")]
    BlowUp { blow_up: BlowUp, partial: Box<Trajectory> },
}

/// Integrates from `initial` to `settings.end_time`, recording samples.
/// Steps are shortened so that every sample time is hit exactly.
pub fn run_flow(initial: &GraphState, settings: &RunSettings) -> Result<Trajectory, FlowError> {
    let problem = initial.problem_handle().clone();
    let dt = settings.dt_policy.step_size(&problem)?;
    let times = settings.sample_times(initial.t())?;
    let mut integ = Integrator::new(problem.clone(), settings.scheme);
    let mut traj = Trajectory {
        samples: alloc::vec![initial.clone()],
        steps: 0,
        nominal_dt: dt,
        stop: StopReason::ReachedEnd,
        blow_up: None,
    };
    let mut u = initial.u().to_vec();
    let mut t = initial.t();
    for &target in &times {
        while t < target {
            let remaining = target - t;
            // absorb a sliver below 1e-9 dt into the current step
            let step = if remaining <= dt * (1.0 + 1e-9) { remaining } else { dt };
            if let Err(blow_up) = integ.advance(&mut u, t, step) {
                traj.stop = StopReason::BlowUp;
                traj.blow_up = Some(blow_up);
                return Err(FlowError::BlowUp { blow_up, partial: Box::new(traj) });
            }
            t = if step == remaining { target } else { t + step };
            traj.steps += 1;
        }
        let state = GraphState::from_parts(problem.clone(), u.clone(), t);
        let near = settings.stop_tolerance.map(|tol| {
            let h = GraphFields::compute(&state).max_abs_mean_curvature();
            (h < tol, h)
        });
        traj.samples.push(state);
        if let Some((true, h)) = near {
            traj.stop = StopReason::NearLimit { t, max_mean_curvature: h };
            break;
        }
    }
    Ok(traj)
}
