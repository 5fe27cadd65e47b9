use alloc::sync::Arc;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::pointwise::vertical_speed;
use super::problem::FlowProblem;
use super::state::GraphState;
use super::stencil::{for_each_jet, Sweep};
use crate::error::{BlowUp, BlowUpKind, SetupError};
use crate::math::sqrt;

/// A gradient function above this value counts as loss of the graph property.
pub const BLOW_UP_GRADIENT: f64 = 1e6;

pub const MAX_CFL_FRACTION: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "kebab-case")]
pub enum DtPolicy {
    /// `dt = fraction * h_min^2 / (2 n)`
    Cfl { fraction: f64 },
    Fixed { dt: f64 },
}

impl Default for DtPolicy {
    fn default() -> Self {
        DtPolicy::Cfl { fraction: 0.4 }
    }
}

impl DtPolicy {
    pub fn step_size(&self, problem: &FlowProblem) -> Result<f64, SetupError> {
        match *self {
            DtPolicy::Cfl { fraction } => {
                if !(fraction > 0.0 && fraction <= MAX_CFL_FRACTION) {
                    return Err(SetupError::InvalidCfl(fraction));
                }
                let h = problem.min_spacing();
                Ok(fraction * h * h / (2.0 * problem.dimension() as f64))
            }
            DtPolicy::Fixed { dt } => {
                if !(dt > 0.0 && dt.is_finite()) {
                    return Err(SetupError::InvalidStep(dt));
                }
                Ok(dt)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    #[default]
    Euler,
    /// explicit midpoint
    Rk2,
}

/// Evaluates the flow speed at every active node into `out` (frozen nodes
/// get zero) and returns the node with the largest `v^2`.
pub fn flow_speed(problem: &FlowProblem, u: &[f64], out: &mut [f64]) -> (usize, f64) {
    let geo = problem.nodes();
    let mut worst = (0usize, 1.0f64);
    out.iter_mut().for_each(|o| *o = 0.0);
    for_each_jet(problem, u, Sweep::Active, |k, jet| {
        let (speed, v2) = vertical_speed(&geo[k], &jet);
        out[k] = speed;
        if !(v2 <= worst.1) {
            worst = (k, v2);
        }
    });
    worst
}

/// Reusable explicit integrator with scratch buffers.
#[derive(Debug, Clone)]
pub struct Integrator {
    problem: Arc<FlowProblem>,
    scheme: Scheme,
    k1: Vec<f64>,
    mid: Vec<f64>,
}

impl Integrator {
    pub fn new(problem: Arc<FlowProblem>, scheme: Scheme) -> Self {
        let n = problem.grid().len();
        Integrator { problem, scheme, k1: alloc::vec![0.0; n], mid: alloc::vec![0.0; n] }
    }

    pub fn problem(&self) -> &Arc<FlowProblem> {
        &self.problem
    }

    fn check(&self, u: &[f64], t: f64, worst_v2: (usize, f64)) -> Result<(), BlowUp> {
        if let Some(node) = u.iter().position(|x| !x.is_finite()) {
            return Err(BlowUp { kind: BlowUpKind::NonFinite, node, t, value: u[node] });
        }
        let v = sqrt(worst_v2.1);
        if !(v <= BLOW_UP_GRADIENT) {
            return Err(BlowUp { kind: BlowUpKind::GradientOverflow, node: worst_v2.0, t, value: v });
        }
        Ok(())
    }

    /// Advances `u` in place by `dt`. On failure `u` holds the offending
    /// values.
    pub fn advance(&mut self, u: &mut [f64], t: f64, dt: f64) -> Result<(), BlowUp> {
        let problem = &*self.problem;
        match self.scheme {
            Scheme::Euler => {
                let worst = flow_speed(problem, u, &mut self.k1);
                self.check(u, t, worst)?;
                for (x, s) in u.iter_mut().zip(&self.k1) {
                    *x += dt * s;
                }
            }
            Scheme::Rk2 => {
                let worst = flow_speed(problem, u, &mut self.k1);
                self.check(u, t, worst)?;
                for ((m, x), s) in self.mid.iter_mut().zip(u.iter()).zip(&self.k1) {
                    *m = x + 0.5 * dt * s;
                }
                if let Some(f) = problem.filter() {
                    f.apply(&mut self.mid);
                }
                let worst = flow_speed(problem, &self.mid, &mut self.k1);
                self.check(&self.mid, t + 0.5 * dt, worst)?;
                for (x, s) in u.iter_mut().zip(&self.k1) {
                    *x += dt * s;
                }
            }
        }
        if let Some(f) = problem.filter() {
            f.apply(u);
        }
        if let Some(node) = u.iter().position(|x| !x.is_finite()) {
            return Err(BlowUp { kind: BlowUpKind::NonFinite, node, t: t + dt, value: u[node] });
        }
        Ok(())
    }
}

/// One step of the flow.
pub fn step_flow(state: &GraphState, policy: DtPolicy, scheme: Scheme) -> Result<GraphState, StepError> {
    let dt = policy.step_size(state.problem())?;
    let mut integ = Integrator::new(state.problem_handle().clone(), scheme);
    let mut u = state.u().to_vec();
    integ.advance(&mut u, state.t(), dt)?;
    Ok(GraphState::from_parts(state.problem_handle().clone(), u, state.t() + dt))
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StepError {
    #[error(transparent)]
    Setup(#[from] SetupError),
    #[error(transparent)]
    BlowUp(#[from] BlowUp),
}
