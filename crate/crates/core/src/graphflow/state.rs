use alloc::sync::Arc;
use alloc::vec::Vec;

use super::problem::FlowProblem;
use crate::error::SetupError;

/// Heights `u` on the grid of a [`FlowProblem`] at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphState {
    problem: Arc<FlowProblem>,
    u: Vec<f64>,
    t: f64,
}

impl GraphState {
    pub fn new(problem: Arc<FlowProblem>, u: Vec<f64>, t: f64) -> Result<Self, SetupError> {
        let want = problem.grid().len();
        if u.len() != want {
            return Err(SetupError::NodeCountMismatch { got: u.len(), want });
        }
        if let Some(node) = u.iter().position(|x| !x.is_finite()) {
            return Err(SetupError::NonFiniteInitial { node });
        }
        Ok(GraphState { problem, u, t })
    }

    /// Samples `height` at every node.
    pub fn from_fn(problem: Arc<FlowProblem>, height: impl Fn(crate::geometry::ChartPoint) -> f64) -> Result<Self, SetupError> {
        let u = problem.grid().points().into_iter().map(height).collect();
        Self::new(problem, u, 0.0)
    }

    pub(crate) fn from_parts(problem: Arc<FlowProblem>, u: Vec<f64>, t: f64) -> Self {
        GraphState { problem, u, t }
    }

    pub fn problem(&self) -> &FlowProblem {
        &self.problem
    }

    pub fn problem_handle(&self) -> &Arc<FlowProblem> {
        &self.problem
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn into_values(self) -> Vec<f64> {
        self.u
    }

    /// Height at the pole of a polar grid: the mean of the innermost ring.
    pub fn pole_value(&self) -> Option<f64> {
        match self.problem.grid() {
            super::grid::Grid::Polar { ntheta, .. } => {
                Some(self.u[..*ntheta].iter().sum::<f64>() / *ntheta as f64)
            }
            _ => None,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.u.iter().map(|x| x.abs()).fold(0.0, f64::max)
    }
}
