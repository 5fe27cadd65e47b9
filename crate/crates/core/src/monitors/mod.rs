//! Bound monitors: each proven inequality evaluated along a trajectory,
//! with margins and a verdict.

mod checks;

pub use checks::{
    decay_check, frakg_bound_check, gradient_bound_check, graph_property_check, regularization_check, run_constants,
    MonitorError, RegularizationWindow,
};

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::BlowUp;
use crate::geometry::EstimateConstants;
use crate::graphflow::{GraphFields, GraphState, Trajectory};

/// Multiplier of `h^2 + dt` in the discretization tolerance, calibrated on
/// the torus and disc refinement runs.
pub const TOL_DISC_CONSTANT: f64 = 1.0;

/// Smallest reduction of a violation under halving `h` that still counts as
/// first-order convergence (2 minus slack for the polar refinement, which is
/// not an exact halving).
pub const FIRST_ORDER_REDUCTION: f64 = 1.8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundId {
    Gradient,
    CurvatureCeiling,
    Regularization,
    Decay,
    GraphProperty,
}

impl BoundId {
    pub fn key(self) -> &'static str {
        match self {
            BoundId::Gradient => "gradient",
            BoundId::CurvatureCeiling => "curvature-ceiling",
            BoundId::Regularization => "regularization",
            BoundId::Decay => "decay",
            BoundId::GraphProperty => "graph-property",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    /// Beyond tolerance at one resolution; a refined run decides.
    Violated,
    /// Violation that shrinks at least at first order under refinement.
    Discretization,
    Genuine,
    /// One-sided information only, never a violation.
    Diagnostic,
}

impl Verdict {
    pub fn is_failure(self) -> bool {
        matches!(self, Verdict::Violated | Verdict::Genuine)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundSample {
    pub t: f64,
    pub measured: f64,
    pub bound: f64,
    pub margin: f64,
    /// node attaining `measured`
    pub node: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub t: f64,
    pub node: usize,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub id: BoundId,
    pub samples: Vec<BoundSample>,
    pub tolerance: f64,
    /// most negative margin, when any margin is below `-tolerance`
    pub worst: Option<Violation>,
    pub verdict: Verdict,
    pub constants: Option<EstimateConstants>,
    /// bound-specific scalar: the running maximum for the regularization
    /// monitor, the initial distance for the decay monitor
    pub statistic: Option<f64>,
    pub blow_up: Option<BlowUp>,
    pub note: Option<String>,
}

impl BoundReport {
    pub(crate) fn from_samples(id: BoundId, samples: Vec<BoundSample>, tolerance: f64) -> Self {
        let mut worst: Option<Violation> = None;
        for s in &samples {
            let below = !(s.margin >= -tolerance);
            if below && worst.map_or(true, |w| s.margin < w.margin || s.margin.is_nan()) {
                worst = Some(Violation { t: s.t, node: s.node, margin: s.margin });
            }
        }
        let verdict = if worst.is_some() { Verdict::Violated } else { Verdict::Pass };
        BoundReport { id, samples, tolerance, worst, verdict, constants: None, statistic: None, blow_up: None, note: None }
    }

    pub fn worst_margin(&self) -> f64 {
        self.samples.iter().map(|s| s.margin).fold(f64::INFINITY, f64::min)
    }
}

/// Settles a `Violated` verdict from a run at twice the resolution.
pub fn classify(coarse: &BoundReport, fine: &BoundReport) -> Verdict {
    if coarse.verdict != Verdict::Violated {
        return coarse.verdict;
    }
    if fine.verdict == Verdict::Pass {
        return Verdict::Discretization;
    }
    let c = -coarse.worst_margin();
    let f = -fine.worst_margin();
    if f.is_finite() && c / f >= FIRST_ORDER_REDUCTION {
        Verdict::Discretization
    } else {
        Verdict::Genuine
    }
}

/// Spacing and step entering the discretization tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Resolution {
    pub h: f64,
    pub dt: f64,
}

impl Resolution {
    pub fn tolerance(&self) -> f64 {
        TOL_DISC_CONSTANT * (self.h * self.h + self.dt)
    }
}

/// Recorded states with their fields, as the monitors consume them.
#[derive(Debug, Clone)]
pub struct Observation {
    pub states: Vec<GraphState>,
    pub fields: Vec<GraphFields>,
    pub resolution: Resolution,
    pub blow_up: Option<BlowUp>,
}

impl Observation {
    pub fn from_trajectory(traj: &Trajectory) -> Self {
        let problem = traj.first().problem();
        let resolution = Resolution { h: problem.grid().spacing()[0], dt: traj.nominal_dt };
        Observation {
            states: traj.samples.clone(),
            fields: traj.fields().collect(),
            resolution,
            blow_up: traj.blow_up,
        }
    }
}
