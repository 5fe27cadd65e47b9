use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{BoundId, BoundReport, BoundSample, Observation, Verdict, Violation};
use crate::geometry::{
    ambient_curvature, comparison_s, distance_to_slice, estimate_constants, has_exact_distance, ConstantsRequest,
    DeltaRule, EstimateConstants, Plane,
};
use crate::error::GeometryError;
use crate::graphflow::{GraphFields, GraphState, BLOW_UP_GRADIENT};
use crate::math::exp;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MonitorError {
    #[error("trajectory holds no samples")]
    EmptyTrajectory,
    #[error("decay ceiling must be negative (got {0})")]
    NonNegativeCeiling(f64),
    #[error("ambient curvature {value} exceeds the ceiling {ceiling} at node {node}, worst frame plane {plane:?}")]
    CurvaturePrecondition { ceiling: f64, value: f64, node: usize, plane: Plane },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

fn first(obs: &Observation) -> Result<&GraphFields, MonitorError> {
    obs.fields.first().ok_or(MonitorError::EmptyTrajectory)
}

/// Constants for a run starting at `initial`, sampled over its grid.
pub fn run_constants(
    initial: &GraphState,
    horizon: f64,
    delta_rule: Option<DeltaRule>,
) -> Result<EstimateConstants, GeometryError> {
    let p = initial.problem();
    let v0 = GraphFields::compute(initial).max_v().1;
    estimate_constants(
        p.base(),
        p.warp(),
        &p.grid().points(),
        ConstantsRequest { initial_gradient_sup: v0, horizon, delta_rule },
    )
}

/// `sup v(t)` against `v0_max e^{rate t}`, the rate being `(n-1) nu` on
/// compact bases and `2 eta^2 + (n-1) nu_+` otherwise.
pub fn gradient_bound_check(obs: &Observation, consts: &EstimateConstants) -> Result<BoundReport, MonitorError> {
    first(obs)?;
    let samples = obs
        .fields
        .iter()
        .map(|f| {
            let (node, v) = f.max_v();
            let bound = consts.gradient_bound(f.t);
            BoundSample { t: f.t, measured: v, bound, margin: bound - v, node }
        })
        .collect();
    let mut report = BoundReport::from_samples(BoundId::Gradient, samples, obs.resolution.tolerance());
    report.constants = Some(consts.clone());
    Ok(report)
}

/// Running maximum of `psi(v) |A|^2` against the stationary ceiling.
pub fn frakg_bound_check(obs: &Observation, consts: &EstimateConstants) -> Result<BoundReport, MonitorError> {
    first(obs)?;
    let mut breach: Option<(f64, usize, f64)> = None;
    let mut per_time = Vec::with_capacity(obs.fields.len());
    for f in &obs.fields {
        let mut best = (0usize, 0.0f64);
        for (k, n) in f.nodes.iter().enumerate() {
            match consts.psi(n.v) {
                Some(psi) => {
                    let g = psi * n.second_form_norm2;
                    if g > best.1 {
                        best = (k, g);
                    }
                }
                None => {
                    breach.get_or_insert((f.t, k, n.v));
                }
            }
        }
        per_time.push((f.t, best));
        if breach.is_some() {
            break;
        }
    }
    let ceiling = consts.curvature_ceiling(per_time[0].1 .1);
    let mut running = (0usize, f64::NEG_INFINITY);
    let samples = per_time
        .iter()
        .map(|&(t, (node, g))| {
            if g > running.1 {
                running = (node, g);
            }
            BoundSample { t, measured: running.1, bound: ceiling, margin: ceiling - running.1, node: running.0 }
        })
        .collect();
    let mut report = BoundReport::from_samples(BoundId::CurvatureCeiling, samples, obs.resolution.tolerance());
    report.constants = Some(consts.clone());
    if let Some((t, node, v)) = breach {
        report.verdict = Verdict::Genuine;
        report.worst = Some(Violation { t, node, margin: f64::NEG_INFINITY });
        report.note = Some(alloc::format!("gradient bound breached: delta v^2 >= 1 with v = {v}"));
    }
    Ok(report)
}

/// Sample-time range on which the time-weighted curvature is examined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularizationWindow {
    pub start: f64,
    pub end: f64,
}

/// `sup_x t |A|^2 / (1 + t)` per sample. The monitor passes when the running
/// maximum over the window is finite and, given constants, stays below
/// their `alpha_0`.
pub fn regularization_check(
    obs: &Observation,
    window: Option<RegularizationWindow>,
    consts: Option<&EstimateConstants>,
) -> Result<BoundReport, MonitorError> {
    first(obs)?;
    let alpha = consts.map_or(f64::INFINITY, |c| c.regularization_constant());
    let inside = |t: f64| window.map_or(true, |w| t >= w.start * (1.0 - 1e-12) && t <= w.end * (1.0 + 1e-12));
    let samples: Vec<BoundSample> = obs
        .fields
        .iter()
        .filter(|f| inside(f.t))
        .map(|f| {
            let (node, a2) = f.max_second_form_norm2();
            let m = f.t * a2 / (1.0 + f.t);
            BoundSample { t: f.t, measured: m, bound: alpha, margin: alpha - m, node }
        })
        .collect();
    let running = samples.iter().map(|s| s.measured).fold(0.0, f64::max);
    let finite = samples.iter().all(|s| s.measured.is_finite());
    let mut report = BoundReport::from_samples(BoundId::Regularization, samples, obs.resolution.tolerance());
    report.constants = consts.cloned();
    report.statistic = Some(running);
    if !finite {
        report.verdict = Verdict::Genuine;
        report.note = Some("time-weighted curvature is not finite".to_string());
    }
    Ok(report)
}

/// `sup_x s_k(l(x, t))` against `s_k(l0) e^{k n t}` where `l` is the distance
/// to the slice. Strict only when exact distances are available; with the
/// vertical-segment upper bound the report is a diagnostic.
pub fn decay_check(obs: &Observation, k: f64) -> Result<BoundReport, MonitorError> {
    first(obs)?;
    if !(k < 0.0) {
        return Err(MonitorError::NonNegativeCeiling(k));
    }
    let problem = obs.states[0].problem();
    let (base, warp) = (problem.base(), problem.warp());
    let n = base.dimension();
    for (node, x) in problem.grid().points().into_iter().enumerate() {
        let curv = ambient_curvature(base, warp, x)?;
        let value = curv.sectional_range().max;
        if value > k + 1e-12 * abs_or_one(k) {
            let mut planes: Vec<Plane> = (1..=n).map(Plane::Vertical).collect();
            if n == 2 {
                planes.push(Plane::Horizontal(1, 2));
            }
            let plane = planes
                .into_iter()
                .max_by(|a, b| sectional(&curv.r, *a).total_cmp(&sectional(&curv.r, *b)))
                .unwrap_or(Plane::Vertical(1));
            return Err(MonitorError::CurvaturePrecondition { ceiling: k, value, node, plane });
        }
    }
    let exact = has_exact_distance(base, warp);
    let points = problem.grid().points();
    let sup_s = |s: &GraphState| {
        let mut best = (0usize, 0.0f64);
        for (i, (&u, &x)) in s.u().iter().zip(&points).enumerate() {
            let l = distance_to_slice(base, warp, x, u).distance;
            let v = comparison_s(k, l);
            if v > best.1 {
                best = (i, v);
            }
        }
        best
    };
    let s0 = sup_s(&obs.states[0]).1;
    let rate = k * n as f64;
    let samples = obs
        .states
        .iter()
        .map(|s| {
            let (node, m) = sup_s(s);
            let bound = s0 * exp(rate * s.t());
            BoundSample { t: s.t(), measured: m, bound, margin: bound - m, node }
        })
        .collect();
    let mut report = BoundReport::from_samples(BoundId::Decay, samples, obs.resolution.tolerance());
    report.statistic = Some(s0);
    if !exact {
        report.verdict = Verdict::Diagnostic;
        report.worst = None;
        report.note = Some(String::from("distance is the vertical-segment upper bound; one-sided diagnostic"));
    }
    Ok(report)
}

fn abs_or_one(k: f64) -> f64 {
    if k.abs() > 1.0 {
        k.abs()
    } else {
        1.0
    }
}

fn sectional(r: &crate::geometry::Tensor4, plane: Plane) -> f64 {
    match plane {
        Plane::Vertical(i) => r[i][0][i][0],
        Plane::Horizontal(i, j) => r[i][j][i][j],
    }
}

/// `sup v` at every sample, finite for a graph. A blow-up carried by the
/// observation fails the monitor with its node and time.
pub fn graph_property_check(obs: &Observation) -> Result<BoundReport, MonitorError> {
    first(obs)?;
    let samples = obs
        .fields
        .iter()
        .map(|f| {
            let (node, v) = f.max_v();
            BoundSample { t: f.t, measured: v, bound: BLOW_UP_GRADIENT, margin: BLOW_UP_GRADIENT - v, node }
        })
        .collect();
    let mut report = BoundReport::from_samples(BoundId::GraphProperty, samples, 0.0);
    if let Some(b) = obs.blow_up {
        report.verdict = Verdict::Genuine;
        report.worst = Some(Violation { t: b.t, node: b.node, margin: BLOW_UP_GRADIENT - b.value });
        report.blow_up = Some(b);
        report.note = Some(alloc::format!("{b}"));
    } else if report.verdict == Verdict::Violated {
        report.verdict = Verdict::Genuine;
    }
    Ok(report)
}
