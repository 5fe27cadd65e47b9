//! Area of the discrete graph and its first variation.

use alloc::vec::Vec;

use super::chart::ChartDiff;
use crate::geometry::ChartPoint;
use crate::graphflow::{GraphFields, GraphState};
use crate::math::{abs, sqrt};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariationReport {
    /// centred difference of the area along the normal perturbation
    pub derivative: f64,
    /// `-sum H chi v dvol`
    pub predicted: f64,
    pub relative_error: f64,
}

fn area_of(state: &GraphState, u: &[f64]) -> f64 {
    let problem = state.problem();
    let (base, warp, grid) = (problem.base(), problem.warp(), problem.grid());
    let diff = ChartDiff::new(problem);
    let mut total = 0.0;
    for k in 0..u.len() {
        let x = grid.point(k);
        let phi = warp.value(base, x);
        let du = diff.grad(u, k);
        let m = base.metric(x);
        let g22 = if base.dimension() == 1 || m[1][1] == 0.0 { 0.0 } else { du[1] * du[1] / m[1][1] };
        let v = sqrt(1.0 + phi * phi * (du[0] * du[0] + g22));
        total += v * grid.cell_measure(base, k);
    }
    total
}

/// `sum v dvol` with centred chart differences; polar grids reflect through
/// the pole and close one-sided on the last ring.
pub fn graph_area(state: &GraphState) -> f64 {
    area_of(state, state.u())
}

/// Centred difference in `eps` of the area under the normal displacement
/// `eps chi N` (vertical shift `chi v / phi`) against `-sum H chi v dvol`.
/// The relative error is taken against the larger side and is zero when
/// both vanish.
pub fn first_variation_check(state: &GraphState, chi: impl Fn(ChartPoint) -> f64, eps: f64) -> VariationReport {
    let problem = state.problem();
    let (base, grid) = (problem.base(), problem.grid());
    let fields = GraphFields::compute(state);
    let geo = problem.nodes();
    let mut shift = Vec::with_capacity(state.u().len());
    let mut predicted = 0.0;
    for (k, f) in fields.nodes.iter().enumerate() {
        let c = chi(grid.point(k));
        shift.push(c * f.v / geo[k].phi);
        predicted -= f.mean_curvature * c * f.v * grid.cell_measure(base, k);
    }
    let moved = |s: f64| -> Vec<f64> { state.u().iter().zip(&shift).map(|(u, d)| u + s * d).collect() };
    let plus = area_of(state, &moved(eps));
    let minus = area_of(state, &moved(-eps));
    let derivative = (plus - minus) / (2.0 * eps);
    let scale = abs(predicted).max(abs(derivative));
    let relative_error = if scale == 0.0 { 0.0 } else { abs(derivative - predicted) / scale };
    VariationReport { derivative, predicted, relative_error }
}
