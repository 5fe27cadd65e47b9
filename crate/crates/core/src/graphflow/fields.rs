use alloc::vec::Vec;

use super::pointwise::{
    gradient_function, induced_metric, mean_curvature_at, norm_squared, second_fundamental_form_at,
};
use super::state::GraphState;
use super::stencil::{for_each_jet, Sweep};

/// Geometry of the discrete graph at one node.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NodeFields {
    /// frame components of the base gradient of `u`
    pub grad: [f64; 2],
    pub v: f64,
    /// upward unit normal as `[vertical, frame 1, frame 2]`
    pub normal: [f64; 3],
    pub mean_curvature: f64,
    pub second_form: [[f64; 2]; 2],
    pub second_form_norm2: f64,
    pub metric: [[f64; 2]; 2],
    pub metric_inv: [[f64; 2]; 2],
}

/// Per-node geometry of a whole state.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphFields {
    pub t: f64,
    pub nodes: Vec<NodeFields>,
}

impl GraphFields {
    pub fn compute(state: &GraphState) -> Self {
        let problem = state.problem();
        let geo = problem.nodes();
        let mut nodes = alloc::vec![NodeFields::default(); state.u().len()];
        for_each_jet(problem, state.u(), Sweep::All, |k, jet| {
            let g = &geo[k];
            let v = gradient_function(g.phi, jet.grad);
            let (metric, metric_inv) = induced_metric(g.phi, jet.grad);
            let a = second_fundamental_form_at(g, &jet);
            nodes[k] = NodeFields {
                grad: jet.grad,
                v,
                normal: [1.0 / v, -g.phi * jet.grad[0] / v, -g.phi * jet.grad[1] / v],
                mean_curvature: mean_curvature_at(g, &jet),
                second_form: a,
                second_form_norm2: norm_squared(&a, &metric_inv),
                metric,
                metric_inv,
            };
        });
        GraphFields { t: state.t(), nodes }
    }

    /// Largest `v` and where it sits.
    pub fn max_v(&self) -> (usize, f64) {
        argmax(self.nodes.iter().map(|n| n.v))
    }

    pub fn max_second_form_norm2(&self) -> (usize, f64) {
        argmax(self.nodes.iter().map(|n| n.second_form_norm2))
    }

    pub fn max_abs_mean_curvature(&self) -> f64 {
        self.nodes.iter().map(|n| n.mean_curvature.abs()).fold(0.0, f64::max)
    }
}

fn argmax(values: impl Iterator<Item = f64>) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (k, v) in values.enumerate() {
        // NaN wins so that it is never hidden
        if v > best.1 || v.is_nan() {
            best = (k, v);
            if v.is_nan() {
                break;
            }
        }
    }
    best
}

/// Frame gradient and `v` per node.
pub fn compute_gradient_v(state: &GraphState) -> Vec<([f64; 2], f64)> {
    let geo = state.problem().nodes();
    let mut out = alloc::vec![([0.0; 2], 1.0); state.u().len()];
    for_each_jet(state.problem(), state.u(), Sweep::All, |k, jet| {
        out[k] = (jet.grad, gradient_function(geo[k].phi, jet.grad));
    });
    out
}

pub fn mean_curvature(state: &GraphState) -> Vec<f64> {
    let geo = state.problem().nodes();
    let mut out = alloc::vec![0.0; state.u().len()];
    for_each_jet(state.problem(), state.u(), Sweep::All, |k, jet| {
        out[k] = mean_curvature_at(&geo[k], &jet);
    });
    out
}

/// `(A_ij, |A|^2)` per node.
pub fn second_fundamental_form(state: &GraphState) -> Vec<([[f64; 2]; 2], f64)> {
    let geo = state.problem().nodes();
    let mut out = alloc::vec![([[0.0; 2]; 2], 0.0); state.u().len()];
    for_each_jet(state.problem(), state.u(), Sweep::All, |k, jet| {
        let a = second_fundamental_form_at(&geo[k], &jet);
        let (_, gi) = induced_metric(geo[k].phi, jet.grad);
        out[k] = (a, norm_squared(&a, &gi));
    });
    out
}
