//! Graph identities recomputed in chart coordinates with the induced metric
//! `G_ab = g^_ab + phi^2 d_a u d_b u`, in divergence form.

use alloc::vec::Vec;

use super::chart::ChartDiff;
use super::OracleError;
use crate::geometry::WarpJet;
use crate::graphflow::{FlowProblem, GraphFields, GraphState};
use crate::math::{abs, sqrt};

/// Worst node of a pointwise identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityReport {
    pub max_error: f64,
    pub node: usize,
    pub checked: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualReport {
    /// time of the middle sample
    pub t: f64,
    pub max_residual: f64,
    pub node: usize,
    pub checked: usize,
}

/// Induced metric data per node, with chart partials of `u`.
struct Induced {
    du: [f64; 2],
    sqrt_det: f64,
    inv: [[f64; 2]; 2],
}

struct Chart<'a> {
    problem: &'a FlowProblem,
    diff: ChartDiff<'a>,
    jets: Vec<WarpJet>,
    /// chart length of the second frame vector (`f(r)` on polar charts)
    scale: Vec<f64>,
    induced: Vec<Induced>,
}

impl<'a> Chart<'a> {
    fn new(state: &'a GraphState) -> Self {
        let problem = state.problem();
        let (base, warp) = (problem.base(), problem.warp());
        let diff = ChartDiff::new(problem);
        let points = problem.grid().points();
        let jets: Vec<WarpJet> = points.iter().map(|&x| warp.jet(base, x)).collect();
        let scale = points.iter().map(|&x| base.angular_scale(x).0).collect();
        let one_dim = base.dimension() == 1;
        let induced = points
            .iter()
            .enumerate()
            .map(|(k, &x)| {
                let du = diff.grad(state.u(), k);
                let mut g = base.metric(x);
                if one_dim {
                    g[1][1] = 1.0;
                }
                let phi2 = jets[k].value * jets[k].value;
                for a in 0..2 {
                    for b in 0..2 {
                        g[a][b] += phi2 * du[a] * du[b];
                    }
                }
                let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
                let inv = [[g[1][1] / det, -g[0][1] / det], [-g[1][0] / det, g[0][0] / det]];
                Induced { du, sqrt_det: sqrt(det), inv }
            })
            .collect();
        Chart { problem, diff, jets, scale, induced }
    }

    fn pair(&self, k: usize, a: [f64; 2], b: [f64; 2]) -> f64 {
        let gi = &self.induced[k].inv;
        let mut s = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                s += gi[i][j] * a[i] * b[j];
            }
        }
        s
    }

    /// Chart partials of `phi` from its frame gradient.
    fn dphi(&self, k: usize) -> [f64; 2] {
        let g = self.jets[k].grad;
        [g[0], g[1] * self.scale[k]]
    }

    /// `(1/sqrt G) d_a (sqrt G G^ab d_b f)` at `nodes`.
    fn laplacian(&self, f: &[f64], nodes: &[usize]) -> Vec<f64> {
        let n = f.len();
        let mut flux = [alloc::vec![0.0; n], alloc::vec![0.0; n]];
        for k in 0..n {
            let df = self.diff.grad(f, k);
            let ind = &self.induced[k];
            for a in 0..2 {
                flux[a][k] = ind.sqrt_det * (ind.inv[a][0] * df[0] + ind.inv[a][1] * df[1]);
            }
        }
        nodes
            .iter()
            .map(|&k| {
                let div = self.diff.grad(&flux[0], k)[0] + self.diff.grad(&flux[1], k)[1];
                div / self.induced[k].sqrt_det
            })
            .collect()
    }
}

/// `|grad u|^2` in the induced metric against `(1 - 1/v^2)/phi^2`, both from
/// the fields of `state`; the inverse metric is recomputed here.
pub fn gradient_identity_check(state: &GraphState) -> IdentityReport {
    let fields = GraphFields::compute(state);
    let geo = state.problem().nodes();
    let mut report = IdentityReport { max_error: 0.0, node: 0, checked: 0 };
    for (k, f) in fields.nodes.iter().enumerate() {
        let g = f.metric;
        let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
        let inv = [[g[1][1] / det, -g[0][1] / det], [-g[1][0] / det, g[0][0] / det]];
        let p = f.grad;
        let lhs = inv[0][0] * p[0] * p[0] + 2.0 * inv[0][1] * p[0] * p[1] + inv[1][1] * p[1] * p[1];
        let phi = geo[k].phi;
        let rhs = (1.0 - 1.0 / (f.v * f.v)) / (phi * phi);
        let err = abs(lhs - rhs);
        if err > report.max_error {
            report.max_error = err;
            report.node = k;
        }
        report.checked += 1;
    }
    report
}

/// Induced Laplacian of `u` in chart divergence form against
/// `-(2/phi) <grad u, grad phi> + H/(phi v)` built from the fields.
pub fn laplacian_identity_check(state: &GraphState) -> IdentityReport {
    let chart = Chart::new(state);
    let fields = GraphFields::compute(state);
    let geo = state.problem().nodes();
    let nodes = chart.diff.interior();
    let lap = chart.laplacian(state.u(), &nodes);
    let mut report = IdentityReport { max_error: 0.0, node: 0, checked: nodes.len() };
    for (&k, &lhs) in nodes.iter().zip(&lap) {
        let f = &fields.nodes[k];
        let (phi, gphi) = (geo[k].phi, geo[k].grad_phi);
        let gi = f.metric_inv;
        let mut dot = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                dot += gi[i][j] * f.grad[i] * gphi[j];
            }
        }
        let rhs = -2.0 / phi * dot + f.mean_curvature / (phi * f.v);
        let err = abs(lhs - rhs);
        if err > report.max_error {
            report.max_error = err;
            report.node = k;
        }
    }
    report
}

/// Weight of `Hess phi(a, a) / phi` in the curvature bracket. Differentiating
/// `v = phi / <N, d_u>` along the flow gives 2; with weight 1 the residual
/// stalls at O(1) wherever `Hess phi` does not vanish.
pub const HESSIAN_WEIGHT: f64 = 2.0;

/// Residual of the evolution of `v` at the middle of every consecutive
/// triple of `samples`, with the tangential term of the vertical
/// parametrisation included. The curvature bracket is evaluated in regular
/// form `(phi^2/v) Q(grad u, grad u)`, which needs no unit direction, with
/// `Q(a, a) = (lap phi/phi + |grad phi|^2/phi^2 + Ric) |a|^2 - w Hess phi(a, a)/phi`
/// and `w` = [`HESSIAN_WEIGHT`].
pub fn v_evolution_residual(samples: &[GraphState]) -> Result<Vec<ResidualReport>, OracleError> {
    v_evolution_residual_weighted(samples, HESSIAN_WEIGHT)
}

/// [`v_evolution_residual`] with another Hessian weight in the bracket.
pub fn v_evolution_residual_weighted(
    samples: &[GraphState],
    hessian_weight: f64,
) -> Result<Vec<ResidualReport>, OracleError> {
    if samples.len() < 3 || samples.windows(2).any(|w| !(w[1].t() > w[0].t())) {
        return Err(OracleError::BadSamples);
    }
    let fields: Vec<GraphFields> = samples.iter().map(GraphFields::compute).collect();
    let mut out = Vec::with_capacity(samples.len() - 2);
    for m in 1..samples.len() - 1 {
        let (t0, t1, t2) = (samples[m - 1].t(), samples[m].t(), samples[m + 1].t());
        let (h1, h2) = (t1 - t0, t2 - t1);
        let w = [-h2 / (h1 * (h1 + h2)), (h2 - h1) / (h1 * h2), h1 / (h2 * (h1 + h2))];
        out.push(residual_at(&samples[m], &fields[m - 1..=m + 1], w, hessian_weight));
    }
    Ok(out)
}

fn residual_at(state: &GraphState, fields: &[GraphFields], w: [f64; 3], hessian_weight: f64) -> ResidualReport {
    let chart = Chart::new(state);
    let problem = chart.problem;
    let base = problem.base();
    let dim = base.dimension();
    let points = problem.grid().points();
    let mid = &fields[1];
    let v: Vec<f64> = mid.nodes.iter().map(|f| f.v).collect();
    let nodes = chart.diff.interior();
    let lap_v = chart.laplacian(&v, &nodes);
    let mut report = ResidualReport { t: state.t(), max_residual: 0.0, node: 0, checked: nodes.len() };
    for (&k, &lv) in nodes.iter().zip(&lap_v) {
        let f = &mid.nodes[k];
        let vt = w[0] * fields[0].nodes[k].v + w[1] * f.v + w[2] * fields[2].nodes[k].v;
        let dv = chart.diff.grad(&v, k);
        let jet = &chart.jets[k];
        let phi = jet.value;
        let a = f.grad;
        let a2 = a[0] * a[0] + a[1] * a[1];
        let lap_phi: f64 = (0..dim).map(|i| jet.hess[i][i]).sum();
        let grad_phi2 = jet.grad[0] * jet.grad[0] + jet.grad[1] * jet.grad[1];
        let hess_aa = jet.hess[0][0] * a[0] * a[0] + 2.0 * jet.hess[0][1] * a[0] * a[1] + jet.hess[1][1] * a[1] * a[1];
        let ricci = if dim == 2 { base.gauss_curvature(points[k]) } else { 0.0 };
        let q = (lap_phi / phi + grad_phi2 / (phi * phi) + ricci) * a2 - hessian_weight * hess_aa / phi;
        let rhs = lv - 2.0 / f.v * chart.pair(k, dv, dv) + 2.0 / phi * chart.pair(k, dv, chart.dphi(k))
            - f.v * f.second_form_norm2
            - phi * phi / f.v * q
            + f.v * f.mean_curvature * phi * chart.pair(k, chart.induced[k].du, dv);
        let r = abs(vt - rhs);
        if !(r <= report.max_residual) {
            report.max_residual = r;
            report.node = k;
        }
    }
    report
}
