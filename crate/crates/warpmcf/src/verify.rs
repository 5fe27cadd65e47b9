//! Conformance checks of the closed-form geometry and the pointwise fields
//! against the independent oracles. Nothing here integrates the flow.

use std::f64::consts::TAU;
use std::sync::Arc;

use serde::Serialize;
use warpmcf_core::geometry::{BaseManifold, ChartPoint, WarpFactor};
use warpmcf_core::graphflow::{FlowProblem, GraphState, Grid};
use warpmcf_core::oracle::{
    catalog_pairs, fd_riemann_check, first_variation_check, gradient_identity_check, laplacian_identity_check,
    sample_points, FD_STEP,
};

pub const CURVATURE_TOL: f64 = 1e-4;
pub const SECTIONAL_TOL: f64 = 1e-4;
pub const GRADIENT_IDENTITY_TOL: f64 = 1e-12;
pub const LAPLACIAN_IDENTITY_TOL: f64 = 1e-3;
pub const FIRST_VARIATION_TOL: f64 = 1e-3;

/// Perturbation size of the finite-difference area derivative.
const VARIATION_EPS: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConformanceReport {
    pub catalog: bool,
    pub checks: Vec<Check>,
    pub passed: bool,
}

fn check(name: impl Into<String>, value: f64, tolerance: f64, detail: Option<String>) -> Check {
    Check { name: name.into(), value, tolerance, passed: value <= tolerance, detail }
}

fn failed(name: impl Into<String>, detail: String) -> Check {
    Check { name: name.into(), value: f64::INFINITY, tolerance: 0.0, passed: false, detail: Some(detail) }
}

const BUMP: WarpFactor = WarpFactor::TorusBump { offset: 1.5, amplitude: 0.5, mode: 1 };

fn problem(base: BaseManifold, warp: WarpFactor, grid: Grid) -> Arc<FlowProblem> {
    Arc::new(FlowProblem::with_default_policy(base, warp, grid).expect("verification grids are valid"))
}

fn torus(n: usize, warp: WarpFactor) -> Arc<FlowProblem> {
    problem(BaseManifold::FlatTorus { lengths: [TAU; 2] }, warp, Grid::Torus { n: [n, n], lengths: [TAU; 2] })
}

fn disc(nr: usize, ntheta: usize) -> Arc<FlowProblem> {
    problem(BaseManifold::hyperbolic_polar(), WarpFactor::CoshR, Grid::Polar { nr, ntheta, radius: 3.0 })
}

fn wave(x: ChartPoint) -> f64 {
    0.8 * x.0[0].sin() * x.0[1].sin()
}

fn curvature(base: &BaseManifold, warp: &WarpFactor, samples: usize, seed: u64) -> Vec<Check> {
    let name = format!("curvature {} x {}", base.key(), warp.key());
    match fd_riemann_check(base, warp, &sample_points(base, samples, seed), FD_STEP) {
        Ok(r) => {
            let detail = format!("{} samples, worst at {:?}", r.checked, r.worst_point);
            let mut out = vec![check(name, r.max_relative_error, CURVATURE_TOL, Some(detail))];
            if base.key() == "hyperbolic-polar" && warp.key() == "cosh-r" {
                let spread = (r.sectional_min + 1.0).abs().max((r.sectional_max + 1.0).abs());
                let range = format!("sectional range [{}, {}]", r.sectional_min, r.sectional_max);
                out.push(check("hyperbolic model sectional curvature -1", spread, SECTIONAL_TOL, Some(range)));
            }
            out
        }
        Err(e) => vec![failed(name, e.to_string())],
    }
}

fn variation(name: &str, state: &GraphState, chi: impl Fn(ChartPoint) -> f64) -> Check {
    let r = first_variation_check(state, chi, VARIATION_EPS);
    let detail = format!("area derivative {}, predicted {}", r.derivative, r.predicted);
    check(name, r.relative_error, FIRST_VARIATION_TOL, Some(detail))
}

/// Quick set by default; `catalog` adds every catalog pair and the warped
/// first-variation cases.
pub fn conformance(catalog: bool) -> ConformanceReport {
    let mut checks = Vec::new();
    if catalog {
        for (k, (base, warp)) in catalog_pairs().iter().enumerate() {
            checks.extend(curvature(base, warp, 20, 100 + k as u64));
        }
    } else {
        checks.extend(curvature(&BaseManifold::hyperbolic_polar(), &WarpFactor::CoshR, 10, 2));
    }

    let s = GraphState::from_fn(torus(64, BUMP), wave).expect("finite heights");
    let r = gradient_identity_check(&s);
    checks.push(check("gradient identity, torus bump 64", r.max_error, GRADIENT_IDENTITY_TOL, Some(format!("node {}", r.node))));

    let s = GraphState::from_fn(torus(128, WarpFactor::One), wave).expect("finite heights");
    let r = laplacian_identity_check(&s);
    checks.push(check("laplacian identity, flat torus 128", r.max_error, LAPLACIAN_IDENTITY_TOL, Some(format!("node {}", r.node))));

    let length = 8.0;
    let line = problem(BaseManifold::FlatCircle { length }, WarpFactor::One, Grid::Circle { n: 8000, length });
    let parabola = GraphState::from_fn(line, |x| 0.5 * (x.0[0] - 4.0).powi(2)).expect("finite heights");
    checks.push(variation("first variation, planar parabola", &parabola, |x| (-4.0 * (x.0[0] - 4.3).powi(2)).exp()));

    if catalog {
        let s = GraphState::from_fn(torus(128, BUMP), wave).expect("finite heights");
        checks.push(variation("first variation, torus bump 128", &s, |x| 1.0 + 0.5 * (x.0[0] - x.0[1]).cos()));
        let s = GraphState::from_fn(disc(96, 96), |x| 0.8 * (-x.0[0] * x.0[0]).exp()).expect("finite heights");
        checks.push(variation("first variation, hyperbolic disc 96", &s, |x| {
            let r = x.0[0];
            r * r * (-2.0 * r * r).exp() * (1.0 + 0.3 * x.0[1].cos())
        }));
    }
    let passed = checks.iter().all(|c| c.passed);
    ConformanceReport { catalog, checks, passed }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_set_passes() {
        let r = conformance(false);
        assert!(r.passed, "{r:#?}");
        assert!(r.checks.iter().any(|c| c.name.contains("sectional")));
    }
}
