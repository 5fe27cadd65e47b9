use alloc::sync::Arc;
use alloc::vec::Vec;

use super::*;
use crate::geometry::{BaseManifold, ChartPoint, Plane, WarpFactor};
use crate::graphflow::{run_flow, DtPolicy, FlowProblem, GraphState, Grid, RunSettings, SampleSchedule, Scheme};
use crate::math::{cos, exp, sin, TAU};

const BUMP: WarpFactor = WarpFactor::TorusBump { offset: 1.5, amplitude: 0.5, mode: 1 };

fn torus(n: usize, warp: WarpFactor) -> Arc<FlowProblem> {
    let base = BaseManifold::FlatTorus { lengths: [TAU, TAU] };
    Arc::new(FlowProblem::with_default_policy(base, warp, Grid::Torus { n: [n, n], lengths: [TAU, TAU] }).unwrap())
}

fn disc(nr: usize, ntheta: usize) -> Arc<FlowProblem> {
    let grid = Grid::Polar { nr, ntheta, radius: 3.0 };
    Arc::new(FlowProblem::with_default_policy(BaseManifold::hyperbolic_polar(), WarpFactor::CoshR, grid).unwrap())
}

fn wave(x: ChartPoint) -> f64 {
    0.8 * sin(x.0[0]) * sin(x.0[1])
}

#[test]
fn flat_curvature_vanishes() {
    let base = BaseManifold::FlatTorus { lengths: [TAU, TAU] };
    let r = fd_riemann_check(&base, &WarpFactor::One, &sample_points(&base, 8, 1), FD_STEP).unwrap();
    assert!(r.max_relative_error <= 1e-10, "{r:?}");
    assert_eq!(r.checked, 8);
}

#[test]
fn hyperbolic_model_is_space_form() {
    let base = BaseManifold::hyperbolic_polar();
    let r = fd_riemann_check(&base, &WarpFactor::CoshR, &sample_points(&base, 10, 2), FD_STEP).unwrap();
    assert!(r.max_relative_error <= 1e-4, "{r:?}");
    assert!((r.sectional_min + 1.0).abs() <= 1e-4 && (r.sectional_max + 1.0).abs() <= 1e-4, "{r:?}");
    assert!(r.max_self_test_defect <= SELF_TEST_TOL);
}

#[test]
fn bump_mixed_components_vanish() {
    let base = BaseManifold::FlatTorus { lengths: [TAU, TAU] };
    for x in sample_points(&base, 6, 3) {
        let fd = fd_frame_curvature(&base, &BUMP, x, FD_STEP).unwrap();
        for i in 1..3 {
            for j in 1..3 {
                for k in 1..3 {
                    assert!(fd.r[0][i][j][k].abs() <= 1e-5);
                }
            }
        }
        // vertical planes carry -phi''/phi along x1 and nothing along x2
        let phi = 1.5 + 0.5 * sin(x.0[0]);
        let want = 0.5 * sin(x.0[0]) / phi;
        assert!((fd.r[1][0][1][0] - want).abs() <= 1e-5);
        assert!(fd.r[2][0][2][0].abs() <= 1e-5);
        let _ = Plane::Vertical(1);
    }
}

#[test]
fn every_catalog_pair_conforms() {
    for (base, warp) in catalog_pairs() {
        let r = fd_riemann_check(&base, &warp, &sample_points(&base, 6, 4), FD_STEP).unwrap();
        assert!(r.max_relative_error <= 1e-4, "{} {}: {r:?}", base.key(), warp.key());
    }
}

#[test]
fn pole_sample_is_rejected() {
    let base = BaseManifold::hyperbolic_polar();
    let pts = [ChartPoint::new(0.0, 0.0)];
    assert_eq!(fd_riemann_check(&base, &WarpFactor::CoshR, &pts, FD_STEP), Err(OracleError::NoUsablePoints));
}

#[test]
fn gradient_identity_cases() {
    let s = GraphState::from_fn(torus(16, BUMP), |_| 2.0).unwrap();
    assert_eq!(gradient_identity_check(&s).max_error, 0.0);

    let length = TAU;
    let circle = Arc::new(
        FlowProblem::with_default_policy(
            BaseManifold::FlatCircle { length },
            WarpFactor::One,
            Grid::Circle { n: 64, length },
        )
        .unwrap(),
    );
    // slope 0.3 in the interior of the sawtooth; the fields see it exactly
    let a = 0.3;
    let s = GraphState::from_fn(circle, |x| a * x.0[0]).unwrap();
    let f = crate::graphflow::GraphFields::compute(&s);
    let p = f.nodes[10].grad[0];
    assert!((p - a).abs() < 1e-12);
    let inv = 1.0 / f.nodes[10].metric[0][0];
    assert!((inv * p * p - a * a / (1.0 + a * a)).abs() < 1e-14);

    let s = GraphState::from_fn(torus(64, BUMP), wave).unwrap();
    assert!(gradient_identity_check(&s).max_error <= 1e-12);
}

#[test]
fn laplacian_identity_on_flat_torus() {
    let s = GraphState::from_fn(torus(16, WarpFactor::One), |_| -1.0).unwrap();
    assert_eq!(laplacian_identity_check(&s).max_error, 0.0);
    let s = GraphState::from_fn(torus(128, WarpFactor::One), wave).unwrap();
    assert!(laplacian_identity_check(&s).max_error <= 1e-3);
}

fn order(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).log2()
}

#[test]
fn laplacian_identity_converges_at_second_order() {
    let e: Vec<f64> = [32, 64]
        .iter()
        .map(|&n| laplacian_identity_check(&GraphState::from_fn(torus(n, BUMP), wave).unwrap()).max_error)
        .collect();
    assert!(order(e[0], e[1]) >= 1.5, "{e:?}");
    let radial = |x: ChartPoint| 0.8 * exp(-x.0[0] * x.0[0]);
    let e: Vec<f64> = [(128, 32), (256, 32)]
        .iter()
        .map(|&(nr, nt)| laplacian_identity_check(&GraphState::from_fn(disc(nr, nt), radial).unwrap()).max_error)
        .collect();
    assert!(order(e[0], e[1]) >= 1.5, "{e:?}");
}

fn parabola() -> GraphState {
    let length = 8.0;
    let p = Arc::new(
        FlowProblem::with_default_policy(
            BaseManifold::FlatCircle { length },
            WarpFactor::One,
            Grid::Circle { n: 8000, length },
        )
        .unwrap(),
    );
    GraphState::from_fn(p, |x| 0.5 * (x.0[0] - 4.0) * (x.0[0] - 4.0)).unwrap()
}

#[test]
fn first_variation_of_planar_parabola() {
    let s = parabola();
    let chi = |x: ChartPoint| exp(-4.0 * (x.0[0] - 4.3) * (x.0[0] - 4.3));
    let r = first_variation_check(&s, chi, 1e-5);
    assert!(r.relative_error <= 1e-3, "{r:?}");
    // pushing along the upward normal of a convex graph shrinks it
    assert!(r.derivative < 0.0 && r.predicted < 0.0);
}

#[test]
fn first_variation_of_constant_graph_vanishes() {
    let s = GraphState::from_fn(torus(32, BUMP), |_| 0.4).unwrap();
    let r = first_variation_check(&s, |x| sin(x.0[0]) + cos(x.0[1]), 1e-5);
    assert!(r.derivative.abs() < 1e-8 && r.predicted == 0.0);
}

#[test]
fn first_variation_on_warped_bases() {
    let s = GraphState::from_fn(torus(128, BUMP), wave).unwrap();
    let r = first_variation_check(&s, |x| 1.0 + 0.5 * cos(x.0[0] - x.0[1]), 1e-5);
    assert!(r.relative_error <= 1e-3, "{r:?}");
    let s = GraphState::from_fn(disc(96, 96), |x| 0.8 * exp(-x.0[0] * x.0[0])).unwrap();
    let chi = |x: ChartPoint| {
        let r = x.0[0];
        r * r * exp(-2.0 * r * r) * (1.0 + 0.3 * cos(x.0[1]))
    };
    let r = first_variation_check(&s, chi, 1e-5);
    assert!(r.relative_error <= 1e-3, "{r:?}");
}

#[test]
fn residual_of_constant_trajectory_is_zero() {
    let p = torus(16, BUMP);
    let states: Vec<GraphState> =
        (0..3).map(|k| GraphState::new(p.clone(), alloc::vec![0.5; 256], k as f64 * 0.1).unwrap()).collect();
    let r = v_evolution_residual(&states).unwrap();
    assert_eq!(r.len(), 1);
    assert_eq!(r[0].max_residual, 0.0);
    assert_eq!(v_evolution_residual(&states[..2]), Err(OracleError::BadSamples));
}

fn residual_on(problem: Arc<FlowProblem>, init: impl Fn(ChartPoint) -> f64, t: f64, ds: f64) -> f64 {
    let s = GraphState::from_fn(problem, init).unwrap();
    let settings = RunSettings {
        end_time: t + ds,
        schedule: SampleSchedule::Explicit { times: alloc::vec![t - ds, t] },
        dt_policy: DtPolicy::Cfl { fraction: 0.4 },
        scheme: Scheme::Euler,
        stop_tolerance: None,
    };
    let traj = run_flow(&s, &settings).unwrap();
    let r = v_evolution_residual(&traj.samples[1..]).unwrap();
    r[0].max_residual
}

#[test]
fn residual_converges_on_torus() {
    let coarse = residual_on(torus(32, BUMP), wave, 0.2, 0.02);
    let fine = residual_on(torus(64, BUMP), wave, 0.2, 0.01);
    assert!(coarse / fine >= 3.5, "{coarse} {fine}");
}

#[test]
fn residual_small_on_hyperbolic_disc() {
    let r = residual_on(disc(64, 64), |x| 0.8 * exp(-x.0[0] * x.0[0]), 0.5, 0.01);
    assert!(r < 1e-2, "{r}");
}

#[test]
fn residual_with_unit_hessian_weight_stalls() {
    let run = |n: usize, ds: f64| {
        let s = GraphState::from_fn(torus(n, BUMP), wave).unwrap();
        let settings = RunSettings {
            end_time: 0.2 + ds,
            schedule: SampleSchedule::Explicit { times: alloc::vec![0.2 - ds, 0.2] },
            dt_policy: DtPolicy::Cfl { fraction: 0.4 },
            scheme: Scheme::Euler,
            stop_tolerance: None,
        };
        let traj = run_flow(&s, &settings).unwrap();
        v_evolution_residual_weighted(&traj.samples[1..], 1.0).unwrap()[0].max_residual
    };
    let (coarse, fine) = (run(32, 0.02), run(64, 0.01));
    assert!(fine > 0.05 && coarse / fine < 1.2, "{coarse} {fine}");
}
