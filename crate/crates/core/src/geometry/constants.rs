use serde::{Deserialize, Serialize};

use super::ambient::{ambient_curvature, curvature_derivative_norm};
use super::base::{BaseManifold, ChartPoint};
use super::warp::WarpFactor;
use crate::error::GeometryError;
use crate::math::{exp, powi, sqrt, sym2_eigenvalues};

/// Which expression fixes the `psi` parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum DeltaRule {
    Compact,
    /// Non-compact base, gradient function bounded on the initial graph.
    BoundedGradient,
    /// Non-compact base, unbounded initial gradient: the supremum is taken
    /// over a local set and shrunk by `(1 - gamma)^4`.
    LocalGradient { gamma: f64 },
}

/// Every constant the bound monitors consume, computed once per run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateConstants {
    pub dimension: usize,
    pub compact: bool,
    /// sup |grad phi| / phi
    pub warp_log_gradient_sup: f64,
    /// lower pinching of Hess(phi) / phi
    pub warp_hessian_ratio_min: f64,
    /// upper pinching of Hess(phi) / phi
    pub warp_hessian_ratio_max: f64,
    /// lower bound of the base sectional curvature
    pub base_sectional_floor: f64,
    /// growth exponent of the compact gradient bound (per unit of n - 1)
    pub pinching_excess: f64,
    /// positive part of `pinching_excess`
    pub pinching_excess_plus: f64,
    pub horizon: f64,
    pub initial_gradient_sup: f64,
    pub delta_rule: DeltaRule,
    /// parameter of `psi(v) = v^2 / (1 - delta v^2)`
    pub psi_parameter: f64,
    /// sup of the ambient Ricci operator norm
    pub ricci_sup: f64,
    /// sup of the norm of the covariant derivative of ambient curvature
    pub curvature_derivative_sup: f64,
    /// linear growth constant of the curvature quantity
    pub curvature_growth: f64,
    /// square-root growth constant of the curvature quantity
    pub curvature_forcing: f64,
    /// true when an extreme of the warp quotients sits on the outermost
    /// sampled ring of a non-compact base, so the truncated value may not
    /// bound the true supremum
    pub extremes_at_truncation_edge: bool,
}

impl EstimateConstants {
    /// Exponential rate of the gradient bound.
    pub fn gradient_rate(&self) -> f64 {
        let n1 = (self.dimension - 1) as f64;
        if self.compact {
            n1 * self.pinching_excess
        } else {
            2.0 * powi(self.warp_log_gradient_sup, 2) + n1 * self.pinching_excess_plus
        }
    }

    pub fn gradient_bound(&self, t: f64) -> f64 {
        self.initial_gradient_sup * exp(self.gradient_rate() * t)
    }

    pub fn psi(&self, v: f64) -> Option<f64> {
        let denom = 1.0 - self.psi_parameter * v * v;
        (denom > 0.0).then(|| v * v / denom)
    }

    /// Ceiling for the running maximum of `psi(v) |A|^2`.
    pub fn curvature_ceiling(&self, initial_max: f64) -> f64 {
        let stationary = (self.curvature_growth + self.curvature_forcing) / (2.0 * self.psi_parameter);
        initial_max.max(stationary).max(1.0)
    }

    /// Constant of the time-weighted curvature bound
    /// `t |A|^2 <= alpha (1 + t)`.
    pub fn regularization_constant(&self) -> f64 {
        let kc = (self.curvature_growth + self.curvature_forcing).max(1.0);
        (1.0 - self.psi_parameter) * kc / (2.0 * self.psi_parameter)
    }
}

/// Inputs beyond geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantsRequest {
    pub initial_gradient_sup: f64,
    pub horizon: f64,
    /// override of the automatic rule; `None` picks compact or bounded
    pub delta_rule: Option<DeltaRule>,
}

pub fn estimate_constants(
    base: &BaseManifold,
    warp: &WarpFactor,
    samples: &[ChartPoint],
    request: ConstantsRequest,
) -> Result<EstimateConstants, GeometryError> {
    if samples.is_empty() {
        return Err(GeometryError::EmptySampling);
    }
    let v0 = request.initial_gradient_sup;
    if !(v0 >= 1.0) {
        return Err(GeometryError::GradientBelowOne(v0));
    }
    let horizon = request.horizon;
    if !(horizon > 0.0) {
        return Err(GeometryError::NonPositiveHorizon(horizon));
    }
    warp.check_compatible(base)?;
    let n = base.dimension();
    let compact = base.is_compact();

    let mut eta: f64 = 0.0;
    let mut mu1 = f64::INFINITY;
    let mut mu2 = f64::NEG_INFINITY;
    let mut ricci: f64 = 0.0;
    let mut dcurv: f64 = 0.0;
    let mut eta_at = 0usize;
    let mut mu1_at = 0usize;
    let mut mu2_at = 0usize;
    let mut outer_r = f64::NEG_INFINITY;
    for (index, &x) in samples.iter().enumerate() {
        let jet = warp.jet(base, x);
        if !(jet.value > 0.0) {
            return Err(GeometryError::NonPositiveWarp { index, value: jet.value });
        }
        let p = jet.value;
        let g = sqrt(jet.grad[0] * jet.grad[0] + jet.grad[1] * jet.grad[1]) / p;
        if g > eta {
            eta = g;
            eta_at = index;
        }
        let (lo, hi) = if n == 1 {
            (jet.hess[0][0] / p, jet.hess[0][0] / p)
        } else {
            sym2_eigenvalues([
                [jet.hess[0][0] / p, jet.hess[0][1] / p],
                [jet.hess[1][0] / p, jet.hess[1][1] / p],
            ])
        };
        if lo < mu1 {
            mu1 = lo;
            mu1_at = index;
        }
        if hi > mu2 {
            mu2 = hi;
            mu2_at = index;
        }
        if base.is_polar() {
            outer_r = outer_r.max(x.0[0]);
            if x.0[0] <= 0.0 {
                continue;
            }
        }
        let curv = ambient_curvature(base, warp, x)?;
        ricci = ricci.max(curv.ricci_norm());
        dcurv = dcurv.max(curvature_derivative_norm(base, warp, x)?);
    }
    let mu = base.sectional_floor(samples);
    let nu = if n >= 2 { (-(n as f64) * mu1 + mu2) / (n as f64 - 1.0) - mu } else { 0.0 };
    let nu_plus = nu.max(0.0);

    let rule = request.delta_rule.unwrap_or(if compact { DeltaRule::Compact } else { DeltaRule::BoundedGradient });
    let n1 = (n - 1) as f64;
    let delta = match rule {
        DeltaRule::Compact => 1.0 / (2.0 * v0 * v0 * exp(2.0 * n1 * nu * horizon)),
        DeltaRule::BoundedGradient => {
            1.0 / (2.0 * v0 * v0 * exp(2.0 * (2.0 * eta * eta + n1 * nu_plus) * horizon))
        }
        DeltaRule::LocalGradient { gamma } => {
            let shrink = powi(1.0 - gamma, 4);
            shrink / (2.0 * v0 * v0 * exp(2.0 * (2.0 * eta * eta + n1 * nu_plus) * horizon))
        }
    };
    let k_const = 4.0 * eta * eta / delta + 4.0 * (1.0 - 2.0 * delta) * nu_plus + (2.0 + 8.0 * n as f64) * ricci;
    let c_const = 4.0 / sqrt(delta) * dcurv;

    let edge = !compact && {
        let on_edge = |i: usize| (samples[i].0[0] - outer_r).abs() <= 1e-12 * outer_r.max(1.0);
        (eta > 0.0 && on_edge(eta_at)) || on_edge(mu1_at) || on_edge(mu2_at)
    };

    Ok(EstimateConstants {
        dimension: n,
        compact,
        warp_log_gradient_sup: eta,
        warp_hessian_ratio_min: mu1,
        warp_hessian_ratio_max: mu2,
        base_sectional_floor: mu,
        pinching_excess: nu,
        pinching_excess_plus: nu_plus,
        horizon,
        initial_gradient_sup: v0,
        delta_rule: rule,
        psi_parameter: delta,
        ricci_sup: ricci,
        curvature_derivative_sup: dcurv,
        curvature_growth: k_const,
        curvature_forcing: c_const,
        extremes_at_truncation_edge: edge,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{tanh, TAU};
    use alloc::vec::Vec;

    fn torus_samples(m: usize) -> Vec<ChartPoint> {
        let mut out = Vec::new();
        for i in 0..m {
            for j in 0..m {
                out.push(ChartPoint::new(TAU * i as f64 / m as f64, TAU * j as f64 / m as f64));
            }
        }
        out
    }

    fn disc_samples(nr: usize, radius: f64) -> Vec<ChartPoint> {
        let h = radius / (nr as f64 - 0.5);
        (0..nr)
            .flat_map(|i| (0..8).map(move |j| ChartPoint::new((i as f64 + 0.5) * h, TAU * j as f64 / 8.0)))
            .collect()
    }

    fn req(v0: f64, t: f64) -> ConstantsRequest {
        ConstantsRequest { initial_gradient_sup: v0, horizon: t, delta_rule: None }
    }

    #[test]
    fn flat_product_constants() {
        let b = BaseManifold::FlatTorus { lengths: [TAU, TAU] };
        let c = estimate_constants(&b, &WarpFactor::One, &torus_samples(8), req(1.0, 3.0)).unwrap();
        assert_eq!(c.warp_log_gradient_sup, 0.0);
        assert_eq!((c.warp_hessian_ratio_min, c.warp_hessian_ratio_max), (0.0, 0.0));
        assert_eq!(c.base_sectional_floor, 0.0);
        assert_eq!((c.pinching_excess, c.pinching_excess_plus), (0.0, 0.0));
        assert_eq!(c.psi_parameter, 0.5);
        assert_eq!((c.curvature_growth, c.curvature_forcing), (0.0, 0.0));
        assert_eq!(c.curvature_ceiling(0.3), 1.0);
    }

    #[test]
    fn hyperbolic_model_constants() {
        let b = BaseManifold::hyperbolic_polar();
        let samples = disc_samples(32, 3.0);
        let c = estimate_constants(&b, &WarpFactor::CoshR, &samples, req(1.2, 2.0)).unwrap();
        assert!((c.warp_hessian_ratio_min - 1.0).abs() < 1e-12);
        assert!((c.warp_hessian_ratio_max - 1.0).abs() < 1e-12);
        assert_eq!(c.base_sectional_floor, -1.0);
        assert!(c.pinching_excess.abs() < 1e-12);
        assert!((c.warp_log_gradient_sup - tanh(3.0)).abs() < 1e-12);
        assert!((c.ricci_sup - 2.0).abs() < 1e-12);
        assert!(c.curvature_derivative_sup < 1e-5);
        assert_eq!(c.delta_rule, DeltaRule::BoundedGradient);
        // eta keeps growing towards the edge: flagged
        assert!(c.extremes_at_truncation_edge);
    }

    #[test]
    fn bump_torus_pinching() {
        let b = BaseManifold::FlatTorus { lengths: [TAU, TAU] };
        let w = WarpFactor::TorusBump { offset: 1.5, amplitude: 0.5, mode: 1 };
        let c = estimate_constants(&b, &w, &torus_samples(64), req(1.9, 2.0)).unwrap();
        // Hess(phi)/phi = diag(-0.5 sin x / phi, 0): extremes -0.25 and 0.5
        assert!((c.warp_hessian_ratio_min + 0.25).abs() < 1e-12);
        assert!((c.warp_hessian_ratio_max - 0.5).abs() < 1e-12);
        assert!((c.pinching_excess - 1.0).abs() < 1e-12);
        let want_delta = 1.0 / (2.0 * 1.9 * 1.9 * (4.0f64).exp());
        assert!((c.psi_parameter - want_delta).abs() < 1e-15);
        assert!((c.ricci_sup - 0.5).abs() < 1e-12);

        // the pinching holds on a 4x denser sampling
        let dense = torus_samples(256);
        for x in &dense {
            let j = w.jet(&b, *x);
            let (lo, hi) = sym2_eigenvalues([
                [j.hess[0][0] / j.value, j.hess[0][1] / j.value],
                [j.hess[1][0] / j.value, j.hess[1][1] / j.value],
            ]);
            assert!(lo >= c.warp_hessian_ratio_min - 1e-12 && hi <= c.warp_hessian_ratio_max + 1e-12);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let b = BaseManifold::FlatTorus { lengths: [TAU, TAU] };
        let w = WarpFactor::TorusBump { offset: 0.2, amplitude: 0.5, mode: 1 };
        assert!(matches!(
            estimate_constants(&b, &w, &torus_samples(8), req(1.0, 1.0)),
            Err(GeometryError::NonPositiveWarp { .. })
        ));
        assert!(estimate_constants(&b, &WarpFactor::One, &[], req(1.0, 1.0)).is_err());
        assert!(estimate_constants(&b, &WarpFactor::One, &torus_samples(2), req(0.5, 1.0)).is_err());
        assert!(estimate_constants(&b, &WarpFactor::One, &torus_samples(2), req(1.0, 0.0)).is_err());
    }

    #[test]
    fn delta_never_exceeds_half() {
        let b = BaseManifold::hyperbolic_polar();
        let c = estimate_constants(&b, &WarpFactor::CoshR, &disc_samples(8, 1.0), req(1.0, 0.1)).unwrap();
        assert!(c.psi_parameter > 0.0 && c.psi_parameter <= 0.5);
        let local = estimate_constants(
            &b,
            &WarpFactor::CoshR,
            &disc_samples(8, 1.0),
            ConstantsRequest { delta_rule: Some(DeltaRule::LocalGradient { gamma: 0.5 }), ..req(1.0, 0.1) },
        )
        .unwrap();
        assert!((local.psi_parameter / c.psi_parameter - 0.0625).abs() < 1e-12);
    }

    proptest::proptest! {
        #[test]
        fn enlarging_samples_is_monotone(split in 1usize..60, seed in 0u64..1000) {
            let b = BaseManifold::FlatTorus { lengths: [TAU, TAU] };
            let w = WarpFactor::TorusBump { offset: 1.5, amplitude: 0.5, mode: 1 };
            let mut pts = torus_samples(8);
            // deterministic shuffle
            let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
            for i in (1..pts.len()).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                pts.swap(i, (s >> 33) as usize % (i + 1));
            }
            let small = estimate_constants(&b, &w, &pts[..split], req(1.0, 1.0)).unwrap();
            let big = estimate_constants(&b, &w, &pts, req(1.0, 1.0)).unwrap();
            proptest::prop_assert!(big.warp_log_gradient_sup >= small.warp_log_gradient_sup);
            proptest::prop_assert!(big.warp_hessian_ratio_max >= small.warp_hessian_ratio_max);
            proptest::prop_assert!(big.warp_hessian_ratio_min <= small.warp_hessian_ratio_min);
        }
    }
}
