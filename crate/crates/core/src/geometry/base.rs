use alloc::format;

use serde::{Deserialize, Serialize};

use super::spline::CubicSpline;
use crate::error::GeometryError;
use crate::math::{cosh, sinh};

/// A point in chart coordinates: `(x1, x2)` on flat charts, `(r, theta)` on
/// polar charts. One-dimensional bases ignore the second slot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChartPoint(pub [f64; 2]);

impl ChartPoint {
    pub fn new(a: f64, b: f64) -> Self {
        ChartPoint([a, b])
    }
}

/// Profile `f` of a rotationally symmetric metric `dr^2 + f(r)^2 dtheta^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "kebab-case")]
pub enum RadialProfile {
    /// `f(r) = r`
    Euclidean,
    /// `f(r) = sinh r`
    Hyperbolic,
    Tabulated { table: CubicSpline },
}

/// Tolerances for the smoothness conditions `f(0) = 0`, `f'(0) = 1` of a
/// tabulated profile.
pub const POLE_VALUE_TOL: f64 = 1e-9;
pub const POLE_SLOPE_TOL: f64 = 1e-2;

impl RadialProfile {
    pub fn tabulated(table: CubicSpline) -> Result<Self, GeometryError> {
        let (lo, _) = table.domain();
        if lo != 0.0 {
            return Err(GeometryError::PoleSmoothness(format!(
                "table must start at r = 0, starts at {lo}"
            )));
        }
        let [f0, d0, _, _] = table.eval(0.0);
        if f0.abs() > POLE_VALUE_TOL {
            return Err(GeometryError::PoleSmoothness(format!("f(0) = {f0}")));
        }
        if (d0 - 1.0).abs() > POLE_SLOPE_TOL {
            return Err(GeometryError::PoleSmoothness(format!("f'(0) = {d0}")));
        }
        let (xs, ys) = table.table();
        if let Some(k) = xs.iter().zip(ys).position(|(&x, &y)| x > 0.0 && y <= 0.0) {
            return Err(GeometryError::PoleSmoothness(format!(
                "f must be positive away from the pole, f({}) = {}",
                xs[k], ys[k]
            )));
        }
        Ok(RadialProfile::Tabulated { table })
    }

    /// `[f, f', f'', f''']` at `r`.
    pub fn jet(&self, r: f64) -> [f64; 4] {
        match self {
            RadialProfile::Euclidean => [r, 1.0, 0.0, 0.0],
            RadialProfile::Hyperbolic => {
                let (s, c) = (sinh(r), cosh(r));
                [s, c, s, c]
            }
            RadialProfile::Tabulated { table } => table.eval(r),
        }
    }

    pub fn max_radius(&self) -> f64 {
        match self {
            RadialProfile::Tabulated { table } => table.domain().1,
            _ => f64::INFINITY,
        }
    }
}

/// The base manifold `(M, g_M)` together with its chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BaseManifold {
    FlatCircle { length: f64 },
    FlatTorus { lengths: [f64; 2] },
    /// Pole-based surface in geodesic polar coordinates around the pole.
    Polar { profile: RadialProfile },
}

impl BaseManifold {
    pub fn euclidean_polar() -> Self {
        BaseManifold::Polar { profile: RadialProfile::Euclidean }
    }

    pub fn hyperbolic_polar() -> Self {
        BaseManifold::Polar { profile: RadialProfile::Hyperbolic }
    }

    /// Catalog key used in configuration files.
    pub fn key(&self) -> &'static str {
        match self {
            BaseManifold::FlatCircle { .. } => "flat-circle",
            BaseManifold::FlatTorus { .. } => "flat-torus",
            BaseManifold::Polar { profile: RadialProfile::Euclidean } => "euclidean-polar",
            BaseManifold::Polar { profile: RadialProfile::Hyperbolic } => "hyperbolic-polar",
            BaseManifold::Polar { profile: RadialProfile::Tabulated { .. } } => "rotational",
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            BaseManifold::FlatCircle { .. } => 1,
            _ => 2,
        }
    }

    pub fn is_compact(&self) -> bool {
        !matches!(self, BaseManifold::Polar { .. })
    }

    pub fn is_polar(&self) -> bool {
        matches!(self, BaseManifold::Polar { .. })
    }

    pub fn profile(&self) -> Option<&RadialProfile> {
        match self {
            BaseManifold::Polar { profile } => Some(profile),
            _ => None,
        }
    }

    /// `f(r)` and `f'(r)`; `(1, 0)` on flat charts, where the frame equals
    /// the coordinate basis.
    pub fn angular_scale(&self, x: ChartPoint) -> (f64, f64) {
        match self {
            BaseManifold::Polar { profile } => {
                let j = profile.jet(x.0[0]);
                (j[0], j[1])
            }
            _ => (1.0, 0.0),
        }
    }

    /// Chart metric components.
    pub fn metric(&self, x: ChartPoint) -> [[f64; 2]; 2] {
        match self {
            BaseManifold::FlatCircle { .. } => [[1.0, 0.0], [0.0, 0.0]],
            BaseManifold::FlatTorus { .. } => [[1.0, 0.0], [0.0, 1.0]],
            BaseManifold::Polar { profile } => {
                let f = profile.jet(x.0[0])[0];
                [[1.0, 0.0], [0.0, f * f]]
            }
        }
    }

    /// Gauss curvature at `x` (zero on flat charts and on the circle).
    pub fn gauss_curvature(&self, x: ChartPoint) -> f64 {
        match self {
            BaseManifold::Polar { profile: RadialProfile::Euclidean } => 0.0,
            BaseManifold::Polar { profile: RadialProfile::Hyperbolic } => -1.0,
            BaseManifold::Polar { profile } => {
                let [f, _, f2, _] = profile.jet(x.0[0]);
                -f2 / f
            }
            _ => 0.0,
        }
    }

    /// Lower bound for the base sectional curvature. Catalog values are
    /// analytic; tabulated profiles take the infimum of `-f''/f` over the
    /// samples. Non-compact bases are capped at zero.
    pub fn sectional_floor(&self, samples: &[ChartPoint]) -> f64 {
        match self {
            BaseManifold::FlatCircle { .. } | BaseManifold::FlatTorus { .. } => 0.0,
            BaseManifold::Polar { profile: RadialProfile::Euclidean } => 0.0,
            BaseManifold::Polar { profile: RadialProfile::Hyperbolic } => -1.0,
            BaseManifold::Polar { .. } => samples
                .iter()
                .filter(|p| p.0[0] > 0.0)
                .map(|&p| self.gauss_curvature(p))
                .fold(0.0, f64::min),
        }
    }

    pub fn distance_to_pole(&self, x: ChartPoint) -> Option<f64> {
        match self {
            BaseManifold::Polar { .. } => Some(x.0[0]),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        let bad = |name: &str, v: f64| {
            Err(GeometryError::InvalidTable(format!("{name} must be positive and finite, got {v}")))
        };
        match self {
            BaseManifold::FlatCircle { length } if !(length.is_finite() && *length > 0.0) => {
                bad("circle length", *length)
            }
            BaseManifold::FlatTorus { lengths } => {
                for &l in lengths {
                    if !(l.is_finite() && l > 0.0) {
                        return bad("torus period", l);
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn hyperbolic_profile_curvature() {
        let b = BaseManifold::hyperbolic_polar();
        assert_eq!(b.gauss_curvature(ChartPoint::new(0.7, 0.0)), -1.0);
        assert_eq!(b.sectional_floor(&[]), -1.0);
        let [f, d, _, _] = b.profile().unwrap().jet(0.0);
        assert_eq!((f, d), (0.0, 1.0));
        assert!(!b.is_compact());
        assert_eq!(b.key(), "hyperbolic-polar");
    }

    #[test]
    fn metric_positive_definite_on_polar() {
        let b = BaseManifold::hyperbolic_polar();
        for k in 1..50 {
            let g = b.metric(ChartPoint::new(0.06 * k as f64, 1.0));
            assert!(g[0][0] > 0.0 && g[1][1] > 0.0);
        }
    }

    #[test]
    fn tabulated_profile_checks_pole() {
        let xs: Vec<f64> = (0..40).map(|k| 0.1 * k as f64).collect();
        let good: Vec<f64> = xs.iter().map(|&r| libm::sinh(r)).collect();
        let p = RadialProfile::tabulated(CubicSpline::new(xs.clone(), good).unwrap()).unwrap();
        let b = BaseManifold::Polar { profile: p };
        let samples: Vec<ChartPoint> = (1..30).map(|k| ChartPoint::new(0.1 * k as f64, 0.0)).collect();
        let mu = b.sectional_floor(&samples);
        // spline second derivatives carry an O(h^2) error
        assert!((mu + 1.0).abs() < 5e-3, "{mu}");
        assert_eq!(b.key(), "rotational");

        let steep: Vec<f64> = xs.iter().map(|&r| 2.0 * r).collect();
        assert!(matches!(
            RadialProfile::tabulated(CubicSpline::new(xs.clone(), steep).unwrap()),
            Err(GeometryError::PoleSmoothness(_))
        ));
        let shifted: Vec<f64> = xs.iter().map(|&r| r + 0.1).collect();
        assert!(RadialProfile::tabulated(CubicSpline::new(xs, shifted).unwrap()).is_err());
    }

    #[test]
    fn sphere_cap_profile_has_positive_floor_capped() {
        // f = sin r: curvature +1, but non-compact bases report at most 0
        let xs: Vec<f64> = (0..30).map(|k| 0.05 * k as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|&r| libm::sin(r)).collect();
        let b = BaseManifold::Polar {
            profile: RadialProfile::tabulated(CubicSpline::new(xs, ys).unwrap()).unwrap(),
        };
        assert_eq!(b.sectional_floor(&[ChartPoint::new(0.5, 0.0)]), 0.0);
    }
}
