use super::base::{BaseManifold, ChartPoint, RadialProfile};
use super::warp::WarpFactor;
use crate::math::{abs, asinh, sinh};

/// Distance from `(x, u)` to the slice `u = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceDistance {
    pub distance: f64,
    /// `true` when the value is the true distance; otherwise it is the
    /// length of the vertical segment, an upper bound.
    pub exact: bool,
}

pub fn has_exact_distance(base: &BaseManifold, warp: &WarpFactor) -> bool {
    matches!(
        (base, warp),
        (BaseManifold::Polar { profile: RadialProfile::Hyperbolic }, WarpFactor::CoshR)
    )
}

pub fn distance_to_slice(base: &BaseManifold, warp: &WarpFactor, x: ChartPoint, u: f64) -> SliceDistance {
    let phi = warp.value(base, x);
    if has_exact_distance(base, warp) {
        SliceDistance { distance: asinh(phi * abs(sinh(u))), exact: true }
    } else {
        SliceDistance { distance: phi * abs(u), exact: false }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{cosh, sqrt, TAU};

    // hyperboloid model: p = (cosh r cosh u, cosh r sinh u, sinh r theta),
    // the slice u = 0 is {p1 = 0}, and the distance to it is asinh |p1|
    fn hyperboloid_distance(r: f64, u: f64) -> f64 {
        let p = [cosh(r) * cosh(u), cosh(r) * sinh(u), sinh(r)];
        // Minkowski norm check
        let q = -p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
        assert!((q + 1.0).abs() < 1e-9 * p[0] * p[0]);
        asinh(abs(p[1]))
    }

    #[test]
    fn on_slice_is_zero() {
        let b = BaseManifold::FlatTorus { lengths: [TAU, TAU] };
        let d = distance_to_slice(&b, &WarpFactor::One, ChartPoint::new(1.0, 2.0), 0.0);
        assert_eq!(d.distance, 0.0);
        assert!(!d.exact);
    }

    #[test]
    fn axis_is_unit_speed_geodesic() {
        let b = BaseManifold::hyperbolic_polar();
        let d = distance_to_slice(&b, &WarpFactor::CoshR, ChartPoint::new(0.0, 0.0), 1.0);
        assert!(d.exact);
        assert!((d.distance - 1.0).abs() < 1e-15);
    }

    #[test]
    fn matches_hyperboloid_oracle() {
        let b = BaseManifold::hyperbolic_polar();
        let d = distance_to_slice(&b, &WarpFactor::CoshR, ChartPoint::new(1.0, 0.0), 0.5);
        let want = hyperboloid_distance(1.0, 0.5);
        assert!((d.distance - want).abs() < 1e-14);
        assert!((sinh(d.distance) - cosh(1.0) * sinh(0.5)).abs() < 1e-14);
        let _ = sqrt(2.0);
    }

    proptest::proptest! {
        #[test]
        fn exact_never_exceeds_vertical_length(r in 0.0f64..4.0, u in -3.0f64..3.0, th in 0.0f64..6.28) {
            let b = BaseManifold::hyperbolic_polar();
            let x = ChartPoint::new(r, th);
            let d = distance_to_slice(&b, &WarpFactor::CoshR, x, u);
            proptest::prop_assert!(d.distance <= cosh(r) * abs(u) * (1.0 + 1e-14) + 1e-300);
            let oracle = hyperboloid_distance(r, u);
            proptest::prop_assert!((d.distance - oracle).abs() <= 1e-12 * (1.0 + oracle));
        }
    }
}
