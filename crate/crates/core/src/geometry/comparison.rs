use crate::math::{cos, cosh, sin, sinh, sqrt};

/// Solutions of `s'' + lambda s = 0` with `s(0) = 0, s'(0) = 1` and
/// `c = s'`, evaluated at `t`.
///
/// Uses a Taylor expansion when `|lambda| t^2` is tiny so the `lambda -> 0`
/// limit is continuous.
pub fn comparison_fn(lambda: f64, t: f64) -> (f64, f64) {
    let x = lambda * t * t;
    if x.abs() < 1e-4 {
        // s = t (1 - x/6 + x^2/120 - x^3/5040), c = 1 - x/2 + x^2/24 - x^3/720
        let s = t * (1.0 - x / 6.0 * (1.0 - x / 20.0 * (1.0 - x / 42.0)));
        let c = 1.0 - x / 2.0 * (1.0 - x / 12.0 * (1.0 - x / 30.0));
        return (s, c);
    }
    if lambda > 0.0 {
        let k = sqrt(lambda);
        (sin(k * t) / k, cos(k * t))
    } else {
        let k = sqrt(-lambda);
        (sinh(k * t) / k, cosh(k * t))
    }
}

/// `s_lambda(t)` alone.
pub fn comparison_s(lambda: f64, t: f64) -> f64 {
    comparison_fn(lambda, t).0
}

#[cfg(test)]
mod tests {
    use super::*;

    // classical RK4 on (s, c)' = (c, -lambda s)
    fn rk4(lambda: f64, t: f64, steps: usize) -> (f64, f64) {
        let h = t / steps as f64;
        let (mut s, mut c) = (0.0f64, 1.0f64);
        let f = |s: f64, c: f64| (c, -lambda * s);
        for _ in 0..steps {
            let k1 = f(s, c);
            let k2 = f(s + 0.5 * h * k1.0, c + 0.5 * h * k1.1);
            let k3 = f(s + 0.5 * h * k2.0, c + 0.5 * h * k2.1);
            let k4 = f(s + h * k3.0, c + h * k3.1);
            s += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
            c += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        }
        (s, c)
    }

    #[test]
    fn flat_case_is_linear() {
        assert_eq!(comparison_fn(0.0, 3.0), (3.0, 1.0));
    }

    #[test]
    fn unit_negative_curvature() {
        let (s, c) = comparison_fn(-1.0, 1.0);
        assert!((s - 1.1752011936438014).abs() < 1e-15);
        assert!((c - 1.5430806348152437).abs() < 1e-15);
    }

    #[test]
    fn lambda_minus_four_matches_rk4() {
        let oracle = rk4(-4.0, 0.5, 4000);
        // frozen from the RK4 oracle: sinh(1)/2, cosh(1)
        assert!((oracle.0 - 0.5876005968219007).abs() < 1e-12);
        assert!((oracle.1 - 1.5430806348152437).abs() < 1e-12);
        let (s, c) = comparison_fn(-4.0, 0.5);
        assert!((s - oracle.0).abs() < 1e-12);
        assert!((c - oracle.1).abs() < 1e-12);
    }

    #[test]
    fn continuous_through_zero() {
        for t in [0.1, 1.0, 3.0] {
            let lo = comparison_fn(-1e-9, t);
            let hi = comparison_fn(1e-9, t);
            let mid = comparison_fn(0.0, t);
            assert!((lo.0 - mid.0).abs() < 1e-8 && (hi.0 - mid.0).abs() < 1e-8);
            assert!((lo.1 - mid.1).abs() < 1e-8 && (hi.1 - mid.1).abs() < 1e-8);
        }
        // series branch agrees with closed form at the switch point
        let t = 1.0;
        let lam = 0.99e-4;
        let (s, c) = comparison_fn(lam, t);
        let k = lam.sqrt();
        assert!((s - (k * t).sin() / k).abs() < 1e-15);
        assert!((c - (k * t).cos()).abs() < 1e-15);
    }

    #[test]
    fn rk4_agrees_on_positive_lambda() {
        let oracle = rk4(2.0, 1.3, 4000);
        let (s, c) = comparison_fn(2.0, 1.3);
        assert!((s - oracle.0).abs() < 1e-11 && (c - oracle.1).abs() < 1e-11);
    }

    proptest::proptest! {
        #[test]
        fn pythagorean_and_doubling(lam_idx in 0usize..3, t in 0.0f64..5.0) {
            let lambda = [-4.0, -1.0, 0.0][lam_idx];
            let (s, c) = comparison_fn(lambda, t);
            let scale = 1.0 + c * c;
            proptest::prop_assert!((c * c + lambda * s * s - 1.0).abs() <= 1e-12 * scale);
            let (s4, c4) = comparison_fn(4.0 * lambda, t);
            proptest::prop_assert!((c4 - (c * c - lambda * s * s)).abs() <= 1e-12 * scale);
            proptest::prop_assert!((s4 - s * c).abs() <= 1e-12 * (1.0 + (s * c).abs()));
        }

        #[test]
        fn derivative_is_c(lambda in -4.0f64..4.0, t in 0.01f64..3.0) {
            let h = 1e-5;
            let d = (comparison_s(lambda, t + h) - comparison_s(lambda, t - h)) / (2.0 * h);
            let (_, c) = comparison_fn(lambda, t);
            proptest::prop_assert!((d - c).abs() < 1e-6 * (1.0 + c.abs()));
        }
    }
}
