//! Pointwise geometry of the graph `x -> (x, u(x))` from the frame jet of
//! `u` and the warp data at the node.

use super::problem::NodeGeometry;
use super::stencil::Jet;
use crate::math::sqrt;

/// `v = sqrt(1 + phi^2 |grad u|^2)`.
#[inline(always)]
pub fn gradient_function(phi: f64, grad: [f64; 2]) -> f64 {
    sqrt(1.0 + phi * phi * (grad[0] * grad[0] + grad[1] * grad[1]))
}

/// Vertical speed of the flow in regular form:
/// `lap u - (phi^2/v^2) Hess u(grad u, grad u) + <grad u, grad phi>(v^2+1)/(phi v^2)`.
/// Returns the speed and `v^2`.
#[inline(always)]
pub fn vertical_speed(geo: &NodeGeometry, jet: &Jet) -> (f64, f64) {
    let [p1, p2] = jet.grad;
    let phi = geo.phi;
    let phi2 = phi * phi;
    let v2 = 1.0 + phi2 * (p1 * p1 + p2 * p2);
    let inv_v2 = 1.0 / v2;
    let hpp = jet.hess[0][0] * p1 * p1 + 2.0 * jet.hess[0][1] * p1 * p2 + jet.hess[1][1] * p2 * p2;
    let slope = p1 * geo.grad_phi[0] + p2 * geo.grad_phi[1];
    let speed = jet.laplacian() - phi2 * inv_v2 * hpp + slope * (v2 + 1.0) * inv_v2 / phi;
    (speed, v2)
}

/// Mean curvature with respect to the upward normal.
#[inline(always)]
pub fn mean_curvature_at(geo: &NodeGeometry, jet: &Jet) -> f64 {
    let [p1, p2] = jet.grad;
    let phi = geo.phi;
    let v = gradient_function(phi, jet.grad);
    let v2 = v * v;
    let hpp = jet.hess[0][0] * p1 * p1 + 2.0 * jet.hess[0][1] * p1 * p2 + jet.hess[1][1] * p2 * p2;
    let slope = p1 * geo.grad_phi[0] + p2 * geo.grad_phi[1];
    phi / v * (jet.laplacian() - phi * phi / v2 * hpp) + slope / v * (v2 + 1.0) / v2
}

/// Induced metric and its inverse in the frame `e_i = e^_i + u_i d_u`.
#[inline]
pub fn induced_metric(phi: f64, grad: [f64; 2]) -> ([[f64; 2]; 2], [[f64; 2]; 2]) {
    let v2 = 1.0 + phi * phi * (grad[0] * grad[0] + grad[1] * grad[1]);
    let mut g = [[0.0; 2]; 2];
    let mut gi = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let d = if i == j { 1.0 } else { 0.0 };
            let q = phi * phi * grad[i] * grad[j];
            g[i][j] = d + q;
            gi[i][j] = d - q / v2;
        }
    }
    (g, gi)
}

/// Second fundamental form components in the frame `e_i`.
#[inline]
pub fn second_fundamental_form_at(geo: &NodeGeometry, jet: &Jet) -> [[f64; 2]; 2] {
    let p = jet.grad;
    let phi = geo.phi;
    let v = gradient_function(phi, p);
    let slope = p[0] * geo.grad_phi[0] + p[1] * geo.grad_phi[1];
    let mut a = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            a[i][j] = (geo.grad_phi[i] * p[j]
                + phi * jet.hess[i][j]
                + phi * phi * p[i] * p[j] * slope
                + p[i] * geo.grad_phi[j])
                / v;
        }
    }
    a
}

/// `g^ik g^jl A_ij A_kl`.
#[inline]
pub fn norm_squared(a: &[[f64; 2]; 2], gi: &[[f64; 2]; 2]) -> f64 {
    let mut s = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    s += gi[i][k] * gi[j][l] * a[i][j] * a[k][l];
                }
            }
        }
    }
    s
}

/// `g^ij A_ij`.
#[inline]
pub fn trace(a: &[[f64; 2]; 2], gi: &[[f64; 2]; 2]) -> f64 {
    gi[0][0] * a[0][0] + gi[0][1] * a[0][1] + gi[1][0] * a[1][0] + gi[1][1] * a[1][1]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat() -> NodeGeometry {
        NodeGeometry { phi: 1.0, ..NodeGeometry::default() }
    }

    #[test]
    fn planar_parabola_vertex() {
        // u = x^2/2 at 0: u' = 0, u'' = 1, classical curvature 1
        let jet = Jet { grad: [0.0, 0.0], hess: [[1.0, 0.0], [0.0, 0.0]] };
        assert_eq!(mean_curvature_at(&flat(), &jet), 1.0);
        let a = second_fundamental_form_at(&flat(), &jet);
        assert_eq!(a[0][0], 1.0);
        let (_, gi) = induced_metric(1.0, jet.grad);
        assert_eq!(norm_squared(&a, &gi), 1.0);
    }

    #[test]
    fn planar_graph_curvature_off_vertex() {
        // classical u'' / (1 + u'^2)^(3/2) in one dimension
        for (p, q) in [(0.3, 1.0), (-2.0, 0.5), (5.0, -3.0)] {
            let jet = Jet { grad: [p, 0.0], hess: [[q, 0.0], [0.0, 0.0]] };
            let want = q / (1.0 + p * p as f64).powf(1.5);
            let h = mean_curvature_at(&flat(), &jet);
            assert!((h - want).abs() < 1e-14 * (1.0 + want.abs()));
            let (_, gi) = induced_metric(1.0, jet.grad);
            let a = second_fundamental_form_at(&flat(), &jet);
            assert!((norm_squared(&a, &gi) - want * want).abs() < 1e-13);
        }
    }

    #[test]
    fn flat_warp_terms_vanish_bitwise() {
        let jet = Jet { grad: [0.7, -1.3], hess: [[0.2, 0.4], [0.4, -1.1]] };
        let (speed, v2) = vertical_speed(&flat(), &jet);
        // classical graph flow: lap u - D2u(p, p) / (1 + |p|^2)
        let (p1, p2) = (0.7f64, -1.3f64);
        let hpp = 0.2 * p1 * p1 + 2.0 * 0.4 * p1 * p2 + -1.1 * p2 * p2;
        let classical = (0.2 + -1.1) - 1.0 / (1.0 + (p1 * p1 + p2 * p2)) * hpp;
        assert_eq!(v2, 1.0 + (p1 * p1 + p2 * p2));
        assert_eq!(speed, classical);
    }

    #[test]
    fn speed_is_v_over_phi_times_mean_curvature() {
        let geo = NodeGeometry { phi: 1.7, grad_phi: [0.3, -0.2], hess_phi: [[0.0; 2]; 2] };
        let jet = Jet { grad: [0.4, 0.9], hess: [[1.2, -0.3], [-0.3, 0.5]] };
        let (speed, v2) = vertical_speed(&geo, &jet);
        let h = mean_curvature_at(&geo, &jet);
        assert!((speed - v2.sqrt() / geo.phi * h).abs() < 1e-14);
    }

    proptest::proptest! {
        #[test]
        fn trace_of_second_fundamental_form_is_mean_curvature(
            phi in 0.2f64..3.0, g0 in -2.0f64..2.0, g1 in -2.0f64..2.0,
            p0 in -3.0f64..3.0, p1 in -3.0f64..3.0,
            h00 in -5.0f64..5.0, h01 in -5.0f64..5.0, h11 in -5.0f64..5.0,
        ) {
            let geo = NodeGeometry { phi, grad_phi: [g0, g1], hess_phi: [[0.0; 2]; 2] };
            let jet = Jet { grad: [p0, p1], hess: [[h00, h01], [h01, h11]] };
            let (g, gi) = induced_metric(phi, jet.grad);
            // g g^-1 = I
            for i in 0..2 { for j in 0..2 {
                let s = g[i][0] * gi[0][j] + g[i][1] * gi[1][j];
                let d = if i == j { 1.0 } else { 0.0 };
                proptest::prop_assert!((s - d).abs() < 1e-12);
            }}
            let a = second_fundamental_form_at(&geo, &jet);
            let h = mean_curvature_at(&geo, &jet);
            let scale = 1.0 + h.abs() + a.iter().flatten().map(|x| x.abs()).sum::<f64>();
            proptest::prop_assert!((trace(&a, &gi) - h).abs() < 1e-12 * scale);
            proptest::prop_assert!(gradient_function(phi, jet.grad) >= 1.0);
        }
    }
}
