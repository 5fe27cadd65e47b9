//! Closed forms of the orbit half-plane `(r, u)` of hyperbolic space: the
//! hyperboloid embedding, the equidistant chart and the geodesic (Fermi)
//! chart `(rho, l)` over the slice `u = 0`.

use crate::math::{asinh, cos, cosh, sin, sinh, sqrt};

/// Point of the hyperboloid `-x0^2 + x1^2 + x2^2 = -1` over `(r, u)` in the
/// meridian plane of the rotation (`theta = +1`).
pub fn hyperboloid(r: f64, u: f64) -> [f64; 3] {
    [cosh(r) * cosh(u), cosh(r) * sinh(u), sinh(r)]
}

fn minkowski(a: [f64; 3], b: [f64; 3]) -> f64 {
    -a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Largest deviation of the numerically pulled-back metric at `(r, u)` from
/// `dr^2 + cosh^2 r du^2`, using centred differences of step `h`. The orbit
/// of a point under rotation of the last coordinates is a round sphere of
/// radius `sinh r`.
pub fn pullback_defect(r: f64, u: f64, h: f64) -> f64 {
    let d = |f: &dyn Fn(f64) -> [f64; 3], x: f64| {
        let (p, m) = (f(x + h), f(x - h));
        [(p[0] - m[0]) / (2.0 * h), (p[1] - m[1]) / (2.0 * h), (p[2] - m[2]) / (2.0 * h)]
    };
    let pr = d(&|s| hyperboloid(s, u), r);
    let pu = d(&|s| hyperboloid(r, s), u);
    let c = cosh(r);
    let e = [
        (minkowski(pr, pr) - 1.0).abs(),
        minkowski(pr, pu).abs(),
        (minkowski(pu, pu) - c * c).abs(),
    ];
    e.into_iter().fold(0.0, f64::max)
}

/// Signed distance to the slice: `sinh l = cosh r sinh u`.
pub fn slice_distance(r: f64, u: f64) -> f64 {
    asinh(cosh(r) * sinh(u))
}

/// `(rho, l)` of the geodesic chart.
pub fn to_geodesic(r: f64, u: f64) -> (f64, f64) {
    let l = slice_distance(r, u);
    (asinh(sinh(r) / cosh(l)), l)
}

/// Inverse of [`to_geodesic`].
pub fn from_geodesic(rho: f64, l: f64) -> (f64, f64) {
    let r = asinh(sinh(rho) * cosh(l));
    (r, asinh(sinh(l) / cosh(r)))
}

/// Unit gradient of the slice distance in the orthonormal frame
/// `(d_r, d_u / cosh r)`.
pub fn slice_distance_gradient(r: f64, u: f64) -> [f64; 2] {
    let s = cosh(r) * sinh(u);
    let cl = sqrt(1.0 + s * s);
    [sinh(r) * sinh(u) / cl, cosh(u) / cl]
}

/// Profile of the geodesic sphere of radius `rho0` about the origin, from
/// the top of the axis (`psi = 0`) to its bottom (`psi = pi`).
pub fn sphere_point(rho0: f64, psi: f64) -> (f64, f64) {
    let r = asinh(sinh(rho0) * sin(psi));
    (r, asinh(sinh(rho0) * cos(psi) / cosh(r)))
}
