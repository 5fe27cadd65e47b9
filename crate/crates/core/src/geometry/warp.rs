use serde::{Deserialize, Serialize};

use super::base::{BaseManifold, ChartPoint};
use super::spline::CubicSpline;
use crate::error::GeometryError;
use crate::math::{cos, cosh, sin, sinh, TAU};

/// The warping function `phi > 0` on the base.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WarpFactor {
    /// `phi = 1`: Riemannian product.
    One,
    /// `phi = cosh r` with `r` the distance to the pole.
    CoshR,
    /// `phi = offset + amplitude * sin(2 pi mode x1 / L1)` on flat charts.
    TorusBump { offset: f64, amplitude: f64, mode: u32 },
    /// Radial `phi(r)` from a table.
    TabulatedRadial { table: CubicSpline },
}

/// Value, frame gradient and frame Hessian of the warp at a point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct WarpJet {
    pub value: f64,
    pub grad: [f64; 2],
    pub hess: [[f64; 2]; 2],
}

impl WarpFactor {
    pub fn key(&self) -> &'static str {
        match self {
            WarpFactor::One => "one",
            WarpFactor::CoshR => "cosh-r",
            WarpFactor::TorusBump { .. } => "torus-bump",
            WarpFactor::TabulatedRadial { .. } => "tabulated-radial",
        }
    }

    pub fn is_radial(&self) -> bool {
        matches!(self, WarpFactor::CoshR | WarpFactor::TabulatedRadial { .. })
    }

    pub fn check_compatible(&self, base: &BaseManifold) -> Result<(), GeometryError> {
        let ok = match self {
            WarpFactor::One => true,
            WarpFactor::CoshR | WarpFactor::TabulatedRadial { .. } => base.is_polar(),
            WarpFactor::TorusBump { .. } => !base.is_polar(),
        };
        if ok {
            Ok(())
        } else {
            Err(GeometryError::UnsupportedPair { base: base.key(), warp: self.key() })
        }
    }

    /// `[phi, phi', phi'']` of a radial warp as a function of `r`.
    pub fn radial_jet(&self, r: f64) -> Option<[f64; 3]> {
        match self {
            WarpFactor::CoshR => Some([cosh(r), sinh(r), cosh(r)]),
            WarpFactor::TabulatedRadial { table } => {
                let [v, d1, d2, _] = table.eval(r);
                Some([v, d1, d2])
            }
            _ => None,
        }
    }

    pub fn value(&self, base: &BaseManifold, x: ChartPoint) -> f64 {
        match self {
            WarpFactor::One => 1.0,
            WarpFactor::CoshR => cosh(x.0[0]),
            WarpFactor::TabulatedRadial { table } => table.eval(x.0[0])[0],
            WarpFactor::TorusBump { offset, amplitude, mode } => {
                let k = bump_wavenumber(base, *mode);
                offset + amplitude * sin(k * x.0[0])
            }
        }
    }

    /// Frame components of value, gradient and Hessian. On polar charts the
    /// frame is `(d_r, d_theta / f)` and the Hessian carries the chart
    /// connection term `(f'/f) phi'` in the angular slot; at `r = 0` its
    /// limit `phi''(0)` is used.
    pub fn jet(&self, base: &BaseManifold, x: ChartPoint) -> WarpJet {
        match self {
            WarpFactor::One => WarpJet { value: 1.0, ..WarpJet::default() },
            WarpFactor::TorusBump { offset, amplitude, mode } => {
                let k = bump_wavenumber(base, *mode);
                let (s, c) = (sin(k * x.0[0]), cos(k * x.0[0]));
                WarpJet {
                    value: offset + amplitude * s,
                    grad: [amplitude * k * c, 0.0],
                    hess: [[-amplitude * k * k * s, 0.0], [0.0, 0.0]],
                }
            }
            WarpFactor::CoshR | WarpFactor::TabulatedRadial { .. } => {
                let r = x.0[0];
                let [p, dp, ddp] = self.radial_jet(r).unwrap_or([1.0, 0.0, 0.0]);
                let angular = if r > 0.0 {
                    let (f, df) = base.angular_scale(x);
                    df / f * dp
                } else {
                    ddp
                };
                WarpJet { value: p, grad: [dp, 0.0], hess: [[ddp, 0.0], [0.0, angular]] }
            }
        }
    }
}

fn bump_wavenumber(base: &BaseManifold, mode: u32) -> f64 {
    let period = match base {
        BaseManifold::FlatCircle { length } => *length,
        BaseManifold::FlatTorus { lengths } => lengths[0],
        BaseManifold::Polar { .. } => TAU,
    };
    TAU * mode as f64 / period
}

#[cfg(test)]
mod tests {
    use super::*;

    fn torus() -> BaseManifold {
        BaseManifold::FlatTorus { lengths: [TAU, TAU] }
    }

    #[test]
    fn pairing_rules() {
        let bump = WarpFactor::TorusBump { offset: 1.5, amplitude: 0.5, mode: 1 };
        assert!(bump.check_compatible(&torus()).is_ok());
        assert!(bump.check_compatible(&BaseManifold::hyperbolic_polar()).is_err());
        assert!(WarpFactor::CoshR.check_compatible(&torus()).is_err());
        assert!(WarpFactor::CoshR.check_compatible(&BaseManifold::euclidean_polar()).is_ok());
        assert!(WarpFactor::One.check_compatible(&BaseManifold::FlatCircle { length: 1.0 }).is_ok());
    }

    #[test]
    fn cosh_hessian_is_phi_times_metric_on_hyperbolic_plane() {
        let b = BaseManifold::hyperbolic_polar();
        for r in [0.1, 0.9, 2.5] {
            let j = WarpFactor::CoshR.jet(&b, ChartPoint::new(r, 0.3));
            assert!((j.hess[0][0] / j.value - 1.0).abs() < 1e-14);
            assert!((j.hess[1][1] / j.value - 1.0).abs() < 1e-14);
            assert!((j.grad[0] / j.value - libm::tanh(r)).abs() < 1e-15);
        }
    }

    // frame derivatives by centered differences in the chart, second order in h
    fn fd_jet(w: &WarpFactor, b: &BaseManifold, x: ChartPoint, h: f64) -> ([f64; 2], [[f64; 2]; 2]) {
        let at = |a: f64, c: f64| w.value(b, ChartPoint::new(x.0[0] + a, x.0[1] + c));
        let (f, df) = b.angular_scale(x);
        let d1 = (at(h, 0.0) - at(-h, 0.0)) / (2.0 * h);
        let d2 = (at(0.0, h) - at(0.0, -h)) / (2.0 * h);
        let d11 = (at(h, 0.0) - 2.0 * at(0.0, 0.0) + at(-h, 0.0)) / (h * h);
        let d22 = (at(0.0, h) - 2.0 * at(0.0, 0.0) + at(0.0, -h)) / (h * h);
        let d12 = (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4.0 * h * h);
        if b.is_polar() {
            let g = [d1, d2 / f];
            let h12 = (d12 - df / f * d2) / f;
            let h22 = (d22 + f * df * d1) / (f * f);
            (g, [[d11, h12], [h12, h22]])
        } else {
            ([d1, d2], [[d11, d12], [d12, d22]])
        }
    }

    #[test]
    fn analytic_jets_match_finite_differences_at_second_order() {
        let cases = [
            (torus(), WarpFactor::TorusBump { offset: 1.5, amplitude: 0.5, mode: 1 }, ChartPoint::new(0.7, 2.0)),
            (BaseManifold::hyperbolic_polar(), WarpFactor::CoshR, ChartPoint::new(1.2, 0.4)),
            (BaseManifold::euclidean_polar(), WarpFactor::CoshR, ChartPoint::new(0.8, 2.4)),
        ];
        for (b, w, x) in cases {
            let exact = w.jet(&b, x);
            let err = |h: f64| {
                let (g, hs) = fd_jet(&w, &b, x, h);
                let mut e: f64 = 0.0;
                for i in 0..2 {
                    e = e.max((g[i] - exact.grad[i]).abs());
                    for j in 0..2 {
                        e = e.max((hs[i][j] - exact.hess[i][j]).abs());
                    }
                }
                e
            };
            let (e1, e2) = (err(1e-2), err(5e-3));
            assert!(e1 < 1e-3, "{} {e1}", w.key());
            assert!(e1 / e2 > 3.5, "{} order ratio {}", w.key(), e1 / e2);
        }
    }
}
