//! Curvature of the warped product `M x_phi R` in the orthonormal frame
//! `(e0 = d_u / phi, e1, e2)`, index 0 being the vertical direction.

use alloc::format;

use serde::{Deserialize, Serialize};

use super::base::{BaseManifold, ChartPoint};
use super::warp::WarpFactor;
use crate::error::GeometryError;
use crate::math::{sqrt, sym3_eigenvalues};

pub type Tensor4 = [[[[f64; 3]; 3]; 3]; 3];

/// A 2-plane spanned by frame vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Plane {
    /// `(e_i, e0)`, `i` in `1..=n`.
    Vertical(usize),
    /// `(e_i, e_j)`, both horizontal.
    Horizontal(usize, usize),
}

/// Frame components `R(a, b, c, d)` normalised so that `R(a, b, a, b)` is
/// the sectional curvature of the plane `(e_a, e_b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameCurvature {
    pub dim: usize,
    pub r: Tensor4,
}

fn check_point(base: &BaseManifold, x: ChartPoint) -> Result<(), GeometryError> {
    if base.is_polar() && x.0[0] <= 0.0 {
        return Err(GeometryError::PoleExcluded { r: x.0[0] });
    }
    Ok(())
}

fn set_block(r: &mut Tensor4, a: usize, b: usize, c: usize, d: usize, v: f64) {
    r[a][b][c][d] = v;
    r[b][a][c][d] = -v;
    r[a][b][d][c] = -v;
    r[b][a][d][c] = v;
    r[c][d][a][b] = v;
    r[d][c][a][b] = -v;
    r[c][d][b][a] = -v;
    r[d][c][b][a] = v;
}

/// Closed-form ambient curvature at `x`: mixed components with three
/// horizontal indices vanish, `R(0, i, 0, k) = -Hess(phi)(i, k) / phi`, and
/// the purely horizontal block equals the base curvature.
pub fn ambient_curvature(
    base: &BaseManifold,
    warp: &WarpFactor,
    x: ChartPoint,
) -> Result<FrameCurvature, GeometryError> {
    check_point(base, x)?;
    let n = base.dimension();
    let jet = warp.jet(base, x);
    let mut r = [[[[0.0; 3]; 3]; 3]; 3];
    for i in 1..=n {
        for k in 1..=n {
            let v = -jet.hess[i - 1][k - 1] / jet.value;
            // fills (0 i 0 k) and its symmetric partners
            r[0][i][0][k] = v;
            r[i][0][0][k] = -v;
            r[0][i][k][0] = -v;
            r[i][0][k][0] = v;
        }
    }
    if n == 2 {
        set_block(&mut r, 1, 2, 1, 2, base.gauss_curvature(x));
    }
    Ok(FrameCurvature { dim: n + 1, r })
}

pub fn ambient_sectional(
    base: &BaseManifold,
    warp: &WarpFactor,
    x: ChartPoint,
    plane: Plane,
) -> Result<f64, GeometryError> {
    let n = base.dimension();
    let (a, b) = match plane {
        Plane::Vertical(i) if (1..=n).contains(&i) => (i, 0),
        Plane::Horizontal(i, j) if i != j && (1..=n).contains(&i) && (1..=n).contains(&j) => (i, j),
        _ => {
            return Err(GeometryError::InvalidPlane { plane: format!("{plane:?}"), dimension: n });
        }
    };
    let curv = ambient_curvature(base, warp, x)?;
    Ok(curv.r[a][b][a][b])
}

/// Extremes of the sectional curvature over all 2-planes at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectionalRange {
    pub min: f64,
    pub max: f64,
}

impl FrameCurvature {
    /// In dimension three every unit bivector is decomposable, so the
    /// sectional extremes are the eigenvalue extremes of the curvature
    /// operator on bivectors.
    pub fn sectional_range(&self) -> SectionalRange {
        if self.dim == 2 {
            let k = self.r[1][0][1][0];
            return SectionalRange { min: k, max: k };
        }
        let basis = [(0usize, 1usize), (0, 2), (1, 2)];
        let mut m = [[0.0; 3]; 3];
        for (p, &(a, b)) in basis.iter().enumerate() {
            for (q, &(c, d)) in basis.iter().enumerate() {
                m[p][q] = self.r[a][b][c][d];
            }
        }
        let ev = sym3_eigenvalues(m);
        SectionalRange { min: ev[0], max: ev[2] }
    }

    pub fn ricci(&self) -> [[f64; 3]; 3] {
        let mut ric = [[0.0; 3]; 3];
        for b in 0..self.dim {
            for d in 0..self.dim {
                let mut s = 0.0;
                for a in 0..self.dim {
                    s += self.r[a][b][a][d];
                }
                ric[b][d] = s;
            }
        }
        ric
    }

    /// Operator norm of the Ricci tensor (largest absolute eigenvalue).
    pub fn ricci_norm(&self) -> f64 {
        let ric = self.ricci();
        if self.dim == 2 {
            let (lo, hi) = crate::math::sym2_eigenvalues([[ric[0][0], ric[0][1]], [ric[1][0], ric[1][1]]]);
            return lo.abs().max(hi.abs());
        }
        let ev = sym3_eigenvalues(ric);
        ev[0].abs().max(ev[2].abs())
    }

    /// Largest deviation from the algebraic symmetries and first Bianchi.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.dim;
        let mut e: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let v = self.r[a][b][c][d];
                        e = e.max((v + self.r[b][a][c][d]).abs());
                        e = e.max((v + self.r[a][b][d][c]).abs());
                        e = e.max((v - self.r[c][d][a][b]).abs());
                        e = e.max((v + self.r[a][c][d][b] + self.r[a][d][b][c]).abs());
                    }
                }
            }
        }
        e
    }
}

/// Frame connection: `nabla_{e_a} e_b = sum_c conn[a][b][c] e_c`.
pub fn frame_connection(base: &BaseManifold, warp: &WarpFactor, x: ChartPoint) -> [[[f64; 3]; 3]; 3] {
    let n = base.dimension();
    let jet = warp.jet(base, x);
    let mut conn = [[[0.0; 3]; 3]; 3];
    for i in 1..=n {
        let q = jet.grad[i - 1] / jet.value;
        conn[0][0][i] = -q;
        conn[0][i][0] = q;
    }
    if n == 2 && base.is_polar() {
        let (f, df) = base.angular_scale(x);
        conn[2][1][2] = df / f;
        conn[2][2][1] = -df / f;
    }
    conn
}

/// Step used for frame derivatives of the closed-form curvature when
/// assembling its covariant derivative.
pub const CURVATURE_DERIVATIVE_STEP: f64 = 1e-4;

/// Norm of the covariant derivative of the ambient curvature tensor at `x`.
///
/// Directional derivatives of the closed-form components are centered
/// differences along the frame; connection terms come from the frame
/// connection above. The vertical direction is a Killing field direction,
/// so component derivatives along `e0` vanish.
pub fn curvature_derivative_norm(
    base: &BaseManifold,
    warp: &WarpFactor,
    x: ChartPoint,
) -> Result<f64, GeometryError> {
    let center = ambient_curvature(base, warp, x)?;
    let n = base.dimension();
    let dim = n + 1;
    let conn = frame_connection(base, warp, x);
    let h = CURVATURE_DERIVATIVE_STEP;
    let mut deriv = [[[[[0.0; 3]; 3]; 3]; 3]; 3];
    for a in 1..=n {
        let (f, _) = base.angular_scale(x);
        // chart step realising a unit frame step
        let step = if a == 2 && base.is_polar() { h / f } else { h };
        let mut plus = x;
        let mut minus = x;
        plus.0[a - 1] += step;
        minus.0[a - 1] -= step;
        let rp = ambient_curvature(base, warp, plus)?;
        let rm = ambient_curvature(base, warp, minus)?;
        for b in 0..dim {
            for c in 0..dim {
                for d in 0..dim {
                    for e in 0..dim {
                        deriv[a][b][c][d][e] = (rp.r[b][c][d][e] - rm.r[b][c][d][e]) / (2.0 * h);
                    }
                }
            }
        }
    }
    let r = &center.r;
    let mut total = 0.0;
    for a in 0..dim {
        for b in 0..dim {
            for c in 0..dim {
                for d in 0..dim {
                    for e in 0..dim {
                        let mut v = deriv[a][b][c][d][e];
                        for f in 0..dim {
                            v -= conn[a][b][f] * r[f][c][d][e]
                                + conn[a][c][f] * r[b][f][d][e]
                                + conn[a][d][f] * r[b][c][f][e]
                                + conn[a][e][f] * r[b][c][d][f];
                        }
                        total += v * v;
                    }
                }
            }
        }
    }
    Ok(sqrt(total))
}
