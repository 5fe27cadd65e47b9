//! Finite-difference Riemann tensor of the ambient metric assembled from
//! chart components, compared with the closed forms.

use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use super::OracleError;
use crate::geometry::{ambient_curvature, BaseManifold, ChartPoint, FrameCurvature, Tensor4, WarpFactor};
use crate::math::{inverse3, sqrt, sym2_eigenvalues, sym3_eigenvalues, TAU};

/// Base step of the finite differences; Richardson uses `h` and `h / 2`.
pub const FD_STEP: f64 = 1e-3;
/// Samples whose ambient metric is worse conditioned are rejected.
pub const MAX_CONDITION: f64 = 1e8;
/// Symmetry and first-Bianchi defect allowed for the assembled tensor,
/// relative to its largest component (floored at one).
pub const SELF_TEST_TOL: f64 = 1e-8;

type M3 = [[f64; 3]; 3];
type Gamma = [[[f64; 3]; 3]; 3];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiemannReport {
    /// max over samples of `max |R_fd - R_closed| / max(1, max |R_closed|)`
    pub max_relative_error: f64,
    pub worst_point: Option<[f64; 2]>,
    pub checked: usize,
    pub rejected: Vec<[f64; 2]>,
    pub max_self_test_defect: f64,
    /// sectional extremes of the finite-difference tensor over the samples
    pub sectional_min: f64,
    pub sectional_max: f64,
}

/// Chart coordinates `(x, u)` of the ambient space with `u` last.
struct Ambient<'a> {
    base: &'a BaseManifold,
    warp: &'a WarpFactor,
    n: usize,
}

impl Ambient<'_> {
    fn dim(&self) -> usize {
        self.n + 1
    }

    fn metric(&self, y: [f64; 3]) -> M3 {
        let x = ChartPoint::new(y[0], if self.n == 2 { y[1] } else { 0.0 });
        let gb = self.base.metric(x);
        let phi = self.warp.value(self.base, x);
        let mut g = [[0.0; 3]; 3];
        for i in 0..self.n {
            for j in 0..self.n {
                g[i][j] = gb[i][j];
            }
        }
        g[self.n][self.n] = phi * phi;
        g
    }

    fn inverse(&self, g: &M3) -> Option<M3> {
        let mut padded = *g;
        for (a, row) in padded.iter_mut().enumerate().skip(self.dim()) {
            row[a] = 1.0;
        }
        inverse3(padded)
    }

    fn condition(&self, g: &M3) -> f64 {
        let (lo, hi) = if self.dim() == 2 {
            sym2_eigenvalues([[g[0][0], g[0][1]], [g[1][0], g[1][1]]])
        } else {
            let ev = sym3_eigenvalues(*g);
            (ev[0], ev[2])
        };
        if lo <= 0.0 {
            f64::INFINITY
        } else {
            hi / lo
        }
    }

    fn metric_derivatives(&self, y: [f64; 3], h: f64) -> [M3; 3] {
        let mut dg = [[[0.0; 3]; 3]; 3];
        for c in 0..self.dim() {
            let d = |step: f64| {
                let (mut p, mut m) = (y, y);
                p[c] += step;
                m[c] -= step;
                let (gp, gm) = (self.metric(p), self.metric(m));
                let mut out = [[0.0; 3]; 3];
                for a in 0..3 {
                    for b in 0..3 {
                        out[a][b] = (gp[a][b] - gm[a][b]) / (2.0 * step);
                    }
                }
                out
            };
            let (coarse, fine) = (d(h), d(0.5 * h));
            for a in 0..3 {
                for b in 0..3 {
                    dg[c][a][b] = (4.0 * fine[a][b] - coarse[a][b]) / 3.0;
                }
            }
        }
        dg
    }

    /// `gamma[a][b][c]` is the symbol with upper index `a`.
    fn christoffel(&self, y: [f64; 3], h: f64) -> Option<Gamma> {
        let g = self.metric(y);
        let gi = self.inverse(&g)?;
        let dg = self.metric_derivatives(y, h);
        let d = self.dim();
        let mut gamma = [[[0.0; 3]; 3]; 3];
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    let mut s = 0.0;
                    for e in 0..d {
                        s += gi[a][e] * (dg[b][e][c] + dg[c][e][b] - dg[e][b][c]);
                    }
                    gamma[a][b][c] = 0.5 * s;
                }
            }
        }
        Some(gamma)
    }

    /// All-lower Riemann tensor in chart components.
    fn riemann(&self, y: [f64; 3], h: f64) -> Option<Tensor4> {
        let d = self.dim();
        let gamma = self.christoffel(y, h)?;
        // dgamma[e][a][b][c] = d_e gamma^a_{bc}
        let mut dgamma = [[[[0.0; 3]; 3]; 3]; 3];
        for e in 0..d {
            let diff = |step: f64| -> Option<Gamma> {
                let (mut p, mut m) = (y, y);
                p[e] += step;
                m[e] -= step;
                let (gp, gm) = (self.christoffel(p, h)?, self.christoffel(m, h)?);
                let mut out = [[[0.0; 3]; 3]; 3];
                for a in 0..3 {
                    for b in 0..3 {
                        for c in 0..3 {
                            out[a][b][c] = (gp[a][b][c] - gm[a][b][c]) / (2.0 * step);
                        }
                    }
                }
                Some(out)
            };
            let (coarse, fine) = (diff(h)?, diff(0.5 * h)?);
            for a in 0..3 {
                for b in 0..3 {
                    for c in 0..3 {
                        dgamma[e][a][b][c] = (4.0 * fine[a][b][c] - coarse[a][b][c]) / 3.0;
                    }
                }
            }
        }
        // R^a_{bcd} = d_c G^a_{db} - d_d G^a_{cb} + G^a_{ce} G^e_{db} - G^a_{de} G^e_{cb}
        let mut up = [[[[0.0; 3]; 3]; 3]; 3];
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    for dd in 0..d {
                        let mut v = dgamma[c][a][dd][b] - dgamma[dd][a][c][b];
                        for e in 0..d {
                            v += gamma[a][c][e] * gamma[e][dd][b] - gamma[a][dd][e] * gamma[e][c][b];
                        }
                        up[a][b][c][dd] = v;
                    }
                }
            }
        }
        let g = self.metric(y);
        let mut low = [[[[0.0; 3]; 3]; 3]; 3];
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    for dd in 0..d {
                        low[a][b][c][dd] = (0..d).map(|e| g[a][e] * up[e][b][c][dd]).sum();
                    }
                }
            }
        }
        Some(low)
    }

    /// Orthonormal frame in chart components: row 0 is `d_u / phi`, rows
    /// `1..=n` come from Gram-Schmidt on the base coordinate vectors.
    fn frame(&self, y: [f64; 3]) -> M3 {
        let g = self.metric(y);
        let d = self.dim();
        let mut e = [[0.0; 3]; 3];
        e[0][self.n] = 1.0 / sqrt(g[self.n][self.n]);
        let dot = |p: &[f64; 3], q: &[f64; 3]| {
            let mut s = 0.0;
            for a in 0..d {
                for b in 0..d {
                    s += g[a][b] * p[a] * q[b];
                }
            }
            s
        };
        for i in 0..self.n {
            let mut w = [0.0; 3];
            w[i] = 1.0;
            for k in 0..i {
                let prev = e[k + 1];
                let c = dot(&w, &prev);
                for a in 0..d {
                    w[a] -= c * prev[a];
                }
            }
            let norm = sqrt(dot(&w, &w));
            for a in 0..d {
                e[i + 1][a] = w[a] / norm;
            }
        }
        e
    }
}

fn to_frame(r: &Tensor4, e: &M3, d: usize) -> Tensor4 {
    // contract one slot at a time
    let mut t1 = [[[[0.0; 3]; 3]; 3]; 3];
    for aa in 0..d {
        for b in 0..d {
            for c in 0..d {
                for dd in 0..d {
                    t1[aa][b][c][dd] = (0..d).map(|a| e[aa][a] * r[a][b][c][dd]).sum();
                }
            }
        }
    }
    let mut t2 = [[[[0.0; 3]; 3]; 3]; 3];
    for aa in 0..d {
        for bb in 0..d {
            for c in 0..d {
                for dd in 0..d {
                    t2[aa][bb][c][dd] = (0..d).map(|b| e[bb][b] * t1[aa][b][c][dd]).sum();
                }
            }
        }
    }
    let mut t3 = [[[[0.0; 3]; 3]; 3]; 3];
    for aa in 0..d {
        for bb in 0..d {
            for cc in 0..d {
                for dd in 0..d {
                    t3[aa][bb][cc][dd] = (0..d).map(|c| e[cc][c] * t2[aa][bb][c][dd]).sum();
                }
            }
        }
    }
    let mut t4 = [[[[0.0; 3]; 3]; 3]; 3];
    for aa in 0..d {
        for bb in 0..d {
            for cc in 0..d {
                for ddd in 0..d {
                    t4[aa][bb][cc][ddd] = (0..d).map(|dd| e[ddd][dd] * t3[aa][bb][cc][dd]).sum();
                }
            }
        }
    }
    t4
}

fn max_abs(r: &Tensor4) -> f64 {
    r.iter().flatten().flatten().flatten().fold(0.0, |m, v| m.max(v.abs()))
}

/// Frame components of the finite-difference curvature at `x`, or `None`
/// for a sample rejected by conditioning.
pub fn fd_frame_curvature(base: &BaseManifold, warp: &WarpFactor, x: ChartPoint, h: f64) -> Option<FrameCurvature> {
    let amb = Ambient { base, warp, n: base.dimension() };
    // u is the last coordinate; the metric does not depend on it
    let mut yy = [0.0; 3];
    yy[..amb.n].copy_from_slice(&x.0[..amb.n]);
    if amb.condition(&amb.metric(yy)) > MAX_CONDITION {
        return None;
    }
    let r = amb.riemann(yy, h)?;
    let e = amb.frame(yy);
    Some(FrameCurvature { dim: amb.dim(), r: to_frame(&r, &e, amb.dim()) })
}

/// Compares the finite-difference tensor with the closed forms at each
/// sample; samples at the pole or with a condition number above
/// [`MAX_CONDITION`] are rejected.
pub fn fd_riemann_check(
    base: &BaseManifold,
    warp: &WarpFactor,
    points: &[ChartPoint],
    h: f64,
) -> Result<RiemannReport, OracleError> {
    let mut report = RiemannReport {
        max_relative_error: 0.0,
        worst_point: None,
        checked: 0,
        rejected: Vec::new(),
        max_self_test_defect: 0.0,
        sectional_min: f64::INFINITY,
        sectional_max: f64::NEG_INFINITY,
    };
    for &x in points {
        let closed = match ambient_curvature(base, warp, x) {
            Ok(c) => c,
            Err(_) => {
                report.rejected.push(x.0);
                continue;
            }
        };
        let Some(fd) = fd_frame_curvature(base, warp, x, h) else {
            report.rejected.push(x.0);
            continue;
        };
        let scale = max_abs(&fd.r).max(1.0);
        let defect = fd.symmetry_defect() / scale;
        report.max_self_test_defect = report.max_self_test_defect.max(defect);
        if defect > SELF_TEST_TOL {
            return Err(OracleError::SelfTest { defect, point: x.0 });
        }
        let mut err: f64 = 0.0;
        for (a, b) in fd.r.iter().flatten().flatten().flatten().zip(closed.r.iter().flatten().flatten().flatten()) {
            err = err.max((a - b).abs());
        }
        let rel = err / max_abs(&closed.r).max(1.0);
        if report.worst_point.is_none() || rel > report.max_relative_error {
            report.max_relative_error = rel;
            report.worst_point = Some(x.0);
        }
        let range = fd.sectional_range();
        report.sectional_min = report.sectional_min.min(range.min);
        report.sectional_max = report.sectional_max.max(range.max);
        report.checked += 1;
    }
    if report.checked == 0 {
        return Err(OracleError::NoUsablePoints);
    }
    Ok(report)
}

/// Catalog pairs exercised by the curvature oracle.
pub fn catalog_pairs() -> Vec<(BaseManifold, WarpFactor)> {
    alloc::vec![
        (BaseManifold::FlatCircle { length: TAU }, WarpFactor::TorusBump { offset: 1.5, amplitude: 0.5, mode: 1 }),
        (BaseManifold::FlatTorus { lengths: [TAU, TAU] }, WarpFactor::One),
        (BaseManifold::FlatTorus { lengths: [TAU, TAU] }, WarpFactor::TorusBump { offset: 1.5, amplitude: 0.5, mode: 1 }),
        (BaseManifold::euclidean_polar(), WarpFactor::CoshR),
        (BaseManifold::hyperbolic_polar(), WarpFactor::CoshR),
    ]
}

/// Seeded chart samples: uniform over the periods of flat bases, and over
/// `r in [0.2, 3]` on polar ones.
pub fn sample_points(base: &BaseManifold, count: usize, seed: u64) -> Vec<ChartPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut unit = || (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    (0..count)
        .map(|_| match base {
            BaseManifold::FlatCircle { length } => ChartPoint::new(unit() * length, 0.0),
            BaseManifold::FlatTorus { lengths } => ChartPoint::new(unit() * lengths[0], unit() * lengths[1]),
            BaseManifold::Polar { .. } => ChartPoint::new(0.2 + 2.8 * unit(), TAU * unit()),
        })
        .collect()
}
