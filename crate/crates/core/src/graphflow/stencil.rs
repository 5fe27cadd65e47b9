//! Centred second-order frame jets of `u`. Each grid kind has its own loop;
//! the per-node closure is monomorphised into it.

use super::grid::Grid;
use super::problem::FlowProblem;

/// Frame gradient and frame Hessian of the height function at a node.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet {
    pub grad: [f64; 2],
    pub hess: [[f64; 2]; 2],
}

impl Jet {
    #[inline(always)]
    pub fn laplacian(&self) -> f64 {
        self.hess[0][0] + self.hess[1][1]
    }
}

/// Which nodes the sweep visits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sweep {
    /// Nodes updated by the flow.
    Active,
    /// Every node; the frozen polar ring gets one-sided radial stencils.
    All,
}

#[inline(always)]
fn polar_jet(
    ur: f64,
    urr: f64,
    ut: f64,
    utt: f64,
    urt: f64,
    f: f64,
    df: f64,
) -> Jet {
    let inv_f = 1.0 / f;
    let h12 = (urt - df * inv_f * ut) * inv_f;
    Jet {
        grad: [ur, ut * inv_f],
        hess: [[urr, h12], [h12, (utt + f * df * ur) * inv_f * inv_f]],
    }
}

pub fn for_each_jet<F: FnMut(usize, Jet)>(problem: &FlowProblem, u: &[f64], sweep: Sweep, mut visit: F) {
    let grid = problem.grid();
    let h = grid.spacing();
    match *grid {
        Grid::Circle { n, .. } => {
            let inv2h = 0.5 / h[0];
            let invh2 = 1.0 / (h[0] * h[0]);
            for i in 0..n {
                let l = u[if i == 0 { n - 1 } else { i - 1 }];
                let r = u[if i + 1 == n { 0 } else { i + 1 }];
                let c = u[i];
                visit(
                    i,
                    Jet { grad: [(r - l) * inv2h, 0.0], hess: [[(r - 2.0 * c + l) * invh2, 0.0], [0.0, 0.0]] },
                );
            }
        }
        Grid::Torus { n: [n1, n2], .. } => {
            let (i2a, i2b) = (0.5 / h[0], 0.5 / h[1]);
            let (iaa, ibb) = (1.0 / (h[0] * h[0]), 1.0 / (h[1] * h[1]));
            let iab = 0.25 / (h[0] * h[1]);
            for i in 0..n1 {
                let up = if i + 1 == n1 { 0 } else { i + 1 } * n2;
                let dn = if i == 0 { n1 - 1 } else { i - 1 } * n2;
                let row = i * n2;
                for j in 0..n2 {
                    let jp = if j + 1 == n2 { 0 } else { j + 1 };
                    let jm = if j == 0 { n2 - 1 } else { j - 1 };
                    let c = u[row + j];
                    let (a_p, a_m) = (u[up + j], u[dn + j]);
                    let (b_p, b_m) = (u[row + jp], u[row + jm]);
                    let cross = u[up + jp] - u[up + jm] - u[dn + jp] + u[dn + jm];
                    let h12 = cross * iab;
                    visit(
                        row + j,
                        Jet {
                            grad: [(a_p - a_m) * i2a, (b_p - b_m) * i2b],
                            hess: [[(a_p - 2.0 * c + a_m) * iaa, h12], [h12, (b_p - 2.0 * c + b_m) * ibb]],
                        },
                    );
                }
            }
        }
        Grid::Polar { nr, ntheta, .. } => {
            let rings = problem.rings();
            let (hr, ht) = (h[0], h[1]);
            let (i2r, i2t) = (0.5 / hr, 0.5 / ht);
            let (irr, itt) = (1.0 / (hr * hr), 1.0 / (ht * ht));
            let irt = 0.25 / (hr * ht);
            let half = ntheta / 2;
            let last = nr - 1;
            let active_rings = if problem.is_active(last * ntheta) { nr } else { last };
            let interior_end = active_rings.min(last);
            for i in 0..interior_end {
                let ring = rings[i];
                let row = i * ntheta;
                let up = (i + 1) * ntheta;
                for j in 0..ntheta {
                    let jp = if j + 1 == ntheta { 0 } else { j + 1 };
                    let jm = if j == 0 { ntheta - 1 } else { j - 1 };
                    // across the pole: u(-r, theta) = u(r, theta + pi)
                    let (d0, dp, dm) = if i == 0 {
                        ((j + half) % ntheta, (jp + half) % ntheta, (jm + half) % ntheta)
                    } else {
                        let dn = (i - 1) * ntheta;
                        (dn + j, dn + jp, dn + jm)
                    };
                    let c = u[row + j];
                    let (rp, rm) = (u[up + j], u[d0]);
                    let (tp, tm) = (u[row + jp], u[row + jm]);
                    let cross = u[up + jp] - u[up + jm] - u[dp] + u[dm];
                    visit(
                        row + j,
                        polar_jet(
                            (rp - rm) * i2r,
                            (rp - 2.0 * c + rm) * irr,
                            (tp - tm) * i2t,
                            (tp - 2.0 * c + tm) * itt,
                            cross * irt,
                            ring.f,
                            ring.df,
                        ),
                    );
                }
            }
            if sweep == Sweep::All || active_rings == nr {
                let ring = rings[last];
                let row = last * ntheta;
                let (r1, r2, r3) = (row - ntheta, row - 2 * ntheta, row - 3 * ntheta);
                let one_sided = |k: usize| (3.0 * (u[row + k] - u[r1 + k]) - (u[r1 + k] - u[r2 + k])) * i2r;
                for j in 0..ntheta {
                    let jp = if j + 1 == ntheta { 0 } else { j + 1 };
                    let jm = if j == 0 { ntheta - 1 } else { j - 1 };
                    let c = u[row + j];
                    let ur = one_sided(j);
                    let urr = (2.0 * (c - u[r1 + j]) - 3.0 * (u[r1 + j] - u[r2 + j]) + (u[r2 + j] - u[r3 + j])) * irr;
                    let (tp, tm) = (u[row + jp], u[row + jm]);
                    let urt = (one_sided(jp) - one_sided(jm)) * i2t;
                    visit(
                        row + j,
                        polar_jet(ur, urr, (tp - tm) * i2t, (tp - 2.0 * c + tm) * itt, urt, ring.f, ring.df),
                    );
                }
            }
        }
    }
}

/// All jets as a vector.
pub fn jets(problem: &FlowProblem, u: &[f64]) -> alloc::vec::Vec<Jet> {
    let mut out = alloc::vec![Jet::default(); u.len()];
    for_each_jet(problem, u, Sweep::All, |k, j| out[k] = j);
    out
}
