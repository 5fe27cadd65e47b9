//! Oracle-side differences in chart coordinates: five-point centred first
//! derivatives, so that the oracle's own truncation error sits two orders
//! below the second-order production stencils it checks.

use alloc::vec::Vec;

use crate::graphflow::{FlowProblem, Grid};

pub(super) struct ChartDiff<'a> {
    grid: &'a Grid,
    h: [f64; 2],
}

/// `(f(-2), f(-1), f(1), f(2))` to the derivative at 0, times `12 h`.
#[inline]
fn five(m2: f64, m1: f64, p1: f64, p2: f64, h: f64) -> f64 {
    (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h)
}

impl<'a> ChartDiff<'a> {
    pub(super) fn new(problem: &'a FlowProblem) -> Self {
        ChartDiff { grid: problem.grid(), h: problem.grid().spacing() }
    }

    /// Chart partials of a scalar `f` at `idx`. Polar rings below zero are
    /// read through the pole (ring `-1 - m` is ring `m` at `theta + pi`);
    /// the last two rings fall back to three-point formulas.
    pub(super) fn grad(&self, f: &[f64], idx: usize) -> [f64; 2] {
        let h = self.h;
        match *self.grid {
            Grid::Circle { n, .. } => {
                let at = |d: isize| f[(idx as isize + d).rem_euclid(n as isize) as usize];
                [five(at(-2), at(-1), at(1), at(2), h[0]), 0.0]
            }
            Grid::Torus { n, .. } => {
                let (i, j) = ((idx / n[1]) as isize, (idx % n[1]) as isize);
                let at = |i: isize, j: isize| {
                    f[i.rem_euclid(n[0] as isize) as usize * n[1] + j.rem_euclid(n[1] as isize) as usize]
                };
                [
                    five(at(i - 2, j), at(i - 1, j), at(i + 1, j), at(i + 2, j), h[0]),
                    five(at(i, j - 2), at(i, j - 1), at(i, j + 1), at(i, j + 2), h[1]),
                ]
            }
            Grid::Polar { nr, ntheta, .. } => {
                let (i, j) = ((idx / ntheta) as isize, (idx % ntheta) as isize);
                let half = (ntheta / 2) as isize;
                let at = |i: isize, j: isize| {
                    let (i, j) = if i < 0 { (-1 - i, j + half) } else { (i, j) };
                    f[i as usize * ntheta + j.rem_euclid(ntheta as isize) as usize]
                };
                let last = nr as isize - 1;
                let dr = if i == last {
                    (3.0 * at(i, j) - 4.0 * at(i - 1, j) + at(i - 2, j)) / (2.0 * h[0])
                } else if i == last - 1 {
                    (at(i + 1, j) - at(i - 1, j)) / (2.0 * h[0])
                } else {
                    five(at(i - 2, j), at(i - 1, j), at(i + 1, j), at(i + 2, j), h[0])
                };
                [dr, five(at(i, j - 2), at(i, j - 1), at(i, j + 1), at(i, j + 2), h[1])]
            }
        }
    }

    /// Nodes whose second differences use fourth-order first differences of
    /// node values only: all of them on flat grids, rings `2..=nr-5` on
    /// polar ones.
    pub(super) fn interior(&self) -> Vec<usize> {
        match *self.grid {
            Grid::Polar { nr, ntheta, .. } => (2 * ntheta..nr.saturating_sub(4) * ntheta).collect(),
            _ => (0..self.grid.len()).collect(),
        }
    }
}
