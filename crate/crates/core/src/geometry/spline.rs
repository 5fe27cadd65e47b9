use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::GeometryError;

/// Clamped cubic interpolant through a two-column table `(r, value)`.
///
/// End slopes come from the cubic through the four outermost samples, so
/// even and odd profiles are both reproduced to third order at `r = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "RadialTable", try_from = "RadialTable")]
pub struct CubicSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    second: Vec<f64>,
}

/// Raw table as read from disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialTable {
    pub r: Vec<f64>,
    pub value: Vec<f64>,
}

impl From<CubicSpline> for RadialTable {
    fn from(s: CubicSpline) -> Self {
        RadialTable { r: s.xs, value: s.ys }
    }
}

impl TryFrom<RadialTable> for CubicSpline {
    type Error = GeometryError;
    fn try_from(t: RadialTable) -> Result<Self, Self::Error> {
        CubicSpline::new(t.r, t.value)
    }
}

// derivative at xs[0] of the cubic through the first four points
fn lagrange_slope(x: [f64; 4], y: [f64; 4]) -> f64 {
    let mut d = 0.0;
    for j in 0..4 {
        // derivative of L_j at x[0]
        let mut denom = 1.0;
        for m in 0..4 {
            if m != j {
                denom *= x[j] - x[m];
            }
        }
        let mut num = 0.0;
        for k in 0..4 {
            if k == j {
                continue;
            }
            let mut prod = 1.0;
            for m in 0..4 {
                if m != j && m != k {
                    prod *= x[0] - x[m];
                }
            }
            num += prod;
        }
        d += y[j] * num / denom;
    }
    d
}

impl CubicSpline {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self, GeometryError> {
        if xs.len() != ys.len() {
            return Err(GeometryError::InvalidTable(format!(
                "{} abscissae but {} values",
                xs.len(),
                ys.len()
            )));
        }
        if xs.len() < 4 {
            return Err(GeometryError::InvalidTable(format!(
                "need at least 4 rows, got {}",
                xs.len()
            )));
        }
        if xs.iter().chain(ys.iter()).any(|v| !v.is_finite()) {
            return Err(GeometryError::InvalidTable("non-finite entry".into()));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(GeometryError::InvalidTable(
                "abscissae must be strictly increasing".into(),
            ));
        }
        let n = xs.len();
        let s0 = lagrange_slope([xs[0], xs[1], xs[2], xs[3]], [ys[0], ys[1], ys[2], ys[3]]);
        let sn = lagrange_slope(
            [xs[n - 1], xs[n - 2], xs[n - 3], xs[n - 4]],
            [ys[n - 1], ys[n - 2], ys[n - 3], ys[n - 4]],
        );
        // tridiagonal system for the second derivatives, clamped ends
        let mut sub = alloc::vec![0.0; n];
        let mut diag = alloc::vec![0.0; n];
        let mut sup = alloc::vec![0.0; n];
        let mut rhs = alloc::vec![0.0; n];
        let h0 = xs[1] - xs[0];
        diag[0] = h0 / 3.0;
        sup[0] = h0 / 6.0;
        rhs[0] = (ys[1] - ys[0]) / h0 - s0;
        for i in 1..n - 1 {
            let hl = xs[i] - xs[i - 1];
            let hr = xs[i + 1] - xs[i];
            sub[i] = hl / 6.0;
            diag[i] = (hl + hr) / 3.0;
            sup[i] = hr / 6.0;
            rhs[i] = (ys[i + 1] - ys[i]) / hr - (ys[i] - ys[i - 1]) / hl;
        }
        let hn = xs[n - 1] - xs[n - 2];
        sub[n - 1] = hn / 6.0;
        diag[n - 1] = hn / 3.0;
        rhs[n - 1] = sn - (ys[n - 1] - ys[n - 2]) / hn;
        for i in 1..n {
            let w = sub[i] / diag[i - 1];
            diag[i] -= w * sup[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        let mut second = alloc::vec![0.0; n];
        second[n - 1] = rhs[n - 1] / diag[n - 1];
        for i in (0..n - 1).rev() {
            second[i] = (rhs[i] - sup[i] * second[i + 1]) / diag[i];
        }
        Ok(CubicSpline { xs, ys, second })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.xs[0], self.xs[self.xs.len() - 1])
    }

    /// Value and first three derivatives. Outside the table the end cubic
    /// is extended.
    pub fn eval(&self, x: f64) -> [f64; 4] {
        let n = self.xs.len();
        let i = match self.xs.binary_search_by(|p| p.total_cmp(&x)) {
            Ok(k) => k.min(n - 2),
            Err(0) => 0,
            Err(k) => (k - 1).min(n - 2),
        };
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        let (y0, y1) = (self.ys[i], self.ys[i + 1]);
        let (m0, m1) = (self.second[i], self.second[i + 1]);
        let h = x1 - x0;
        let a = (x1 - x) / h;
        let b = (x - x0) / h;
        let value = a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let d1 = (y1 - y0) / h - (3.0 * a * a - 1.0) / 6.0 * h * m0 + (3.0 * b * b - 1.0) / 6.0 * h * m1;
        let d2 = a * m0 + b * m1;
        let d3 = (m1 - m0) / h;
        [value, d1, d2, d3]
    }

    pub fn table(&self) -> (&[f64], &[f64]) {
        (&self.xs, &self.ys)
    }
}
