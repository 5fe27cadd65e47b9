//! Polyline profiles in the orbit half-plane and their equivariant flow.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::chart::slice_distance_gradient;
use crate::math::{cosh, coth, powi, sinh, sqrt, tanh};

/// Behaviour of an end of the profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EndCondition {
    /// On the rotation axis, meeting it orthogonally (reflection symmetric).
    Axis,
    /// Held in place.
    Fixed,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error, Serialize, Deserialize)]
pub enum CurveError {
    #[error("profile needs at least {min} nodes (got {got})")]
    TooFewNodes { got: usize, min: usize },
    #[error("rotation multiplicity must be at least 2 (got {0})")]
    Multiplicity(usize),
    #[error("node {node} is not a finite point of the half-plane r >= 0")]
    InvalidNode { node: usize },
    #[error("node {node} lies on the axis without reflection symmetry")]
    InvalidAxis { node: usize },
    #[error("interior node {node} reached the axis at t = {t}")]
    Pinch { node: usize, t: f64 },
    #[error("segments {a} and {b} intersect at t = {t}")]
    SelfIntersection { a: usize, b: usize, t: f64 },
    #[error("time step must be positive and finite (got {0})")]
    InvalidStep(f64),
}

/// Lower and upper ratio of segment length to the mean that trigger
/// re-parametrisation.
pub const SPACING_BAND: [f64; 2] = [0.5, 2.0];

/// Profile `(r_i, u_i)` of an `O(n)`-invariant hypersurface of hyperbolic
/// space, with orbit metric `dr^2 + cosh^2 r du^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileCurve {
    nodes: Vec<[f64; 2]>,
    multiplicity: usize,
    ends: [EndCondition; 2],
    t: f64,
}

/// Unit tangent and normal `N = J T` in the orthonormal frame
/// `(d_r, d_u / cosh r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub tangent: [f64; 2],
    pub normal: [f64; 2],
}

/// Per-node transversality to both foliations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphMeasure {
    /// `<N, d_u / cosh r>`
    pub transversality_eq: f64,
    /// `<N, grad l>`, `l` the distance to the slice
    pub transversality_geo: f64,
    pub v_eq: f64,
    pub v_geo: f64,
}

fn inverse_or_infinite(x: f64) -> f64 {
    if x > 0.0 {
        1.0 / x
    } else {
        f64::INFINITY
    }
}

fn unit(a: [f64; 2]) -> [f64; 2] {
    let l = sqrt(a[0] * a[0] + a[1] * a[1]);
    [a[0] / l, a[1] / l]
}

fn cross(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// Signed curvature of the circle through `a`, the origin and `c`, positive
/// when the path `a -> 0 -> c` turns left.
fn circle_curvature(a: [f64; 2], c: [f64; 2]) -> f64 {
    let ab = [-a[0], -a[1]];
    let ac = [c[0] - a[0], c[1] - a[1]];
    let la = sqrt(a[0] * a[0] + a[1] * a[1]);
    let lc = sqrt(c[0] * c[0] + c[1] * c[1]);
    let lac = sqrt(ac[0] * ac[0] + ac[1] * ac[1]);
    2.0 * cross(ab, c) / (la * lc * lac)
}

impl ProfileCurve {
    pub fn new(nodes: Vec<[f64; 2]>, multiplicity: usize, ends: [EndCondition; 2]) -> Result<Self, CurveError> {
        if nodes.len() < 4 {
            return Err(CurveError::TooFewNodes { got: nodes.len(), min: 4 });
        }
        if multiplicity < 2 {
            return Err(CurveError::Multiplicity(multiplicity));
        }
        let last = nodes.len() - 1;
        for (k, p) in nodes.iter().enumerate() {
            if !(p[0] >= 0.0 && p[0].is_finite() && p[1].is_finite()) {
                return Err(CurveError::InvalidNode { node: k });
            }
            let end = match k {
                0 => Some(ends[0]),
                _ if k == last => Some(ends[1]),
                _ => None,
            };
            let on_axis = p[0] == 0.0;
            if on_axis != (end == Some(EndCondition::Axis)) {
                return Err(CurveError::InvalidAxis { node: k });
            }
        }
        Ok(ProfileCurve { nodes, multiplicity, ends, t: 0.0 })
    }

    /// [`ProfileCurve::new`] followed by re-parametrisation to uniform
    /// arclength in the orbit metric.
    pub fn resampled(nodes: Vec<[f64; 2]>, multiplicity: usize, ends: [EndCondition; 2]) -> Result<Self, CurveError> {
        let mut c = Self::new(nodes, multiplicity, ends)?;
        c.reparametrize();
        Ok(c)
    }

    pub fn nodes(&self) -> &[[f64; 2]] {
        &self.nodes
    }

    pub fn multiplicity(&self) -> usize {
        self.multiplicity
    }

    pub fn ends(&self) -> [EndCondition; 2] {
        self.ends
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn segment(&self, j: usize) -> f64 {
        let (a, b) = (self.nodes[j], self.nodes[j + 1]);
        let c = cosh(0.5 * (a[0] + b[0]));
        let (dr, du) = (b[0] - a[0], c * (b[1] - a[1]));
        sqrt(dr * dr + du * du)
    }

    pub fn segments(&self) -> Vec<f64> {
        (0..self.nodes.len() - 1).map(|j| self.segment(j)).collect()
    }

    /// Arclength in the orbit metric.
    pub fn length(&self) -> f64 {
        self.segments().iter().sum()
    }

    pub fn min_spacing(&self) -> f64 {
        self.segments().into_iter().fold(f64::INFINITY, f64::min)
    }

    /// `sum sinh^(n-1)(r) ds` over the segments at their midpoints: the
    /// generated area divided by the volume of the unit `(n-1)`-sphere.
    pub fn generated_area(&self) -> f64 {
        generated_area_of(&self.nodes, self.multiplicity)
    }

    /// Coordinates of node `j` in the chart `(r - r_i, cosh(r_i)(u - u_i))`
    /// centred at node `i`, with axis reflection for indices past the ends.
    fn local(&self, i: usize, j: isize) -> [f64; 2] {
        let last = self.nodes.len() as isize - 1;
        let q = if j < 0 {
            let p = self.nodes[(-j) as usize];
            [-p[0], p[1]]
        } else if j > last {
            let p = self.nodes[(2 * last - j) as usize];
            [-p[0], p[1]]
        } else {
            self.nodes[j as usize]
        };
        let p = self.nodes[i];
        [q[0] - p[0], cosh(p[0]) * (q[1] - p[1])]
    }

    fn neighbours(&self, i: usize) -> ([f64; 2], [f64; 2]) {
        let ii = i as isize;
        let last = self.nodes.len() - 1;
        let fixed = |k: usize| (k == 0 && self.ends[0] == EndCondition::Fixed) || (k == last && self.ends[1] == EndCondition::Fixed);
        if fixed(i) {
            return if i == 0 {
                ([0.0, 0.0], self.local(0, 1))
            } else {
                (self.local(i, ii - 1), [0.0, 0.0])
            };
        }
        (self.local(i, ii - 1), self.local(i, ii + 1))
    }

    pub fn frame(&self, i: usize) -> Frame {
        let (a, c) = self.neighbours(i);
        let tangent = unit([c[0] - a[0], c[1] - a[1]]);
        Frame { tangent, normal: [-tangent[1], tangent[0]] }
    }

    /// Mean curvature of the generated hypersurface at node `i` for the
    /// normal of [`ProfileCurve::frame`]: the geodesic curvature of the
    /// profile in the orbit metric minus `(n - 1) <grad log sinh r, N>`.
    /// Axis ends use the reflected neighbour and the limit `n kappa`; fixed
    /// ends carry 0.
    pub fn mean_curvature(&self, i: usize) -> f64 {
        let last = self.nodes.len() - 1;
        let end = match i {
            0 => Some(self.ends[0]),
            _ if i == last => Some(self.ends[1]),
            _ => None,
        };
        if end == Some(EndCondition::Fixed) {
            return 0.0;
        }
        let (a, c) = self.neighbours(i);
        let kappa = circle_curvature(a, c);
        let n1 = (self.multiplicity - 1) as f64;
        if end == Some(EndCondition::Axis) {
            return self.multiplicity as f64 * kappa;
        }
        let r = self.nodes[i][0];
        let f = self.frame(i);
        let [tx, ty] = f.tangent;
        // the chart rescaling is exact only at r_i; the angle between frame
        // and chart drifts at rate tanh(r) cos(alpha) along the curve
        let geodesic = kappa + tanh(r) * ty * (1.0 + tx * tx);
        geodesic - n1 * coth(r) * f.normal[0]
    }

    pub fn measure(&self, i: usize) -> GraphMeasure {
        let n = self.frame(i).normal;
        let [r, u] = self.nodes[i];
        let g = slice_distance_gradient(r, u);
        let teq = n[1];
        let tgeo = n[0] * g[0] + n[1] * g[1];
        GraphMeasure {
            transversality_eq: teq,
            transversality_geo: tgeo,
            v_eq: inverse_or_infinite(teq),
            v_geo: inverse_or_infinite(tgeo),
        }
    }

    /// First pair of non-adjacent segments that cross.
    pub fn self_intersection(&self) -> Option<(usize, usize)> {
        let p = &self.nodes;
        let m = p.len() - 1;
        let orient = |a: [f64; 2], b: [f64; 2], c: [f64; 2]| cross([b[0] - a[0], b[1] - a[1]], [c[0] - a[0], c[1] - a[1]]);
        for a in 0..m {
            for b in a + 2..m {
                let (p1, p2, q1, q2) = (p[a], p[a + 1], p[b], p[b + 1]);
                let d1 = orient(p1, p2, q1);
                let d2 = orient(p1, p2, q2);
                let d3 = orient(q1, q2, p1);
                let d4 = orient(q1, q2, p2);
                if d1 * d2 < 0.0 && d3 * d4 < 0.0 {
                    return Some((a, b));
                }
            }
        }
        None
    }

    /// Explicit step `fraction * min_spacing^2 / (2 n)`.
    pub fn cfl_step(&self, fraction: f64) -> f64 {
        let h = self.min_spacing();
        fraction * h * h / (2.0 * self.multiplicity as f64)
    }

    /// Moves every non-fixed node by `dt H N`, then re-parametrises when a
    /// segment leaves [`SPACING_BAND`] around the mean spacing. Nodes next to
    /// an axis end that cross the axis are merged into the axis cap (a
    /// conical tip rounding off); any other node reaching the axis is a
    /// pinch.
    pub fn step(&self, dt: f64) -> Result<ProfileCurve, CurveError> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(CurveError::InvalidStep(dt));
        }
        let last = self.nodes.len() - 1;
        let t = self.t + dt;
        let mut next = self.nodes.clone();
        for (i, p) in next.iter_mut().enumerate() {
            let end = match i {
                0 => Some(self.ends[0]),
                _ if i == last => Some(self.ends[1]),
                _ => None,
            };
            if end == Some(EndCondition::Fixed) {
                continue;
            }
            let h = self.mean_curvature(i);
            let n = self.frame(i).normal;
            let [r, u] = self.nodes[i];
            if end == Some(EndCondition::Axis) {
                p[1] = u + dt * h * n[1];
                continue;
            }
            p[0] = r + dt * h * n[0];
            p[1] = u + dt * h * n[1] / cosh(r);
            if !(p[0].is_finite() && p[1].is_finite()) {
                return Err(CurveError::InvalidNode { node: i });
            }
        }
        let count = next.len();
        let mut merged = false;
        if self.ends[0] == EndCondition::Axis {
            while next.len() > 4 && next[1][0] <= 0.0 {
                next.remove(1);
                merged = true;
            }
        }
        if self.ends[1] == EndCondition::Axis {
            while next.len() > 4 && next[next.len() - 2][0] <= 0.0 {
                next.remove(next.len() - 2);
                merged = true;
            }
        }
        let offset = count - next.len();
        if let Some(k) = (1..next.len() - 1).find(|&k| next[k][0] <= 0.0) {
            return Err(CurveError::Pinch { node: k + offset, t });
        }
        let mut out = ProfileCurve { nodes: next, multiplicity: self.multiplicity, ends: self.ends, t };
        if merged {
            out.nodes = out.uniform_nodes(count);
            return Ok(out);
        }
        let seg = out.segments();
        let mean = seg.iter().sum::<f64>() / seg.len() as f64;
        if seg.iter().any(|&s| s < SPACING_BAND[0] * mean || s > SPACING_BAND[1] * mean) {
            out.reparametrize();
        }
        Ok(out)
    }

    /// Redistributes the nodes uniformly in orbit-metric arclength by
    /// linear interpolation, keeping both ends.
    pub fn reparametrize(&mut self) {
        self.nodes = self.uniform_nodes(self.nodes.len());
    }

    /// Copy with `count` nodes uniform in orbit-metric arclength.
    pub fn resample(&self, count: usize) -> Result<ProfileCurve, CurveError> {
        let mut out = ProfileCurve::new(self.uniform_nodes(count), self.multiplicity, self.ends)?;
        out.t = self.t;
        Ok(out)
    }

    /// The same curve stamped with flow time `t`.
    pub fn with_time(mut self, t: f64) -> Self {
        self.t = t;
        self
    }

    fn uniform_nodes(&self, count: usize) -> Vec<[f64; 2]> {
        let seg = self.segments();
        let total: f64 = seg.iter().sum();
        let m = count.max(2) - 1;
        let mut out = Vec::with_capacity(m + 1);
        out.push(self.nodes[0]);
        let mut j = 0usize;
        let mut walked = 0.0;
        for k in 1..m {
            let target = total * k as f64 / m as f64;
            while j + 1 < seg.len() && walked + seg[j] < target {
                walked += seg[j];
                j += 1;
            }
            let s = if seg[j] > 0.0 { ((target - walked) / seg[j]).clamp(0.0, 1.0) } else { 0.0 };
            let (a, b) = (self.nodes[j], self.nodes[j + 1]);
            out.push([a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]);
        }
        out.push(self.nodes[self.nodes.len() - 1]);
        out
    }
}

fn generated_area_of(nodes: &[[f64; 2]], n: usize) -> f64 {
    nodes
        .windows(2)
        .map(|w| {
            let rm = 0.5 * (w[0][0] + w[1][0]);
            let (dr, du) = (w[1][0] - w[0][0], cosh(rm) * (w[1][1] - w[0][1]));
            powi(sinh(rm), n as i32 - 1) * sqrt(dr * dr + du * du)
        })
        .sum()
}

/// `H` at every node, see [`ProfileCurve::mean_curvature`].
pub fn generated_mean_curvature(curve: &ProfileCurve) -> Vec<f64> {
    (0..curve.len()).map(|i| curve.mean_curvature(i)).collect()
}

/// `(v_eq, v_geo)` data at every node.
pub fn graph_measures(curve: &ProfileCurve) -> Vec<GraphMeasure> {
    (0..curve.len()).map(|i| curve.measure(i)).collect()
}

/// Centred difference in `eps` of the generated area under the normal
/// displacement `eps chi_i N_i`, and `-sum H chi sinh^(n-1)(r) ds` with
/// `ds` the mean of the adjacent segments. `chi` must vanish at the ends.
pub fn area_variation(curve: &ProfileCurve, chi: &[f64], eps: f64) -> (f64, f64) {
    let n = curve.multiplicity();
    let seg = curve.segments();
    let last = curve.len() - 1;
    let mut predicted = 0.0;
    let mut plus = curve.nodes().to_vec();
    let mut minus = plus.clone();
    for i in 1..last {
        let [r, _] = curve.nodes()[i];
        let nor = curve.frame(i).normal;
        let ds = 0.5 * (seg[i - 1] + seg[i]);
        predicted -= curve.mean_curvature(i) * chi[i] * powi(sinh(r), n as i32 - 1) * ds;
        let d = [eps * chi[i] * nor[0], eps * chi[i] * nor[1] / cosh(r)];
        plus[i] = [plus[i][0] + d[0], plus[i][1] + d[1]];
        minus[i] = [minus[i][0] - d[0], minus[i][1] - d[1]];
    }
    let derivative = (generated_area_of(&plus, n) - generated_area_of(&minus, n)) / (2.0 * eps);
    (derivative, predicted)
}
