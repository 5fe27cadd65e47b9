use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::grid::Grid;
use crate::error::{GeometryError, SetupError};
use crate::geometry::{BaseManifold, WarpFactor};
use crate::math::{cos, sin};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryPolicy {
    Periodic,
    /// Outermost ring keeps its initial values.
    DirichletFrozen,
}

impl BoundaryPolicy {
    pub fn key(self) -> &'static str {
        match self {
            BoundaryPolicy::Periodic => "periodic",
            BoundaryPolicy::DirichletFrozen => "dirichlet-frozen",
        }
    }

    pub fn default_for(base: &BaseManifold) -> Self {
        if base.is_polar() {
            BoundaryPolicy::DirichletFrozen
        } else {
            BoundaryPolicy::Periodic
        }
    }
}

/// Warp data cached per node, frame components.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NodeGeometry {
    pub phi: f64,
    pub grad_phi: [f64; 2],
    pub hess_phi: [[f64; 2]; 2],
}

/// Per-ring chart data of polar grids.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RingGeometry {
    pub r: f64,
    pub f: f64,
    pub df: f64,
}

/// Angular low-pass filter on the rings next to the pole. Ring `i` keeps
/// Fourier modes `m <= floor(r_i / h_r)`, which bounds the effective angular
/// spacing from below by the radial one.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleFilter {
    ntheta: usize,
    /// `(ring, highest kept mode)`, only rings that lose modes
    rings: Vec<(usize, usize)>,
    cos_table: Vec<f64>,
    sin_table: Vec<f64>,
}

impl PoleFilter {
    fn new(grid: &Grid) -> Option<Self> {
        let Grid::Polar { nr, ntheta, .. } = *grid else {
            return None;
        };
        let h = grid.spacing()[0];
        let nyquist = ntheta / 2;
        let rings: Vec<(usize, usize)> = (0..nr)
            .map(|i| (i, (grid.ring_radius(i) / h) as usize))
            .filter(|&(_, m)| m < nyquist)
            .collect();
        if rings.is_empty() {
            return None;
        }
        let dtheta = grid.spacing()[1];
        let mut cos_table = Vec::with_capacity(nyquist * ntheta);
        let mut sin_table = Vec::with_capacity(nyquist * ntheta);
        for m in 0..nyquist {
            for j in 0..ntheta {
                let a = (m * j % ntheta) as f64 * dtheta;
                cos_table.push(cos(a));
                sin_table.push(sin(a));
            }
        }
        Some(PoleFilter { ntheta, rings, cos_table, sin_table })
    }

    pub fn filtered_rings(&self) -> &[(usize, usize)] {
        &self.rings
    }

    pub fn apply(&self, u: &mut [f64]) {
        let nt = self.ntheta;
        let mut coef = [0.0f64; 2];
        let mut out = alloc::vec![0.0; nt];
        for &(ring, keep) in &self.rings {
            let vals = &mut u[ring * nt..(ring + 1) * nt];
            let mean = vals.iter().sum::<f64>() / nt as f64;
            out.iter_mut().for_each(|o| *o = mean);
            for m in 1..=keep {
                let ct = &self.cos_table[m * nt..(m + 1) * nt];
                let st = &self.sin_table[m * nt..(m + 1) * nt];
                coef[0] = 0.0;
                coef[1] = 0.0;
                for j in 0..nt {
                    coef[0] += vals[j] * ct[j];
                    coef[1] += vals[j] * st[j];
                }
                let a = 2.0 * coef[0] / nt as f64;
                let b = 2.0 * coef[1] / nt as f64;
                for j in 0..nt {
                    out[j] += a * ct[j] + b * st[j];
                }
            }
            vals.copy_from_slice(&out);
        }
    }
}

/// Everything about a flow problem that does not change in time: base,
/// warp, grid, boundary policy and cached per-node geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowProblem {
    base: BaseManifold,
    warp: WarpFactor,
    grid: Grid,
    policy: BoundaryPolicy,
    nodes: Vec<NodeGeometry>,
    rings: Vec<RingGeometry>,
    filter: Option<PoleFilter>,
    min_spacing: f64,
}

impl FlowProblem {
    pub fn new(
        base: BaseManifold,
        warp: WarpFactor,
        grid: Grid,
        policy: BoundaryPolicy,
    ) -> Result<Self, SetupError> {
        base.validate()?;
        warp.check_compatible(&base)?;
        grid.check_base(&base)?;
        let allowed = match policy {
            BoundaryPolicy::Periodic => !base.is_polar(),
            BoundaryPolicy::DirichletFrozen => base.is_polar(),
        };
        if !allowed {
            return Err(SetupError::PolicyMismatch { policy: policy.key(), base: base.key() });
        }
        let mut nodes = Vec::with_capacity(grid.len());
        for idx in 0..grid.len() {
            let x = grid.point(idx);
            let jet = warp.jet(&base, x);
            if !(jet.value > 0.0) || !jet.value.is_finite() {
                return Err(GeometryError::NonPositiveWarp { index: idx, value: jet.value }.into());
            }
            nodes.push(NodeGeometry { phi: jet.value, grad_phi: jet.grad, hess_phi: jet.hess });
        }
        let rings = match grid {
            Grid::Polar { nr, .. } => (0..nr)
                .map(|i| {
                    let r = grid.ring_radius(i);
                    let (f, df) = base.angular_scale(crate::geometry::ChartPoint::new(r, 0.0));
                    RingGeometry { r, f, df }
                })
                .collect(),
            _ => Vec::new(),
        };
        let filter = PoleFilter::new(&grid);
        let h = grid.spacing();
        let min_spacing = match &grid {
            Grid::Circle { .. } => h[0],
            Grid::Torus { .. } => h[0].min(h[1]),
            Grid::Polar { .. } => {
                let kept_limit = filter.as_ref().map_or(0, |f| f.rings.len());
                // first unfiltered ring sets the angular spacing
                let angular = rings.get(kept_limit).map_or(f64::INFINITY, |ring| ring.f * h[1]);
                h[0].min(angular)
            }
        };
        Ok(FlowProblem { base, warp, grid, policy, nodes, rings, filter, min_spacing })
    }

    /// Periodic on flat bases, frozen outer ring on polar ones.
    pub fn with_default_policy(base: BaseManifold, warp: WarpFactor, grid: Grid) -> Result<Self, SetupError> {
        let policy = BoundaryPolicy::default_for(&base);
        Self::new(base, warp, grid, policy)
    }

    pub fn base(&self) -> &BaseManifold {
        &self.base
    }
    pub fn warp(&self) -> &WarpFactor {
        &self.warp
    }
    pub fn grid(&self) -> &Grid {
        &self.grid
    }
    pub fn policy(&self) -> BoundaryPolicy {
        self.policy
    }
    pub fn nodes(&self) -> &[NodeGeometry] {
        &self.nodes
    }
    pub fn rings(&self) -> &[RingGeometry] {
        &self.rings
    }
    pub fn filter(&self) -> Option<&PoleFilter> {
        self.filter.as_ref()
    }
    pub fn dimension(&self) -> usize {
        self.grid.dimension()
    }

    /// Smallest effective spacing entering the explicit stability limit.
    pub fn min_spacing(&self) -> f64 {
        self.min_spacing
    }

    /// Whether node `idx` is updated by the flow.
    pub fn is_active(&self, idx: usize) -> bool {
        match (&self.grid, self.policy) {
            (Grid::Polar { nr, ntheta, .. }, BoundaryPolicy::DirichletFrozen) => idx / ntheta + 1 < *nr,
            _ => true,
        }
    }

    /// Nodes whose centred stencils reach only active nodes and at most the
    /// frozen ring, excluding the last `margin` rings on polar grids.
    pub fn interior_nodes(&self, margin: usize) -> Vec<usize> {
        match &self.grid {
            Grid::Polar { nr, ntheta, .. } => (0..nr.saturating_sub(margin) * ntheta).collect(),
            _ => (0..self.grid.len()).collect(),
        }
    }
}
