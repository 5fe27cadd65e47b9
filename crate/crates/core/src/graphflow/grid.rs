use serde::{Deserialize, Serialize};

use crate::error::SetupError;
use crate::geometry::{BaseManifold, ChartPoint};
use crate::math::TAU;

/// Smallest per-axis node count the stencils accept.
pub const MIN_NODES_PER_AXIS: usize = 4;

/// Uniform grid in chart coordinates. Node indices are row-major: `i * n2 + j`
/// on tori, `ring * ntheta + j` on polar grids.
///
/// Polar rings sit at `r_i = (i + 1/2) h` with `h = radius / (nr - 1/2)`, so
/// the pole is never a node and the last ring lies on the truncation circle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Grid {
    Circle { n: usize, length: f64 },
    Torus { n: [usize; 2], lengths: [f64; 2] },
    Polar { nr: usize, ntheta: usize, radius: f64 },
}

impl Grid {
    pub fn key(&self) -> &'static str {
        match self {
            Grid::Circle { .. } => "circle",
            Grid::Torus { .. } => "torus",
            Grid::Polar { .. } => "polar",
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Grid::Circle { n, .. } => *n,
            Grid::Torus { n, .. } => n[0] * n[1],
            Grid::Polar { nr, ntheta, .. } => nr * ntheta,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dimension(&self) -> usize {
        match self {
            Grid::Circle { .. } => 1,
            _ => 2,
        }
    }

    /// Chart spacings: `(h1, h2)` on flat grids, `(h_r, dtheta)` on polar.
    pub fn spacing(&self) -> [f64; 2] {
        match self {
            Grid::Circle { n, length } => [length / *n as f64, 0.0],
            Grid::Torus { n, lengths } => [lengths[0] / n[0] as f64, lengths[1] / n[1] as f64],
            Grid::Polar { nr, ntheta, radius } => [radius / (*nr as f64 - 0.5), TAU / *ntheta as f64],
        }
    }

    pub fn ring_radius(&self, ring: usize) -> f64 {
        match self {
            Grid::Polar { .. } => (ring as f64 + 0.5) * self.spacing()[0],
            _ => 0.0,
        }
    }

    pub fn point(&self, idx: usize) -> ChartPoint {
        let h = self.spacing();
        match self {
            Grid::Circle { .. } => ChartPoint::new(idx as f64 * h[0], 0.0),
            Grid::Torus { n, .. } => ChartPoint::new((idx / n[1]) as f64 * h[0], (idx % n[1]) as f64 * h[1]),
            Grid::Polar { ntheta, .. } => {
                ChartPoint::new(self.ring_radius(idx / ntheta), (idx % ntheta) as f64 * h[1])
            }
        }
    }

    pub fn points(&self) -> alloc::vec::Vec<ChartPoint> {
        (0..self.len()).map(|k| self.point(k)).collect()
    }

    /// Area (or length) element attached to each node.
    pub fn cell_measure(&self, base: &BaseManifold, idx: usize) -> f64 {
        let h = self.spacing();
        match self {
            Grid::Circle { .. } => h[0],
            Grid::Torus { .. } => h[0] * h[1],
            Grid::Polar { nr, ntheta, .. } => {
                let ring = idx / ntheta;
                let (f, _) = base.angular_scale(self.point(idx));
                let dr = if ring + 1 == *nr { 0.5 * h[0] } else { h[0] };
                f * dr * h[1]
            }
        }
    }

    /// Copy with every axis count doubled. On polar grids the radial spacing
    /// becomes `radius / (2 nr - 1/2)`, within `1/(4 nr)` of half.
    pub fn refined(&self) -> Grid {
        match self {
            Grid::Circle { n, length } => Grid::Circle { n: 2 * n, length: *length },
            Grid::Torus { n, lengths } => Grid::Torus { n: [2 * n[0], 2 * n[1]], lengths: *lengths },
            Grid::Polar { nr, ntheta, radius } => Grid::Polar { nr: 2 * nr, ntheta: 2 * ntheta, radius: *radius },
        }
    }

    pub fn check_base(&self, base: &BaseManifold) -> Result<(), SetupError> {
        let fits = matches!(
            (self, base),
            (Grid::Circle { .. }, BaseManifold::FlatCircle { .. })
                | (Grid::Torus { .. }, BaseManifold::FlatTorus { .. })
                | (Grid::Polar { .. }, BaseManifold::Polar { .. })
        );
        if !fits {
            return Err(SetupError::GridMismatch { grid: self.key(), base: base.key() });
        }
        let positive = |name: &'static str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(SetupError::InvalidLength { name, value: v })
            }
        };
        let enough = |axis: &'static str, got: usize| {
            if got >= MIN_NODES_PER_AXIS {
                Ok(())
            } else {
                Err(SetupError::ResolutionTooSmall { axis, got, min: MIN_NODES_PER_AXIS })
            }
        };
        match (self, base) {
            (Grid::Circle { n, length }, BaseManifold::FlatCircle { length: l }) => {
                enough("x", *n)?;
                positive("length", *length)?;
                if (length - l).abs() > 1e-12 * l {
                    return Err(SetupError::InvalidLength { name: "grid length", value: *length });
                }
            }
            (Grid::Torus { n, lengths }, BaseManifold::FlatTorus { lengths: l }) => {
                enough("x1", n[0])?;
                enough("x2", n[1])?;
                for k in 0..2 {
                    positive("torus period", lengths[k])?;
                    if (lengths[k] - l[k]).abs() > 1e-12 * l[k] {
                        return Err(SetupError::InvalidLength { name: "grid period", value: lengths[k] });
                    }
                }
            }
            (Grid::Polar { nr, ntheta, radius }, BaseManifold::Polar { profile }) => {
                enough("r", *nr)?;
                enough("theta", *ntheta)?;
                if ntheta % 2 != 0 {
                    return Err(SetupError::OddAngularCount(*ntheta));
                }
                positive("radius", *radius)?;
                if *radius > profile.max_radius() {
                    return Err(SetupError::InvalidLength { name: "radius beyond profile table", value: *radius });
                }
            }
            _ => unreachable!(),
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polar_rings_are_staggered() {
        let g = Grid::Polar { nr: 16, ntheta: 16, radius: 3.0 };
        let h = g.spacing()[0];
        assert!((g.ring_radius(0) - 0.5 * h).abs() < 1e-15);
        assert!((g.ring_radius(15) - 3.0).abs() < 1e-12);
        assert_eq!(g.len(), 256);
        let p = g.point(16 * 3 + 4);
        assert!((p.0[0] - 3.5 * h).abs() < 1e-15);
        assert!((p.0[1] - 4.0 * TAU / 16.0).abs() < 1e-15);
    }

    #[test]
    fn mismatches_rejected() {
        let torus = BaseManifold::FlatTorus { lengths: [TAU, TAU] };
        let g = Grid::Polar { nr: 16, ntheta: 16, radius: 3.0 };
        assert!(matches!(g.check_base(&torus), Err(SetupError::GridMismatch { .. })));
        let odd = Grid::Polar { nr: 16, ntheta: 15, radius: 3.0 };
        assert!(matches!(
            odd.check_base(&BaseManifold::hyperbolic_polar()),
            Err(SetupError::OddAngularCount(15))
        ));
        let tiny = Grid::Torus { n: [2, 16], lengths: [TAU, TAU] };
        assert!(tiny.check_base(&torus).is_err());
    }

    #[test]
    fn polar_cells_tile_the_disc() {
        let b = BaseManifold::euclidean_polar();
        let g = Grid::Polar { nr: 64, ntheta: 64, radius: 2.0 };
        let area: f64 = (0..g.len()).map(|k| g.cell_measure(&b, k)).sum();
        // midpoint rule on the staggered rings
        assert!((area - core::f64::consts::PI * 4.0).abs() < 1e-2, "{area}");
    }
}
