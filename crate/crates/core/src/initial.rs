//! Catalog of initial heights.

use alloc::sync::Arc;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::SetupError;
use crate::geometry::{BaseManifold, ChartPoint};
use crate::graphflow::{FlowProblem, GraphState};
use crate::math::{abs, cos, exp, sin, sqrt, tanh, TAU};

/// Initial graph `u0`. Distances are measured from `center` on flat bases
/// (periodised) and from the pole on polar ones, where `center` is ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InitialData {
    Constant { value: f64 },
    /// `a sin(k1 x1) sin(k2 x2)` (or `a sin(k1 x)` on the circle) with
    /// wavenumbers `2 pi m / L`. Flat bases only.
    Sinusoid { amplitude: f64, modes: [u32; 2] },
    /// `a exp(-d^2 / w^2)`
    GaussianBump { amplitude: f64, width: f64, center: [f64; 2] },
    /// `s d`, Lipschitz with a kink at the center.
    LipschitzCone { slope: f64, center: [f64; 2] },
    /// `a tanh(k d)`
    TanhRamp { amplitude: f64, rate: f64, center: [f64; 2] },
}

/// Seeded smooth perturbation added on top of an [`InitialData`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Perturbation {
    pub amplitude: f64,
    pub seed: u64,
}

/// Number of random modes in a [`Perturbation`].
const PERTURBATION_MODES: usize = 4;

impl InitialData {
    pub fn key(&self) -> &'static str {
        match self {
            InitialData::Constant { .. } => "constant",
            InitialData::Sinusoid { .. } => "sinusoid",
            InitialData::GaussianBump { .. } => "gaussian-bump",
            InitialData::LipschitzCone { .. } => "lipschitz-cone",
            InitialData::TanhRamp { .. } => "tanh-ramp",
        }
    }

    pub fn check_base(&self, base: &BaseManifold) -> Result<(), SetupError> {
        if matches!(self, InitialData::Sinusoid { .. }) && base.is_polar() {
            return Err(SetupError::UnsupportedInitial { initial: self.key(), base: base.key() });
        }
        Ok(())
    }

    pub fn height(&self, base: &BaseManifold, x: ChartPoint) -> f64 {
        match *self {
            InitialData::Constant { value } => value,
            InitialData::Sinusoid { amplitude, modes } => {
                let l = periods(base);
                let s1 = sin(TAU * modes[0] as f64 * x.0[0] / l[0]);
                if base.dimension() == 1 {
                    amplitude * s1
                } else {
                    amplitude * s1 * sin(TAU * modes[1] as f64 * x.0[1] / l[1])
                }
            }
            InitialData::GaussianBump { amplitude, width, center } => {
                let d = distance(base, x, center);
                amplitude * exp(-d * d / (width * width))
            }
            InitialData::LipschitzCone { slope, center } => slope * distance(base, x, center),
            InitialData::TanhRamp { amplitude, rate, center } => amplitude * tanh(rate * distance(base, x, center)),
        }
    }

    /// Samples the heights on the grid of `problem`, optionally perturbed.
    pub fn build(&self, problem: Arc<FlowProblem>, perturbation: Option<Perturbation>) -> Result<GraphState, SetupError> {
        self.check_base(problem.base())?;
        let base = problem.base().clone();
        let noise = perturbation.map(|p| RandomModes::new(&base, p));
        GraphState::from_fn(problem, |x| {
            let extra = noise.as_ref().map_or(0.0, |m| m.eval(&base, x));
            self.height(&base, x) + extra
        })
    }
}

fn periods(base: &BaseManifold) -> [f64; 2] {
    match base {
        BaseManifold::FlatCircle { length } => [*length, 1.0],
        BaseManifold::FlatTorus { lengths } => *lengths,
        BaseManifold::Polar { .. } => [TAU, TAU],
    }
}

/// Distance used by the radial catalog entries.
pub fn distance(base: &BaseManifold, x: ChartPoint, center: [f64; 2]) -> f64 {
    if base.is_polar() {
        return x.0[0];
    }
    let l = periods(base);
    let mut d2 = 0.0;
    for axis in 0..base.dimension() {
        let mut d = abs(x.0[axis] - center[axis]) % l[axis];
        if d > 0.5 * l[axis] {
            d = l[axis] - d;
        }
        d2 += d * d;
    }
    sqrt(d2)
}

/// Low-mode trigonometric sum on flat bases; on polar ones a Gaussian
/// envelope times `r^2 cos(2 theta + c)` and a radial term, both smooth at
/// the pole.
struct RandomModes {
    terms: Vec<(f64, [u32; 2], f64)>,
}

fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

impl RandomModes {
    fn new(base: &BaseManifold, p: Perturbation) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
        let mut terms = Vec::with_capacity(PERTURBATION_MODES);
        for _ in 0..PERTURBATION_MODES {
            let amp = p.amplitude * (2.0 * unit(&mut rng) - 1.0) / PERTURBATION_MODES as f64;
            let m1 = 1 + (rng.next_u32() % 2);
            let m2 = if base.dimension() == 2 { rng.next_u32() % 3 } else { 0 };
            let phase = TAU * unit(&mut rng);
            terms.push((amp, [m1, m2], phase));
        }
        RandomModes { terms }
    }

    fn eval(&self, base: &BaseManifold, x: ChartPoint) -> f64 {
        if base.is_polar() {
            let r = x.0[0];
            let env = exp(-r * r);
            return self
                .terms
                .iter()
                .enumerate()
                .map(|(k, &(a, _, c))| if k % 2 == 0 { a * env } else { a * r * r * env * cos(2.0 * x.0[1] + c) })
                .sum();
        }
        let l = periods(base);
        self.terms
            .iter()
            .map(|&(a, m, c)| a * sin(TAU * (m[0] as f64 * x.0[0] / l[0] + m[1] as f64 * x.0[1] / l[1]) + c))
            .sum()
    }
}
