//! Scenarios contrasting the two graph notions, and the run driver.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::chart::sphere_point;
use super::curve::{graph_measures, CurveError, EndCondition, ProfileCurve};
use crate::math::{cosh, log, tanh, PI};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Scenario {
    /// Cone `u = slope r` over the disc of the given radius, edge held.
    TiltedDisc { slope: f64, radius: f64 },
    /// `u = amplitude tanh(rate r)` over the disc, edge held.
    SteepEquidistantGraph { amplitude: f64, rate: f64, radius: f64 },
    /// Geodesic sphere about the origin, both ends on the axis.
    GeodesicSphere { radius: f64 },
    /// The slice `u = 0` over the disc.
    Slice { radius: f64 },
}

impl Scenario {
    pub fn key(&self) -> &'static str {
        match self {
            Scenario::TiltedDisc { .. } => "tilted-disc",
            Scenario::SteepEquidistantGraph { .. } => "steep-equidistant-graph",
            Scenario::GeodesicSphere { .. } => "geodesic-sphere",
            Scenario::Slice { .. } => "slice",
        }
    }

    /// Catalog entry by key with its documented parameters.
    pub fn from_key(key: &str) -> Option<Scenario> {
        Some(match key {
            "tilted-disc" => Scenario::TiltedDisc { slope: 1.0, radius: 3.0 },
            "steep-equidistant-graph" => Scenario::SteepEquidistantGraph { amplitude: 2.0, rate: 2.0, radius: 3.0 },
            "geodesic-sphere" => Scenario::GeodesicSphere { radius: 1.0 },
            "slice" => Scenario::Slice { radius: 3.0 },
            _ => return None,
        })
    }

    /// Reconstructed scenarios carry a label saying so.
    pub fn label(&self) -> Option<&'static str> {
        match self {
            Scenario::SteepEquidistantGraph { .. } | Scenario::TiltedDisc { .. } => Some("in the spirit of"),
            _ => None,
        }
    }

    fn check(&self) -> Result<(), CounterflowError> {
        let ok = match *self {
            Scenario::TiltedDisc { slope, radius } => slope.is_finite() && radius > 0.0 && radius <= 6.0,
            Scenario::SteepEquidistantGraph { amplitude, rate, radius } => {
                amplitude.is_finite() && rate > 0.0 && rate <= 20.0 && radius > 0.0 && radius <= 6.0
            }
            Scenario::GeodesicSphere { radius } => radius > 0.0 && radius <= 5.0,
            Scenario::Slice { radius } => radius > 0.0 && radius <= 6.0,
        };
        if ok {
            Ok(())
        } else {
            Err(CounterflowError::Parameters(self.key()))
        }
    }

    /// Initial profile with `nodes` nodes, uniform in orbit arclength.
    pub fn initial_curve(&self, multiplicity: usize, nodes: usize) -> Result<ProfileCurve, CounterflowError> {
        self.check()?;
        // oversample, then redistribute
        let m = 8 * nodes.max(4);
        let graph = |radius: f64, f: &dyn Fn(f64) -> f64| -> Vec<[f64; 2]> {
            (0..=m).map(|k| {
                let r = radius * k as f64 / m as f64;
                [r, f(r)]
            })
            .collect()
        };
        let (dense, ends) = match *self {
            Scenario::TiltedDisc { slope, radius } => (graph(radius, &|r| slope * r), [EndCondition::Axis, EndCondition::Fixed]),
            Scenario::SteepEquidistantGraph { amplitude, rate, radius } => {
                (graph(radius, &|r| amplitude * tanh(rate * r)), [EndCondition::Axis, EndCondition::Fixed])
            }
            Scenario::Slice { radius } => (graph(radius, &|_| 0.0), [EndCondition::Axis, EndCondition::Fixed]),
            Scenario::GeodesicSphere { radius } => {
                let mut pts: Vec<[f64; 2]> = (0..=m)
                    .map(|k| {
                        let (r, u) = sphere_point(radius, PI * k as f64 / m as f64);
                        [r, u]
                    })
                    .collect();
                pts[0][0] = 0.0;
                pts[m][0] = 0.0;
                (pts, [EndCondition::Axis, EndCondition::Axis])
            }
        };
        Ok(ProfileCurve::new(dense, multiplicity, ends)?.resample(nodes)?)
    }
}

/// Extinction time of the geodesic sphere of radius `rho0`, from
/// `d rho / dt = -n coth rho`.
pub fn sphere_extinction_time(rho0: f64, multiplicity: usize) -> f64 {
    log(cosh(rho0)) / multiplicity as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterflowSettings {
    pub multiplicity: usize,
    pub nodes: usize,
    pub end_time: f64,
    pub cadence: f64,
    pub cfl: f64,
    /// `v` above this counts as the graph property lost
    pub threshold: f64,
    /// the profile is extinct once its length falls below this fraction of
    /// the initial length
    pub extinction_ratio: f64,
}

impl Default for CounterflowSettings {
    fn default() -> Self {
        CounterflowSettings {
            multiplicity: 2,
            nodes: 200,
            end_time: 1.0,
            cadence: 0.01,
            cfl: 0.4,
            threshold: 1e3,
            extinction_ratio: 1e-2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CounterflowError {
    #[error("parameters of scenario `{0}` are outside the documented ranges")]
    Parameters(&'static str),
    #[error("invalid settings: {0}")]
    Settings(&'static str),
    #[error(transparent)]
    Curve(#[from] CurveError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureSample {
    pub t: f64,
    pub sup_v_eq: f64,
    pub sup_v_geo: f64,
    pub min_transversality_eq: f64,
    pub min_transversality_geo: f64,
    pub length: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailureCause {
    Threshold,
    SignChange,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum NotionVerdict {
    Persistent,
    Failed { t: f64, cause: FailureCause },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "kebab-case")]
pub enum CounterStop {
    ReachedEnd,
    Extinct { t: f64, length: f64 },
    Aborted { error: CurveError },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub scenario: Scenario,
    pub label: Option<String>,
    pub settings: CounterflowSettings,
    pub history: Vec<MeasureSample>,
    pub equidistant: NotionVerdict,
    pub geodesic: NotionVerdict,
    pub stop: CounterStop,
    pub steps: usize,
    pub final_curve: ProfileCurve,
}

fn sample(c: &ProfileCurve) -> MeasureSample {
    let m = graph_measures(c);
    let fold = |f: &dyn Fn(&super::GraphMeasure) -> f64, init: f64, max: bool| {
        m.iter().map(f).fold(init, |a, b| if max { a.max(b) } else { a.min(b) })
    };
    MeasureSample {
        t: c.t(),
        sup_v_eq: fold(&|g| g.v_eq, 0.0, true),
        sup_v_geo: fold(&|g| g.v_geo, 0.0, true),
        min_transversality_eq: fold(&|g| g.transversality_eq, f64::INFINITY, false),
        min_transversality_geo: fold(&|g| g.transversality_geo, f64::INFINITY, false),
        length: c.length(),
    }
}

fn verdict(history: &[MeasureSample], threshold: f64, pick: impl Fn(&MeasureSample) -> (f64, f64)) -> NotionVerdict {
    for s in history {
        let (v, tr) = pick(s);
        if !(tr > 0.0) {
            return NotionVerdict::Failed { t: s.t, cause: FailureCause::SignChange };
        }
        if v > threshold {
            return NotionVerdict::Failed { t: s.t, cause: FailureCause::Threshold };
        }
    }
    NotionVerdict::Persistent
}

/// Flows the scenario profile, sampling both graph measures every
/// `cadence` (sample times are hit exactly) and checking for
/// self-intersection at each sample. Extinction, pinching and
/// self-intersection end the run and are reported as its stop reason.
pub fn run_counterexample(scenario: &Scenario, settings: &CounterflowSettings) -> Result<CounterexampleReport, CounterflowError> {
    if !(settings.end_time > 0.0 && settings.cadence > 0.0) {
        return Err(CounterflowError::Settings("end time and cadence must be positive"));
    }
    if !(settings.cfl > 0.0 && settings.cfl <= 0.9) {
        return Err(CounterflowError::Settings("cfl fraction must lie in (0, 0.9]"));
    }
    if !(settings.extinction_ratio > 0.0 && settings.extinction_ratio < 1.0) {
        return Err(CounterflowError::Settings("extinction ratio must lie in (0, 1)"));
    }
    let mut curve = scenario.initial_curve(settings.multiplicity, settings.nodes)?;
    let l0 = curve.length();
    let mut history = alloc::vec![sample(&curve)];
    let mut steps = 0usize;
    let mut next_sample = 1u64;
    let sample_time = |k: u64| (k as f64 * settings.cadence).min(settings.end_time);
    let stop = loop {
        let target = sample_time(next_sample);
        let dt = curve.cfl_step(settings.cfl);
        let hit = curve.t() + dt >= target * (1.0 - 1e-12);
        let step = if hit { target - curve.t() } else { dt };
        match curve.step(step.max(f64::MIN_POSITIVE)) {
            Ok(mut c) => {
                if hit {
                    c = c.with_time(target);
                }
                curve = c;
            }
            Err(error) => break CounterStop::Aborted { error },
        }
        steps += 1;
        let length = curve.length();
        if length < settings.extinction_ratio * l0 {
            history.push(sample(&curve));
            break CounterStop::Extinct { t: curve.t(), length };
        }
        if hit {
            history.push(sample(&curve));
            if let Some((a, b)) = curve.self_intersection() {
                break CounterStop::Aborted { error: CurveError::SelfIntersection { a, b, t: curve.t() } };
            }
            if target >= settings.end_time {
                break CounterStop::ReachedEnd;
            }
            next_sample += 1;
        }
    };
    let equidistant = verdict(&history, settings.threshold, |s| (s.sup_v_eq, s.min_transversality_eq));
    let geodesic = verdict(&history, settings.threshold, |s| (s.sup_v_geo, s.min_transversality_geo));
    Ok(CounterexampleReport {
        scenario: scenario.clone(),
        label: scenario.label().map(String::from),
        settings: settings.clone(),
        history,
        equidistant,
        geodesic,
        stop,
        steps,
        final_curve: curve,
    })
}
