//! Equivariant flow of rotationally symmetric hypersurfaces of hyperbolic
//! space, reduced to profile curves in the orbit half-plane, and the
//! scenarios contrasting graphs over the slice in the equidistant sense with
//! graphs in the geodesic sense.

mod chart;
mod curve;
mod run;

pub use chart::{from_geodesic, hyperboloid, pullback_defect, slice_distance, slice_distance_gradient, sphere_point, to_geodesic};
pub use curve::{
    area_variation, generated_mean_curvature, graph_measures, CurveError, EndCondition, Frame, GraphMeasure,
    ProfileCurve, SPACING_BAND,
};
pub use run::{
    run_counterexample, sphere_extinction_time, CounterStop, CounterexampleReport, CounterflowError,
    CounterflowSettings, FailureCause, MeasureSample, NotionVerdict, Scenario,
};
