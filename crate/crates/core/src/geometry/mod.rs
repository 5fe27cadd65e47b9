//! Closed-form geometry of the base, the warp and the ambient warped
//! product, plus the constants that parametrise every bound monitor.

mod ambient;
mod base;
mod comparison;
mod constants;
mod distance;
mod spline;
mod warp;

pub use ambient::{
    ambient_curvature, ambient_sectional, curvature_derivative_norm, frame_connection, FrameCurvature, Plane,
    SectionalRange, Tensor4, CURVATURE_DERIVATIVE_STEP,
};
pub use base::{BaseManifold, ChartPoint, RadialProfile, POLE_SLOPE_TOL, POLE_VALUE_TOL};
pub use comparison::{comparison_fn, comparison_s};
pub use constants::{estimate_constants, ConstantsRequest, DeltaRule, EstimateConstants};
pub use distance::{distance_to_slice, has_exact_distance, SliceDistance};
pub use spline::{CubicSpline, RadialTable};
pub use warp::{WarpFactor, WarpJet};
