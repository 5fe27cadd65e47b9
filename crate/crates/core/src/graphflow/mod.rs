//! Discrete graphs, their pointwise geometry and explicit time integration
//! of the graph flow equation.

mod fields;
mod grid;
pub mod pointwise;
mod problem;
mod run;
mod state;
mod step;
mod stencil;

pub use fields::{compute_gradient_v, mean_curvature, second_fundamental_form, GraphFields, NodeFields};
pub use grid::{Grid, MIN_NODES_PER_AXIS};
pub use problem::{BoundaryPolicy, FlowProblem, NodeGeometry, PoleFilter, RingGeometry};
pub use run::{run_flow, FlowError, RunSettings, SampleSchedule, StopReason, Trajectory};
pub use state::GraphState;
pub use step::{flow_speed, step_flow, DtPolicy, Integrator, Scheme, StepError, BLOW_UP_GRADIENT, MAX_CFL_FRACTION};
pub use stencil::{for_each_jet, jets, Jet, Sweep};
