use alloc::string::String;

/// Failures of the closed-form geometry layer.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error("chart point r = {r} is at the pole; polar charts exclude it")]
    PoleExcluded { r: f64 },
    #[error("warp factor is not positive ({value}) at sample {index}")]
    NonPositiveWarp { index: usize, value: f64 },
    #[error("warp `{warp}` is not defined on base `{base}`")]
    UnsupportedPair { base: &'static str, warp: &'static str },
    #[error("plane {plane} is not a valid frame plane in dimension {dimension}")]
    InvalidPlane { plane: String, dimension: usize },
    #[error("invalid radial table: {0}")]
    InvalidTable(String),
    #[error("radial profile violates smoothness at the pole: {0}")]
    PoleSmoothness(String),
    #[error("no sample points supplied")]
    EmptySampling,
    #[error("initial gradient supremum must be >= 1 (got {0})")]
    GradientBelowOne(f64),
    #[error("horizon must be positive (got {0})")]
    NonPositiveHorizon(f64),
}

/// Rejections raised while assembling a flow problem.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SetupError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("grid `{grid}` does not fit base `{base}`")]
    GridMismatch { grid: &'static str, base: &'static str },
    #[error("boundary policy `{policy}` is not allowed on base `{base}`")]
    PolicyMismatch { policy: &'static str, base: &'static str },
    #[error("resolution {got} along {axis} is below the minimum of {min}")]
    ResolutionTooSmall { axis: &'static str, got: usize, min: usize },
    #[error("polar grids need an even number of angular nodes (got {0})")]
    OddAngularCount(usize),
    #[error("invalid length parameter {name} = {value}")]
    InvalidLength { name: &'static str, value: f64 },
    #[error("u has {got} values but the grid has {want} nodes")]
    NodeCountMismatch { got: usize, want: usize },
    #[error("non-finite initial value at node {node}")]
    NonFiniteInitial { node: usize },
    #[error("cfl fraction must lie in (0, 0.9] (got {0})")]
    InvalidCfl(f64),
    #[error("time step must be positive and finite (got {0})")]
    InvalidStep(f64),
    #[error("end time must be positive (got {0})")]
    InvalidEndTime(f64),
    #[error("sample cadence must be positive (got {0})")]
    InvalidCadence(f64),
    #[error("initial data `{initial}` is not available on base `{base}`")]
    UnsupportedInitial { initial: &'static str, base: &'static str },
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlowUpKind {
    NonFinite,
    GradientOverflow,
}

/// The graph failed: a non-finite height or a gradient function beyond the
/// blow-up threshold was produced.
#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error, serde::Serialize, serde::Deserialize)]
#[error("graph blow-up ({kind:?}) at node {node}, t = {t}, value {value}")]
pub struct BlowUp {
    pub kind: BlowUpKind,
    pub node: usize,
    pub t: f64,
    pub value: f64,
}
