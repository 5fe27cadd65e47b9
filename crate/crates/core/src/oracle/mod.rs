//! Independent finite-difference checks of the closed-form identities.
//! Nothing here calls the production stencils; only the pointwise fields of
//! [`GraphFields`](crate::graphflow::GraphFields) enter as the quantities
//! under test.

mod chart;
mod identities;
mod riemann;
mod variation;

pub use identities::{
    gradient_identity_check, laplacian_identity_check, v_evolution_residual, v_evolution_residual_weighted, IdentityReport,
    ResidualReport, HESSIAN_WEIGHT,
};
pub use riemann::{
    catalog_pairs, fd_frame_curvature, fd_riemann_check, sample_points, RiemannReport, FD_STEP, MAX_CONDITION,
    SELF_TEST_TOL,
};
pub use variation::{first_variation_check, graph_area, VariationReport};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("assembled curvature fails its own symmetry test by {defect} at {point:?}")]
    SelfTest { defect: f64, point: [f64; 2] },
    #[error("every sample point was rejected")]
    NoUsablePoints,
    #[error("residual needs three samples with increasing times")]
    BadSamples,
}

#[cfg(test)]
mod tests;
