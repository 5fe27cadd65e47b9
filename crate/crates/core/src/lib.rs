//! Mean-curvature flow of graphs `u: M -> R` in warped products `M x_phi R`
//! with metric `g_M + phi(x)^2 du^2`.
//!
//! The crate is `no_std` with `alloc`. Everything here is pure computation:
//! closed-form ambient geometry, explicit flow kernels on structured grids,
//! the bound monitors evaluated along trajectories, independent
//! finite-difference oracles, and an equivariant front tracker in hyperbolic
//! space. File formats and the command line live in the `warpmcf` crate.
#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod counterflow;
pub mod error;
pub mod geometry;
pub mod graphflow;
pub mod initial;
pub mod math;
pub mod monitors;
pub mod oracle;

pub use error::{BlowUp, GeometryError, SetupError};
