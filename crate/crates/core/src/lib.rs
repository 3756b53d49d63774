//! Geometry of spacelike 2-surfaces in static spherically symmetric spacetimes.
//!
//! The crate is organized bottom-up:
//!
//! * [`symfunc`]: elementary symmetric functions, polarizations and the mixed
//!   curvatures `P_{r,s}`.
//! * [`jet`]: second-order forward-mode jets in two variables.
//! * [`spacetime`]: the static metric family, curvature and the conformal
//!   Killing-Yano form `Q = r dr∧dt`.
//! * [`harmonics`], [`quadrature`]: spectral tools on the parameter sphere.
//! * [`surface`]: immersions, null frames and derived fields on a mesh.
//! * [`verify`]: integral identities and inequalities as [`verify::IdentityReport`]s.
//! * [`nullflow`]: the affine null flow and the monotone functional.

mod eigen;
pub mod error;
pub mod harmonics;
pub mod jet;
pub mod nullflow;
pub mod quadrature;
pub mod spacetime;
pub mod surface;
pub mod symfunc;
pub mod verify;

pub use error::{GeomError, Result};
