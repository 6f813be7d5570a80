//! Plane-strain finite-element engine for seam-weld integrity under internal
//! hydrogen pressure.
//!
//! The workflow has two stages that share one mesh:
//!
//! 1. [`thermal`] + [`mech`]: multi-pass weld deposition with element birth,
//!    producing residual elastic/plastic strain at every quadrature point.
//! 2. [`coupling`]: pressurization with staggered elastoplastic deformation,
//!    stress-assisted hydrogen transport ([`hydrogen`]) and phase-field
//!    fracture ([`fracture`]), until cracking or global yielding.
//!
//! [`rcurve`] holds the boundary-layer crack-growth resistance harness used to
//! calibrate fracture energy and strength.

pub mod coupling;
pub mod error;
pub mod fem;
pub mod fracture;
pub mod hydrogen;
pub mod io;
pub mod materials;
pub mod mech;
pub mod mesh;
pub mod rcurve;
pub mod thermal;

pub use error::{Error, Result};
