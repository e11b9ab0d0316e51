//! Numerical toolkit for the planar circular restricted three-body problem.
//!
//! The modules follow the natural dependency order: [`dynamics`] holds the
//! Hamiltonian and Lagrange data, [`regularization`] the elliptic chart,
//! [`flow`] the integrator, and the remaining modules build periodic orbits,
//! indices, convexity scans and Liouville fields on top.

// Reference constants are kept at full printed precision.
#![allow(clippy::excessive_precision)]

pub mod convexity;
pub mod dynamics;
pub mod error;
pub mod flow;
pub mod index;
pub mod linalg;
pub mod liouville;
pub mod orbits;
pub mod regularization;
pub mod saddle_center;

pub use dynamics::{LagrangeData, MassRatio, RotatingState};
pub use error::{Cr3bpError, Result};
pub use flow::{Integrator, Solution};
pub use regularization::RegularizedState;
pub use saddle_center::SaddleCenterData;
