//! Deformed random-partition models of 4D and 5D U(1) gauge theories.
//!
//! The crate covers the whole chain from exact combinatorics to the
//! thermodynamic limit:
//!
//! - [`partitions`]: partitions, hook lengths, Maya-diagram densities and moments.
//! - [`model`]: Boltzmann weights, truncated partition functions and the
//!   kernel/energy-functional rewriting of the hook products.
//! - [`curve`]: the deformed Seiberg-Witten curve and the Newton solvers for
//!   its parameters.
//! - [`limitshape`]: the resolvent `W(z)`, the limit-shape density and
//!   Riemann-Hilbert residual checks.
//! - [`dtoda`]: Laurent-series calculus for the dispersionless Toda
//!   identifications (Lax function, Orlov-Schulman series, string equations).
//! - [`prepotential`]: critical energy and its coupling derivatives by
//!   density, contour and finite-difference routes.
//! - [`sampler`]: Poissonized Plancherel sampling via RSK.

pub mod curve;
pub mod dtoda;
pub mod error;
pub mod limitshape;
pub mod model;
pub mod partitions;
pub mod prepotential;
pub mod quad;
pub mod sampler;


pub use curve::{CurveData, Point, Potential, Side};
pub use model::{ModelParams, Theory};
pub use error::{Error, Result};
pub use partitions::{MayaDensity, Partition};
