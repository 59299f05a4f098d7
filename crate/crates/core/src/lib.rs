//! Numerical integral geometry of convex bodies.
//!
//! Quermassintegrals and their affine analogues, Minkowski valuations given by
//! generating functions or spherical Crofton measures, polar volume products,
//! and derivative-free extremal search over bodies of revolution.

pub mod bodies;
pub mod error;
pub mod extremal;
pub mod harmonic;
pub mod io;
pub mod jacobi;
pub(crate) mod lp;
pub mod minkval;
pub mod positivity;
pub mod quermass;
pub mod scalar;
pub mod sphquad;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Zonal = harmonic::ZonalFunction<f64>;
pub type Zonal32 = harmonic::ZonalFunction<f32>;

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
