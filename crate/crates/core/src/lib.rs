//! Numerical library for the Minkowski–Funk transform on the 2-sphere.
//!
//! The crate is organised bottom-up:
//!
//! * [`sphere`]: points, rotations, great and latitude circles, grids and quadrature.
//! * [`harmonics`]: real spherical-harmonic analysis and synthesis.
//! * [`transform`]: the great-circle transform, its dual, the generalized
//!   (distance-θ) variants, spherical means and the cosine transform.
//! * [`fractional`]: Riemann–Liouville fractional integrals and derivatives.
//! * [`inversion`]: harmonic and Abel-type reconstruction, plus the
//!   dual-of-transform / fractional-integral identity checker.
//! * [`convex`]: support functions, width, circumference and Minkowski's
//!   constant-width theorem.

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod convex;
pub mod error;
pub mod fractional;
pub mod harmonics;
pub mod inversion;
pub mod sphere;
pub mod transform;

pub use convex::{BodyKind, DirectionTable, SupportBody};
pub use error::{FunkError, Result};
pub use fractional::RadialProfile;
pub use harmonics::{HarmonicSpectrum, SphericalField};
pub use inversion::AbelReconstructionReport;
pub use sphere::{GreatCircle, GridFunction, Rotation, SphereGrid, UnitVector3};
pub use transform::CircleFunction;
