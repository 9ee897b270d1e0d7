//! Chern-Schwartz-MacPherson classes of torus-invariant constructible
//! functions on smooth complete toric varieties.
//!
//! Classes are computed from logarithmic tangent bundles of good closures and
//! glued over orbit stratifications; the [`csm`] module also carries
//! executable checks of the structural identities (blow-up compatibility,
//! inclusion-exclusion, covariance, naturality, fibrations).
//!
//! All arithmetic is exact over arbitrary-precision integers.

pub mod chow;
pub mod constructible;
pub mod corpus;
pub mod csm;
mod error;
pub mod fan;
pub mod lattice;
pub mod suites;

pub use error::{Error, Result};
