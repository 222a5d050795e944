//! Numerical laboratory for the Hermitian exterior algebra of (p,q)-forms:
//! positivity cones with explicit certificates, spectral form calculus on
//! flat complex tori, a Monge-Ampère-type solver for form-valued unknowns,
//! and duality/separation searches, all property-tested at desk scale.

pub mod error;
pub mod exterior;
pub mod hodge;
pub mod linalg;
pub mod metric;
pub mod sample;

pub use error::{Error, Result};
