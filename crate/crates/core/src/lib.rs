//! Exact computations on Carnot groups: free nilpotent Lie algebras in a
//! Hall basis, group arithmetic in exponential coordinates, abnormal
//! varieties, endpoint-map certificates, step-two characterizations and
//! Sard-type rank criteria.

pub mod abnormal;
pub mod control_format;
pub mod endpoint;
pub mod error;
pub mod f33;
pub mod group;
pub mod linalg;
pub mod lie;
pub mod sard;
pub mod scalar;
pub mod step2;

pub use error::{Error, Result};
pub use lie::{CarnotAlgebra, Covector, Derivation, GroupElement, Homomorphism, LieElement};
pub use scalar::{Coeff, Polynomial, Scalar};
