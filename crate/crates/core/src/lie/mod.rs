//! Graded nilpotent Lie algebras with exact structure constants.

mod algebra;
mod derivation;
mod element;
pub mod expr;
pub mod hall;
mod ops;
pub mod spec_format;

pub use algebra::{AlgebraId, BracketEntry, Brackets, CarnotAlgebra, DEFAULT_DIM_CAP};
pub(crate) use algebra::format_terms;
pub use derivation::Derivation;
pub use element::{Covector, GroupElement, LieElement};
pub use hall::{witt_dimension, HallWord};
pub use ops::{Homomorphism, ProductAlgebra};
