use num_traits::Zero;

use super::algebra::AlgebraId;
use crate::error::{Error, Result};
use crate::scalar::{to_f64, Scalar};

macro_rules! vector_type {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Clone, Debug, PartialEq, Eq)]
        pub struct $name {
            algebra: AlgebraId,
            coeffs: Vec<Scalar>,
        }

        impl $name {
            pub(crate) fn new(algebra: AlgebraId, coeffs: Vec<Scalar>) -> Self {
                Self { algebra, coeffs }
            }

            pub fn algebra(&self) -> AlgebraId {
                self.algebra
            }

            pub fn coeffs(&self) -> &[Scalar] {
                &self.coeffs
            }

            pub fn into_coeffs(self) -> Vec<Scalar> {
                self.coeffs
            }

            pub fn len(&self) -> usize {
                self.coeffs.len()
            }

            pub fn is_empty(&self) -> bool {
                self.coeffs.is_empty()
            }

            pub fn is_zero(&self) -> bool {
                self.coeffs.iter().all(|c| c.is_zero())
            }

            pub fn to_f64(&self) -> Vec<f64> {
                self.coeffs.iter().map(to_f64).collect()
            }

            fn same_algebra(&self, other: &Self) -> Result<()> {
                if self.algebra != other.algebra {
                    return Err(Error::AlgebraMismatch);
                }
                Ok(())
            }

            pub fn add(&self, other: &Self) -> Result<Self> {
                self.same_algebra(other)?;
                let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
                Ok(Self::new(self.algebra, coeffs))
            }

            pub fn sub(&self, other: &Self) -> Result<Self> {
                self.same_algebra(other)?;
                let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
                Ok(Self::new(self.algebra, coeffs))
            }

            pub fn scale(&self, s: &Scalar) -> Self {
                Self::new(self.algebra, self.coeffs.iter().map(|c| c * s).collect())
            }

            pub fn neg(&self) -> Self {
                Self::new(self.algebra, self.coeffs.iter().map(|c| -c).collect())
            }
        }
    };
}

vector_type!(
    /// Element of a Lie algebra, as coefficients over its basis.
    LieElement
);

vector_type!(
    /// Group element `exp(X)`, stored as the exponential coordinates of `X`.
    GroupElement
);

vector_type!(
    /// Linear form on a Lie algebra, as coefficients over the dual basis.
    Covector
);

impl GroupElement {
    /// The Lie algebra element `X` with `self = exp(X)`.
    pub fn log(&self) -> LieElement {
        LieElement::new(self.algebra, self.coeffs.clone())
    }

    /// Inverse, which is negation in exponential coordinates.
    pub fn inverse(&self) -> Self {
        self.neg()
    }
}

impl Covector {
    pub fn pair(&self, x: &LieElement) -> Result<Scalar> {
        if self.algebra != x.algebra {
            return Err(Error::AlgebraMismatch);
        }
        Ok(self.pair_coeffs(&x.coeffs))
    }

    pub fn pair_coeffs(&self, x: &[Scalar]) -> Scalar {
        crate::linalg::dot(&self.coeffs, x)
    }
}
