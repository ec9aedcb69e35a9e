//! JSON description of a Carnot algebra.
//!
//! ```json
//! {
//!   "rank": 2, "step": 2, "layers": [2, 1],
//!   "labels": ["X1", "X2", "Z"],
//!   "brackets": [{"i": 1, "j": 2, "terms": [{"k": 3, "num": 1, "den": 1}]}]
//! }
//! ```
//!
//! Indices are 1-based. Numerators and denominators are JSON integers, or
//! decimal strings when they do not fit in 64 bits. `labels` is optional.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::algebra::CarnotAlgebra;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IntRepr {
    Small(i64),
    Big(String),
}

impl IntRepr {
    fn from_bigint(n: &BigInt) -> Self {
        match n.to_i64() {
            Some(v) => IntRepr::Small(v),
            None => IntRepr::Big(n.to_string()),
        }
    }

    fn to_bigint(&self) -> Result<BigInt> {
        match self {
            IntRepr::Small(v) => Ok(BigInt::from(*v)),
            IntRepr::Big(s) => s
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("invalid integer `{s}`"))),
        }
    }
}

fn one() -> IntRepr {
    IntRepr::Small(1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub k: usize,
    pub num: IntRepr,
    #[serde(default = "one")]
    pub den: IntRepr,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketSpec {
    pub i: usize,
    pub j: usize,
    pub terms: Vec<TermSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSpec {
    pub rank: usize,
    pub step: usize,
    pub layers: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub brackets: Vec<BracketSpec>,
}

impl AlgebraSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }
}

fn index(i: usize, dim: usize) -> Result<usize> {
    if i == 0 || i > dim {
        return Err(Error::InvalidArgument(format!(
            "basis index {i} outside 1..={dim}"
        )));
    }
    Ok(i - 1)
}

impl CarnotAlgebra {
    /// Builds and validates an algebra from its description.
    pub fn from_spec(spec: &AlgebraSpec) -> Result<Self> {
        if spec.layers.first() != Some(&spec.rank) {
            return Err(Error::InvalidArgument(format!(
                "rank {} does not match first layer dimension {:?}",
                spec.rank,
                spec.layers.first()
            )));
        }
        if spec.step != spec.layers.len() {
            return Err(Error::InvalidArgument(format!(
                "step {} does not match {} listed layers",
                spec.step,
                spec.layers.len()
            )));
        }
        let dim: usize = spec.layers.iter().sum();
        let mut brackets = Vec::with_capacity(spec.brackets.len());
        for b in &spec.brackets {
            let i = index(b.i, dim)?;
            let j = index(b.j, dim)?;
            let mut terms = Vec::with_capacity(b.terms.len());
            for t in &b.terms {
                let k = index(t.k, dim)?;
                let num = t.num.to_bigint()?;
                let den = t.den.to_bigint()?;
                if den.is_zero() {
                    return Err(Error::Parse(format!(
                        "zero denominator in [e{}, e{}]",
                        b.i, b.j
                    )));
                }
                terms.push((k, Scalar::new(num, den)));
            }
            brackets.push((i, j, terms));
        }
        Self::from_layers(spec.layers.clone(), spec.labels.clone(), brackets)
    }

    /// Canonical description: pairs `i < j` in lexicographic order, terms
    /// sorted by `k`, fractions reduced.
    pub fn to_spec(&self) -> AlgebraSpec {
        let n = self.dim();
        let mut brackets = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let terms = self.structure_constants(i, j);
                if terms.is_empty() {
                    continue;
                }
                brackets.push(BracketSpec {
                    i: i + 1,
                    j: j + 1,
                    terms: terms
                        .into_iter()
                        .map(|(k, c)| TermSpec {
                            k: k + 1,
                            num: IntRepr::from_bigint(c.numer()),
                            den: IntRepr::from_bigint(c.denom()),
                        })
                        .collect(),
                });
            }
        }
        AlgebraSpec {
            rank: self.rank(),
            step: self.step(),
            layers: self.layer_dims().to_vec(),
            labels: Some(self.labels().to_vec()),
            brackets,
        }
    }
}

/// Parses and validates a JSON algebra description.
pub fn load_algebra(text: &str) -> Result<CarnotAlgebra> {
    CarnotAlgebra::from_spec(&AlgebraSpec::from_json(text)?)
}

pub fn dump_algebra(algebra: &CarnotAlgebra) -> String {
    algebra.to_spec().to_json()
}
