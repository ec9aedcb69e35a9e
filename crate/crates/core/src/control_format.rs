//! JSON description of a piecewise-constant control.
//!
//! ```json
//! {"algebra": "hxh", "breakpoints": [0, "1/2", 1], "values": [[1, 0, 0, 0], [0, "-2/3", 0, 0]]}
//! ```
//!
//! `algebra` names a built-in algebra (default `heisenberg`); rationals are
//! JSON integers or strings such as `"3/4"`. Without `breakpoints` the
//! segments are equally spaced.

use serde::{Deserialize, Serialize};

use crate::endpoint::PiecewiseControl;
use crate::error::{Error, Result};
use crate::lie::CarnotAlgebra;
use crate::scalar::{int, parse_scalar, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RationalRepr {
    Int(i64),
    Text(String),
}

impl RationalRepr {
    pub fn to_scalar(&self) -> Result<Scalar> {
        match self {
            RationalRepr::Int(v) => Ok(int(*v)),
            RationalRepr::Text(s) => parse_scalar(s),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebra: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub breakpoints: Option<Vec<RationalRepr>>,
    pub values: Vec<Vec<RationalRepr>>,
}

/// Built-in algebras: `heisenberg`, `hxh` (product of two Heisenberg
/// algebras, basis `X1..X4, Z1, Z2`) and free algebras written `fR,S`,
/// `f{R,S}` or `f_{R,S}`.
pub fn named_algebra(name: &str) -> Result<CarnotAlgebra> {
    let key = name.trim().to_ascii_lowercase();
    match key.as_str() {
        "heisenberg" | "h" => return Ok(CarnotAlgebra::heisenberg()),
        "hxh" | "h*h" => return hxh(),
        _ => {}
    }
    let body = key
        .strip_prefix('f')
        .map(|s| s.trim_start_matches('_'))
        .map(|s| s.strip_prefix('{').and_then(|t| t.strip_suffix('}')).unwrap_or(s))
        .ok_or_else(|| Error::Parse(format!("unknown algebra `{name}`")))?;
    let (r, s) = body
        .split_once(',')
        .ok_or_else(|| Error::Parse(format!("expected fR,S, got `{name}`")))?;
    let parse = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|_| Error::Parse(format!("invalid size in `{name}`")))
    };
    CarnotAlgebra::free(parse(r)?, parse(s)?)
}

/// `𝔥 × 𝔥` with basis `X1, X2, X3, X4, Z1, Z2`, `[X1, X2] = Z1`,
/// `[X3, X4] = Z2`.
pub fn hxh() -> Result<CarnotAlgebra> {
    let h = CarnotAlgebra::heisenberg();
    let labels = ["X1", "X2", "X3", "X4", "Z1", "Z2"].map(String::from).to_vec();
    Ok(h.direct_product(&h, Some(labels))?.algebra)
}

pub fn parse_control(text: &str) -> Result<ControlSpec> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

/// Parses a control file and builds the algebra it refers to.
pub fn load_control(text: &str) -> Result<(CarnotAlgebra, PiecewiseControl)> {
    let spec = parse_control(text)?;
    let algebra = named_algebra(spec.algebra.as_deref().unwrap_or("heisenberg"))?;
    let values = spec
        .values
        .iter()
        .map(|row| row.iter().map(RationalRepr::to_scalar).collect())
        .collect::<Result<Vec<Vec<Scalar>>>>()?;
    if values.is_empty() {
        return Err(Error::InvalidArgument("control needs at least one segment".into()));
    }
    let control = match &spec.breakpoints {
        Some(bp) => {
            let bp = bp.iter().map(RationalRepr::to_scalar).collect::<Result<Vec<_>>>()?;
            PiecewiseControl::new(&algebra, bp, values)?
        }
        None => PiecewiseControl::uniform(&algebra, values)?,
    };
    Ok((algebra, control))
}
