//! Parser for linear combinations of labelled basis vectors, e.g.
//! `X2 + X212 - 3/2*X2111` or `0`.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{parse_scalar, Scalar};

/// Splits on top-level `+`/`-`, returning `(negative, term)` pairs.
fn split_terms(text: &str) -> Result<Vec<(bool, String)>> {
    let mut terms = Vec::new();
    let mut negative = false;
    let mut current = String::new();
    let mut depth = 0i32;
    for ch in text.chars() {
        match ch {
            '[' | '(' => {
                depth += 1;
                current.push(ch);
            }
            ']' | ')' => {
                depth -= 1;
                if depth < 0 {
                    return Err(Error::Parse(format!("unbalanced `{ch}` in `{text}`")));
                }
                current.push(ch);
            }
            '+' | '-' if depth == 0 => {
                let trimmed = current.trim();
                if trimmed.is_empty() {
                    if ch == '-' {
                        negative = !negative;
                    }
                } else if trimmed.ends_with('*') || trimmed.ends_with('/') {
                    return Err(Error::Parse(format!("dangling operator before `{ch}`")));
                } else {
                    terms.push((negative, std::mem::take(&mut current)));
                    negative = ch == '-';
                }
            }
            _ => current.push(ch),
        }
    }
    if depth != 0 {
        return Err(Error::Parse(format!("unbalanced brackets in `{text}`")));
    }
    if current.trim().is_empty() {
        return Err(Error::Parse(format!("missing term in `{text}`")));
    }
    terms.push((negative, current));
    Ok(terms)
}

/// Parses `c*Label`, `cLabel`, `Label` or a bare zero.
fn parse_term(term: &str) -> Result<(Scalar, Option<&str>)> {
    let term = term.trim();
    match term.find(|c: char| c.is_ascii_alphabetic()) {
        None => {
            let c = parse_scalar(term)?;
            Ok((c, None))
        }
        Some(p) => {
            let coeff = term[..p].trim();
            let label = term[p..].trim();
            let coeff = coeff.strip_suffix('*').unwrap_or(coeff).trim();
            let c = if coeff.is_empty() {
                Scalar::one()
            } else {
                parse_scalar(coeff)?
            };
            if label.chars().any(char::is_whitespace) {
                return Err(Error::Parse(format!("malformed term `{term}`")));
            }
            Ok((c, Some(label)))
        }
    }
}

/// Parses a linear combination into a coefficient vector of length `dim`,
/// resolving labels with `lookup`.
pub fn parse_linear_combination<F>(text: &str, dim: usize, lookup: F) -> Result<Vec<Scalar>>
where
    F: Fn(&str) -> Option<usize>,
{
    let mut out = vec![Scalar::zero(); dim];
    for (negative, term) in split_terms(text)? {
        let (c, label) = parse_term(&term)?;
        let c = if negative { -c } else { c };
        match label {
            Some(l) => {
                let k = lookup(l).ok_or_else(|| Error::Parse(format!("unknown basis label `{l}`")))?;
                if k >= dim {
                    return Err(Error::Parse(format!("label `{l}` out of range")));
                }
                out[k] += c;
            }
            None if c.is_zero() => {}
            None => {
                return Err(Error::Parse(format!(
                    "constant term `{}` needs a basis label",
                    term.trim()
                )))
            }
        }
    }
    Ok(out)
}
