//! Text format for affinities and groups.
//!
//! ```text
//! # comment
//! dim 2
//! gen 1/2 0 | 1 0 0 -1
//! ```
//!
//! A `gen` line holds the translation, a bar, then the matrix in row-major order.

use std::fmt::Write;

use crate::exact::Matrix;
use crate::{Int, Rational};

use super::{AffineMap, SpaceGroup, SpaceGroupError};

/// Parses `t₁ … tₙ | a₁₁ a₁₂ … aₙₙ`.
pub fn parse_affine(s: &str) -> Result<AffineMap, String> {
    let (t, a) = s.split_once('|').ok_or_else(|| format!("missing '|' in {s:?}"))?;
    let t: Vec<Rational> = t
        .split_whitespace()
        .map(|x| x.parse::<Rational>().map_err(|_| format!("bad rational {x:?}")))
        .collect::<Result<_, _>>()?;
    let a: Vec<Int> = a
        .split_whitespace()
        .map(|x| x.parse::<Int>().map_err(|_| format!("bad integer {x:?}")))
        .collect::<Result<_, _>>()?;
    let n = t.len();
    if a.len() != n * n {
        return Err(format!("expected {} matrix entries, found {}", n * n, a.len()));
    }
    AffineMap::new(t, Matrix::from_vec(n, n, a)).map_err(|e| e.to_string())
}

/// Parses a group file into its dimension and generators.
pub fn parse_group(text: &str) -> Result<(usize, Vec<AffineMap>), SpaceGroupError> {
    let mut dim = None;
    let mut gens = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        let err = |msg: String| SpaceGroupError::Parse { line: no + 1, msg };
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(d) = line.strip_prefix("dim") {
            dim = Some(d.trim().parse::<usize>().map_err(|_| err(format!("bad dimension {d:?}")))?);
        } else if let Some(g) = line.strip_prefix("gen") {
            let n = dim.ok_or_else(|| err("`gen` before `dim`".into()))?;
            let g = parse_affine(g).map_err(err)?;
            if g.dim() != n {
                return Err(err(format!("generator of dimension {} in a dim {n} file", g.dim())));
            }
            gens.push(g);
        } else {
            return Err(err(format!("unrecognised line {line:?}")));
        }
    }
    let dim = dim.ok_or(SpaceGroupError::Parse { line: 0, msg: "missing `dim` header".into() })?;
    Ok((dim, gens))
}

/// Canonical text form: lattice basis, then reduced coset representatives.
pub fn format_group(g: &SpaceGroup) -> String {
    let mut out = format!("dim {}\n", g.dim());
    for h in g.canonical_generators() {
        writeln!(out, "gen {h}").expect("writing to a string");
    }
    out
}
