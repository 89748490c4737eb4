//! User-supplied representation data.
//!
//! ```json
//! {"labels": [0, 1], "m": ["4", "4"], "r": ["1", "1"],
//!  "c_basis": [["1", "1"]], "semi_universal": true}
//! ```

use std::collections::HashSet;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{IrrepLabel, RepDataError, Symmetry, SymmetryData};
use crate::exactla::RationalMatrix;

/// Raw custom-symmetry file. Numbers may be given as JSON strings (decimal
/// integers, rationals as `"p/q"`) or as plain JSON integers.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CustomFile {
    pub labels: Vec<Value>,
    pub m: Vec<Value>,
    pub r: Vec<Value>,
    pub c_basis: Vec<Vec<Value>>,
    #[serde(default)]
    pub semi_universal: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
}

/// Validated custom data plus the warnings raised while loading it.
#[derive(Clone, Debug)]
pub struct CustomSymmetry {
    pub data: SymmetryData,
    pub warnings: Vec<String>,
}

fn parse_integer(v: &Value) -> Result<BigInt, RepDataError> {
    match v {
        Value::String(s) => s
            .trim()
            .parse::<BigInt>()
            .map_err(|_| RepDataError::MalformedInteger(s.clone())),
        Value::Number(n) if n.is_i64() || n.is_u64() => n
            .to_string()
            .parse::<BigInt>()
            .map_err(|_| RepDataError::MalformedInteger(n.to_string())),
        other => Err(RepDataError::MalformedInteger(other.to_string())),
    }
}

fn parse_rational(v: &Value) -> Result<BigRational, RepDataError> {
    let text = match v {
        Value::String(s) => s.trim().to_string(),
        Value::Number(n) if n.is_i64() || n.is_u64() => n.to_string(),
        other => return Err(RepDataError::MalformedRational(other.to_string())),
    };
    let bad = || RepDataError::MalformedRational(text.clone());
    let (num, den) = match text.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (text.as_str(), "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

fn parse_label(v: &Value) -> Result<IrrepLabel, RepDataError> {
    let idx = parse_integer(v)?;
    u32::try_from(&idx)
        .map(IrrepLabel::new)
        .map_err(|_| RepDataError::Shape(format!("label {idx} is not a nonnegative 32-bit index")))
}

fn positive_vector(field: &'static str, values: &[Value]) -> Result<Vec<BigInt>, RepDataError> {
    values
        .iter()
        .enumerate()
        .map(|(index, v)| {
            let x = parse_integer(v)?;
            if !x.is_positive() {
                return Err(RepDataError::NonPositive {
                    field,
                    index,
                    value: x.to_string(),
                });
            }
            Ok(x)
        })
        .collect()
}

/// Validates a parsed custom file.
///
/// Dependent basis rows are reduced away with a warning. When `m` lies outside
/// the given span it is appended to the basis, since the identity operator is
/// always a local symmetric operator with f-vector `m`.
pub fn parse_custom(file: &CustomFile) -> Result<CustomSymmetry, RepDataError> {
    if !file.semi_universal {
        return Err(RepDataError::SemiUniversalityNotAsserted);
    }
    let labels = file
        .labels
        .iter()
        .map(parse_label)
        .collect::<Result<Vec<_>, _>>()?;
    let mut seen = HashSet::new();
    for l in &labels {
        if !seen.insert(*l) {
            return Err(RepDataError::DuplicateLabel(l.index()));
        }
    }
    let len = labels.len();
    if len == 0 {
        return Err(RepDataError::Shape("no irrep labels given".into()));
    }
    let m = positive_vector("m", &file.m)?;
    let r = positive_vector("r", &file.r)?;
    if m.len() != len || r.len() != len {
        return Err(RepDataError::Shape(format!(
            "{len} labels but {} multiplicities and {} dimensions",
            m.len(),
            r.len()
        )));
    }
    let mut rows = Vec::with_capacity(file.c_basis.len());
    for (i, row) in file.c_basis.iter().enumerate() {
        if row.len() != len {
            return Err(RepDataError::Shape(format!(
                "c_basis row {i} has {} entries, expected {len}",
                row.len()
            )));
        }
        rows.push(row.iter().map(parse_rational).collect::<Result<Vec<_>, _>>()?);
    }

    let mut warnings = vec![
        "semi-universality of the gate set is asserted by the caller, not verified".to_string(),
    ];
    let keep = RationalMatrix::from_rows(len, rows.clone()).independent_rows();
    if keep.len() < rows.len() {
        warnings.push(format!(
            "c_basis has {} dependent row(s); reduced to {} independent rows",
            rows.len() - keep.len(),
            keep.len()
        ));
    }
    let mut c_basis: Vec<Vec<BigRational>> = keep.into_iter().map(|i| rows[i].clone()).collect();

    let mut data = SymmetryData {
        symmetry: Symmetry::Custom,
        n: file.n,
        k: None,
        labels,
        m,
        r,
        c_basis: c_basis.clone(),
    };
    if !data.multiplicities_in_span() {
        warnings.push(
            "multiplicity vector m is not in span(c_basis); added it as the f-vector of the identity"
                .to_string(),
        );
        c_basis.push(data.m.iter().cloned().map(BigRational::from_integer).collect());
        data.c_basis = c_basis;
    }
    if let Some(n) = data.n {
        if data.dimension_sum() != BigInt::one() << n {
            warnings.push(format!("Σ r·m = {} differs from 2^{n}", data.dimension_sum()));
        }
    }
    for w in &warnings {
        log::warn!("{w}");
    }
    Ok(CustomSymmetry { data, warnings })
}

/// Loads and validates a custom-symmetry JSON file.
pub fn build_custom(path: impl AsRef<Path>) -> Result<CustomSymmetry, RepDataError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| RepDataError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let file: CustomFile = serde_json::from_str(&text)?;
    parse_custom(&file)
}
