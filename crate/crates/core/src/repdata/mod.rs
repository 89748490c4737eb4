//! Irrep labels, multiplicities, irrep dimensions and constraint-space bases
//! for the built-in symmetries, plus loading of user-supplied data.
//!
//! All three built-in backends depend only on `(n, k)`: the constraint space
//! is spanned by f-vectors of `A ⊗ I^{⊗(n−k)}` for `k`-qubit symmetric `A`,
//! regardless of which qubits the gates act on.

mod custom;

pub use custom::{build_custom, parse_custom, CustomFile, CustomSymmetry};

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactla::RationalMatrix;

#[derive(Debug, Error)]
pub enum RepDataError {
    #[error("locality k={k} needs n ≥ k+1 ≥ 2 qubits, got n={n}")]
    Locality { n: u32, k: u32 },
    #[error("malformed rational {0:?}")]
    MalformedRational(String),
    #[error("malformed integer {0:?}")]
    MalformedInteger(String),
    #[error("{field}[{index}] must be positive, got {value}")]
    NonPositive {
        field: &'static str,
        index: usize,
        value: String,
    },
    #[error("duplicate irrep label {0}")]
    DuplicateLabel(u32),
    #[error("{0}")]
    Shape(String),
    #[error("custom symmetry must assert semi_universal = true")]
    SemiUniversalityNotAsserted,
    #[error("invalid custom symmetry file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Symmetry {
    Z2,
    U1,
    SU2,
    Custom,
}

impl fmt::Display for Symmetry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Symmetry::Z2 => "z2",
            Symmetry::U1 => "u1",
            Symmetry::SU2 => "su2",
            Symmetry::Custom => "custom",
        })
    }
}

impl FromStr for Symmetry {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "z2" => Ok(Symmetry::Z2),
            "u1" => Ok(Symmetry::U1),
            "su2" => Ok(Symmetry::SU2),
            "custom" => Ok(Symmetry::Custom),
            other => Err(format!("unknown symmetry {other:?} (expected z2, u1, su2)")),
        }
    }
}

/// Canonical integer encoding of an irrep label.
///
/// ℤ₂: parity bit. U(1): `λ ∈ {0..n}`, the `Z^tot` eigenvalue being `n − 2λ`.
/// SU(2): `i ∈ {0..⌊n/2⌋}` for spin `n/2 − i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IrrepLabel(u32);

impl IrrepLabel {
    pub fn new(index: u32) -> Self {
        Self(index)
    }

    pub fn index(self) -> u32 {
        self.0
    }
}

impl fmt::Display for IrrepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Binomial coefficient with `C(a, b) = 0` whenever `b ∉ {0..a}`.
pub fn binomial(a: i64, b: i64) -> BigInt {
    if a < 0 || b < 0 || b > a {
        return BigInt::zero();
    }
    let b = b.min(a - b);
    let mut acc = BigInt::one();
    for i in 0..b {
        acc *= a - i;
        acc /= i + 1;
    }
    acc
}

/// Representation data entering the lattice optimisation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetryData {
    pub symmetry: Symmetry,
    /// Qubit count; absent for custom data that is not qubit-based.
    pub n: Option<u32>,
    pub k: Option<u32>,
    pub labels: Vec<IrrepLabel>,
    /// Multiplicities `m_λ`.
    pub m: Vec<BigInt>,
    /// Irrep dimensions `r_λ`.
    pub r: Vec<BigInt>,
    /// Linearly independent rational vectors spanning the constraint space.
    pub c_basis: Vec<Vec<BigRational>>,
}

impl SymmetryData {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn constraint_matrix(&self) -> RationalMatrix {
        RationalMatrix::from_rows(self.len(), self.c_basis.clone())
    }

    /// `Σ_λ r_λ m_λ`; equals `2^n` for the qubit backends.
    pub fn dimension_sum(&self) -> BigInt {
        self.r.iter().zip(&self.m).map(|(r, m)| r * m).sum()
    }

    /// Human-readable name of label `idx` (spins for SU(2)).
    pub fn label_name(&self, idx: usize) -> String {
        let label = self.labels[idx].index();
        match (self.symmetry, self.n) {
            (Symmetry::SU2, Some(n)) => {
                let twice = n as i64 - 2 * label as i64;
                if twice % 2 == 0 {
                    format!("spin {}", twice / 2)
                } else {
                    format!("spin {twice}/2")
                }
            }
            _ => label.to_string(),
        }
    }

    /// Whether the multiplicity vector lies in the constraint span. It always
    /// does for genuine symmetries because `m = f(I)`.
    pub fn multiplicities_in_span(&self) -> bool {
        let c = self.constraint_matrix();
        let mut rows = self.c_basis.clone();
        rows.push(self.m.iter().cloned().map(BigRational::from_integer).collect());
        RationalMatrix::from_rows(self.len(), rows).rank() == c.rank()
    }
}

/// Rejects `k < 1` and `n < k + 1`.
pub fn check_locality(n: u32, k: u32) -> Result<(), RepDataError> {
    if k < 1 || n < k + 1 {
        return Err(RepDataError::Locality { n, k });
    }
    Ok(())
}

fn int_row(v: Vec<BigInt>) -> Vec<BigRational> {
    v.into_iter().map(BigRational::from_integer).collect()
}

/// ℤ₂ symmetry `R(1) = Z^{⊗n}`: two parity sectors of multiplicity `2^{n−1}`,
/// constraint space spanned by `(1, 1)` for every `k ≥ 1`.
pub fn build_z2(n: u32, k: u32) -> Result<SymmetryData, RepDataError> {
    check_locality(n, k)?;
    let half = BigInt::one() << (n - 1);
    Ok(SymmetryData {
        symmetry: Symmetry::Z2,
        n: Some(n),
        k: Some(k),
        labels: vec![IrrepLabel(0), IrrepLabel(1)],
        m: vec![half.clone(), half],
        r: vec![BigInt::one(), BigInt::one()],
        c_basis: vec![vec![BigRational::one(), BigRational::one()]],
    })
}

/// U(1) symmetry generated by `Z^tot`: labels `λ = 0..n`, `m_λ = C(n, λ)`,
/// constraint basis `(c_j)_λ = C(n−k, λ−j)` for `j = 0..k`.
pub fn build_u1(n: u32, k: u32) -> Result<SymmetryData, RepDataError> {
    check_locality(n, k)?;
    let (n_, k_) = (n as i64, k as i64);
    let labels: Vec<IrrepLabel> = (0..=n).map(IrrepLabel).collect();
    let m = (0..=n_).map(|l| binomial(n_, l)).collect();
    let r = vec![BigInt::one(); labels.len()];
    let c_basis = (0..=k_)
        .map(|j| int_row((0..=n_).map(|l| binomial(n_ - k_, l - j)).collect()))
        .collect();
    Ok(SymmetryData {
        symmetry: Symmetry::U1,
        n: Some(n),
        k: Some(k),
        labels,
        m,
        r,
        c_basis,
    })
}

/// Multiplicity of spin `a/2 − i` among `a` spin-1/2 particles.
fn su2_multiplicity(a: i64, i: i64) -> BigInt {
    binomial(a, i) - binomial(a, i - 1)
}

/// SU(2) symmetry: label `i` is spin `n/2 − i`, `m_i = C(n, i) − C(n, i−1)`,
/// `r_i = n − 2i + 1`, constraint basis from the singlet projectors
/// `[(I − SWAP)/2]^{⊗j}` for `j = 0..⌊k/2⌋`.
pub fn build_su2(n: u32, k: u32) -> Result<SymmetryData, RepDataError> {
    check_locality(n, k)?;
    let n_ = n as i64;
    let top = n_ / 2;
    let labels = (0..=top as u32).map(IrrepLabel).collect();
    let m = (0..=top).map(|i| su2_multiplicity(n_, i)).collect();
    let r = (0..=top).map(|i| BigInt::from(n_ - 2 * i + 1)).collect();
    // spin n/2 − i among the remaining n − 2j qubits is index i − j there
    let c_basis = (0..=(k as i64) / 2)
        .map(|j| int_row((0..=top).map(|i| su2_multiplicity(n_ - 2 * j, i - j)).collect()))
        .collect();
    Ok(SymmetryData {
        symmetry: Symmetry::SU2,
        n: Some(n),
        k: Some(k),
        labels,
        m,
        r,
        c_basis,
    })
}

/// Dispatches to the built-in backend for `symmetry`.
pub fn build(symmetry: Symmetry, n: u32, k: u32) -> Result<SymmetryData, RepDataError> {
    match symmetry {
        Symmetry::Z2 => build_z2(n, k),
        Symmetry::U1 => build_u1(n, k),
        Symmetry::SU2 => build_su2(n, k),
        Symmetry::Custom => Err(RepDataError::Shape(
            "custom symmetries are loaded from a file".into(),
        )),
    }
}
