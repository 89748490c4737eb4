//! Closed-form design bounds for the built-in symmetries.
//!
//! The formulas equal the optimiser's exact value in the tight regime and are
//! upper bounds otherwise.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::repdata::{check_locality, RepDataError, Symmetry};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// The formula equals the exact optimum.
    Tight,
    /// The formula is only known to bound the optimum from above.
    UpperBoundOnly,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClosedFormBound {
    #[serde(serialize_with = "crate::closedform::as_decimal")]
    pub value: BigInt,
    pub regime: Regime,
    /// The `(n, k)` conditions under which the formula is claimed tight.
    pub validity: &'static str,
}

pub(crate) fn as_decimal<S: serde::Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

#[derive(Debug, Error)]
pub enum ClosedFormError {
    #[error(transparent)]
    Locality(#[from] RepDataError),
    #[error("no closed form for {0} symmetry")]
    Unsupported(Symmetry),
    #[error("closed form vanishes at n={n}, k={k}; it carries no information here")]
    Vanishes { n: u32, k: u32 },
}

fn product(terms: u32, factor: impl Fn(u32) -> i64) -> BigInt {
    (1..=terms).fold(BigInt::one(), |acc, a| acc * factor(a))
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * i)
}

fn exact_div(num: BigInt, den: BigInt) -> BigInt {
    let (q, r) = num.div_rem(&den);
    assert!(r.is_zero(), "closed form is not an integer: {num}/{den}");
    q
}

/// `2^{n−1}`.
pub fn bound_z2(n: u32, k: u32) -> Result<ClosedFormBound, ClosedFormError> {
    check_locality(n, k)?;
    Ok(ClosedFormBound {
        value: BigInt::one() << (n - 1),
        regime: Regime::Tight,
        validity: "n >= k+1",
    })
}

/// `2^{⌊k/2⌋} / ⌈k/2⌉! · Π_{α=1}^{⌈k/2⌉} (n − k + 2α − 1)`.
pub fn bound_u1(n: u32, k: u32) -> Result<ClosedFormBound, ClosedFormError> {
    check_locality(n, k)?;
    let terms = k.div_ceil(2);
    let prod = product(terms, |a| n as i64 - k as i64 + 2 * a as i64 - 1);
    let value = exact_div((BigInt::one() << (k / 2)) * prod, factorial(terms));
    let tight = u64::from(n) >= 1u64 << k || (matches!(k, 2..=4));
    Ok(ClosedFormBound {
        value,
        regime: if tight { Regime::Tight } else { Regime::UpperBoundOnly },
        validity: "n >= 2^k; all n >= k+1 for k in 2..=4",
    })
}

/// `2^{⌊k/2⌋} / (⌊k/2⌋+1)! · Π_{α=1}^{⌊k/2⌋+1} (n − 2α + 1)`.
///
/// At `n = k + 1` with `k` even the product contains the factor `0`, while the
/// gate set is universal and the true bound is infinite; that case is rejected.
pub fn bound_su2(n: u32, k: u32) -> Result<ClosedFormBound, ClosedFormError> {
    check_locality(n, k)?;
    let terms = k / 2 + 1;
    let prod = product(terms, |a| n as i64 - 2 * a as i64 + 1);
    if prod.is_zero() {
        return Err(ClosedFormError::Vanishes { n, k });
    }
    let value = exact_div((BigInt::one() << (k / 2)) * prod, factorial(terms));
    let tight = u64::from(n) >= 1u64 << (2 * terms)
        || (matches!(k, 2 | 3) && n >= 9)
        || (k == 4 && n >= 13);
    Ok(ClosedFormBound {
        value,
        regime: if tight { Regime::Tight } else { Regime::UpperBoundOnly },
        validity: "n >= 2^(2(floor(k/2)+1)); n >= 9 for k in {2,3}; n >= 13 for k = 4",
    })
}

pub fn bound(symmetry: Symmetry, n: u32, k: u32) -> Result<ClosedFormBound, ClosedFormError> {
    match symmetry {
        Symmetry::Z2 => bound_z2(n, k),
        Symmetry::U1 => bound_u1(n, k),
        Symmetry::SU2 => bound_su2(n, k),
        Symmetry::Custom => Err(ClosedFormError::Unsupported(symmetry)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(b: Result<ClosedFormBound, ClosedFormError>) -> i64 {
        i64::try_from(b.unwrap().value).unwrap()
    }

    #[test]
    fn small_values() {
        assert_eq!(v(bound_z2(5, 2)), 16);
        // k = 2: 2(n−1)
        for n in 3..20 {
            assert_eq!(v(bound_u1(n, 2)), 2 * (n as i64 - 1));
        }
        // k = 3: (n−2)(n)
        assert_eq!(v(bound_u1(5, 3)), 15);
        // k = 2: 2/2 · (n−1)(n−3)
        assert_eq!(v(bound_su2(9, 2)), 48);
        assert_eq!(v(bound_su2(10, 3)), 63);
    }

    #[test]
    fn regimes() {
        assert_eq!(bound_u1(5, 4).unwrap().regime, Regime::Tight);
        assert_eq!(bound_u1(20, 5).unwrap().regime, Regime::UpperBoundOnly);
        assert_eq!(bound_u1(32, 5).unwrap().regime, Regime::Tight);
        assert_eq!(bound_su2(8, 2).unwrap().regime, Regime::UpperBoundOnly);
        assert_eq!(bound_su2(13, 4).unwrap().regime, Regime::Tight);
        assert_eq!(bound_su2(64, 5).unwrap().regime, Regime::Tight);
    }

    #[test]
    fn vanishing_cases_are_rejected() {
        assert!(matches!(bound_su2(3, 2), Err(ClosedFormError::Vanishes { .. })));
        assert!(matches!(bound_su2(5, 4), Err(ClosedFormError::Vanishes { .. })));
        assert!(bound_su2(4, 3).is_ok());
    }

    #[test]
    fn invalid_locality() {
        assert!(bound_z2(2, 2).is_err());
        assert!(bound_u1(3, 0).is_err());
    }
}
