//! Exact rational and integer linear algebra.
//!
//! Everything here works on arbitrary-precision integers and rationals; no
//! floating point enters any of these routines. Kernels over ℚ come from a
//! fraction-free Gauss–Jordan elimination, saturated integer bases from a
//! Hermite normal form of a unimodularly reduced system, and Smith normal
//! form is used to certify saturation.

mod lattice;
mod rational;

pub use lattice::{
    hermite_normal_form, integer_kernel, integer_saturation, smith_invariants, Hnf,
    LatticeBasis, LatticeCertificate,
};
pub use rational::{rational_kernel, FractionFreeEchelon, RationalMatrix};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

/// Exact inner product of two integer vectors.
pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Divides `v` by the gcd of its entries; zero vectors are left alone.
pub(crate) fn make_primitive(v: &mut [BigInt]) {
    let g = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if !g.is_zero() && g != BigInt::from(1) {
        for x in v.iter_mut() {
            *x /= &g;
        }
    }
}
