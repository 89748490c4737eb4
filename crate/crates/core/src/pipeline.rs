//! End-to-end computation: representation data to lattice to exact bound.

use crate::closedform::{self, ClosedFormBound, ClosedFormError};
use crate::exactla::{integer_saturation, rational_kernel, LatticeBasis, LatticeCertificate};
use crate::optimizer::{self, DesignBound, SearchOptions, SeedInfo};
use crate::repdata::{self, Symmetry, SymmetryData};
use crate::Result;

/// The saturated lattice `C⊥ ∩ ℤ^Λ`.
pub fn lattice(data: &SymmetryData) -> LatticeBasis {
    integer_saturation(&rational_kernel(&data.constraint_matrix()))
}

#[derive(Clone, Debug)]
pub struct OrderReport {
    pub data: SymmetryData,
    pub lattice: LatticeBasis,
    pub certificate: LatticeCertificate,
    pub seed: Option<SeedInfo>,
    pub bound: DesignBound,
    /// Closed-form comparison for built-in symmetries; the error explains
    /// why no closed form applies.
    pub closed_form: Option<std::result::Result<ClosedFormBound, String>>,
}

pub fn compute_order(data: SymmetryData, options: SearchOptions) -> Result<OrderReport> {
    let lattice = lattice(&data);
    let certificate = lattice.certify(&data.constraint_matrix());
    let (seed, bound) = optimizer::solve(&data, &lattice, options)?;
    let closed_form = match (data.symmetry, data.n, data.k) {
        (Symmetry::Custom, _, _) | (_, None, _) | (_, _, None) => None,
        (sym, Some(n), Some(k)) => Some(match closedform::bound(sym, n, k) {
            Ok(b) => Ok(b),
            Err(e @ ClosedFormError::Vanishes { .. }) => Err(e.to_string()),
            Err(e) => return Err(e.into()),
        }),
    };
    Ok(OrderReport {
        data,
        lattice,
        certificate,
        seed,
        bound,
        closed_form,
    })
}

/// Exact bound for a built-in symmetry.
pub fn order(symmetry: Symmetry, n: u32, k: u32, options: SearchOptions) -> Result<OrderReport> {
    compute_order(repdata::build(symmetry, n, k)?, options)
}
