//! Exact maximal unitary-design orders for symmetric local random circuits.
//!
//! The engine turns a symmetry (ℤ₂, U(1), SU(2), or user-supplied
//! representation data) and a gate locality `k` into an integer lattice
//! optimisation problem, solves it exactly, and cross-checks the answer
//! against closed-form bounds and, at desk scale, against frame-potential
//! Monte Carlo of the circuits themselves.
//!
//! Pipeline:
//!
//! * [`repdata`] builds irrep labels, multiplicities `m`, irrep dimensions
//!   `r` and a rational basis of the constraint space `C`.
//! * [`exactla`] computes the saturated integer lattice `C⊥ ∩ ℤ^Λ`.
//! * [`optimizer`] minimises `⟨m, x⁺⟩` over nonzero lattice points.
//! * [`closedform`] evaluates the closed-form bounds used as oracles.
//! * [`numerics`] samples symmetric circuits and estimates frame potentials.

pub mod closedform;
pub mod error;
pub mod exactla;
pub mod numerics;
pub mod optimizer;
pub mod pipeline;
pub mod repdata;

pub use error::{Error, Result};
pub use optimizer::{Bound, DesignBound};
pub use repdata::{Symmetry, SymmetryData};

/// Engine version reported in run records.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
