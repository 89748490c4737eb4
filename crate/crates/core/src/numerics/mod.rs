//! Desk-scale numerical checks of the exact results.
//!
//! Dense complex matrices only; everything here is meant for `n ≲ 8` qubits.
//! Qubit `q` of an `n`-qubit register is bit `n − 1 − q` of a computational
//! basis index, so `A ⊗ I` acts on the first qubits.

mod blocks;
mod circuit;
mod design;
mod frame;
mod haar;
mod operators;
mod span;

pub use blocks::{
    analytic_block_structure, block_structure, decompose_commutant, label_sectors,
    BlockStructure, Generator, Sector,
};
pub use circuit::{sample_circuit, CircuitEnsemble, CircuitSpec};
pub use design::{design_test, DesignTestConfig, DesignTestReport, DepthPoint, Verdict};
pub use frame::{
    draw_vectors, estimate_frame_potential, estimate_frame_potential_u,
    exact_haar_frame_potential, frame_potential_from_draws, permutations_with_bounded_lis,
    Ensemble, EstimatorKind, FramePotentialEstimate, FullHaarEnsemble, IdentityEnsemble,
    SymmetricHaarEnsemble,
};
pub use haar::{haar_unitary, sample_symmetric_blocks, sample_symmetric_haar};
pub use operators::{
    commutator_norm, embed, kron, pauli, permutation_operator, symmetry_generators,
    total_pauli, Pauli,
};
pub use span::{
    f_vectors, local_symmetric_basis, span_agreement, span_agreement_with, SpanAgreement,
};

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

pub type CMatrix = DMatrix<Complex64>;

#[derive(Debug, Error)]
pub enum NumericsError {
    #[error("commutant projection did not converge: residual {residual:.3e} after {iterations} iterations")]
    ProjectionNotConverged { residual: f64, iterations: usize },
    #[error("block alignment failed: {0}")]
    Alignment(String),
    #[error("gate supports do not connect all {n} qubits")]
    Disconnected { n: usize },
    #[error("invalid circuit spec: {0}")]
    InvalidCircuit(String),
    #[error("{what} = {value} is outside the supported range {range}")]
    OutOfRange {
        what: &'static str,
        value: u64,
        range: &'static str,
    },
    #[error("{0} symmetry is not supported here")]
    UnsupportedSymmetry(crate::Symmetry),
}
