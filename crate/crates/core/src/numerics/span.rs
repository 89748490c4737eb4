//! Numerical f-vectors of local symmetric operators, compared with the exact
//! constraint basis.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::Serialize;

use super::blocks::{analytic_block_structure, decompose_commutant, label_sectors};
use super::operators::{permutation_operator, symmetry_generators};
use super::{BlockStructure, CMatrix, NumericsError};
use crate::repdata;
use crate::Symmetry;

/// All permutations of `0..k` in lexicographic order.
fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn go(rest: &mut Vec<usize>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(cur.clone());
            return;
        }
        for i in 0..rest.len() {
            let x = rest.remove(i);
            cur.push(x);
            go(rest, cur, out);
            cur.pop();
            rest.insert(i, x);
        }
    }
    let mut out = Vec::new();
    go(&mut (0..k).collect(), &mut Vec::new(), &mut out);
    out
}

/// A spanning set of the symmetric operators on `k` qubits: qubit
/// permutations for SU(2) (Schur–Weyl duality), matrix units inside each
/// sector for ℤ₂ and U(1).
pub fn local_symmetric_basis(symmetry: Symmetry, k: usize) -> Result<Vec<CMatrix>, NumericsError> {
    match symmetry {
        Symmetry::SU2 => Ok(permutations(k).iter().map(|p| permutation_operator(p)).collect()),
        Symmetry::Z2 | Symmetry::U1 => {
            let bs = analytic_block_structure(symmetry, k)?;
            let dim = 1 << k;
            let mut out = Vec::new();
            for s in &bs.sectors {
                for a in 0..s.m {
                    for b in 0..s.m {
                        let mut e = CMatrix::zeros(s.m, s.m);
                        e[(a, b)] = Complex64::new(1.0, 0.0);
                        let op = &s.isometry * e * s.isometry.adjoint();
                        debug_assert_eq!(op.nrows(), dim);
                        out.push(op);
                    }
                }
            }
            Ok(out)
        }
        Symmetry::Custom => Err(NumericsError::UnsupportedSymmetry(symmetry)),
    }
}

/// Rows `f(A ⊗ I^{⊗(n−k)})` for each `A`, real and imaginary parts as
/// separate rows; `f_λ = tr(Q_λ A) / r_λ` with `Q_λ` the partial trace of
/// the isotypic projector over the last `n − k` qubits.
pub fn f_vectors(bs: &BlockStructure, ops: &[CMatrix], n: usize, k: usize) -> DMatrix<f64> {
    let local = 1usize << k;
    let rest = 1usize << (n - k);
    let q: Vec<CMatrix> = bs
        .sectors
        .iter()
        .map(|s| {
            let p = &s.isometry * s.isometry.adjoint();
            CMatrix::from_fn(local, local, |a2, a| {
                (0..rest).map(|b| p[(a2 * rest + b, a * rest + b)]).sum()
            })
        })
        .collect();
    let mut rows = Vec::with_capacity(2 * ops.len());
    for op in ops {
        let f: Vec<Complex64> = q
            .iter()
            .zip(&bs.sectors)
            .map(|(qs, s)| (qs * op).trace() / s.r as f64)
            .collect();
        rows.push(f.iter().map(|z| z.re).collect::<Vec<_>>());
        rows.push(f.iter().map(|z| z.im).collect::<Vec<_>>());
    }
    DMatrix::from_fn(rows.len(), bs.sectors.len(), |i, j| rows[i][j])
}

fn svd_rank(m: &DMatrix<f64>) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let top = sv.iter().cloned().fold(0.0, f64::max);
    sv.iter().filter(|&&s| s > 1e-8 * top.max(1e-300)).count()
}

/// Reduced row echelon form with partial pivoting; rows below `tol` are
/// treated as zero.
fn numeric_rref(m: &DMatrix<f64>, tol: f64) -> Vec<Vec<f64>> {
    let mut a = m.clone();
    let (rows, cols) = a.shape();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let (best, val) = (r..rows)
            .map(|i| (i, a[(i, c)].abs()))
            .fold((r, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if val < tol {
            continue;
        }
        a.swap_rows(r, best);
        let p = a[(r, c)];
        for j in 0..cols {
            a[(r, j)] /= p;
        }
        for i in 0..rows {
            if i != r {
                let f = a[(i, c)];
                if f != 0.0 {
                    for j in 0..cols {
                        a[(i, j)] -= f * a[(r, j)];
                    }
                }
            }
        }
        r += 1;
    }
    (0..r).map(|i| a.row(i).iter().copied().collect()).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct SpanAgreement {
    pub symmetry: Symmetry,
    pub n: usize,
    pub k: usize,
    /// `(r, m)` per sector of the numerical decomposition.
    pub numeric_shape: Vec<(usize, usize)>,
    pub shapes_match: bool,
    pub numeric_rank: usize,
    pub exact_rank: usize,
    /// Rank of the numeric and exact bases stacked.
    pub joint_rank: usize,
    /// Largest entrywise difference between the two reduced echelon forms.
    pub rref_deviation: f64,
}

impl SpanAgreement {
    pub fn agrees(&self) -> bool {
        self.shapes_match
            && self.numeric_rank == self.exact_rank
            && self.joint_rank == self.exact_rank
            && self.rref_deviation < 1e-8
    }
}

/// Compares the exact constraint span with the span of numerically computed
/// f-vectors, using a numerical decomposition of the `n`-qubit action.
pub fn span_agreement(symmetry: Symmetry, n: usize, k: usize, seed: u64) -> Result<SpanAgreement, NumericsError> {
    let gens = symmetry_generators(symmetry, n);
    let bs = label_sectors(decompose_commutant(&gens, 1 << n, seed)?, symmetry, n)?;
    span_agreement_with(&bs, symmetry, n, k)
}

/// [`span_agreement`] with a precomputed, labelled `n`-qubit decomposition.
pub fn span_agreement_with(
    bs: &BlockStructure,
    symmetry: Symmetry,
    n: usize,
    k: usize,
) -> Result<SpanAgreement, NumericsError> {
    let data = repdata::build(symmetry, n as u32, k as u32).map_err(|e| NumericsError::OutOfRange {
        what: "k",
        value: k as u64,
        range: match e {
            repdata::RepDataError::Locality { .. } => "1..n",
            _ => "valid locality",
        },
    })?;

    let numeric_shape = bs.shape();
    let exact_shape: Vec<(usize, usize)> = data
        .r
        .iter()
        .zip(&data.m)
        .map(|(r, m)| (r.to_usize().unwrap_or(0), m.to_usize().unwrap_or(0)))
        .collect();
    let labels_match = bs
        .sectors
        .iter()
        .zip(&data.labels)
        .all(|(s, l)| s.label == Some(l.index()));
    let shapes_match = labels_match && numeric_shape == exact_shape;

    let f = f_vectors(bs, &local_symmetric_basis(symmetry, k)?, n, k);
    let c = data.constraint_matrix();
    let exact_rref = c.rref();
    let exact = DMatrix::from_fn(exact_rref.rows(), exact_rref.cols(), |i, j| {
        exact_rref.get(i, j).to_f64().unwrap_or(f64::NAN)
    });
    let exact_rank = exact_rref.rows();
    let numeric_rank = svd_rank(&f);
    // both parts scaled to unit max entry so neither dominates the threshold
    let scale = f.iter().map(|x| x.abs()).fold(0.0, f64::max).max(1.0);
    let exact_scale = exact.iter().map(|x| x.abs()).fold(0.0, f64::max).max(1.0);
    let mut stacked = DMatrix::zeros(f.nrows() + exact.nrows(), f.ncols());
    stacked.rows_mut(0, f.nrows()).copy_from(&(&f / scale));
    stacked.rows_mut(f.nrows(), exact.nrows()).copy_from(&(&exact / exact_scale));
    let joint_rank = svd_rank(&stacked);

    let numeric = numeric_rref(&f, 1e-9 * scale);
    let rref_deviation = if numeric.len() == exact_rank && shapes_match {
        numeric
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().enumerate().map(move |(j, v)| (i, j, *v)))
            .map(|(i, j, v)| (v - exact[(i, j)]).abs())
            .fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    Ok(SpanAgreement {
        symmetry,
        n,
        k,
        numeric_shape,
        shapes_match,
        numeric_rank,
        exact_rank,
        joint_rank,
        rref_deviation,
    })
}
