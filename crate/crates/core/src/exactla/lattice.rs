use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::{dot, rational_kernel, RationalMatrix};

/// Row-style Hermite normal form: upper echelon rows with positive pivots and
/// entries above each pivot reduced into `[0, pivot)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hnf {
    pub rows: Vec<Vec<BigInt>>,
    pub pivots: Vec<usize>,
}

fn sub_multiple(target: &mut [BigInt], q: &BigInt, src: &[BigInt]) {
    for (x, y) in target.iter_mut().zip(src) {
        *x -= q * y;
    }
}

/// Integer row reduction restricted to the first `reduce_cols` columns; whole
/// rows are transformed. Returns the pivot columns. Rows past the last pivot
/// are zero on the reduced columns.
fn echelon_in_place(rows: &mut [Vec<BigInt>], reduce_cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..reduce_cols {
        if r == rows.len() {
            break;
        }
        loop {
            let best = (r..rows.len())
                .filter(|&i| !rows[i][c].is_zero())
                .min_by(|&a, &b| rows[a][c].abs().cmp(&rows[b][c].abs()));
            let Some(best) = best else { break };
            rows.swap(r, best);
            let (head, tail) = rows.split_at_mut(r + 1);
            let prow = &head[r];
            let mut clean = true;
            for row in tail.iter_mut() {
                if !row[c].is_zero() {
                    let q = row[c].div_floor(&prow[c]);
                    sub_multiple(row, &q, prow);
                    clean &= row[c].is_zero();
                }
            }
            if clean {
                break;
            }
        }
        if rows[r][c].is_zero() {
            continue;
        }
        if rows[r][c].is_negative() {
            rows[r].iter_mut().for_each(|x| *x = -&*x);
        }
        let (head, tail) = rows.split_at_mut(r);
        let prow = &tail[0];
        for row in head.iter_mut() {
            let q = row[c].div_floor(&prow[c]);
            if !q.is_zero() {
                sub_multiple(row, &q, prow);
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Hermite normal form of the lattice generated by `rows`; zero rows dropped.
pub fn hermite_normal_form(rows: &[Vec<BigInt>], cols: usize) -> Hnf {
    let mut work: Vec<Vec<BigInt>> = rows.to_vec();
    for row in &work {
        assert_eq!(row.len(), cols);
    }
    let pivots = echelon_in_place(&mut work, cols);
    work.truncate(pivots.len());
    Hnf {
        rows: work,
        pivots,
    }
}

/// Basis of `{x ∈ ℤ^cols : A x = 0}`, saturated by construction: the
/// transpose of `A` is reduced by unimodular row operations tracked in an
/// identity block, and the rows whose `A`-part vanishes span the kernel.
pub fn integer_kernel(a: &[Vec<BigInt>], cols: usize) -> Vec<Vec<BigInt>> {
    let j = a.len();
    let mut work: Vec<Vec<BigInt>> = (0..cols)
        .map(|i| {
            let mut row = Vec::with_capacity(j + cols);
            row.extend(a.iter().map(|arow| arow[i].clone()));
            row.extend((0..cols).map(|c| if c == i { BigInt::one() } else { BigInt::zero() }));
            row
        })
        .collect();
    let rank = echelon_in_place(&mut work, j).len();
    let kernel: Vec<Vec<BigInt>> = work[rank..].iter().map(|row| row[j..].to_vec()).collect();
    hermite_normal_form(&kernel, cols).rows
}

/// Invariant factors (nonzero Smith normal form diagonal) of an integer matrix.
pub fn smith_invariants(rows: &[Vec<BigInt>], cols: usize) -> Vec<BigInt> {
    let mut a: Vec<Vec<BigInt>> = rows.to_vec();
    let nrows = a.len();
    let mut out = Vec::new();
    for t in 0..nrows.min(cols) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..nrows {
                for c in t..cols {
                    if !a[i][c].is_zero()
                        && best.is_none_or(|(bi, bc)| a[i][c].abs() < a[bi][bc].abs())
                    {
                        best = Some((i, c));
                    }
                }
            }
            let Some((bi, bc)) = best else {
                return out;
            };
            a.swap(t, bi);
            for row in a.iter_mut() {
                row.swap(t, bc);
            }
            let mut clean = true;
            for i in t + 1..nrows {
                if !a[i][t].is_zero() {
                    let q = a[i][t].div_floor(&a[t][t]);
                    let pivot_row = a[t].clone();
                    sub_multiple(&mut a[i], &q, &pivot_row);
                    clean &= a[i][t].is_zero();
                }
            }
            for c in t + 1..cols {
                if !a[t][c].is_zero() {
                    let q = a[t][c].div_floor(&a[t][t]);
                    for row in a.iter_mut() {
                        let v = &row[t] * &q;
                        row[c] -= v;
                    }
                    clean &= a[t][c].is_zero();
                }
            }
            if !clean {
                continue;
            }
            // pivot must divide the remaining block
            let p = a[t][t].clone();
            let offender = (t + 1..nrows).find(|&i| (t + 1..cols).any(|c| !a[i][c].is_multiple_of(&p)));
            match offender {
                Some(i) => {
                    let row = a[i].clone();
                    for (x, y) in a[t].iter_mut().zip(&row) {
                        *x += y;
                    }
                }
                None => break,
            }
        }
        out.push(a[t][t].abs());
    }
    out
}

/// Integer basis of `C⊥ ∩ ℤ^Λ`, stored in Hermite normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeBasis {
    /// Ambient dimension `|Λ|`.
    pub cols: usize,
    pub basis: Vec<Vec<BigInt>>,
}

impl LatticeBasis {
    pub fn from_rows(cols: usize, rows: &[Vec<BigInt>]) -> Self {
        Self {
            cols,
            basis: hermite_normal_form(rows, cols).rows,
        }
    }

    /// Lattice rank.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn hnf(&self) -> Hnf {
        hermite_normal_form(&self.basis, self.cols)
    }

    /// Exact membership test: `x` is an integer combination of the basis.
    pub fn contains(&self, x: &[BigInt]) -> bool {
        let hnf = self.hnf();
        let mut rest = x.to_vec();
        for (row, &p) in hnf.rows.iter().zip(&hnf.pivots) {
            if rest[..p].iter().any(|v| !v.is_zero()) {
                return false;
            }
            let (q, rem) = rest[p].div_rem(&row[p]);
            if !rem.is_zero() {
                return false;
            }
            sub_multiple(&mut rest, &q, row);
        }
        rest.iter().all(Zero::is_zero)
    }

    /// Checks the exact orthogonality identities against a constraint basis and
    /// certifies saturation through Smith normal form.
    pub fn certify(&self, constraints: &RationalMatrix) -> LatticeCertificate {
        let ints = constraints.integer_rows();
        let orthogonal = self
            .basis
            .iter()
            .all(|b| ints.iter().all(|c| dot(b, c).is_zero()));
        let divisors = smith_invariants(&self.basis, self.cols);
        let saturated = divisors.len() == self.dim() && divisors.iter().all(One::is_one);
        let expected_rank = self.cols - constraints.rank();
        LatticeCertificate {
            orthogonal,
            saturated,
            rank: self.dim(),
            expected_rank,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LatticeCertificate {
    pub orthogonal: bool,
    pub saturated: bool,
    pub rank: usize,
    pub expected_rank: usize,
}

impl LatticeCertificate {
    pub fn holds(&self) -> bool {
        self.orthogonal && self.saturated && self.rank == self.expected_rank
    }
}

/// Integer basis generating exactly the integer points of the row span of `k`.
pub fn integer_saturation(k: &RationalMatrix) -> LatticeBasis {
    let cols = k.cols();
    // span(K) ∩ ℤ^n is the integer kernel of a basis of span(K)⊥
    let complement = rational_kernel(k);
    let complement_rows = complement.integer_rows();
    let basis = integer_kernel(&complement_rows, cols);
    let lattice = LatticeBasis { cols, basis };
    debug_assert!(lattice.basis.iter().all(|b| {
        let x: Vec<BigRational> = b.iter().cloned().map(BigRational::from_integer).collect();
        complement.mul_vec(&x).iter().all(Zero::is_zero)
    }));
    lattice
}
