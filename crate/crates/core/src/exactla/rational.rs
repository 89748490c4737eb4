use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::make_primitive;

/// Dense matrix of exact rationals, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BigRational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigRational::one();
        }
        m
    }

    /// Builds a matrix from rows that must all have length `cols`.
    pub fn from_rows(cols: usize, rows: Vec<Vec<BigRational>>) -> Self {
        let nrows = rows.len();
        let mut data = Vec::with_capacity(nrows * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "row length does not match column count");
            data.extend(row);
        }
        Self {
            rows: nrows,
            cols,
            data,
        }
    }

    pub fn from_integer_rows(cols: usize, rows: &[Vec<BigInt>]) -> Self {
        Self::from_rows(
            cols,
            rows.iter()
                .map(|r| r.iter().cloned().map(BigRational::from_integer).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[BigRational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<BigRational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Restriction to a subset of columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let rows = (0..self.rows)
            .map(|i| cols.iter().map(|&j| self.get(i, j).clone()).collect())
            .collect();
        Self::from_rows(cols.len(), rows)
    }

    /// Each row scaled by the lcm of its denominators, then made primitive.
    pub fn integer_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| integerize(self.row(i))).collect()
    }

    pub fn mul_vec(&self, x: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn rank(&self) -> usize {
        FractionFreeEchelon::from_matrix(self).rank()
    }

    /// Reduced row echelon form with zero rows dropped. Two matrices have the
    /// same row space exactly when their RREFs are equal.
    pub fn rref(&self) -> RationalMatrix {
        FractionFreeEchelon::from_matrix(self).to_rref()
    }

    /// Indices of a maximal set of linearly independent rows, chosen greedily
    /// in row order.
    pub fn independent_rows(&self) -> Vec<usize> {
        let mut ech = FractionFreeEchelon::new(self.cols);
        (0..self.rows)
            .filter(|&i| ech.insert(integerize(self.row(i))))
            .collect()
    }
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RationalMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

fn integerize(row: &[BigRational]) -> Vec<BigInt> {
    let lcm = row
        .iter()
        .fold(BigInt::one(), |l, x| l.lcm(x.denom()));
    let mut out: Vec<BigInt> = row
        .iter()
        .map(|x| x.numer() * (&lcm / x.denom()))
        .collect();
    make_primitive(&mut out);
    out
}

/// Integer Gauss–Jordan form built by fraction-free row operations.
///
/// Rows are primitive, each pivot is positive, and every pivot column is zero
/// outside its pivot row. Rows are kept sorted by pivot column.
#[derive(Clone, Debug)]
pub struct FractionFreeEchelon {
    cols: usize,
    rows: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
}

impl FractionFreeEchelon {
    pub fn new(cols: usize) -> Self {
        Self {
            cols,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn from_matrix(m: &RationalMatrix) -> Self {
        let mut ech = Self::new(m.cols());
        let mut dropped = 0usize;
        for row in m.integer_rows() {
            if !ech.insert(row) {
                dropped += 1;
            }
        }
        if dropped > 0 {
            log::debug!("row reduction dropped {dropped} dependent row(s)");
        }
        ech
    }

    /// Adds a row; returns false if it was dependent on the rows already held.
    pub fn insert(&mut self, mut v: Vec<BigInt>) -> bool {
        assert_eq!(v.len(), self.cols);
        for (b, &p) in self.rows.iter().zip(&self.pivots) {
            if !v[p].is_zero() {
                let (vp, bp) = (v[p].clone(), &b[p]);
                for (x, y) in v.iter_mut().zip(b) {
                    *x = &*x * bp - &vp * y;
                }
                make_primitive(&mut v);
            }
        }
        let Some(q) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        if v[q].is_negative() {
            v.iter_mut().for_each(|x| *x = -&*x);
        }
        for b in &mut self.rows {
            if !b[q].is_zero() {
                let (bq, vq) = (b[q].clone(), &v[q]);
                for (x, y) in b.iter_mut().zip(&v) {
                    *x = &*x * vq - &bq * y;
                }
                make_primitive(b);
            }
        }
        let at = self.pivots.partition_point(|&p| p < q);
        self.rows.insert(at, v);
        self.pivots.insert(at, q);
        true
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn rows(&self) -> &[Vec<BigInt>] {
        &self.rows
    }

    pub fn to_rref(&self) -> RationalMatrix {
        let rows = self
            .rows
            .iter()
            .zip(&self.pivots)
            .map(|(r, &p)| {
                r.iter()
                    .map(|x| BigRational::new(x.clone(), r[p].clone()))
                    .collect()
            })
            .collect();
        RationalMatrix::from_rows(self.cols, rows)
    }

    /// Integer basis of the right kernel, one primitive vector per free column.
    pub fn kernel(&self) -> Vec<Vec<BigInt>> {
        let free = (0..self.cols).filter(|c| !self.pivots.contains(c));
        free.map(|f| {
            let scale = self
                .rows
                .iter()
                .zip(&self.pivots)
                .filter(|(r, _)| !r[f].is_zero())
                .fold(BigInt::one(), |l, (r, &p)| l.lcm(&r[p]));
            let mut x = vec![BigInt::zero(); self.cols];
            x[f] = scale.clone();
            for (r, &p) in self.rows.iter().zip(&self.pivots) {
                if !r[f].is_zero() {
                    x[p] = -(&scale / &r[p]) * &r[f];
                }
            }
            make_primitive(&mut x);
            x
        })
        .collect()
    }
}

/// Basis of `{x : M x = 0}` over ℚ. Rows of the result are kernel vectors;
/// the kernel dimension is `cols − rank(M)`.
///
/// Dependent rows of `M` are dropped during elimination.
pub fn rational_kernel(m: &RationalMatrix) -> RationalMatrix {
    let ech = FractionFreeEchelon::from_matrix(m);
    if ech.rank() < m.rows() {
        log::warn!(
            "constraint matrix has {} dependent row(s); reduced to rank {}",
            m.rows() - ech.rank(),
            ech.rank()
        );
    }
    RationalMatrix::from_integer_rows(m.cols(), &ech.kernel())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn qr(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn kernel_of_all_ones_row() {
        let m = RationalMatrix::from_rows(2, vec![vec![q(1), q(1)]]);
        let k = rational_kernel(&m);
        assert_eq!(k.rows(), 1);
        assert_eq!(k.get(0, 0), &-k.get(0, 1).clone());
        assert!(!k.get(0, 0).is_zero());
    }

    #[test]
    fn identity_has_empty_kernel() {
        let k = rational_kernel(&RationalMatrix::identity(4));
        assert_eq!(k.rows(), 0);
        assert_eq!(k.cols(), 4);
    }

    #[test]
    fn dependent_rows_are_dropped() {
        let m = RationalMatrix::from_rows(
            3,
            vec![
                vec![q(1), q(2), q(3)],
                vec![qr(1, 2), q(1), qr(3, 2)],
                vec![q(0), q(1), q(1)],
            ],
        );
        assert_eq!(m.rank(), 2);
        assert_eq!(m.independent_rows(), vec![0, 2]);
        let k = rational_kernel(&m);
        assert_eq!(k.rows(), 1);
        for x in m.mul_vec(k.row(0)) {
            assert!(x.is_zero());
        }
    }

    #[test]
    fn rref_is_row_space_invariant() {
        let a = RationalMatrix::from_rows(3, vec![vec![q(1), q(2), q(0)], vec![q(0), q(1), q(1)]]);
        let b = RationalMatrix::from_rows(
            3,
            vec![vec![q(1), q(3), q(1)], vec![q(2), q(3), q(-1)], vec![q(3), q(6), q(0)]],
        );
        assert_eq!(a.rref(), b.rref());
    }
}
