use nalgebra::DMatrix;
use num_complex::Complex64;

use super::blocks::Generator;
use super::CMatrix;
use crate::Symmetry;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn pauli(p: Pauli) -> CMatrix {
    let e = match p {
        Pauli::I => [ONE, ZERO, ZERO, ONE],
        Pauli::X => [ZERO, ONE, ONE, ZERO],
        Pauli::Y => [ZERO, -I, I, ZERO],
        Pauli::Z => [ONE, ZERO, ZERO, -ONE],
    };
    DMatrix::from_row_slice(2, 2, &e)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// `op` acting on `qubits` (in the order given) of an `n`-qubit register.
pub fn embed(op: &CMatrix, qubits: &[usize], n: usize) -> CMatrix {
    let k = qubits.len();
    assert_eq!(op.nrows(), 1 << k);
    let dim = 1usize << n;
    let mask: usize = qubits.iter().map(|&q| 1usize << (n - 1 - q)).sum();
    let local = |idx: usize| -> usize {
        qubits
            .iter()
            .fold(0, |acc, &q| (acc << 1) | ((idx >> (n - 1 - q)) & 1))
    };
    let spread = |l: usize| -> usize {
        qubits
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &q)| acc | (((l >> (k - 1 - i)) & 1) << (n - 1 - q)))
    };
    let mut out = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        let rest = col & !mask;
        let lc = local(col);
        for lr in 0..(1 << k) {
            let v = op[(lr, lc)];
            if v != ZERO {
                out[(rest | spread(lr), col)] = v;
            }
        }
    }
    out
}

/// `Σ_q P_q` on `n` qubits.
pub fn total_pauli(p: Pauli, n: usize) -> CMatrix {
    let single = pauli(p);
    let mut out = CMatrix::zeros(1 << n, 1 << n);
    for q in 0..n {
        out += embed(&single, &[q], n);
    }
    out
}

/// Operator permuting tensor factors: qubit `q` of the input ends up at
/// position `perm[q]`.
pub fn permutation_operator(perm: &[usize]) -> CMatrix {
    let n = perm.len();
    let dim = 1usize << n;
    let mut out = CMatrix::zeros(dim, dim);
    for idx in 0..dim {
        let mut target = 0;
        for (q, &p) in perm.iter().enumerate() {
            let bit = (idx >> (n - 1 - q)) & 1;
            target |= bit << (n - 1 - p);
        }
        out[(target, idx)] = ONE;
    }
    out
}

/// Generators of the symmetry action on `n` qubits: `Z^{⊗n}` for ℤ₂,
/// `Z^tot` for U(1), `X^tot, Y^tot, Z^tot` for SU(2). The trivial group
/// (custom) has none.
pub fn symmetry_generators(symmetry: Symmetry, n: usize) -> Vec<Generator> {
    let dim = 1usize << n;
    let parity = |i: usize| if i.count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
    let ztot = |i: usize| n as f64 - 2.0 * i.count_ones() as f64;
    match symmetry {
        Symmetry::Z2 => vec![Generator::Diagonal((0..dim).map(parity).collect())],
        Symmetry::U1 => vec![Generator::Diagonal((0..dim).map(ztot).collect())],
        Symmetry::SU2 => vec![
            Generator::Diagonal((0..dim).map(ztot).collect()),
            Generator::from_operator(&total_pauli(Pauli::X, n)).remove(0),
            Generator::from_operator(&total_pauli(Pauli::Y, n)).remove(0),
        ],
        Symmetry::Custom => Vec::new(),
    }
}

/// Largest Frobenius norm of `[g, a]` over the generators.
pub fn commutator_norm(a: &CMatrix, generators: &[Generator]) -> f64 {
    generators
        .iter()
        .map(|g| g.commutator(a).norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embed_matches_kronecker() {
        let x = pauli(Pauli::X);
        let z = pauli(Pauli::Z);
        let id = pauli(Pauli::I);
        let xz = kron(&x, &z);
        assert!((embed(&xz, &[0, 1], 3) - kron(&xz, &id)).norm() < 1e-14);
        assert!((embed(&xz, &[1, 2], 3) - kron(&id, &xz)).norm() < 1e-14);
        // reversed order swaps the factors
        assert!((embed(&xz, &[1, 0], 2) - kron(&z, &x)).norm() < 1e-14);
    }

    #[test]
    fn swap_is_permutation_operator() {
        let swap = permutation_operator(&[1, 0]);
        let a = kron(&pauli(Pauli::X), &pauli(Pauli::Z));
        let b = kron(&pauli(Pauli::Z), &pauli(Pauli::X));
        assert!((&swap * a * swap.adjoint() - b).norm() < 1e-14);
    }

    #[test]
    fn su2_generators_commute_with_swaps() {
        let gens = symmetry_generators(Symmetry::SU2, 3);
        let p = permutation_operator(&[2, 0, 1]);
        assert!(commutator_norm(&p, &gens) < 1e-12);
    }
}
