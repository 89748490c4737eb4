//! Exact minimisation of `⟨m, x⁺⟩` over nonzero points of `C⊥ ∩ ℤ^Λ`.
//!
//! The search starts from an upper bound `t0 = ⟨m, d⁺⟩` given by a seed lattice
//! point `d`. Because `m` lies in the constraint span, `⟨m, x⟩ = 0` on the
//! lattice, so `⟨m, x⁺⟩ = ⟨m, (−x)⁺⟩ ≥ m_λ |x_λ|` for every label. Any point
//! beating an incumbent `b` therefore satisfies `m_λ |x_λ| < b` everywhere,
//! which turns the minimisation into a bounded enumeration.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::exactla::{hermite_normal_form, integer_saturation, rational_kernel, LatticeBasis};
use crate::repdata::SymmetryData;

/// Default limit on enumeration nodes.
pub const DEFAULT_NODE_BUDGET: u64 = 1_000_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Bound {
    Finite(BigInt),
    /// Minimum over an empty set: the lattice is `{0}`.
    Infinite,
}

impl Bound {
    pub fn finite(&self) -> Option<&BigInt> {
        match self {
            Bound::Finite(v) => Some(v),
            Bound::Infinite => None,
        }
    }
}

impl PartialOrd for Bound {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Bound {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Bound::Finite(a), Bound::Finite(b)) => a.cmp(b),
            (Bound::Finite(_), Bound::Infinite) => Ordering::Less,
            (Bound::Infinite, Bound::Finite(_)) => Ordering::Greater,
            (Bound::Infinite, Bound::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Finite(v) => write!(f, "{v}"),
            Bound::Infinite => f.write_str("infinite"),
        }
    }
}

impl Serialize for Bound {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Result of the lattice optimisation: circuits form asymptotic `t`-designs
/// exactly for `t < value`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DesignBound {
    pub value: Bound,
    /// A nonzero lattice point with `⟨m, witness⁺⟩ = value`.
    pub witness: Option<Vec<BigInt>>,
    /// False when the search stopped early and `value` is only an upper bound.
    pub optimal: bool,
    pub nodes: u64,
    pub shortcut_applied: bool,
}

impl DesignBound {
    pub fn infinite() -> Self {
        Self {
            value: Bound::Infinite,
            witness: None,
            optimal: true,
            nodes: 0,
            shortcut_applied: false,
        }
    }

    /// Largest `t` for which designs form, `value − 1`; `None` when unbounded.
    pub fn max_design_order(&self) -> Option<BigInt> {
        self.value.finite().map(|v| v - 1)
    }
}

/// Upper-bound seed: a nonzero lattice point on the labels with the smallest
/// multiplicities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeedInfo {
    /// Indices (into the label list) of the `J + 1` smallest multiplicities.
    pub lambda_prime: Vec<usize>,
    pub d: Vec<BigInt>,
    pub t0: BigInt,
    /// Whether the lattice restricted to `lambda_prime` is one-dimensional;
    /// otherwise `d` came from the fallback rule.
    pub one_dimensional: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    pub node_budget: u64,
    /// Return `t0` without enumeration when the multiplicity shortcut holds.
    pub use_shortcut: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            node_budget: DEFAULT_NODE_BUDGET,
            use_shortcut: true,
        }
    }
}

#[derive(Debug, Error)]
pub enum OptimizerError {
    #[error("lattice is trivial; the bound is infinite")]
    TrivialLattice,
    #[error("multiplicity vector is not in the constraint span")]
    MultiplicitiesOutsideSpan,
    #[error("vectors of length {got} do not match {expected} labels")]
    Shape { expected: usize, got: usize },
    #[error("node budget of {budget} exhausted; best value {} is only an upper bound", upper_bound.value)]
    BudgetExhausted { budget: u64, upper_bound: DesignBound },
}

/// `Σ_λ m_λ max(x_λ, 0)`.
pub fn positive_part_objective(m: &[BigInt], x: &[BigInt]) -> BigInt {
    assert_eq!(m.len(), x.len());
    m.iter()
        .zip(x)
        .filter(|(_, v)| v.is_positive())
        .map(|(w, v)| w * v)
        .sum()
}

/// `min(⟨m, x⁺⟩, ⟨m, (−x)⁺⟩)`, the objective after identifying `x` with `−x`.
pub fn two_sided_objective(m: &[BigInt], x: &[BigInt]) -> BigInt {
    let neg: Vec<BigInt> = x.iter().map(|v| -v).collect();
    positive_part_objective(m, x).min(positive_part_objective(m, &neg))
}

/// Returns `x` or `−x`, whichever attains the two-sided objective.
fn orient(m: &[BigInt], x: Vec<BigInt>) -> Vec<BigInt> {
    let neg: Vec<BigInt> = x.iter().map(|v| -v).collect();
    if positive_part_objective(m, &neg) < positive_part_objective(m, &x) {
        neg
    } else {
        x
    }
}

/// Seeds the search with a nonzero lattice point supported on the labels of
/// the `J + 1` smallest multiplicities (ties broken by label order).
pub fn seed(data: &SymmetryData, lattice: &LatticeBasis) -> Result<SeedInfo, OptimizerError> {
    if lattice.is_trivial() {
        return Err(OptimizerError::TrivialLattice);
    }
    let c = data.constraint_matrix();
    let j = c.rank();
    let mut order: Vec<usize> = (0..data.len()).collect();
    order.sort_by(|&a, &b| data.m[a].cmp(&data.m[b]).then(data.labels[a].cmp(&data.labels[b])));
    let mut lambda_prime: Vec<usize> = order.into_iter().take(j + 1).collect();
    lambda_prime.sort_unstable();

    let restricted = integer_saturation(&rational_kernel(&c.select_columns(&lambda_prime)));
    let (d, one_dimensional) = if restricted.dim() == 1 {
        let mut d = vec![BigInt::zero(); data.len()];
        for (&idx, v) in lambda_prime.iter().zip(&restricted.basis[0]) {
            d[idx] = v.clone();
        }
        (d, true)
    } else {
        let abs_weight = |b: &Vec<BigInt>| -> BigInt {
            data.m.iter().zip(b).map(|(w, v)| w * v.abs()).sum()
        };
        let best = lattice
            .basis
            .iter()
            .min_by_key(|b| abs_weight(b))
            .expect("nontrivial lattice has a basis vector")
            .clone();
        (best, false)
    };
    let d = orient(&data.m, d);
    let t0 = positive_part_objective(&data.m, &d);
    Ok(SeedInfo {
        lambda_prime,
        d,
        t0,
        one_dimensional,
    })
}

/// True when every label outside `Λ′` has `m_λ ≥ t0`, in which case `t0` is
/// already the optimum.
pub fn shortcut_check(data: &SymmetryData, seed: &SeedInfo) -> bool {
    seed.one_dimensional
        && (0..data.len())
            .filter(|i| !seed.lambda_prime.contains(i))
            .all(|i| data.m[i] >= seed.t0)
}

struct Enumerator {
    /// Multiplicities in search order.
    m: Vec<BigInt>,
    rows: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
    x: Vec<BigInt>,
    best: BigInt,
    best_x: Option<Vec<BigInt>>,
    nodes: u64,
    budget: u64,
}

struct Exhausted;

impl Enumerator {
    fn width(&self, col: usize) -> BigInt {
        (&self.best - BigInt::one()).div_floor(&self.m[col])
    }

    fn dfs(&mut self, level: usize, p: &BigInt, q: &BigInt, leading: bool) -> Result<(), Exhausted> {
        if level == self.rows.len() {
            if !leading {
                let value = p.min(q);
                if *value < self.best {
                    self.best = value.clone();
                    let x = if p <= q {
                        self.x.clone()
                    } else {
                        self.x.iter().map(|v| -v).collect()
                    };
                    self.best_x = Some(x);
                }
            }
            return Ok(());
        }
        let col = self.pivots[level];
        let end = self.pivots.get(level + 1).copied().unwrap_or(self.m.len());
        let h = self.rows[level][col].clone();
        let s = self.x[col].clone();
        let w = self.width(col);
        let mut a = (-&w - &s).div_ceil(&h);
        if leading && a.is_negative() {
            a = BigInt::zero();
        }
        loop {
            // the incumbent may have improved inside the previous branch
            let hi = (self.width(col) - &s).div_floor(&h);
            if a > hi {
                break;
            }
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(Exhausted);
            }
            let row = std::mem::take(&mut self.rows[level]);
            for (xv, rv) in self.x[col..].iter_mut().zip(&row[col..]) {
                *xv += &a * rv;
            }
            let mut p2 = p.clone();
            let mut q2 = q.clone();
            let mut feasible = true;
            for c in col..end {
                let v = &self.x[c];
                if v.abs() > self.width(c) {
                    feasible = false;
                    break;
                }
                if v.is_positive() {
                    p2 += &self.m[c] * v;
                } else if v.is_negative() {
                    q2 -= &self.m[c] * v;
                }
            }
            let outcome = if feasible && p2.clone().min(q2.clone()) < self.best {
                self.dfs(level + 1, &p2, &q2, leading && a.is_zero())
            } else {
                Ok(())
            };
            for (xv, rv) in self.x[col..].iter_mut().zip(&row[col..]) {
                *xv -= &a * rv;
            }
            self.rows[level] = row;
            outcome?;
            a += 1;
        }
        Ok(())
    }
}

/// Exact minimum of `⟨m, x⁺⟩` over nonzero lattice points, starting from the
/// seed's upper bound `t0`.
///
/// Lattice coordinates are fixed in order of decreasing multiplicity, with the
/// box `m_λ |x_λ| < incumbent` tightening as better points are found. Sign is
/// canonicalised by forcing the first nonzero coefficient positive.
pub fn minimize(
    data: &SymmetryData,
    lattice: &LatticeBasis,
    seed: &SeedInfo,
    options: SearchOptions,
) -> Result<DesignBound, OptimizerError> {
    let n = data.len();
    if lattice.cols != n || seed.d.len() != n {
        return Err(OptimizerError::Shape {
            expected: n,
            got: lattice.cols,
        });
    }
    if !data.multiplicities_in_span() {
        return Err(OptimizerError::MultiplicitiesOutsideSpan);
    }
    if lattice.is_trivial() {
        return Ok(DesignBound::infinite());
    }
    let seeded = DesignBound {
        value: Bound::Finite(seed.t0.clone()),
        witness: Some(seed.d.clone()),
        optimal: true,
        nodes: 0,
        shortcut_applied: false,
    };
    if options.use_shortcut && shortcut_check(data, seed) {
        return Ok(DesignBound {
            shortcut_applied: true,
            ..seeded
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| data.m[b].cmp(&data.m[a]).then(data.labels[a].cmp(&data.labels[b])));
    let permuted: Vec<Vec<BigInt>> = lattice
        .basis
        .iter()
        .map(|row| order.iter().map(|&i| row[i].clone()).collect())
        .collect();
    let hnf = hermite_normal_form(&permuted, n);
    let mut search = Enumerator {
        m: order.iter().map(|&i| data.m[i].clone()).collect(),
        rows: hnf.rows,
        pivots: hnf.pivots,
        x: vec![BigInt::zero(); n],
        best: seed.t0.clone(),
        best_x: None,
        nodes: 0,
        budget: options.node_budget,
    };
    let outcome = search.dfs(0, &BigInt::zero(), &BigInt::zero(), true);

    let witness = match search.best_x.take() {
        Some(px) => {
            let mut x = vec![BigInt::zero(); n];
            for (pos, &i) in order.iter().enumerate() {
                x[i] = px[pos].clone();
            }
            x
        }
        None => seed.d.clone(),
    };
    let result = DesignBound {
        value: Bound::Finite(search.best),
        witness: Some(witness),
        optimal: outcome.is_ok(),
        nodes: search.nodes,
        shortcut_applied: false,
    };
    match outcome {
        Ok(()) => Ok(result),
        Err(Exhausted) => Err(OptimizerError::BudgetExhausted {
            budget: options.node_budget,
            upper_bound: result,
        }),
    }
}

/// Seeds and minimises; an empty lattice yields [`Bound::Infinite`].
pub fn solve(
    data: &SymmetryData,
    lattice: &LatticeBasis,
    options: SearchOptions,
) -> Result<(Option<SeedInfo>, DesignBound), OptimizerError> {
    if lattice.is_trivial() {
        return Ok((None, DesignBound::infinite()));
    }
    let seed = seed(data, lattice)?;
    let bound = minimize(data, lattice, &seed, options)?;
    Ok((Some(seed), bound))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::{integer_saturation, rational_kernel};
    use crate::repdata::{build_su2, build_u1, build_z2};

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn lattice_of(data: &SymmetryData) -> LatticeBasis {
        integer_saturation(&rational_kernel(&data.constraint_matrix()))
    }

    #[test]
    fn objective_examples() {
        assert_eq!(positive_part_objective(&ints(&[4, 4]), &ints(&[1, -1])), BigInt::from(4));
        assert_eq!(positive_part_objective(&ints(&[3, 7]), &ints(&[0, 0])), BigInt::zero());
        let m = ints(&[1, 5, 10, 10, 5, 1]);
        let x = ints(&[3, -1, 0, 0, 1, -3]);
        // m_0 * 3 + m_4 * 1
        let by_hand = 3 + 5;
        assert_eq!(positive_part_objective(&m, &x), BigInt::from(by_hand));
    }

    #[test]
    fn z2_seed_and_bound() {
        for n in 3..=12 {
            let data = build_z2(n, 2).unwrap();
            let lat = lattice_of(&data);
            let s = seed(&data, &lat).unwrap();
            assert_eq!(s.d, ints(&[1, -1]));
            assert_eq!(s.t0, BigInt::one() << (n - 1));
            assert!(shortcut_check(&data, &s));
        }
        let data = build_z2(3, 2).unwrap();
        let (_, b) = solve(&data, &lattice_of(&data), SearchOptions::default()).unwrap();
        assert_eq!(b.value, Bound::Finite(4.into()));
        assert_eq!(b.max_design_order(), Some(3.into()));
    }

    #[test]
    fn u1_two_local_seed_matches_worked_example() {
        for n in 4..=20u32 {
            let data = build_u1(n, 2).unwrap();
            let lat = lattice_of(&data);
            let s = seed(&data, &lat).unwrap();
            assert!(s.one_dimensional);
            assert_eq!(s.t0, BigInt::from(2 * (n - 1)));
            let last = n as usize;
            let nm2 = BigInt::from(n - 2);
            // d is ±(n−2, −1, 0, …, 0, 1, −(n−2))
            let mut expect = vec![BigInt::zero(); last + 1];
            expect[0] = nm2.clone();
            expect[1] = BigInt::from(-1);
            expect[last - 1] = BigInt::from(1);
            expect[last] = -nm2;
            let neg: Vec<BigInt> = expect.iter().map(|v| -v).collect();
            assert!(s.d == expect || s.d == neg, "n={n}: {:?}", s.d);
        }
    }

    #[test]
    fn shortcut_examples() {
        let data = build_u1(10, 2).unwrap();
        let s = seed(&data, &lattice_of(&data)).unwrap();
        assert_eq!(s.t0, BigInt::from(18));
        assert!(shortcut_check(&data, &s));
        let data = build_u1(4, 2).unwrap();
        let s = seed(&data, &lattice_of(&data)).unwrap();
        assert_eq!(s.t0, BigInt::from(6));
        assert!(shortcut_check(&data, &s));
    }

    #[test]
    fn su2_nine_qubits_seed() {
        let data = build_su2(9, 2).unwrap();
        let s = seed(&data, &lattice_of(&data)).unwrap();
        assert_eq!(s.t0, BigInt::from(48));
        assert!(!shortcut_check(&data, &s));
    }

    #[test]
    fn u1_three_local_five_qubits() {
        let data = build_u1(5, 3).unwrap();
        let (_, b) = solve(&data, &lattice_of(&data), SearchOptions::default()).unwrap();
        assert_eq!(b.value, Bound::Finite(15.into()));
    }

    #[test]
    fn shortcut_agrees_with_enumeration() {
        for n in 4..=14 {
            for k in 2..=4.min(n - 1) {
                for data in [build_u1(n, k).unwrap(), build_su2(n, k).unwrap(), build_z2(n, k).unwrap()] {
                    let lat = lattice_of(&data);
                    let Ok(s) = seed(&data, &lat) else { continue };
                    let fast = minimize(&data, &lat, &s, SearchOptions::default()).unwrap();
                    let slow = minimize(
                        &data,
                        &lat,
                        &s,
                        SearchOptions {
                            use_shortcut: false,
                            ..Default::default()
                        },
                    )
                    .unwrap();
                    assert_eq!(fast.value, slow.value, "{:?} n={n} k={k}", data.symmetry);
                }
            }
        }
    }

    #[test]
    fn witness_reproduces_value() {
        for n in 5..=12 {
            for data in [build_u1(n, 3).unwrap(), build_su2(n, 2).unwrap()] {
                let lat = lattice_of(&data);
                let (_, b) = solve(
                    &data,
                    &lat,
                    SearchOptions {
                        use_shortcut: false,
                        ..Default::default()
                    },
                )
                .unwrap();
                let w = b.witness.unwrap();
                assert!(w.iter().any(|v| !v.is_zero()));
                assert!(lat.contains(&w));
                assert_eq!(Bound::Finite(positive_part_objective(&data.m, &w)), b.value);
            }
        }
    }

    #[test]
    fn budget_exhaustion_reports_upper_bound() {
        let data = build_su2(9, 2).unwrap();
        let lat = lattice_of(&data);
        let s = seed(&data, &lat).unwrap();
        let err = minimize(
            &data,
            &lat,
            &s,
            SearchOptions {
                node_budget: 1,
                use_shortcut: false,
            },
        )
        .unwrap_err();
        match err {
            OptimizerError::BudgetExhausted { upper_bound, .. } => {
                assert!(!upper_bound.optimal);
                assert!(upper_bound.value <= Bound::Finite(s.t0.clone()));
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn bound_ordering() {
        assert!(Bound::Finite(5.into()) < Bound::Infinite);
        assert!(Bound::Finite(5.into()) < Bound::Finite(6.into()));
    }
}
