use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use symdesign::exactla::{
    dot, hermite_normal_form, integer_saturation, rational_kernel, LatticeBasis, RationalMatrix,
};
use symdesign::numerics::{
    analytic_block_structure, commutator_norm, estimate_frame_potential_u,
    exact_haar_frame_potential, sample_circuit, symmetry_generators, CircuitEnsemble, CircuitSpec,
    SymmetricHaarEnsemble,
};
use symdesign::optimizer::{
    minimize, positive_part_objective, seed, two_sided_objective, Bound, SearchOptions,
};
use symdesign::{pipeline, repdata, Symmetry};

fn builtin() -> impl Strategy<Value = (Symmetry, u32, u32)> {
    (prop_oneof![Just(Symmetry::Z2), Just(Symmetry::U1), Just(Symmetry::SU2)], 3u32..=11)
        .prop_flat_map(|(s, n)| (Just(s), Just(n), 1u32..=4.min(n - 1)))
}

fn combination(basis: &[Vec<BigInt>], coeffs: &[i64]) -> Vec<BigInt> {
    let mut x = vec![BigInt::zero(); basis[0].len()];
    for (b, &c) in basis.iter().zip(coeffs) {
        for (xi, bi) in x.iter_mut().zip(b) {
            *xi += bi * c;
        }
    }
    x
}

fn bound_of(sym: Symmetry, n: u32, k: u32) -> Bound {
    pipeline::order(sym, n, k, SearchOptions::default()).unwrap().bound.value
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// On the lattice `⟨m, x⟩ = 0`, so the positive and negative parts of
    /// `x` carry equal weight and the objective is sign-symmetric.
    #[test]
    fn sign_decomposition((sym, n, k) in builtin(), coeffs in prop::collection::vec(-3i64..=3, 16)) {
        let data = repdata::build(sym, n, k).unwrap();
        let lattice = pipeline::lattice(&data);
        prop_assume!(!lattice.is_trivial());
        let x = combination(&lattice.basis, &coeffs[..lattice.dim()]);
        let neg: Vec<BigInt> = x.iter().map(|v| -v).collect();
        prop_assert!(dot(&data.m, &x).is_zero());
        let plus = positive_part_objective(&data.m, &x);
        let minus = positive_part_objective(&data.m, &neg);
        prop_assert_eq!(&plus, &minus);
        prop_assert_eq!(two_sided_objective(&data.m, &x), plus);
        let abs: BigInt = data.m.iter().zip(&x).map(|(w, v)| w * v.abs()).sum();
        prop_assert_eq!(abs, &minus * 2);
    }

    /// Integer combinations of the basis are lattice members and orthogonal
    /// to every constraint row; perturbing one coordinate leaves the lattice.
    #[test]
    fn membership_oracle((sym, n, k) in builtin(), coeffs in prop::collection::vec(-5i64..=5, 16)) {
        let data = repdata::build(sym, n, k).unwrap();
        let lattice = pipeline::lattice(&data);
        prop_assume!(!lattice.is_trivial());
        let x = combination(&lattice.basis, &coeffs[..lattice.dim()]);
        prop_assert!(lattice.contains(&x));
        let xr: Vec<BigRational> = x.iter().cloned().map(BigRational::from_integer).collect();
        prop_assert!(data.constraint_matrix().mul_vec(&xr).iter().all(Zero::is_zero));
        let mut bumped = x.clone();
        bumped[0] += 1;
        let c = data.constraint_matrix();
        let br: Vec<BigRational> = bumped.iter().cloned().map(BigRational::from_integer).collect();
        let orthogonal = c.mul_vec(&br).iter().all(Zero::is_zero);
        prop_assert_eq!(lattice.contains(&bumped), orthogonal);
    }

    /// The bound depends on the lattice, not the basis chosen for it.
    #[test]
    fn basis_independence(
        (sym, n, k) in builtin(),
        ops in prop::collection::vec((0usize..8, 0usize..8, -3i64..=3, any::<bool>()), 0..12),
    ) {
        let data = repdata::build(sym, n, k).unwrap();
        let lattice = pipeline::lattice(&data);
        prop_assume!(!lattice.is_trivial());
        let d = lattice.dim();
        let mut rows = lattice.basis.clone();
        for (i, j, c, flip) in ops {
            let (i, j) = (i % d, j % d);
            if i != j {
                let add: Vec<BigInt> = rows[j].iter().map(|v| v * c).collect();
                for (a, b) in rows[i].iter_mut().zip(add) {
                    *a += b;
                }
            }
            if flip {
                rows[i].iter_mut().for_each(|v| *v = -v.clone());
            }
        }
        let shuffled = LatticeBasis { cols: lattice.cols, basis: rows };
        let options = SearchOptions { use_shortcut: false, ..SearchOptions::default() };
        let a = minimize(&data, &lattice, &seed(&data, &lattice).unwrap(), options).unwrap();
        let b = minimize(&data, &shuffled, &seed(&data, &shuffled).unwrap(), options).unwrap();
        prop_assert_eq!(a.value, b.value);
    }

    /// Hermite normal form is idempotent and preserves the generated lattice.
    #[test]
    fn hnf_idempotent(rows in prop::collection::vec(prop::collection::vec(-6i64..=6, 5), 1..5)) {
        let rows: Vec<Vec<BigInt>> =
            rows.into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect();
        let h = hermite_normal_form(&rows, 5);
        let again = hermite_normal_form(&h.rows, 5);
        prop_assert_eq!(&again.rows, &h.rows);
        prop_assert_eq!(&again.pivots, &h.pivots);
        let span = LatticeBasis::from_rows(5, &h.rows);
        for r in &rows {
            prop_assert!(span.contains(r));
        }
    }

    /// The rational kernel of a 3×7 matrix annihilates it and has the
    /// complementary rank; its saturation does too.
    #[test]
    fn rational_kernel_random(entries in prop::collection::vec(-4i64..=4, 21)) {
        let rows: Vec<Vec<BigInt>> =
            entries.chunks(7).map(|r| r.iter().copied().map(BigInt::from).collect()).collect();
        let a = RationalMatrix::from_integer_rows(7, &rows);
        let k = rational_kernel(&a);
        prop_assert_eq!(k.rows() + a.rank(), 7);
        for i in 0..k.rows() {
            prop_assert!(a.mul_vec(k.row(i)).iter().all(Zero::is_zero));
        }
        let sat = integer_saturation(&k);
        prop_assert_eq!(sat.dim(), k.rows());
        for b in &sat.basis {
            let br: Vec<BigRational> = b.iter().cloned().map(BigRational::from_integer).collect();
            prop_assert!(a.mul_vec(&br).iter().all(Zero::is_zero));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Larger locality adds constraints, so the lattice shrinks and the
    /// bound cannot decrease.
    #[test]
    fn monotone_in_locality(
        sym in prop_oneof![Just(Symmetry::Z2), Just(Symmetry::U1), Just(Symmetry::SU2)],
        n in 4u32..=12,
        k in 1u32..=3,
    ) {
        prop_assume!(k + 1 < n);
        prop_assert!(bound_of(sym, n, k) <= bound_of(sym, n, k + 1));
    }

    /// Sampled circuits commute with the symmetry generators.
    #[test]
    fn circuits_commute_with_symmetry(
        sym in prop_oneof![Just(Symmetry::Z2), Just(Symmetry::U1), Just(Symmetry::SU2)],
        n in 2usize..=4,
        depth in 1usize..6,
        seed in any::<u64>(),
    ) {
        let spec = CircuitSpec::brickwork(n, 2.min(n), sym).unwrap();
        let ens = CircuitEnsemble::new(spec, depth, seed).unwrap();
        let u = sample_circuit(&ens, &mut ChaCha8Rng::seed_from_u64(seed));
        let scale = (u.nrows() as f64).sqrt();
        prop_assert!(commutator_norm(&u, &symmetry_generators(sym, n)) < 1e-8 * scale);
    }
}

#[test]
fn estimates_reproducible_for_fixed_seed() {
    let bs = analytic_block_structure(Symmetry::U1, 3).unwrap();
    let ens = SymmetricHaarEnsemble { blocks: bs };
    let a = estimate_frame_potential_u(&ens, 2, 400, 99).unwrap();
    let b = estimate_frame_potential_u(&ens, 2, 400, 99).unwrap();
    assert_eq!(a.mean.to_bits(), b.mean.to_bits());
    assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());
}

#[test]
fn symmetric_haar_z2_first_moment_is_two() {
    let bs = analytic_block_structure(Symmetry::Z2, 3).unwrap();
    assert_eq!(exact_haar_frame_potential(&bs.shape(), 1), BigInt::from(2));
    let est = estimate_frame_potential_u(&SymmetricHaarEnsemble { blocks: bs }, 1, 3000, 5).unwrap();
    assert!((est.mean - 2.0).abs() < 4.0 * est.stderr, "{est:?}");
}

/// Shallow circuits cannot beat Haar: `F_t ≥ F_t^Haar` up to noise, and
/// deepening the same circuits does not raise the frame potential.
#[test]
fn frame_potential_lower_bound_and_depth_monotonicity() {
    let sym = Symmetry::U1;
    let bs = analytic_block_structure(sym, 3).unwrap();
    let haar: f64 = exact_haar_frame_potential(&bs.shape(), 2).to_string().parse().unwrap();
    let spec = CircuitSpec::brickwork(3, 2, sym).unwrap();
    let mut last = f64::INFINITY;
    let mut last_err = 0.0;
    for depth in [1, 4, 16] {
        let ens = CircuitEnsemble::new(spec.clone(), depth, 11).unwrap();
        let est = estimate_frame_potential_u(&ens, 2, 2000, 11).unwrap();
        assert!(est.mean >= haar - 4.0 * est.stderr, "depth {depth}: {est:?} below {haar}");
        assert!(
            est.mean <= last + 4.0 * (est.stderr + last_err),
            "depth {depth}: {} rose above {last}",
            est.mean
        );
        last = est.mean;
        last_err = est.stderr;
    }
}
