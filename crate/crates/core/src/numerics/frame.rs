//! Frame potentials `F_t = E |tr(U V†)|^{2t}` over independent pairs.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::haar::{haar_unitary, sample_symmetric_blocks};
use super::{BlockStructure, NumericsError};

/// Samples per independently seeded RNG stream. Fixed so that results do not
/// depend on the thread count.
pub(crate) const CHUNK: usize = 256;

/// RNG for chunk `index` of a run seeded with `seed`.
pub(crate) fn chunk_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// A distribution over unitaries, exposed through vectors `v(U)` satisfying
/// `tr(U V†) = ⟨v(V), v(U)⟩`.
pub trait Ensemble: Sync {
    fn sample_vector(&self, rng: &mut ChaCha8Rng) -> Vec<Complex64>;
}

/// Haar measure on `U(dim)`.
pub struct FullHaarEnsemble {
    pub dim: usize,
}

impl Ensemble for FullHaarEnsemble {
    fn sample_vector(&self, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
        haar_unitary(self.dim, rng).iter().copied().collect()
    }
}

/// Point mass on the identity.
pub struct IdentityEnsemble {
    pub dim: usize,
}

impl Ensemble for IdentityEnsemble {
    fn sample_vector(&self, _: &mut ChaCha8Rng) -> Vec<Complex64> {
        let mut v = vec![Complex64::zero(); self.dim * self.dim];
        for i in 0..self.dim {
            v[i * self.dim + i] = Complex64::one();
        }
        v
    }
}

/// Haar measure on the symmetric unitaries `⊕_λ I_r ⊗ U(m_λ)`.
pub struct SymmetricHaarEnsemble {
    pub blocks: BlockStructure,
}

impl Ensemble for SymmetricHaarEnsemble {
    fn sample_vector(&self, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.blocks.compact_len());
        for (s, u) in self.blocks.sectors.iter().zip(sample_symmetric_blocks(&self.blocks, rng)) {
            let scale = (s.r as f64).sqrt();
            out.extend(u.iter().map(|z| z * scale));
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    /// Mean over independent pairs.
    Pairs,
    /// U-statistic over all pairs of a set of independent draws, with a
    /// jackknife standard error.
    AllPairs,
}

#[derive(Clone, Debug, Serialize)]
pub struct FramePotentialEstimate {
    pub t: u32,
    pub mean: f64,
    pub stderr: f64,
    /// Number of pairs averaged.
    pub samples: u64,
    /// Number of independent unitaries drawn.
    pub draws: u64,
    pub rng_seed: u64,
    pub estimator: EstimatorKind,
}

fn check_t(t: u32) -> Result<(), NumericsError> {
    if t == 0 {
        return Err(NumericsError::OutOfRange {
            what: "t",
            value: 0,
            range: "t >= 1",
        });
    }
    Ok(())
}

fn overlap_power(a: &[Complex64], b: &[Complex64], t: u32) -> f64 {
    let ip: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    ip.norm_sqr().powi(t as i32)
}

/// Monte Carlo mean of `|tr(U V†)|^{2t}` over `samples` independent pairs;
/// standard error is the sample standard deviation over `√samples`.
pub fn estimate_frame_potential(
    ensemble: &dyn Ensemble,
    t: u32,
    samples: u64,
    rng_seed: u64,
) -> Result<FramePotentialEstimate, NumericsError> {
    check_t(t)?;
    if samples < 2 {
        return Err(NumericsError::OutOfRange {
            what: "samples",
            value: samples,
            range: "samples >= 2",
        });
    }
    let chunks = (samples as usize).div_ceil(CHUNK);
    let partial: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = chunk_rng(rng_seed, c);
            let count = CHUNK.min(samples as usize - c * CHUNK);
            let mut s = 0.0;
            let mut s2 = 0.0;
            for _ in 0..count {
                let u = ensemble.sample_vector(&mut rng);
                let v = ensemble.sample_vector(&mut rng);
                let x = overlap_power(&u, &v, t);
                s += x;
                s2 += x * x;
            }
            (s, s2)
        })
        .collect();
    let (sum, sum2) = partial.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let n = samples as f64;
    let mean = sum / n;
    let var = ((sum2 - n * mean * mean) / (n - 1.0)).max(0.0);
    Ok(FramePotentialEstimate {
        t,
        mean,
        stderr: (var / n).sqrt(),
        samples,
        draws: 2 * samples,
        rng_seed,
        estimator: EstimatorKind::Pairs,
    })
}

/// `draws` independent vectors, generated in fixed-size seeded chunks.
pub fn draw_vectors(ensemble: &dyn Ensemble, draws: usize, rng_seed: u64) -> Vec<Vec<Complex64>> {
    (0..draws.div_ceil(CHUNK))
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut rng = chunk_rng(rng_seed, c);
            let count = CHUNK.min(draws - c * CHUNK);
            (0..count).map(move |_| ensemble.sample_vector(&mut rng)).collect::<Vec<_>>()
        })
        .collect()
}

const ROW_BLOCK: usize = 256;

/// Row sums `R_i = Σ_{j≠i} |⟨v_j, v_i⟩|^{2t}` via real matrix products over
/// the upper triangle `j > i`, one block of `i` at a time.
fn pair_row_sums(vectors: &[Vec<Complex64>], t: u32) -> Vec<f64> {
    let n = vectors.len();
    let len = vectors[0].len();
    // B = [Re | Im], C = [Im | −Re]: B_i·B_j = Re⟨v_j, v_i⟩, C_i·B_j = Im⟨v_j, v_i⟩
    let b = DMatrix::<f64>::from_fn(n, 2 * len, |i, c| {
        if c < len {
            vectors[i][c].re
        } else {
            vectors[i][c - len].im
        }
    });
    let c = DMatrix::<f64>::from_fn(n, 2 * len, |i, col| {
        if col < len {
            vectors[i][col].im
        } else {
            -vectors[i][col - len].re
        }
    });
    let partial: Vec<(usize, Vec<f64>)> = (0..n.div_ceil(ROW_BLOCK))
        .into_par_iter()
        .map(|blk| {
            let start = blk * ROW_BLOCK;
            let rows = ROW_BLOCK.min(n - start);
            let tail = b.rows(start, n - start);
            // column i holds the overlaps of draw start+i with draws start..n
            let re = tail * b.rows(start, rows).transpose();
            let im = tail * c.rows(start, rows).transpose();
            let mut acc = vec![0.0; n - start];
            for i in 0..rows {
                let (re_i, im_i) = (re.column(i), im.column(i));
                let mut row = 0.0;
                for j in i + 1..n - start {
                    let w = (re_i[j] * re_i[j] + im_i[j] * im_i[j]).powi(t as i32);
                    row += w;
                    acc[j] += w;
                }
                acc[i] += row;
            }
            (start, acc)
        })
        .collect();
    let mut sums = vec![0.0; n];
    for (start, acc) in partial {
        for (s, a) in sums[start..].iter_mut().zip(acc) {
            *s += a;
        }
    }
    sums
}

/// U-statistic over all `N(N−1)/2` pairs of the given independent draws.
/// The standard error is the delete-one jackknife over draws, which accounts
/// for the dependence between pairs sharing a draw.
pub fn frame_potential_from_draws(
    vectors: &[Vec<Complex64>],
    t: u32,
    rng_seed: u64,
) -> Result<FramePotentialEstimate, NumericsError> {
    check_t(t)?;
    let n = vectors.len();
    if n < 3 {
        return Err(NumericsError::OutOfRange {
            what: "draws",
            value: n as u64,
            range: "draws >= 3",
        });
    }
    let rows = pair_row_sums(vectors, t);
    let total: f64 = rows.iter().sum();
    let nf = n as f64;
    let mean = total / (nf * (nf - 1.0));
    let loo: Vec<f64> = rows
        .iter()
        .map(|r| (total - 2.0 * r) / ((nf - 1.0) * (nf - 2.0)))
        .collect();
    let loo_mean = loo.iter().sum::<f64>() / nf;
    let var = (nf - 1.0) / nf * loo.iter().map(|x| (x - loo_mean).powi(2)).sum::<f64>();
    Ok(FramePotentialEstimate {
        t,
        mean,
        stderr: var.sqrt(),
        samples: (n as u64) * (n as u64 - 1) / 2,
        draws: n as u64,
        rng_seed,
        estimator: EstimatorKind::AllPairs,
    })
}

/// All-pairs estimate from `draws` fresh samples of `ensemble`.
pub fn estimate_frame_potential_u(
    ensemble: &dyn Ensemble,
    t: u32,
    draws: u64,
    rng_seed: u64,
) -> Result<FramePotentialEstimate, NumericsError> {
    let vectors = draw_vectors(ensemble, draws as usize, rng_seed);
    frame_potential_from_draws(&vectors, t, rng_seed)
}

/// Number of permutations of `s` letters with no increasing subsequence
/// longer than `m`, i.e. `E|tr W|^{2s}` for Haar `W ∈ U(m)`:
/// `Σ (f^λ)²` over partitions `λ ⊢ s` with at most `m` parts.
pub fn permutations_with_bounded_lis(s: u32, m: usize) -> BigInt {
    fn partitions(rest: u32, max_part: u32, parts: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        if parts == 0 {
            return;
        }
        for p in (1..=rest.min(max_part)).rev() {
            cur.push(p);
            partitions(rest - p, p, parts - 1, cur, out);
            cur.pop();
        }
    }
    let mut all = Vec::new();
    partitions(s, s, m, &mut Vec::new(), &mut all);
    let fact = |k: u32| (1..=k).fold(BigInt::one(), |a, i| a * i);
    all.iter()
        .map(|lambda| {
            // hook lengths of the Young diagram
            let mut hooks = BigInt::one();
            for (i, &row) in lambda.iter().enumerate() {
                for j in 0..row {
                    let arm = row - j - 1;
                    let leg = lambda[i + 1..].iter().filter(|&&r| r > j).count() as u32;
                    hooks *= arm + leg + 1;
                }
            }
            let f = fact(s) / hooks;
            &f * &f
        })
        .sum()
}

/// Exact `F_t` of Haar measure on `⊕_λ I_{r_λ} ⊗ U(m_λ)`:
/// `Σ_{Σ t_λ = t} (t! / Π t_λ!)² Π r_λ^{2 t_λ} E|tr W_{m_λ}|^{2 t_λ}`.
/// Cross terms vanish because each `tr W_λ` has a uniformly random phase.
pub fn exact_haar_frame_potential(shape: &[(usize, usize)], t: u32) -> BigInt {
    fn go(
        shape: &[(usize, usize)],
        rest: u32,
        denom: BigInt,
        weight: BigInt,
        t_fact: &BigInt,
        acc: &mut BigInt,
    ) {
        let Some((&(r, m), tail)) = shape.split_first() else {
            if rest == 0 {
                let multinomial = t_fact / denom;
                *acc += &multinomial * &multinomial * weight;
            }
            return;
        };
        let mut a_fact = BigInt::one();
        for a in 0..=rest {
            if a > 0 {
                a_fact *= a;
            }
            let g = permutations_with_bounded_lis(a, m);
            if g.is_zero() {
                continue;
            }
            let w = &weight * BigInt::from(r).pow(2 * a) * g;
            go(tail, rest - a, &denom * &a_fact, w, t_fact, acc);
        }
    }
    let t_fact = (1..=t).fold(BigInt::one(), |a, i| a * i);
    let mut acc = BigInt::zero();
    go(shape, t, BigInt::one(), BigInt::one(), &t_fact, &mut acc);
    acc
}
