//! Local random circuits: each step applies a symmetric Haar gate on a
//! randomly chosen support `γ ∈ Γ`.

use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::blocks::block_structure;
use super::frame::Ensemble;
use super::haar::sample_symmetric_haar;
use super::{BlockStructure, CMatrix, NumericsError};
use crate::Symmetry;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitSpec {
    pub n: usize,
    pub gamma: Vec<Vec<usize>>,
    pub probs: Vec<f64>,
    pub symmetry: Symmetry,
}

impl CircuitSpec {
    /// Contiguous windows `{i, …, i+k−1}` with uniform probabilities.
    pub fn brickwork(n: usize, k: usize, symmetry: Symmetry) -> Result<Self, NumericsError> {
        if k == 0 || k > n {
            return Err(NumericsError::InvalidCircuit(format!("window size {k} on {n} qubits")));
        }
        let gamma: Vec<Vec<usize>> = (0..=n - k).map(|i| (i..i + k).collect()).collect();
        let probs = vec![1.0 / gamma.len() as f64; gamma.len()];
        let spec = Self {
            n,
            gamma,
            probs,
            symmetry,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Largest support size.
    pub fn locality(&self) -> usize {
        self.gamma.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn validate(&self) -> Result<(), NumericsError> {
        let bad = |msg: String| Err(NumericsError::InvalidCircuit(msg));
        if self.n == 0 || self.n > 10 {
            return Err(NumericsError::OutOfRange {
                what: "n",
                value: self.n as u64,
                range: "1..=10",
            });
        }
        if self.gamma.is_empty() || self.gamma.len() != self.probs.len() {
            return bad(format!(
                "{} supports but {} probabilities",
                self.gamma.len(),
                self.probs.len()
            ));
        }
        if self.probs.iter().any(|&p| p.is_nan() || p <= 0.0) {
            return bad("probabilities must be positive".into());
        }
        if (self.probs.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return bad("probabilities must sum to 1".into());
        }
        for g in &self.gamma {
            let mut sorted = g.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if g.is_empty() || sorted.len() != g.len() || g.iter().any(|&q| q >= self.n) {
                return bad(format!("invalid support {g:?}"));
            }
        }
        // connectivity of the hypergraph (qubits, Γ)
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(p: &mut [usize], i: usize) -> usize {
            if p[i] != i {
                p[i] = find(p, p[i]);
            }
            p[i]
        }
        for g in &self.gamma {
            for w in g.windows(2) {
                let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
                parent[a] = b;
            }
        }
        let root = find(&mut parent, 0);
        if (0..self.n).any(|q| find(&mut parent, q) != root) {
            return Err(NumericsError::Disconnected { n: self.n });
        }
        Ok(())
    }
}

/// Precomputed data for sampling depth-`D` circuits.
pub struct CircuitEnsemble {
    pub spec: CircuitSpec,
    pub depth: usize,
    /// Block structure of the whole register, used to compress unitaries.
    pub global: BlockStructure,
    local: Vec<BlockStructure>,
    /// For each support: full-register indices grouped by the state of the
    /// qubits outside the support.
    groups: Vec<Vec<Vec<usize>>>,
    choose: WeightedIndex<f64>,
}

fn index_groups(support: &[usize], n: usize) -> Vec<Vec<usize>> {
    let k = support.len();
    let mask: usize = support.iter().map(|&q| 1usize << (n - 1 - q)).sum();
    (0..1usize << n)
        .filter(|i| i & mask == 0)
        .map(|rest| {
            (0..1usize << k)
                .map(|l| {
                    support.iter().enumerate().fold(rest, |acc, (i, &q)| {
                        acc | (((l >> (k - 1 - i)) & 1) << (n - 1 - q))
                    })
                })
                .collect()
        })
        .collect()
}

impl CircuitEnsemble {
    /// `seed` only affects the numerical SU(2) block decompositions.
    pub fn new(spec: CircuitSpec, depth: usize, seed: u64) -> Result<Self, NumericsError> {
        let symmetry = spec.symmetry;
        Self::with_blocks(spec, depth, |q| block_structure(symmetry, q, seed))
    }

    /// Like [`new`](Self::new) with caller-supplied block structures per
    /// qubit count, e.g. [`BlockStructure::trivial`] for unconstrained gates.
    pub fn with_blocks(
        spec: CircuitSpec,
        depth: usize,
        blocks: impl Fn(usize) -> Result<BlockStructure, NumericsError>,
    ) -> Result<Self, NumericsError> {
        spec.validate()?;
        let global = blocks(spec.n)?;
        let mut by_size: Vec<Option<BlockStructure>> = vec![None; spec.locality() + 1];
        let mut local = Vec::with_capacity(spec.gamma.len());
        for g in &spec.gamma {
            let k = g.len();
            if by_size[k].is_none() {
                by_size[k] = Some(blocks(k)?);
            }
            local.push(by_size[k].clone().expect("just built"));
        }
        let groups = spec.gamma.iter().map(|g| index_groups(g, spec.n)).collect();
        let choose = WeightedIndex::new(&spec.probs)
            .map_err(|e| NumericsError::InvalidCircuit(e.to_string()))?;
        Ok(Self {
            spec,
            depth,
            global,
            local,
            groups,
            choose,
        })
    }

    pub fn dim(&self) -> usize {
        1 << self.spec.n
    }

    /// `u ← G u` for a fresh random gate on a random support.
    pub fn apply_step<R: Rng + ?Sized>(&self, u: &mut CMatrix, rng: &mut R) {
        let which = self.choose.sample(rng);
        let gate = sample_symmetric_haar(&self.local[which], rng);
        apply_local(u, &gate, &self.groups[which]);
    }

    pub fn extend<R: Rng + ?Sized>(&self, u: &mut CMatrix, steps: usize, rng: &mut R) {
        for _ in 0..steps {
            self.apply_step(u, rng);
        }
    }
}

fn apply_local(u: &mut CMatrix, gate: &CMatrix, groups: &[Vec<usize>]) {
    let k = gate.nrows();
    let mut tmp = vec![Complex64::new(0.0, 0.0); k];
    for col in 0..u.ncols() {
        for idx in groups {
            for (a, t) in tmp.iter_mut().enumerate() {
                *t = (0..k).map(|b| gate[(a, b)] * u[(idx[b], col)]).sum();
            }
            for (a, &i) in idx.iter().enumerate() {
                u[(i, col)] = tmp[a];
            }
        }
    }
}

/// Product of `depth` random symmetric local gates.
pub fn sample_circuit<R: Rng + ?Sized>(ensemble: &CircuitEnsemble, rng: &mut R) -> CMatrix {
    let mut u = CMatrix::identity(ensemble.dim(), ensemble.dim());
    ensemble.extend(&mut u, ensemble.depth, rng);
    u
}

impl Ensemble for CircuitEnsemble {
    fn sample_vector(&self, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
        self.global.compact_vector(&sample_circuit(self, rng))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::operators::{embed, symmetry_generators};
    use crate::numerics::{commutator_norm, haar_unitary};
    use rand::SeedableRng;

    #[test]
    fn brickwork_supports() {
        let spec = CircuitSpec::brickwork(3, 2, Symmetry::U1).unwrap();
        assert_eq!(spec.gamma, vec![vec![0, 1], vec![1, 2]]);
        assert_eq!(spec.probs, vec![0.5, 0.5]);
    }

    #[test]
    fn disconnected_supports_rejected() {
        let spec = CircuitSpec {
            n: 4,
            gamma: vec![vec![0, 1], vec![2, 3]],
            probs: vec![0.5, 0.5],
            symmetry: Symmetry::U1,
        };
        assert!(matches!(spec.validate(), Err(NumericsError::Disconnected { .. })));
    }

    #[test]
    fn local_application_matches_embedding() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = haar_unitary(4, &mut rng);
        let u0 = haar_unitary(8, &mut rng);
        for support in [[0usize, 1], [1, 2], [2, 0]] {
            let mut u = u0.clone();
            apply_local(&mut u, &g, &index_groups(&support, 3));
            let expect = embed(&g, &support, 3) * &u0;
            assert!((u - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn circuits_are_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for sym in [Symmetry::Z2, Symmetry::U1, Symmetry::SU2] {
            let spec = CircuitSpec::brickwork(4, 2, sym).unwrap();
            let ens = CircuitEnsemble::new(spec, 10, 3).unwrap();
            let u = sample_circuit(&ens, &mut rng);
            assert!(commutator_norm(&u, &symmetry_generators(sym, 4)) < 1e-8);
            let n = u.nrows();
            assert!((u.adjoint() * &u - CMatrix::identity(n, n)).norm() < 1e-10);
        }
    }
}
