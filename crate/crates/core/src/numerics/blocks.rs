//! Isotypic decomposition `ℂ^{2^n} ≅ ⊕_λ ℂ^{r_λ} ⊗ ℂ^{m_λ}` of a symmetry
//! action, either analytically (computational-basis subsets) or numerically
//! from the commutant of a set of generators.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::operators::symmetry_generators;
use super::{CMatrix, NumericsError};
use crate::Symmetry;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Hermitian generator of a symmetry action, stored sparsely.
#[derive(Clone, Debug)]
pub enum Generator {
    Diagonal(Vec<f64>),
    Sparse {
        dim: usize,
        entries: Vec<(usize, usize, Complex64)>,
    },
}

impl Generator {
    /// Hermitian generators with the same commutant as `op`. A normal
    /// operator commutes with `X` iff both Hermitian parts do.
    pub fn from_operator(op: &CMatrix) -> Vec<Generator> {
        let adj = op.adjoint();
        let half = Complex64::new(0.5, 0.0);
        let parts = [
            (op + &adj) * half,
            (op - &adj) * Complex64::new(0.0, -0.5),
        ];
        parts
            .into_iter()
            .filter(|p| p.norm() > 1e-14)
            .map(|p| Generator::from_hermitian(&p))
            .collect()
    }

    fn from_hermitian(h: &CMatrix) -> Generator {
        let dim = h.nrows();
        let off_diagonal = (0..dim).any(|c| (0..dim).any(|r| r != c && h[(r, c)] != ZERO));
        if off_diagonal {
            let mut entries = Vec::new();
            for c in 0..dim {
                for r in 0..dim {
                    if h[(r, c)] != ZERO {
                        entries.push((r, c, h[(r, c)]));
                    }
                }
            }
            Generator::Sparse { dim, entries }
        } else {
            Generator::Diagonal((0..dim).map(|i| h[(i, i)].re).collect())
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Generator::Diagonal(d) => d.len(),
            Generator::Sparse { dim, .. } => *dim,
        }
    }

    /// `[g, a]`.
    pub fn commutator(&self, a: &CMatrix) -> CMatrix {
        let dim = a.nrows();
        match self {
            Generator::Diagonal(h) => CMatrix::from_fn(dim, dim, |r, c| a[(r, c)] * (h[r] - h[c])),
            Generator::Sparse { entries, .. } => {
                let mut out = CMatrix::zeros(dim, dim);
                for &(i, j, v) in entries {
                    // (g a)[i, :] += v a[j, :];  (a g)[:, j] += a[:, i] v
                    for c in 0..dim {
                        out[(i, c)] += v * a[(j, c)];
                    }
                    for r in 0..dim {
                        out[(r, j)] -= a[(r, i)] * v;
                    }
                }
                out
            }
        }
    }

    /// `⟨v| g |v⟩` for a unit vector.
    fn expectation(&self, v: &[Complex64]) -> f64 {
        match self {
            Generator::Diagonal(h) => v.iter().zip(h).map(|(x, h)| x.norm_sqr() * h).sum(),
            Generator::Sparse { entries, .. } => entries
                .iter()
                .map(|&(i, j, g)| (v[i].conj() * g * v[j]).re)
                .sum(),
        }
    }
}

/// One isotypic component.
#[derive(Clone, Debug)]
pub struct Sector {
    /// Irrep label in the repdata convention, when known.
    pub label: Option<u32>,
    pub r: usize,
    pub m: usize,
    /// `dim × (r·m)` isometry; column `s·m + a` is `e_s ⊗ e_a`.
    pub isometry: CMatrix,
}

impl Sector {
    /// `U_λ` from `iso† U iso = I_r ⊗ U_λ`.
    pub fn block_of(&self, u: &CMatrix) -> CMatrix {
        let first = self.isometry.columns(0, self.m);
        first.adjoint() * u * first
    }
}

#[derive(Clone, Debug)]
pub struct BlockStructure {
    pub dim: usize,
    pub sectors: Vec<Sector>,
}

impl BlockStructure {
    /// Single sector, `r = 1`, `m = dim`: the trivial group.
    pub fn trivial(dim: usize) -> Self {
        Self {
            dim,
            sectors: vec![Sector {
                label: Some(0),
                r: 1,
                m: dim,
                isometry: CMatrix::identity(dim, dim),
            }],
        }
    }

    pub fn dimension_sum(&self) -> usize {
        self.sectors.iter().map(|s| s.r * s.m).sum()
    }

    /// `(r_λ, m_λ)` pairs.
    pub fn shape(&self) -> Vec<(usize, usize)> {
        self.sectors.iter().map(|s| (s.r, s.m)).collect()
    }

    /// Length of [`compact_vector`](Self::compact_vector).
    pub fn compact_len(&self) -> usize {
        self.sectors.iter().map(|s| s.m * s.m).sum()
    }

    /// Largest entry of `W†W − I` for the concatenated isometries; small values
    /// mean orthonormal columns and mutually orthogonal ranges.
    pub fn isometry_defect(&self) -> f64 {
        let cols: Vec<_> = self.sectors.iter().map(|s| s.isometry.clone()).collect();
        let total: usize = cols.iter().map(|c| c.ncols()).sum();
        let mut w = CMatrix::zeros(self.dim, total);
        let mut at = 0;
        for c in &cols {
            w.columns_mut(at, c.ncols()).copy_from(c);
            at += c.ncols();
        }
        let gram = w.adjoint() * &w - CMatrix::identity(total, total);
        gram.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest deviation of `a` from the form `⊕_λ I_r ⊗ A_λ` in the block
    /// basis.
    pub fn off_pattern_defect(&self, a: &CMatrix) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, si) in self.sectors.iter().enumerate() {
            for (j, sj) in self.sectors.iter().enumerate() {
                let b = si.isometry.adjoint() * a * &sj.isometry;
                if i != j {
                    worst = worst.max(b.iter().map(|z| z.norm()).fold(0.0, f64::max));
                    continue;
                }
                let (r, m) = (si.r, si.m);
                let reference = b.view((0, 0), (m, m)).into_owned();
                for s in 0..r {
                    for s2 in 0..r {
                        for x in 0..m {
                            for y in 0..m {
                                let want = if s == s2 { reference[(x, y)] } else { ZERO };
                                worst = worst.max((b[(s * m + x, s2 * m + y)] - want).norm());
                            }
                        }
                    }
                }
            }
        }
        worst
    }

    /// `v(U)` with `tr(U V†) = ⟨v(V), v(U)⟩`: blocks scaled by `√r_λ`.
    pub fn compact_vector(&self, u: &CMatrix) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.compact_len());
        for s in &self.sectors {
            let scale = (s.r as f64).sqrt();
            out.extend(s.block_of(u).iter().map(|z| z * scale));
        }
        out
    }

    /// `Σ_λ iso (I_r ⊗ U_λ) iso†`.
    pub fn assemble(&self, blocks: &[CMatrix]) -> CMatrix {
        assert_eq!(blocks.len(), self.sectors.len());
        let mut out = CMatrix::zeros(self.dim, self.dim);
        for (s, b) in self.sectors.iter().zip(blocks) {
            let full = CMatrix::identity(s.r, s.r).kronecker(b);
            out += &s.isometry * full * s.isometry.adjoint();
        }
        out
    }
}

fn random_hermitian(dim: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    (&g + g.adjoint()) * Complex64::new(0.5, 0.0)
}

fn inner(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

fn laplacian(generators: &[Generator], y: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(y.nrows(), y.ncols());
    for g in generators {
        out += g.commutator(&g.commutator(y));
    }
    out
}

fn commutator_residual(generators: &[Generator], y: &CMatrix) -> f64 {
    generators
        .iter()
        .map(|g| g.commutator(y).norm_squared())
        .sum::<f64>()
        .sqrt()
}

const PROJECTION_TOL: f64 = 1e-12;
const MAX_CG_ITERATIONS: usize = 2000;

/// Orthogonal projection of `x` onto the joint commutant, by conjugate
/// gradients on `Y ↦ Σ_g [g, [g, Y]]` started at `x`.
fn project_to_commutant(generators: &[Generator], x: CMatrix) -> Result<CMatrix, NumericsError> {
    let mut y = x;
    let scale = y.norm().max(1.0);
    let mut r = -laplacian(generators, &y);
    let mut p = r.clone();
    let mut rs = inner(&r, &r);
    for it in 0..MAX_CG_ITERATIONS {
        let residual = commutator_residual(generators, &y);
        if residual < PROJECTION_TOL * scale {
            return Ok(y);
        }
        if it > 0 && it % 50 == 0 {
            r = -laplacian(generators, &y);
            p = r.clone();
            rs = inner(&r, &r);
        }
        let lp = laplacian(generators, &p);
        let curvature = inner(&p, &lp);
        if curvature <= 0.0 {
            break;
        }
        let alpha = rs / curvature;
        y += &p * Complex64::new(alpha, 0.0);
        r -= &lp * Complex64::new(alpha, 0.0);
        let rs_new = inner(&r, &r);
        p = &r + &p * Complex64::new(rs_new / rs, 0.0);
        rs = rs_new;
    }
    let residual = commutator_residual(generators, &y);
    if residual < PROJECTION_TOL * scale {
        Ok(y)
    } else {
        Err(NumericsError::ProjectionNotConverged {
            residual,
            iterations: MAX_CG_ITERATIONS,
        })
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, i: usize) -> usize {
        let mut root = i;
        while self.0[root] != root {
            root = self.0[root];
        }
        let mut cur = i;
        while self.0[cur] != root {
            let next = self.0[cur];
            self.0[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Numerical isotypic decomposition of the action generated by `generators`.
///
/// A random Hermitian element `X` of the commutant has the form
/// `⊕_λ I_r ⊗ A_λ` with generic `A_λ`, so its eigenspaces have dimension
/// `r_λ`. A second random element `W` links eigenspaces of the same
/// component (its blocks between different components vanish), and
/// transporting a basis along a spanning tree with `W` aligns the copies of
/// `ℂ^{r_λ}`.
pub fn decompose_commutant(
    generators: &[Generator],
    dim: usize,
    seed: u64,
) -> Result<BlockStructure, NumericsError> {
    if dim > 1 << 10 {
        return Err(NumericsError::OutOfRange {
            what: "dimension",
            value: dim as u64,
            range: "1..=1024",
        });
    }
    if generators.iter().any(|g| g.dim() != dim) {
        return Err(NumericsError::Alignment("generator dimension mismatch".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = project_to_commutant(generators, random_hermitian(dim, &mut rng))?;
    let w = project_to_commutant(generators, random_hermitian(dim, &mut rng))?;

    let eig = x.symmetric_eigen();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let spread = eig.eigenvalues.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1.0);
    let tol = 1e-8 * spread;

    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut last = f64::NEG_INFINITY;
    for &i in &order {
        let v = eig.eigenvalues[i];
        match clusters.last_mut() {
            Some(c) if v - last < tol => c.push(i),
            _ => clusters.push(vec![i]),
        }
        last = v;
    }
    let bases: Vec<CMatrix> = clusters
        .iter()
        .map(|c| {
            let mut b = CMatrix::zeros(dim, c.len());
            for (k, &i) in c.iter().enumerate() {
                b.set_column(k, &eig.eigenvectors.column(i));
            }
            b
        })
        .collect();

    let wb: Vec<CMatrix> = bases.iter().map(|b| &w * b).collect();
    let w_scale = w.norm().max(1e-300);
    let nc = clusters.len();
    let mut coupling = DMatrix::<f64>::zeros(nc, nc);
    let mut uf = UnionFind((0..nc).collect());
    for a in 0..nc {
        for b in a + 1..nc {
            let c = (bases[a].adjoint() * &wb[b]).norm() / w_scale;
            coupling[(a, b)] = c;
            coupling[(b, a)] = c;
            if c > 1e-6 {
                uf.union(a, b);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_of = vec![usize::MAX; nc];
    for a in 0..nc {
        let root = uf.find(a);
        if root_of[root] == usize::MAX {
            root_of[root] = groups.len();
            groups.push(Vec::new());
        }
        groups[root_of[root]].push(a);
    }

    let mut sectors = Vec::with_capacity(groups.len());
    for group in groups {
        let r = clusters[group[0]].len();
        if group.iter().any(|&c| clusters[c].len() != r) {
            return Err(NumericsError::Alignment(format!(
                "eigenspaces of one component have unequal dimensions {:?}",
                group.iter().map(|&c| clusters[c].len()).collect::<Vec<_>>()
            )));
        }
        let m = group.len();
        // maximum-weight spanning tree over the coupling strengths
        let mut aligned: Vec<Option<CMatrix>> = vec![None; m];
        aligned[0] = Some(bases[group[0]].clone());
        for _ in 1..m {
            let mut best: Option<(usize, usize, f64)> = None;
            for (pi, p) in aligned.iter().enumerate() {
                if p.is_none() {
                    continue;
                }
                for (qi, q) in aligned.iter().enumerate() {
                    if q.is_some() {
                        continue;
                    }
                    let c = coupling[(group[pi], group[qi])];
                    if best.is_none_or(|(_, _, bc)| c > bc) {
                        best = Some((pi, qi, c));
                    }
                }
            }
            let (pi, qi, _) = best.expect("component is connected");
            let parent = aligned[pi].as_ref().expect("aligned parent");
            let target = &bases[group[qi]];
            let t = target.adjoint() * (&w * parent);
            let norm = t.norm() / (r as f64).sqrt();
            if norm < 1e-9 {
                return Err(NumericsError::Alignment(format!("vanishing transport {norm:.3e}")));
            }
            aligned[qi] = Some(target * t * Complex64::new(1.0 / norm, 0.0));
        }
        let mut iso = CMatrix::zeros(dim, r * m);
        for (a, b) in aligned.into_iter().enumerate() {
            let b = b.expect("all copies aligned");
            for s in 0..r {
                iso.set_column(s * m + a, &b.column(s));
            }
        }
        sectors.push(Sector {
            label: None,
            r,
            m,
            isometry: iso,
        });
    }
    let bs = BlockStructure { dim, sectors };
    let defect = bs.isometry_defect();
    if defect > 1e-8 {
        return Err(NumericsError::Alignment(format!("isometry defect {defect:.3e}")));
    }
    Ok(bs)
}

/// Assigns repdata labels to numerically found sectors and sorts by label.
pub fn label_sectors(
    mut bs: BlockStructure,
    symmetry: Symmetry,
    n: usize,
) -> Result<BlockStructure, NumericsError> {
    let gens = symmetry_generators(symmetry, n);
    for s in &mut bs.sectors {
        let v: Vec<Complex64> = s.isometry.column(0).iter().copied().collect();
        let label = match symmetry {
            Symmetry::Z2 => {
                if gens[0].expectation(&v) > 0.0 {
                    0
                } else {
                    1
                }
            }
            Symmetry::U1 => ((n as f64 - gens[0].expectation(&v)) / 2.0).round() as u32,
            Symmetry::SU2 => ((n + 1 - s.r) / 2) as u32,
            Symmetry::Custom => return Err(NumericsError::UnsupportedSymmetry(symmetry)),
        };
        s.label = Some(label);
    }
    bs.sectors.sort_by_key(|s| s.label);
    if bs.sectors.windows(2).any(|w| w[0].label == w[1].label) {
        return Err(NumericsError::Alignment("two sectors received the same label".into()));
    }
    Ok(bs)
}

/// ℤ₂ (parity) or U(1) (Hamming weight) sectors as computational-basis
/// subsets, all with `r = 1`.
pub fn analytic_block_structure(symmetry: Symmetry, n: usize) -> Result<BlockStructure, NumericsError> {
    let dim = 1usize << n;
    let key: Box<dyn Fn(usize) -> u32> = match symmetry {
        Symmetry::Z2 => Box::new(|i: usize| i.count_ones() % 2),
        Symmetry::U1 => Box::new(|i: usize| i.count_ones()),
        other => return Err(NumericsError::UnsupportedSymmetry(other)),
    };
    let count = if symmetry == Symmetry::Z2 { 2 } else { n as u32 + 1 };
    let sectors = (0..count)
        .map(|label| {
            let members: Vec<usize> = (0..dim).filter(|&i| key(i) == label).collect();
            let mut iso = CMatrix::zeros(dim, members.len());
            for (c, &i) in members.iter().enumerate() {
                iso[(i, c)] = Complex64::new(1.0, 0.0);
            }
            Sector {
                label: Some(label),
                r: 1,
                m: members.len(),
                isometry: iso,
            }
        })
        .collect();
    Ok(BlockStructure { dim, sectors })
}

/// Block structure of a built-in symmetry on `n` qubits: analytic for ℤ₂ and
/// U(1), numerical for SU(2).
pub fn block_structure(symmetry: Symmetry, n: usize, seed: u64) -> Result<BlockStructure, NumericsError> {
    match symmetry {
        Symmetry::Z2 | Symmetry::U1 => analytic_block_structure(symmetry, n),
        Symmetry::SU2 => {
            let gens = symmetry_generators(symmetry, n);
            label_sectors(decompose_commutant(&gens, 1 << n, seed)?, symmetry, n)
        }
        Symmetry::Custom => Err(NumericsError::UnsupportedSymmetry(symmetry)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::operators::{permutation_operator, symmetry_generators};

    fn numeric(symmetry: Symmetry, n: usize) -> BlockStructure {
        let gens = symmetry_generators(symmetry, n);
        label_sectors(decompose_commutant(&gens, 1 << n, 7).unwrap(), symmetry, n).unwrap()
    }

    #[test]
    fn z2_three_qubits() {
        let bs = numeric(Symmetry::Z2, 3);
        assert_eq!(bs.shape(), vec![(1, 4), (1, 4)]);
    }

    #[test]
    fn u1_four_qubits() {
        let bs = numeric(Symmetry::U1, 4);
        assert_eq!(bs.shape(), vec![(1, 1), (1, 4), (1, 6), (1, 4), (1, 1)]);
    }

    #[test]
    fn su2_four_qubits() {
        let bs = numeric(Symmetry::SU2, 4);
        // spin 2, spin 1, spin 0
        assert_eq!(bs.shape(), vec![(5, 1), (3, 3), (1, 2)]);
        assert_eq!(bs.dimension_sum(), 16);
        assert!(bs.isometry_defect() < 1e-10);
        // permutations are symmetric operators
        let p = permutation_operator(&[1, 2, 3, 0]);
        assert!(bs.off_pattern_defect(&p) < 1e-8);
    }

    #[test]
    fn assemble_inverts_block_extraction() {
        let bs = numeric(Symmetry::SU2, 3);
        let blocks: Vec<CMatrix> = bs
            .sectors
            .iter()
            .map(|s| CMatrix::from_fn(s.m, s.m, |i, j| Complex64::new(i as f64 + 1.0, j as f64)))
            .collect();
        let u = bs.assemble(&blocks);
        for (s, b) in bs.sectors.iter().zip(&blocks) {
            assert!((s.block_of(&u) - b).norm() < 1e-10);
        }
        assert!(bs.off_pattern_defect(&u) < 1e-10);
    }

    #[test]
    fn unitary_generator_is_split() {
        let z = symmetry_generators(Symmetry::Z2, 2);
        let Generator::Diagonal(d) = &z[0] else { panic!() };
        let op = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            4,
            d.iter().map(|&x| Complex64::new(x, 0.0)),
        ));
        let gens = Generator::from_operator(&(op * Complex64::new(0.0, 1.0)));
        assert_eq!(gens.len(), 1);
        let bs = decompose_commutant(&gens, 4, 1).unwrap();
        assert_eq!(bs.sectors.len(), 2);
    }
}
