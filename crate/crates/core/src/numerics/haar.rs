use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{BlockStructure, CMatrix};

/// Haar-random `m × m` unitary: QR of a complex Ginibre matrix with the
/// phases of `diag(R)` moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(m: usize, rng: &mut R) -> CMatrix {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let g = CMatrix::from_fn(m, m, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * scale, im * scale)
    });
    let qr = g.qr();
    let (mut q, r) = qr.unpack();
    for j in 0..m {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..m {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// One Haar unitary per sector, in sector order.
pub fn sample_symmetric_blocks<R: Rng + ?Sized>(bs: &BlockStructure, rng: &mut R) -> Vec<CMatrix> {
    bs.sectors.iter().map(|s| haar_unitary(s.m, rng)).collect()
}

/// `U = ⊕_λ I_{r_λ} ⊗ U_λ` with independent Haar `U_λ`, in the computational
/// basis.
pub fn sample_symmetric_haar<R: Rng + ?Sized>(bs: &BlockStructure, rng: &mut R) -> CMatrix {
    bs.assemble(&sample_symmetric_blocks(bs, rng))
}
