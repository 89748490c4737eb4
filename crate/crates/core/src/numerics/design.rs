//! Statistical check of the design order: frame potential of deep circuits
//! against the exact symmetric-Haar value.

use num_traits::ToPrimitive;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::circuit::{CircuitEnsemble, CircuitSpec};
use super::frame::{chunk_rng, exact_haar_frame_potential, frame_potential_from_draws, CHUNK};
use super::{CMatrix, FramePotentialEstimate, NumericsError};
use crate::Symmetry;

#[derive(Clone, Debug, Serialize)]
pub struct DesignTestConfig {
    pub symmetry: Symmetry,
    pub n: usize,
    pub k: usize,
    pub t: u32,
    /// Independent circuits; all `draws·(draws−1)/2` pairs enter the estimate.
    pub draws: usize,
    pub seed: u64,
    pub initial_depth: usize,
    pub max_depth: usize,
    /// Decision threshold in combined standard errors.
    pub z_threshold: f64,
}

impl DesignTestConfig {
    pub fn new(symmetry: Symmetry, n: usize, k: usize, t: u32) -> Self {
        Self {
            symmetry,
            n,
            k,
            t,
            draws: 20_000,
            seed: 0x5EED,
            initial_depth: 8,
            max_depth: 1024,
            z_threshold: 3.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Consistent,
    Inconsistent,
    /// The estimate never stabilised within `max_depth`.
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct DepthPoint {
    pub depth: usize,
    pub estimate: FramePotentialEstimate,
}

#[derive(Clone, Debug, Serialize)]
pub struct DesignTestReport {
    pub config: DesignTestConfig,
    pub gamma: Vec<Vec<usize>>,
    /// Exact `F_t` of symmetric Haar measure (decimal string).
    pub haar_exact: String,
    pub haar_value: f64,
    pub schedule: Vec<DepthPoint>,
    pub final_depth: usize,
    pub delta: f64,
    /// Standard error of the difference; the Haar reference is exact.
    pub combined_stderr: f64,
    pub z: f64,
    pub verdict: Verdict,
}

fn check(config: &DesignTestConfig) -> Result<(), NumericsError> {
    if !matches!(config.symmetry, Symmetry::Z2 | Symmetry::U1 | Symmetry::SU2) {
        return Err(NumericsError::UnsupportedSymmetry(config.symmetry));
    }
    let range = |what, value: usize, ok: bool, range| {
        if ok {
            Ok(())
        } else {
            Err(NumericsError::OutOfRange {
                what,
                value: value as u64,
                range,
            })
        }
    };
    range("n", config.n, (2..=6).contains(&config.n), "2..=6")?;
    range("k", config.k, config.k >= 1 && config.k < config.n, "1..n")?;
    range("t", config.t as usize, (1..=4).contains(&config.t), "1..=4")?;
    range("draws", config.draws, config.draws >= 3, "draws >= 3")?;
    range(
        "initial_depth",
        config.initial_depth,
        config.initial_depth >= 1 && config.initial_depth <= config.max_depth,
        "1..=max_depth",
    )
}

/// Doubles the circuit depth (extending the same circuits) until successive
/// estimates of `F_t` differ by less than one standard error, then compares
/// with the symmetric-Haar value.
pub fn design_test(config: &DesignTestConfig) -> Result<DesignTestReport, NumericsError> {
    check(config)?;
    let spec = CircuitSpec::brickwork(config.n, config.k, config.symmetry)?;
    let ensemble = CircuitEnsemble::new(spec, 0, config.seed)?;
    let haar_exact = exact_haar_frame_potential(&ensemble.global.shape(), config.t);
    let haar_value = haar_exact.to_f64().unwrap_or(f64::INFINITY);

    let dim = ensemble.dim();
    let mut chunks: Vec<(ChaCha8Rng, Vec<CMatrix>)> = (0..config.draws.div_ceil(CHUNK))
        .map(|c| {
            let count = CHUNK.min(config.draws - c * CHUNK);
            (chunk_rng(config.seed, c), vec![CMatrix::identity(dim, dim); count])
        })
        .collect();

    let mut schedule: Vec<DepthPoint> = Vec::new();
    let mut depth = 0;
    let mut target = config.initial_depth;
    let mut stable = false;
    while target <= config.max_depth {
        let steps = target - depth;
        chunks.par_iter_mut().for_each(|(rng, us)| {
            for u in us.iter_mut() {
                ensemble.extend(u, steps, rng);
            }
        });
        depth = target;
        let vectors: Vec<_> = chunks
            .iter()
            .flat_map(|(_, us)| us.iter().map(|u| ensemble.global.compact_vector(u)))
            .collect();
        let estimate = frame_potential_from_draws(&vectors, config.t, config.seed)?;
        log::info!(
            "depth {depth}: F_{} = {:.4} ± {:.4} (Haar {haar_value})",
            config.t,
            estimate.mean,
            estimate.stderr
        );
        let settled = schedule
            .last()
            .is_some_and(|prev| (estimate.mean - prev.estimate.mean).abs() < estimate.stderr);
        schedule.push(DepthPoint { depth, estimate });
        if settled {
            stable = true;
            break;
        }
        target *= 2;
    }

    let last = &schedule.last().expect("at least one depth").estimate;
    let delta = last.mean - haar_value;
    let combined_stderr = last.stderr;
    let z = if combined_stderr > 0.0 {
        delta.abs() / combined_stderr
    } else if delta == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    let verdict = if !stable {
        Verdict::Inconclusive
    } else if z <= config.z_threshold {
        Verdict::Consistent
    } else {
        Verdict::Inconsistent
    };
    Ok(DesignTestReport {
        config: config.clone(),
        gamma: ensemble.spec.gamma.clone(),
        haar_exact: haar_exact.to_string(),
        haar_value,
        final_depth: depth,
        schedule,
        delta,
        combined_stderr,
        z,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_design_is_consistent() {
        let mut cfg = DesignTestConfig::new(Symmetry::Z2, 3, 2, 1);
        cfg.draws = 1500;
        let rep = design_test(&cfg).unwrap();
        assert_eq!(rep.haar_exact, "2");
        assert_eq!(rep.verdict, Verdict::Consistent, "{rep:?}");
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(design_test(&DesignTestConfig::new(Symmetry::U1, 7, 2, 2)).is_err());
        assert!(design_test(&DesignTestConfig::new(Symmetry::U1, 3, 2, 5)).is_err());
        assert!(design_test(&DesignTestConfig::new(Symmetry::Custom, 3, 2, 1)).is_err());
    }
}
