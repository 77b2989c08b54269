//! Deterministic synthetic data: bump functions, diagram clouds and random
//! diagrams.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::sublevel::SampledFunction;
use crate::diagram::{perturb, PersistenceDiagram};

/// Number of samples per synthetic function.
pub const SAMPLES_PER_FUNCTION: usize = 128;

const BUMP_WIDTH: f64 = 0.03;

/// Class label of functions with two bumps.
pub const CLASS_TWO_BUMPS: usize = 0;
/// Class label of functions with four bumps.
pub const CLASS_FOUR_BUMPS: usize = 1;

fn bump_function<R: Rng>(rng: &mut R, bumps: usize, noise: f64) -> SampledFunction {
    let slot = 1.0 / bumps as f64;
    let centers: Vec<f64> = (0..bumps)
        .map(|i| (i as f64 + 0.5) * slot + rng.gen_range(-0.1..0.1) * slot)
        .collect();
    let heights: Vec<f64> = (0..bumps).map(|_| rng.gen_range(0.7..1.3)).collect();
    let values = (0..SAMPLES_PER_FUNCTION)
        .map(|k| {
            let x = k as f64 / (SAMPLES_PER_FUNCTION - 1) as f64;
            let clean: f64 = centers
                .iter()
                .zip(&heights)
                .map(|(c, h)| h * (-0.5 * ((x - c) / BUMP_WIDTH).powi(2)).exp())
                .sum();
            let jitter = if noise > 0.0 { rng.gen_range(-noise..=noise) } else { 0.0 };
            clean + jitter
        })
        .collect();
    SampledFunction::new(values).expect("finite samples")
}

/// Two-class functional dataset: class 0 has two Gaussian bumps, class 1
/// has four. Bump centers and heights are jittered and uniform noise of
/// amplitude `noise` is added to every sample. Items alternate between the
/// classes.
pub fn gen_two_class_functions(n_per_class: usize, noise: f64, seed: u64) -> Vec<(SampledFunction, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(2 * n_per_class);
    for _ in 0..n_per_class {
        out.push((bump_function(&mut rng, 2, noise), CLASS_TWO_BUMPS));
        out.push((bump_function(&mut rng, 4, noise), CLASS_FOUR_BUMPS));
    }
    out
}

/// `n` independent perturbations of `template`.
pub fn gen_diagram_cloud(template: &PersistenceDiagram, n: usize, jitter: f64, seed: u64) -> Vec<PersistenceDiagram> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| perturb(template, jitter, rng.gen())).collect()
}

/// Diagram with up to `max_points` unit-multiplicity points drawn uniformly
/// from `[lo, hi]²` above the diagonal.
pub fn random_diagram<R: Rng>(rng: &mut R, max_points: usize, lo: f64, hi: f64) -> PersistenceDiagram {
    let n = rng.gen_range(0..=max_points);
    let pairs: Vec<_> = (0..n)
        .map(|_| loop {
            let (a, b) = (rng.gen_range(lo..hi), rng.gen_range(lo..hi));
            if a < b {
                break (a, b);
            } else if b < a {
                break (b, a);
            }
        })
        .collect();
    PersistenceDiagram::from_pairs(pairs).expect("points above the diagonal")
}
