use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use super::BaselineError;
use crate::diagram::PersistenceDiagram;

/// Number of directions used unless overridden.
pub const DEFAULT_DIRECTIONS: usize = 100;

/// Kernel scales explored for the Gram matrix.
pub const SIGMA_GRID: [f64; 7] = [1e-5, 1e-4, 1e-3, 1e-2, 0.1, 1.0, 10.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SwParams {
    pub m: usize,
    pub sigma: f64,
}

impl SwParams {
    pub fn new(m: usize, sigma: f64) -> Result<Self, BaselineError> {
        if m == 0 {
            return Err(BaselineError::Parameter("number of directions must be at least 1".into()));
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(BaselineError::Parameter(format!("sigma must be positive, got {sigma}")));
        }
        Ok(Self { m, sigma })
    }
}

impl Default for SwParams {
    fn default() -> Self {
        Self { m: DEFAULT_DIRECTIONS, sigma: 1.0 }
    }
}

/// Atoms of `d` followed by the diagonal projections of the atoms of `other`.
fn augmented(d: &PersistenceDiagram, other: &PersistenceDiagram) -> Vec<(f64, f64)> {
    d.atoms()
        .map(|p| (p.birth(), p.death()))
        .chain(other.atoms().map(|q| {
            let c = 0.5 * (q.birth() + q.death());
            (c, c)
        }))
        .collect()
}

/// Sliced Wasserstein distance with `m` evenly spaced directions in
/// `[−π/2, π/2)`, each diagram augmented with the diagonal projections of
/// the other's points.
pub fn sliced_wasserstein_distance(d1: &PersistenceDiagram, d2: &PersistenceDiagram, params: &SwParams) -> f64 {
    let u = augmented(d1, d2);
    let v = augmented(d2, d1);
    let mut a = vec![0.0; u.len()];
    let mut b = vec![0.0; v.len()];
    let mut total = 0.0;
    for i in 0..params.m {
        let theta = -PI / 2.0 + PI * i as f64 / params.m as f64;
        let (s, c) = theta.sin_cos();
        for (dst, &(x, y)) in a.iter_mut().zip(&u) {
            *dst = x * c + y * s;
        }
        for (dst, &(x, y)) in b.iter_mut().zip(&v) {
            *dst = x * c + y * s;
        }
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        total += a.iter().zip(&b).map(|(x, y)| (x - y).abs()).sum::<f64>();
    }
    total / params.m as f64
}

/// `exp(−SW(d1, d2) / (2σ²))`.
pub fn sw_kernel(d1: &PersistenceDiagram, d2: &PersistenceDiagram, params: &SwParams) -> f64 {
    (-sliced_wasserstein_distance(d1, d2, params) / (2.0 * params.sigma * params.sigma)).exp()
}

/// Symmetric matrix of pairwise sliced Wasserstein distances.
pub fn sw_distance_matrix(diagrams: &[PersistenceDiagram], params: &SwParams) -> Vec<Vec<f64>> {
    let n = diagrams.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let values: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| sliced_wasserstein_distance(&diagrams[i], &diagrams[j], params))
        .collect();
    let mut out = vec![vec![0.0; n]; n];
    for (&(i, j), v) in pairs.iter().zip(values) {
        out[i][j] = v;
        out[j][i] = v;
    }
    out
}

/// Gram matrix of the sliced Wasserstein kernel.
pub fn sw_gram_matrix(diagrams: &[PersistenceDiagram], params: &SwParams) -> Vec<Vec<f64>> {
    let scale = 2.0 * params.sigma * params.sigma;
    sw_distance_matrix(diagrams, params)
        .into_iter()
        .map(|row| row.into_iter().map(|d| (-d / scale).exp()).collect())
        .collect()
}
