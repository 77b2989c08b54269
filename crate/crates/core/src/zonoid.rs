//! Lift zonoids of weighted diagrams, represented by their generators.
//!
//! The lift zonoid of `Σ ω(p) c_p δ_p` is the zonotope `⊕_p [0, c_p·Γ_ω(p)]`.
//! Its support function is `h(x) = Σ_i max(0, ⟨x, g_i⟩)`, and the Hausdorff
//! distance between two zonoids equals the sup-norm of the difference of
//! their support functions over the unit sphere.

use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::diagram::PersistenceDiagram;
use crate::sphere::{spherical_to_unit, SphereGrid};
use crate::weighting::LiftWeight;

/// Generator cap of [`hausdorff_bruteforce`].
pub const BRUTEFORCE_GENERATOR_CAP: usize = 3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ZonoidError {
    #[error("point-sampling Hausdorff accepts at most {cap} generators, got {got}")]
    TooManyGenerators { cap: usize, got: usize },
    #[error("samples_per_generator must be positive")]
    NoSamples,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LiftZonoid {
    generators: Vec<[f64; 3]>,
}

impl LiftZonoid {
    /// The zonoid `{0}`.
    pub fn origin() -> Self {
        Self::default()
    }

    pub fn from_generators(generators: Vec<[f64; 3]>) -> Self {
        Self { generators }
    }

    pub fn generators(&self) -> &[[f64; 3]] {
        &self.generators
    }

    pub fn support(&self, x: [f64; 3]) -> f64 {
        support(self, x)
    }
}

/// One generator `c_p·ω(p)·(1, birth, death)` per point, canonical order.
pub fn lift_zonoid<W: LiftWeight + ?Sized>(d: &PersistenceDiagram, w: &W) -> LiftZonoid {
    let generators = d
        .points()
        .iter()
        .map(|p| {
            let s = w.weight(p) * p.multiplicity() as f64;
            [s, s * p.birth(), s * p.death()]
        })
        .collect();
    LiftZonoid { generators }
}

#[inline]
fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn support(z: &LiftZonoid, x: [f64; 3]) -> f64 {
    z.generators.iter().map(|&g| dot(x, g).max(0.0)).sum()
}

pub fn minkowski_sum(z1: &LiftZonoid, z2: &LiftZonoid) -> LiftZonoid {
    let mut generators = z1.generators.clone();
    generators.extend_from_slice(&z2.generators);
    LiftZonoid { generators }
}

fn gap(z1: &LiftZonoid, z2: &LiftZonoid, v: [f64; 3]) -> f64 {
    (support(z1, v) - support(z2, v)).abs()
}

/// Lower estimate of `d_H(z1, z2) = max_{|v| = 1} |h_1(v) − h_2(v)|`.
///
/// Takes the maximum over the grid nodes, then runs `refine_steps` rounds of
/// local search: each round halves the angular step and scans a 5×5 stencil
/// around the current maximizer. The result never decreases with more
/// rounds.
pub fn hausdorff(z1: &LiftZonoid, z2: &LiftZonoid, grid: &Arc<SphereGrid>, refine_steps: usize) -> f64 {
    let (best_idx, mut best) = grid
        .nodes()
        .par_iter()
        .enumerate()
        .with_min_len(256)
        .map(|(i, &v)| (i, gap(z1, z2, v)))
        .reduce(
            || (usize::MAX, f64::NEG_INFINITY),
            |a, b| if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) { b } else { a },
        );
    if best_idx == usize::MAX {
        return 0.0;
    }
    let (mut theta, mut phi) = grid.angles(best_idx);
    let (mut dt, mut dp) = (grid.theta_step(), grid.phi_step());
    for _ in 0..refine_steps {
        dt /= 2.0;
        dp /= 2.0;
        let (ct, cp) = (theta, phi);
        for a in -2i32..=2 {
            for b in -2i32..=2 {
                let (t, p) = (ct + a as f64 * dt, cp + b as f64 * dp);
                let g = gap(z1, z2, spherical_to_unit(t, p));
                if g > best {
                    best = g;
                    theta = t;
                    phi = p;
                }
            }
        }
    }
    best
}

fn sample_points(z: &LiftZonoid, k: usize) -> Vec<[f64; 3]> {
    let mut pts = vec![[0.0; 3]];
    for g in &z.generators {
        let mut next = Vec::with_capacity(pts.len() * (k + 1));
        for p in &pts {
            for j in 0..=k {
                let t = j as f64 / k as f64;
                next.push([p[0] + t * g[0], p[1] + t * g[1], p[2] + t * g[2]]);
            }
        }
        pts = next;
    }
    pts
}

fn directed(a: &[[f64; 3]], b: &[[f64; 3]]) -> f64 {
    a.par_iter()
        .map(|p| {
            b.iter()
                .map(|q| {
                    let d = [p[0] - q[0], p[1] - q[1], p[2] - q[2]];
                    dot(d, d)
                })
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| 0.0, f64::max)
        .sqrt()
}

/// Point-set Hausdorff distance between dense samples of two zonotopes.
///
/// Each zonotope is sampled as `{Σ_i t_i g_i}` with every `t_i` on the
/// uniform grid `{0, 1/k, …, 1}`, `k = samples_per_generator`.
pub fn hausdorff_bruteforce(
    z1: &LiftZonoid,
    z2: &LiftZonoid,
    samples_per_generator: usize,
) -> Result<f64, ZonoidError> {
    if samples_per_generator == 0 {
        return Err(ZonoidError::NoSamples);
    }
    for z in [z1, z2] {
        if z.generators.len() > BRUTEFORCE_GENERATOR_CAP {
            return Err(ZonoidError::TooManyGenerators {
                cap: BRUTEFORCE_GENERATOR_CAP,
                got: z.generators.len(),
            });
        }
    }
    let a = sample_points(z1, samples_per_generator);
    let b = sample_points(z2, samples_per_generator);
    Ok(directed(&a, &b).max(directed(&b, &a)))
}
