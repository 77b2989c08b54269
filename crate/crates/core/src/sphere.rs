//! Persistence spheres sampled on an equiangular grid over the unit sphere.

use std::f64::consts::PI;
use std::io::{self, Write};
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::data::io::diagram_sha256;
use crate::diagram::PersistenceDiagram;
use crate::parallel::with_workers;
use crate::weighting::LiftWeight;

/// Grid size used unless overridden.
pub const DEFAULT_GRID: (usize, usize) = (200, 100);

const UNIT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SphereError {
    #[error("grid needs at least 2 divisions per axis, got {0}x{1}")]
    GridTooSmall(usize, usize),
    #[error("direction is not a unit vector (norm {0})")]
    NotUnit(f64),
    #[error("fields live on different grids ({0}x{1} vs {2}x{3})")]
    GridMismatch(usize, usize, usize, usize),
    #[error("invalid norm exponent {0}; expected p >= 1 or infinity")]
    BadExponent(f64),
}

/// Equiangular midpoint grid on S² with area weights.
///
/// Node `i * n_phi + j` sits at polar angle `θ_i = (i + ½)·π / n_theta` and
/// azimuth `φ_j = (j + ½)·2π / n_phi`, with weight `sin θ_i·Δθ·Δφ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereGrid {
    n_theta: usize,
    n_phi: usize,
    nodes: Vec<[f64; 3]>,
    quad_weights: Vec<f64>,
}

impl SphereGrid {
    pub fn new(n_theta: usize, n_phi: usize) -> Result<Self, SphereError> {
        if n_theta < 2 || n_phi < 2 {
            return Err(SphereError::GridTooSmall(n_theta, n_phi));
        }
        let dtheta = PI / n_theta as f64;
        let dphi = 2.0 * PI / n_phi as f64;
        let mut nodes = Vec::with_capacity(n_theta * n_phi);
        let mut quad_weights = Vec::with_capacity(n_theta * n_phi);
        for i in 0..n_theta {
            let theta = (i as f64 + 0.5) * dtheta;
            let st = theta.sin();
            for j in 0..n_phi {
                let phi = (j as f64 + 0.5) * dphi;
                nodes.push(spherical_to_unit(theta, phi));
                quad_weights.push(st * dtheta * dphi);
            }
        }
        Ok(Self { n_theta, n_phi, nodes, quad_weights })
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn n_phi(&self) -> usize {
        self.n_phi
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[[f64; 3]] {
        &self.nodes
    }

    pub fn quad_weights(&self) -> &[f64] {
        &self.quad_weights
    }

    pub fn theta_step(&self) -> f64 {
        PI / self.n_theta as f64
    }

    pub fn phi_step(&self) -> f64 {
        2.0 * PI / self.n_phi as f64
    }

    /// `(θ, φ)` of node `index`.
    pub fn angles(&self, index: usize) -> (f64, f64) {
        let (i, j) = (index / self.n_phi, index % self.n_phi);
        ((i as f64 + 0.5) * self.theta_step(), (j as f64 + 0.5) * self.phi_step())
    }

    fn same_shape(&self, other: &Self) -> Result<(), SphereError> {
        if self.n_theta != other.n_theta || self.n_phi != other.n_phi {
            return Err(SphereError::GridMismatch(self.n_theta, self.n_phi, other.n_theta, other.n_phi));
        }
        Ok(())
    }
}

pub fn make_grid(n_theta: usize, n_phi: usize) -> Result<SphereGrid, SphereError> {
    SphereGrid::new(n_theta, n_phi)
}

pub(crate) fn spherical_to_unit(theta: f64, phi: f64) -> [f64; 3] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [st * cp, st * sp, ct]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub diagram_sha256: String,
    pub weighting: String,
}

/// Values of a persistence sphere at the nodes of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereField {
    grid: Arc<SphereGrid>,
    values: Vec<f64>,
    provenance: Option<Provenance>,
}

impl SphereField {
    pub fn zeros(grid: Arc<SphereGrid>) -> Self {
        let values = vec![0.0; grid.len()];
        Self { grid, values, provenance: None }
    }

    pub fn grid(&self) -> &Arc<SphereGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Pointwise sum of two fields on the same grid.
    pub fn add(&self, other: &Self) -> Result<Self, SphereError> {
        self.grid.same_shape(&other.grid)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(Self { grid: self.grid.clone(), values, provenance: None })
    }

    /// CSV with columns `theta,phi,value`, one row per node.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "theta,phi,value")?;
        for (idx, v) in self.values.iter().enumerate() {
            let (t, p) = self.grid.angles(idx);
            writeln!(out, "{t},{p},{v}")?;
        }
        Ok(())
    }

    /// JSON document with grid metadata, provenance and node values.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "grid": {
                "n_theta": self.grid.n_theta,
                "n_phi": self.grid.n_phi,
                "convention": "equiangular-midpoint",
                "order": "theta-major",
            },
            "provenance": self.provenance,
            "values": self.values,
        })
    }
}

/// Per-point coefficients `(ω(p)·c_p, birth, death)` in canonical order.
fn coefficients<W: LiftWeight + ?Sized>(d: &PersistenceDiagram, w: &W) -> Vec<[f64; 3]> {
    d.points()
        .iter()
        .map(|p| [w.weight(p) * p.multiplicity() as f64, p.birth(), p.death()])
        .collect()
}

#[inline]
fn sum_at(coeffs: &[[f64; 3]], v: &[f64; 3]) -> f64 {
    let mut acc = 0.0;
    for c in coeffs {
        let s = v[0] + v[1] * c[1] + v[2] * c[2];
        if s > 0.0 {
            acc += c[0] * s;
        }
    }
    acc
}

/// `φ(v) = Σ_p ω(p)·c_p·max(0, ⟨v, (1, birth, death)⟩)` for a unit vector `v`.
pub fn ps_at<W: LiftWeight + ?Sized>(d: &PersistenceDiagram, w: &W, v: [f64; 3]) -> Result<f64, SphereError> {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if !((n - 1.0).abs() <= UNIT_TOLERANCE) {
        return Err(SphereError::NotUnit(n));
    }
    Ok(sum_at(&coefficients(d, w), &v))
}

/// Evaluates the persistence sphere at every grid node using the ambient
/// rayon pool.
///
/// Every node sums the diagram in canonical order, so the output does not
/// depend on how nodes are distributed over workers.
pub fn evaluate_ps<W: LiftWeight + ?Sized>(d: &PersistenceDiagram, w: &W, grid: &Arc<SphereGrid>) -> SphereField {
    let coeffs = coefficients(d, w);
    let values = grid
        .nodes
        .par_iter()
        .with_min_len(256)
        .map(|v| sum_at(&coeffs, v))
        .collect();
    SphereField {
        grid: grid.clone(),
        values,
        provenance: Some(Provenance { diagram_sha256: diagram_sha256(d), weighting: w.describe() }),
    }
}

/// [`evaluate_ps`] on a dedicated pool of `workers` threads.
pub fn evaluate_ps_with_workers<W: LiftWeight + ?Sized>(
    d: &PersistenceDiagram,
    w: &W,
    grid: &Arc<SphereGrid>,
    workers: usize,
) -> SphereField {
    with_workers(workers, || evaluate_ps(d, w, grid))
}

/// Norm exponent for [`lp_distance`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LpNorm {
    Finite(f64),
    Infinity,
}

impl LpNorm {
    pub fn new(p: f64) -> Result<Self, SphereError> {
        if p == f64::INFINITY {
            Ok(Self::Infinity)
        } else if p.is_finite() && p >= 1.0 {
            Ok(Self::Finite(p))
        } else {
            Err(SphereError::BadExponent(p))
        }
    }
}

impl std::str::FromStr for LpNorm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().to_ascii_lowercase();
        if matches!(t.as_str(), "inf" | "infinity" | "max") {
            return Ok(Self::Infinity);
        }
        let p: f64 = t.parse().map_err(|_| format!("invalid norm exponent '{s}'"))?;
        Self::new(p).map_err(|e| e.to_string())
    }
}

/// Quadrature `L_p` distance between fields, or the maximum absolute
/// difference over nodes for `p = ∞`.
pub fn lp_distance(f: &SphereField, g: &SphereField, p: LpNorm) -> Result<f64, SphereError> {
    f.grid.same_shape(&g.grid)?;
    let diffs = f.values.iter().zip(&g.values).map(|(a, b)| (a - b).abs());
    Ok(match p {
        LpNorm::Infinity => diffs.fold(0.0, f64::max),
        LpNorm::Finite(e) => {
            let s: f64 = diffs
                .zip(&f.grid.quad_weights)
                .map(|(d, w)| if e == 1.0 { w * d } else { w * d.powf(e) })
                .sum();
            s.powf(1.0 / e)
        }
    })
}

/// Flattens a field into a feature vector in node order. With
/// `quadrature_scaled`, entry `i` is `f_i·sqrt(w_i)` so that the Euclidean
/// norm approximates the `L_2` norm of the field.
pub fn to_feature_vector(f: &SphereField, quadrature_scaled: bool) -> Vec<f64> {
    if quadrature_scaled {
        f.values
            .iter()
            .zip(&f.grid.quad_weights)
            .map(|(v, w)| v * w.sqrt())
            .collect()
    } else {
        f.values.clone()
    }
}
