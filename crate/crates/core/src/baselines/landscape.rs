use serde::Serialize;

use super::BaselineError;
use crate::diagram::PersistenceDiagram;

/// Number of landscapes kept by default.
pub const DEFAULT_K_MAX: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LandscapeParams {
    pub k_max: usize,
    pub grid: Vec<f64>,
}

impl LandscapeParams {
    pub fn new(k_max: usize, grid: Vec<f64>) -> Result<Self, BaselineError> {
        if k_max == 0 {
            return Err(BaselineError::Parameter("k_max must be at least 1".into()));
        }
        if grid.is_empty() || grid.windows(2).any(|w| !(w[0] < w[1])) || grid.iter().any(|t| !t.is_finite()) {
            return Err(BaselineError::Parameter("landscape grid must be finite and strictly increasing".into()));
        }
        Ok(Self { k_max, grid })
    }

    /// `len` evenly spaced abscissae spanning every birth and death of
    /// `diagrams`; falls back to `[0, 1]` when all diagrams are empty.
    pub fn common_grid<'a, I>(diagrams: I, k_max: usize, len: usize) -> Result<Self, BaselineError>
    where
        I: IntoIterator<Item = &'a PersistenceDiagram>,
    {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for d in diagrams {
            for p in d.points() {
                lo = lo.min(p.birth());
                hi = hi.max(p.death());
            }
        }
        if lo >= hi {
            (lo, hi) = (0.0, 1.0);
        }
        if len < 2 {
            return Err(BaselineError::Parameter("landscape grid needs at least 2 points".into()));
        }
        let grid = (0..len).map(|i| lo + (hi - lo) * i as f64 / (len - 1) as f64).collect();
        Self::new(k_max, grid)
    }
}

/// `k_max × grid.len()` matrix whose row `k` holds the `(k+1)`-th largest
/// tent value `max(0, min(t − birth, death − t))` over the atoms of `d`.
pub fn persistence_landscape(d: &PersistenceDiagram, params: &LandscapeParams) -> Vec<Vec<f64>> {
    let mut out = vec![vec![0.0; params.grid.len()]; params.k_max];
    let mut tents: Vec<f64> = Vec::with_capacity(d.atom_count());
    for (col, &t) in params.grid.iter().enumerate() {
        tents.clear();
        for p in d.atoms() {
            let v = (t - p.birth()).min(p.death() - t);
            if v > 0.0 {
                tents.push(v);
            }
        }
        let k = params.k_max.min(tents.len());
        if k == 0 {
            continue;
        }
        if k < tents.len() {
            tents.select_nth_unstable_by(k - 1, |a, b| b.total_cmp(a));
        }
        let top = &mut tents[..k];
        top.sort_by(|a, b| b.total_cmp(a));
        for (row, &v) in top.iter().enumerate() {
            out[row][col] = v;
        }
    }
    out
}

/// Landscapes concatenated row by row.
pub fn landscape_features(d: &PersistenceDiagram, params: &LandscapeParams) -> Vec<f64> {
    persistence_landscape(d, params).concat()
}
