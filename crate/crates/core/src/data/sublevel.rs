//! Zero-dimensional sublevel-set persistence of sampled functions on a path.

use thiserror::Error;

use crate::diagram::{DiagramPoint, PersistenceDiagram};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SampleError {
    #[error("a sampled function needs at least 2 values, got {0}")]
    TooShort(usize),
    #[error("sample {0} is not finite")]
    NonFinite(usize),
}

/// Values of a function at consecutive abscissae.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(values: Vec<f64>) -> Result<Self, SampleError> {
        if values.len() < 2 {
            return Err(SampleError::TooShort(values.len()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(SampleError::NonFinite(i));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

struct DisjointSet {
    parent: Vec<usize>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }
}

/// 0-dimensional persistence of the sublevel filtration of `f` on a path
/// graph.
///
/// Samples enter in increasing `(value, index)` order. When two components
/// meet at a sample of value `v`, the one whose minimum is younger (larger
/// in `(value, index)` order) dies, emitting `(minimum, v)`. The component of
/// the global minimum is paired with the global maximum. Pairs with zero
/// persistence, which only arise from exact ties, are dropped.
pub fn sublevel_pd0(f: &SampledFunction) -> PersistenceDiagram {
    let v = &f.values;
    let n = v.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| v[a].total_cmp(&v[b]).then(a.cmp(&b)));
    let mut rank = vec![0usize; n];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r;
    }

    let mut ds = DisjointSet::new(n);
    // Root of each component holds the index of its minimum.
    let oldest = (0..n).collect::<Vec<_>>();
    let mut active = vec![false; n];
    let mut points = Vec::new();

    for &i in &order {
        active[i] = true;
        let neighbours = [i.checked_sub(1), (i + 1 < n).then_some(i + 1)];
        for j in neighbours.into_iter().flatten() {
            if !active[j] {
                continue;
            }
            let (ri, rj) = (ds.find(i), ds.find(j));
            if ri == rj {
                continue;
            }
            let (mi, mj) = (oldest[ri], oldest[rj]);
            let (survivor, dying) = if rank[mi] < rank[mj] { (ri, rj) } else { (rj, ri) };
            let dying_min = oldest[dying];
            // equality only occurs under exact value ties
            if v[dying_min] < v[i] {
                points.push(DiagramPoint::new(v[dying_min], v[i], 1).expect("birth below death"));
            }
            ds.parent[dying] = survivor;
        }
    }

    let (lo, hi) = (v[order[0]], v[order[n - 1]]);
    if lo < hi {
        points.push(DiagramPoint::new(lo, hi, 1).expect("min below max"));
    }
    PersistenceDiagram::from_points(points)
}
