//! Persistence diagrams as finite discrete measures above the diagonal.
//!
//! A diagram is stored as a canonically ordered list of distinct points with
//! integer multiplicities. The 1-Wasserstein distance between diagrams lives
//! in [`matching`].

mod assignment;
pub mod matching;

use std::cmp::Ordering;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use assignment::solve_assignment;
pub use matching::{matching_cost, w1_bruteforce, w1_distance, w1_matching, PartialMatching, BRUTEFORCE_ATOM_CAP};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagramError {
    #[error("entry {index}: birth {birth} is not below death {death}")]
    NotAboveDiagonal { index: usize, birth: f64, death: f64 },
    #[error("entry {index}: non-finite coordinate")]
    NonFinite { index: usize },
    #[error("entry {index}: multiplicity must be at least 1")]
    ZeroMultiplicity { index: usize },
    #[error("brute-force oracle accepts at most {cap} atoms per side, got {got}")]
    OracleTooLarge { cap: usize, got: usize },
}

/// A point `(birth, death)` with `birth < death`, carrying multiplicity `c_p >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagramPoint {
    birth: f64,
    death: f64,
    multiplicity: u32,
}

impl DiagramPoint {
    pub fn new(birth: f64, death: f64, multiplicity: u32) -> Result<Self, DiagramError> {
        Self::checked(0, birth, death, multiplicity)
    }

    fn checked(index: usize, birth: f64, death: f64, multiplicity: u32) -> Result<Self, DiagramError> {
        if !birth.is_finite() || !death.is_finite() {
            return Err(DiagramError::NonFinite { index });
        }
        if birth >= death {
            return Err(DiagramError::NotAboveDiagonal { index, birth, death });
        }
        if multiplicity == 0 {
            return Err(DiagramError::ZeroMultiplicity { index });
        }
        Ok(Self { birth, death, multiplicity })
    }

    pub fn birth(&self) -> f64 {
        self.birth
    }

    pub fn death(&self) -> f64 {
        self.death
    }

    pub fn multiplicity(&self) -> u32 {
        self.multiplicity
    }

    /// `death - birth`.
    pub fn lifetime(&self) -> f64 {
        self.death - self.birth
    }

    /// `||p - Δ||_∞ = (death - birth) / 2`.
    pub fn diagonal_distance(&self) -> f64 {
        diagonal_distance(self)
    }

    /// The lifted vector `(1, birth, death)`.
    pub fn lift(&self) -> [f64; 3] {
        [1.0, self.birth, self.death]
    }

    fn key_cmp(&self, other: &Self) -> Ordering {
        self.birth
            .total_cmp(&other.birth)
            .then(self.death.total_cmp(&other.death))
    }
}

/// ℓ∞ distance to the diagonal.
pub fn diagonal_distance(p: &DiagramPoint) -> f64 {
    (p.death - p.birth) / 2.0
}

/// `||p - q||_∞` between the coordinates of two points.
pub fn linf(p: &DiagramPoint, q: &DiagramPoint) -> f64 {
    (p.birth - q.birth).abs().max((p.death - q.death).abs())
}

/// Finite weighted multiset of points strictly above the diagonal.
///
/// Points are kept sorted lexicographically by `(birth, death)` with no
/// duplicate coordinates.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct PersistenceDiagram {
    points: Vec<DiagramPoint>,
}

impl PersistenceDiagram {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a diagram from raw `(birth, death, multiplicity)` triples.
    pub fn new<I>(raw: I) -> Result<Self, DiagramError>
    where
        I: IntoIterator<Item = (f64, f64, u32)>,
    {
        let points = raw
            .into_iter()
            .enumerate()
            .map(|(i, (b, d, m))| DiagramPoint::checked(i, b, d, m))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_points(points))
    }

    /// Builds a diagram from `(birth, death)` pairs with unit multiplicity.
    pub fn from_pairs<I>(pairs: I) -> Result<Self, DiagramError>
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        Self::new(pairs.into_iter().map(|(b, d)| (b, d, 1)))
    }

    pub fn from_points(mut points: Vec<DiagramPoint>) -> Self {
        points.sort_by(DiagramPoint::key_cmp);
        let mut merged: Vec<DiagramPoint> = Vec::with_capacity(points.len());
        for p in points {
            match merged.last_mut() {
                Some(last) if last.key_cmp(&p) == Ordering::Equal => {
                    last.multiplicity += p.multiplicity;
                }
                _ => merged.push(p),
            }
        }
        Self { points: merged }
    }

    pub fn points(&self) -> &[DiagramPoint] {
        &self.points
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Number of distinct points.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Number of unit atoms, i.e. the sum of multiplicities.
    pub fn atom_count(&self) -> usize {
        self.points.iter().map(|p| p.multiplicity as usize).sum()
    }

    /// Points expanded by multiplicity into unit atoms, canonical order.
    pub fn atoms(&self) -> impl Iterator<Item = &DiagramPoint> {
        self.points
            .iter()
            .flat_map(|p| std::iter::repeat_n(p, p.multiplicity as usize))
    }

    /// Sum of the two measures (disjoint union of multisets).
    pub fn union(&self, other: &Self) -> Self {
        let mut points = self.points.clone();
        points.extend_from_slice(&other.points);
        Self::from_points(points)
    }

    /// `pers(µ) = ½ Σ c_p (death_p - birth_p)`.
    pub fn total_persistence(&self) -> f64 {
        total_persistence(self)
    }
}

impl fmt::Display for PersistenceDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, p) in self.points.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "({}, {})", p.birth, p.death)?;
            if p.multiplicity > 1 {
                write!(f, "x{}", p.multiplicity)?;
            }
        }
        write!(f, "}}")
    }
}

pub fn make_diagram(raw: &[(f64, f64, u32)]) -> Result<PersistenceDiagram, DiagramError> {
    PersistenceDiagram::new(raw.iter().copied())
}

pub fn total_persistence(d: &PersistenceDiagram) -> f64 {
    0.5 * d
        .points
        .iter()
        .map(|p| p.multiplicity as f64 * p.lifetime())
        .sum::<f64>()
}

/// Displaces every point by an independent uniform offset in
/// `[-scale, scale]²`. Points landing on or below the diagonal are dropped.
pub fn perturb(d: &PersistenceDiagram, scale: f64, seed: u64) -> PersistenceDiagram {
    assert!(scale >= 0.0, "perturbation scale must be nonnegative");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(d.len());
    for p in &d.points {
        let dx = scale * (2.0 * rng.gen::<f64>() - 1.0);
        let dy = scale * (2.0 * rng.gen::<f64>() - 1.0);
        let (b, e) = (p.birth + dx, p.death + dy);
        if b < e {
            out.push(DiagramPoint { birth: b, death: e, multiplicity: p.multiplicity });
        }
    }
    PersistenceDiagram::from_points(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_input_is_zero_measure() {
        let d = make_diagram(&[]).unwrap();
        assert!(d.is_empty());
        assert_eq!(d.total_persistence(), 0.0);
    }

    #[test]
    fn identical_points_merge() {
        let d = make_diagram(&[(0.0, 2.0, 1), (0.0, 2.0, 1)]).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.points()[0].multiplicity(), 2);
        assert_eq!(d.atom_count(), 2);
    }

    #[test]
    fn rejects_invalid_entries() {
        assert!(matches!(
            make_diagram(&[(1.0, 0.0, 1)]),
            Err(DiagramError::NotAboveDiagonal { index: 0, .. })
        ));
        assert!(matches!(
            make_diagram(&[(0.0, 1.0, 1), (1.0, 1.0, 1)]),
            Err(DiagramError::NotAboveDiagonal { index: 1, .. })
        ));
        assert!(matches!(
            make_diagram(&[(f64::NAN, 1.0, 1)]),
            Err(DiagramError::NonFinite { .. })
        ));
        assert!(matches!(
            make_diagram(&[(0.0, f64::INFINITY, 1)]),
            Err(DiagramError::NonFinite { .. })
        ));
        assert!(matches!(
            make_diagram(&[(0.0, 1.0, 0)]),
            Err(DiagramError::ZeroMultiplicity { .. })
        ));
    }

    #[test]
    fn canonical_order() {
        let d = make_diagram(&[(3.0, 4.0, 1), (0.0, 5.0, 1), (0.0, 2.0, 1)]).unwrap();
        let keys: Vec<_> = d.points().iter().map(|p| (p.birth(), p.death())).collect();
        assert_eq!(keys, vec![(0.0, 2.0), (0.0, 5.0), (3.0, 4.0)]);
    }

    #[test]
    fn total_persistence_values() {
        assert_eq!(make_diagram(&[(0.0, 2.0, 1)]).unwrap().total_persistence(), 1.0);
        assert_eq!(make_diagram(&[(0.0, 2.0, 2)]).unwrap().total_persistence(), 2.0);
    }

    #[test]
    fn diagonal_distance_values() {
        let p = DiagramPoint::new(0.0, 2.0, 1).unwrap();
        assert_eq!(diagonal_distance(&p), 1.0);
        let p = DiagramPoint::new(-3.0, 1.0, 1).unwrap();
        assert_eq!(diagonal_distance(&p), 2.0);
        let eps = 1e-3;
        let p = DiagramPoint::new(5.0, 5.0 + eps, 1).unwrap();
        assert!((diagonal_distance(&p) - eps / 2.0).abs() < 1e-12);
    }

    #[test]
    fn zero_perturbation_is_identity() {
        let d = make_diagram(&[(0.0, 2.0, 1), (1.0, 3.0, 2)]).unwrap();
        assert_eq!(perturb(&d, 0.0, 7), d);
    }

    #[test]
    fn perturbation_deletes_points_crossing_the_diagonal() {
        let d = make_diagram(&[(1.0, 1.1, 1)]).unwrap();
        // Find a seed whose draw lands below the diagonal and check deletion.
        let seed = (0..100u64)
            .find(|&s| {
                let mut rng = ChaCha8Rng::seed_from_u64(s);
                let dx = 10.0 * (2.0 * rng.gen::<f64>() - 1.0);
                let dy = 10.0 * (2.0 * rng.gen::<f64>() - 1.0);
                1.0 + dx >= 1.1 + dy
            })
            .unwrap();
        assert!(perturb(&d, 10.0, seed).is_empty());
    }

    #[test]
    fn perturbation_is_deterministic() {
        let d = make_diagram(&[(0.0, 2.0, 1), (1.0, 3.0, 2)]).unwrap();
        assert_eq!(perturb(&d, 0.3, 11), perturb(&d, 0.3, 11));
    }

    #[test]
    fn union_adds_multiplicities() {
        let a = make_diagram(&[(0.0, 2.0, 1), (1.0, 3.0, 1)]).unwrap();
        let b = make_diagram(&[(0.0, 2.0, 2)]).unwrap();
        let u = a.union(&b);
        assert_eq!(u.len(), 2);
        assert_eq!(u.points()[0].multiplicity(), 3);
        assert_eq!(u.atom_count(), 4);
    }
}
