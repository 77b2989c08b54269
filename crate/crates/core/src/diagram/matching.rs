//! Optimal partial matchings and the 1-Wasserstein distance.
//!
//! The cost of a partial matching `γ` is
//! `Σ_{matched} m·||p − q||_∞ + Σ_{unmatched} m·||p − Δ||_∞`
//! where `m` is the transported (or unmatched) mass.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use super::{linf, solve_assignment, DiagramError, PersistenceDiagram};

/// Largest number of atoms per side accepted by [`w1_bruteforce`].
pub const BRUTEFORCE_ATOM_CAP: usize = 6;

/// A partial matching between two diagrams.
///
/// `matched` holds `(index into d1, index into d2, transported mass)` with
/// indices into the canonical point lists; mass not listed goes to the
/// diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialMatching {
    pub matched: Vec<(usize, usize, u32)>,
    pub cost: f64,
}

/// Evaluates the partial-matching cost of `matched` between `d1` and `d2`.
///
/// Panics if the transported mass on some point exceeds its multiplicity.
pub fn matching_cost(d1: &PersistenceDiagram, d2: &PersistenceDiagram, matched: &[(usize, usize, u32)]) -> f64 {
    let mut left = vec![0u32; d1.len()];
    let mut right = vec![0u32; d2.len()];
    let mut transport = 0.0;
    for &(i, j, m) in matched {
        left[i] += m;
        right[j] += m;
        transport += m as f64 * linf(&d1.points()[i], &d2.points()[j]);
    }
    let unmatched = |d: &PersistenceDiagram, used: &[u32]| -> f64 {
        d.points()
            .iter()
            .zip(used)
            .map(|(p, &u)| {
                assert!(u <= p.multiplicity(), "transported mass exceeds multiplicity");
                (p.multiplicity() - u) as f64 * p.lifetime()
            })
            .sum::<f64>()
    };
    transport + 0.5 * (unmatched(d1, &left) + unmatched(d2, &right))
}

fn canonical_cmp(a: &PersistenceDiagram, b: &PersistenceDiagram) -> Ordering {
    a.atom_count().cmp(&b.atom_count()).then_with(|| {
        for (p, q) in a.points().iter().zip(b.points()) {
            let o = p
                .birth()
                .total_cmp(&q.birth())
                .then(p.death().total_cmp(&q.death()))
                .then(p.multiplicity().cmp(&q.multiplicity()));
            if o != Ordering::Equal {
                return o;
            }
        }
        a.len().cmp(&b.len())
    })
}

/// Expanded atoms as indices into the canonical point list.
fn atom_owners(d: &PersistenceDiagram) -> Vec<usize> {
    d.points()
        .iter()
        .enumerate()
        .flat_map(|(i, p)| std::iter::repeat_n(i, p.multiplicity() as usize))
        .collect()
}

fn solve(d1: &PersistenceDiagram, d2: &PersistenceDiagram) -> PartialMatching {
    let a = atom_owners(d1);
    let b = atom_owners(d2);
    let (n1, n2) = (a.len(), b.len());
    let n = n1 + n2;
    // Rows: atoms of d1, then diagonal slots for atoms of d2.
    // Columns: atoms of d2, then diagonal slots for atoms of d1.
    let mut cost = vec![0.0; n * n];
    for (r, &i) in a.iter().enumerate() {
        let p = &d1.points()[i];
        let row = &mut cost[r * n..(r + 1) * n];
        for (c, &j) in b.iter().enumerate() {
            row[c] = linf(p, &d2.points()[j]);
        }
        row[n2..].fill(p.diagonal_distance());
    }
    for r in n1..n {
        let row = &mut cost[r * n..(r + 1) * n];
        for (c, &j) in b.iter().enumerate() {
            row[c] = d2.points()[j].diagonal_distance();
        }
    }
    let assignment = solve_assignment(&cost, n);

    let mut pairs: BTreeMap<(usize, usize), u32> = BTreeMap::new();
    for (r, &c) in assignment.iter().enumerate().take(n1) {
        if c < n2 {
            *pairs.entry((a[r], b[c])).or_default() += 1;
        }
    }
    let matched: Vec<_> = pairs.into_iter().map(|((i, j), m)| (i, j, m)).collect();
    let cost = matching_cost(d1, d2, &matched);
    PartialMatching { matched, cost }
}

/// Optimal partial matching between `d1` and `d2`.
pub fn w1_matching(d1: &PersistenceDiagram, d2: &PersistenceDiagram) -> PartialMatching {
    // Always solve in one orientation so that the distance is exactly symmetric.
    if canonical_cmp(d1, d2) == Ordering::Greater {
        let m = solve(d2, d1);
        PartialMatching {
            matched: m.matched.into_iter().map(|(j, i, k)| (i, j, k)).collect(),
            cost: m.cost,
        }
    } else {
        solve(d1, d2)
    }
}

/// Exact 1-Wasserstein distance with ℓ∞ ground cost and diagonal transport.
pub fn w1_distance(d1: &PersistenceDiagram, d2: &PersistenceDiagram) -> f64 {
    w1_matching(d1, d2).cost
}

/// Exhaustive minimum over all partial matchings of unit atoms.
///
/// Each side may hold at most [`BRUTEFORCE_ATOM_CAP`] atoms.
pub fn w1_bruteforce(d1: &PersistenceDiagram, d2: &PersistenceDiagram) -> Result<f64, DiagramError> {
    for d in [d1, d2] {
        let got = d.atom_count();
        if got > BRUTEFORCE_ATOM_CAP {
            return Err(DiagramError::OracleTooLarge { cap: BRUTEFORCE_ATOM_CAP, got });
        }
    }
    let a: Vec<_> = d1.atoms().copied().collect();
    let b: Vec<_> = d2.atoms().copied().collect();

    fn rec(
        a: &[super::DiagramPoint],
        b: &[super::DiagramPoint],
        k: usize,
        used: &mut [bool],
        acc: f64,
        best: &mut f64,
    ) {
        if k == a.len() {
            let rest: f64 = b
                .iter()
                .zip(used.iter())
                .filter(|(_, &u)| !u)
                .map(|(q, _)| q.diagonal_distance())
                .sum();
            *best = best.min(acc + rest);
            return;
        }
        rec(a, b, k + 1, used, acc + a[k].diagonal_distance(), best);
        for j in 0..b.len() {
            if !used[j] {
                used[j] = true;
                rec(a, b, k + 1, used, acc + linf(&a[k], &b[j]), best);
                used[j] = false;
            }
        }
    }

    let mut best = f64::INFINITY;
    rec(&a, &b, 0, &mut vec![false; b.len()], 0.0, &mut best);
    Ok(best)
}
