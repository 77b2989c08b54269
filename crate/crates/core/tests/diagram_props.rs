use persphere::diagram::{
    diagonal_distance, make_diagram, matching_cost, perturb, total_persistence, w1_bruteforce, w1_distance, w1_matching,
    DiagramError, DiagramPoint, PersistenceDiagram, BRUTEFORCE_ATOM_CAP,
};
use proptest::prelude::*;

const TRIANGLE_TOL: f64 = 1e-9;
const ORACLE_TOL: f64 = 1e-9;

fn raw_points(max_points: usize, max_mult: u32) -> impl Strategy<Value = Vec<(f64, f64, u32)>> {
    prop::collection::vec((0.0f64..10.0, 0.01f64..10.0, 1..=max_mult), 0..=max_points)
        .prop_map(|v| v.into_iter().map(|(b, l, m)| (b, b + l, m)).collect())
}

fn diagram(max_points: usize, max_mult: u32) -> impl Strategy<Value = PersistenceDiagram> {
    raw_points(max_points, max_mult).prop_map(|r| make_diagram(&r).unwrap())
}

/// Diagrams with at most `cap` atoms counted with multiplicity.
fn capped(cap: usize) -> impl Strategy<Value = PersistenceDiagram> {
    raw_points(cap, 2).prop_map(move |raw| {
        let mut atoms = 0;
        let kept: Vec<_> = raw
            .into_iter()
            .filter(|p| {
                atoms += p.2 as usize;
                atoms <= cap
            })
            .collect();
        make_diagram(&kept).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn symmetric_exactly(a in diagram(8, 3), b in diagram(8, 3)) {
        prop_assert_eq!(w1_distance(&a, &b).to_bits(), w1_distance(&b, &a).to_bits());
    }

    #[test]
    fn triangle_inequality(a in diagram(5, 1), b in diagram(5, 1), c in diagram(5, 1)) {
        let (ab, bc, ac) = (w1_distance(&a, &b), w1_distance(&b, &c), w1_distance(&a, &c));
        prop_assert!(ac <= ab + bc + TRIANGLE_TOL, "{ac} > {ab} + {bc}");
    }

    #[test]
    fn oracle_equivalence(a in capped(BRUTEFORCE_ATOM_CAP), b in capped(BRUTEFORCE_ATOM_CAP)) {
        let exact = w1_bruteforce(&a, &b).unwrap();
        prop_assert!((w1_distance(&a, &b) - exact).abs() <= ORACLE_TOL);
    }

    #[test]
    fn distance_to_empty_is_total_persistence(a in diagram(10, 3)) {
        prop_assert_eq!(w1_distance(&a, &PersistenceDiagram::empty()), total_persistence(&a));
        prop_assert_eq!(w1_distance(&a, &a), 0.0);
    }

    #[test]
    fn order_invariance(raw_a in raw_points(8, 2), raw_b in raw_points(8, 2), seed in any::<u64>()) {
        let base = w1_distance(&make_diagram(&raw_a).unwrap(), &make_diagram(&raw_b).unwrap());
        let mut shuffled = raw_a.clone();
        let n = shuffled.len();
        if n > 1 {
            for i in 0..n {
                shuffled.swap(i, (seed as usize).wrapping_add(i * 7919) % n);
            }
        }
        shuffled.reverse();
        let again = w1_distance(&make_diagram(&shuffled).unwrap(), &make_diagram(&raw_b).unwrap());
        prop_assert_eq!(base.to_bits(), again.to_bits());
    }

    #[test]
    fn reported_matching_cost_is_recomputable(a in diagram(6, 2), b in diagram(6, 2)) {
        let m = w1_matching(&a, &b);
        prop_assert!((matching_cost(&a, &b, &m.matched) - m.cost).abs() <= 1e-12 * m.cost.max(1.0));
        for &(i, j, mass) in &m.matched {
            prop_assert!(mass <= a.points()[i].multiplicity());
            prop_assert!(mass <= b.points()[j].multiplicity());
        }
    }

    #[test]
    fn perturbation_bound(a in diagram(8, 2), eps in 0.0f64..0.5, seed in any::<u64>()) {
        let p = perturb(&a, eps, seed);
        let deleted: f64 = a.points().iter().map(|q| q.multiplicity() as f64 * diagonal_distance(q)).sum();
        let bound = a.atom_count() as f64 * eps.max(deleted);
        prop_assert!(w1_distance(&a, &p) <= bound + 1e-12);
    }
}

#[test]
fn construction_examples() {
    assert!(make_diagram(&[]).unwrap().is_empty());
    let d = make_diagram(&[(0.0, 2.0, 1), (0.0, 2.0, 1)]).unwrap();
    assert_eq!(d.len(), 1);
    assert_eq!(d.points()[0].multiplicity(), 2);
    assert!(matches!(make_diagram(&[(1.0, 0.0, 1)]), Err(DiagramError::NotAboveDiagonal { .. })));
    assert!(matches!(make_diagram(&[(1.0, 1.0, 1)]), Err(DiagramError::NotAboveDiagonal { .. })));
    assert!(matches!(make_diagram(&[(0.0, f64::NAN, 1)]), Err(DiagramError::NonFinite { .. })));
    assert!(matches!(make_diagram(&[(0.0, 1.0, 0)]), Err(DiagramError::ZeroMultiplicity { .. })));
}

#[test]
fn total_persistence_examples() {
    assert_eq!(total_persistence(&PersistenceDiagram::empty()), 0.0);
    assert_eq!(total_persistence(&make_diagram(&[(0.0, 2.0, 1)]).unwrap()), 1.0);
    assert_eq!(total_persistence(&make_diagram(&[(0.0, 2.0, 2)]).unwrap()), 2.0);
}

#[test]
fn diagonal_distance_examples() {
    let p = |b, d| DiagramPoint::new(b, d, 1).unwrap();
    assert_eq!(diagonal_distance(&p(0.0, 2.0)), 1.0);
    assert_eq!(diagonal_distance(&p(5.0, 5.25)), 0.125);
    assert_eq!(diagonal_distance(&p(-3.0, 1.0)), 2.0);
}

#[test]
fn w1_examples() {
    let d = |r: &[(f64, f64, u32)]| make_diagram(r).unwrap();
    let e = PersistenceDiagram::empty();
    assert_eq!(w1_distance(&e, &e), 0.0);
    assert_eq!(w1_distance(&d(&[(0.0, 2.0, 1)]), &e), 1.0);
    assert_eq!(w1_distance(&d(&[(0.0, 2.0, 1)]), &d(&[(0.0, 2.0, 1)])), 0.0);
    assert_eq!(w1_distance(&d(&[(0.0, 2.0, 1)]), &d(&[(0.5, 2.0, 1)])), 0.5);
    assert_eq!(w1_bruteforce(&d(&[(0.0, 2.0, 1)]), &d(&[(0.5, 2.0, 1)])).unwrap(), 0.5);
    assert_eq!(w1_bruteforce(&d(&[(0.0, 2.0, 1)]), &e).unwrap(), 1.0);
    assert_eq!(w1_bruteforce(&d(&[(0.0, 1.0, 1), (3.0, 5.0, 1)]), &d(&[(0.0, 1.0, 1)])).unwrap(), 1.0);
    assert_eq!(w1_distance(&d(&[(0.0, 1.0, 1), (3.0, 5.0, 1)]), &d(&[(0.0, 1.0, 1)])), 1.0);
}

#[test]
fn lifetime_sequence_distance_is_half_the_lifetime() {
    for n in [1.0f64, 2.0, 4.0, 8.0] {
        let d = PersistenceDiagram::from_pairs([(n * n, n * n + 1.0 / n)]).unwrap();
        let w1 = w1_distance(&d, &PersistenceDiagram::empty());
        assert!((w1 - 1.0 / (2.0 * n)).abs() < 1e-12);
    }
}

#[test]
fn oracle_rejects_large_inputs() {
    let big = make_diagram(&[(0.0, 1.0, 7)]).unwrap();
    assert!(matches!(w1_bruteforce(&big, &PersistenceDiagram::empty()), Err(DiagramError::OracleTooLarge { .. })));
}

#[test]
fn perturb_examples() {
    let d = make_diagram(&[(0.0, 2.0, 1), (1.0, 4.0, 2)]).unwrap();
    assert_eq!(perturb(&d, 0.0, 9), d);
    assert_eq!(perturb(&d, 0.3, 9), perturb(&d, 0.3, 9));
    let thin = make_diagram(&[(1.0, 1.1, 1)]).unwrap();
    let deleted = (0..200u64).map(|s| perturb(&thin, 10.0, s)).filter(PersistenceDiagram::is_empty).count();
    assert!(deleted > 0);
}
