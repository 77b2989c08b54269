use std::sync::Arc;

use persphere::data::random_diagram;
use persphere::diagram::w1_distance;
use persphere::learn::cv::{fold_assignment, train_test_split};
use persphere::learn::logistic::logistic_gradient;
use persphere::learn::{kfold_cv, logistic_fit, ridge_fit, Targets, LOGISTIC_CS, RIDGE_ALPHAS};
use persphere::parallel::with_workers;
use persphere::sphere::{evaluate_ps, make_grid, to_feature_vector};
use persphere::weighting::{estimate_constants, SampleBox, Weighting};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const NORMAL_EQUATION_TOL: f64 = 1e-8;
const PROBABILITY_TOL: f64 = 1e-12;
const STATIONARY_TOL: f64 = 1e-6;

fn matrix(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<Vec<f64>> {
    (0..n).map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `‖Xcᵀ(Xc β − yc) + αβ‖` and `‖Xcᵀ yc‖` for centered data.
fn normal_equation_residual(x: &[Vec<f64>], y: &[f64], beta: &[f64], alpha: f64) -> (f64, f64) {
    let (n, d) = (x.len(), x[0].len());
    let xm: Vec<f64> = (0..d).map(|j| x.iter().map(|r| r[j]).sum::<f64>() / n as f64).collect();
    let ym = y.iter().sum::<f64>() / n as f64;
    let xc: Vec<Vec<f64>> = x.iter().map(|r| r.iter().zip(&xm).map(|(v, m)| v - m).collect()).collect();
    let yc: Vec<f64> = y.iter().map(|v| v - ym).collect();
    let fitted: Vec<f64> = xc.iter().map(|r| dot(r, beta)).collect();
    let resid: Vec<f64> = fitted.iter().zip(&yc).map(|(f, t)| f - t).collect();
    let grad: Vec<f64> = (0..d).map(|j| xc.iter().zip(&resid).map(|(r, e)| r[j] * e).sum::<f64>() + alpha * beta[j]).collect();
    let rhs: Vec<f64> = (0..d).map(|j| xc.iter().zip(&yc).map(|(r, t)| r[j] * t).sum()).collect();
    (norm(&grad), norm(&rhs))
}

#[test]
fn ridge_solves_normal_equations() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for (n, d) in [(40, 5), (30, 30), (20, 60), (10, 400)] {
        let x = matrix(&mut rng, n, d);
        let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
        for alpha in RIDGE_ALPHAS {
            let m = ridge_fit(&x, &y, alpha).unwrap();
            let (res, rhs) = normal_equation_residual(&x, &y, &m.coefficients, alpha);
            assert!(res <= NORMAL_EQUATION_TOL * rhs, "n={n} d={d} alpha={alpha}: {res} vs {rhs}");
            let mean_pred = m.predict(&x).iter().sum::<f64>() / n as f64;
            let mean_y = y.iter().sum::<f64>() / n as f64;
            assert!((mean_pred - mean_y).abs() <= 1e-9);
        }
    }
}

#[test]
fn logistic_probabilities_sum_to_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let x = matrix(&mut rng, 30, 4);
    let labels: Vec<usize> = (0..30).map(|i| [3, 5, 9][i % 3]).collect();
    let m = logistic_fit(&x, &labels, 10.0).unwrap();
    assert_eq!(m.classes, vec![3, 5, 9]);
    for row in matrix(&mut rng, 50, 4).iter().chain(&x) {
        let p = m.predict_proba_one(row);
        assert_eq!(p.len(), 3);
        assert!(p.iter().all(|&v| (0.0..=1.0).contains(&v)));
        assert!((p.iter().sum::<f64>() - 1.0).abs() <= PROBABILITY_TOL);
        assert!(m.classes.contains(&m.predict_one(row)));
    }
}

#[test]
fn logistic_fit_is_stationary_in_both_regimes() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    for (n, d) in [(24, 3), (12, 40)] {
        let x = matrix(&mut rng, n, d);
        let labels: Vec<usize> = (0..n).map(|i| i % 2).collect();
        let m = logistic_fit(&x, &labels, 1.0).unwrap();
        assert!(m.converged, "n={n} d={d}");
        let (gb, gi) = logistic_gradient(&x, &labels, 1.0, &m.coefficients, &m.intercepts);
        let g = gb.iter().flatten().chain(&gi).map(|v| v * v).sum::<f64>().sqrt();
        assert!(g <= STATIONARY_TOL, "n={n} d={d}: gradient {g}");
    }
}

#[test]
fn cross_validation_is_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let x = matrix(&mut rng, 40, 6);
    let labels = Targets::Classification((0..40).map(|i| usize::from(x[i][0] + 0.3 * x[i][1] > 0.0)).collect());
    let values = Targets::Regression(x.iter().map(|r| 2.0 * r[0] - r[2] + 0.1 * r[3]).collect());
    for (targets, grid) in [(&labels, &LOGISTIC_CS[..]), (&values, &RIDGE_ALPHAS[..])] {
        let a = with_workers(1, || kfold_cv(&x, targets, 5, grid, 7)).unwrap();
        let b = with_workers(4, || kfold_cv(&x, targets, 5, grid, 7)).unwrap();
        assert_eq!(a, b);
        assert!(grid.contains(&a.chosen));
        assert_eq!(a.fold_scores.len(), grid.len());
        assert!(a.fold_scores.iter().all(|f| f.len() == 5));
    }
    let folds = fold_assignment(23, 5, 9);
    let sizes: Vec<usize> = (0..5).map(|f| folds.iter().filter(|&&v| v == f).count()).collect();
    assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
    let (train, test) = train_test_split(23, 0.3, 9);
    assert_eq!((train.len(), test.len()), (16, 7));
    assert_eq!((train, test), train_test_split(23, 0.3, 9));
}

#[test]
fn ridge_predictions_are_lipschitz_in_w1() {
    let mut rng = ChaCha8Rng::seed_from_u64(45);
    let grid = Arc::new(make_grid(60, 30).unwrap());
    let w = Weighting::default();
    let c = estimate_constants(&w, SampleBox::square(0.0, 10.0), 20_000, 46).unwrap().max_constant().max(1.0);
    let area: f64 = grid.quad_weights().iter().sum();
    let c2 = area.sqrt() * 2f64.sqrt() * c;
    let diagrams: Vec<_> = (0..30).map(|_| random_diagram(&mut rng, 8, 0.0, 10.0)).collect();
    let x: Vec<Vec<f64>> = diagrams.iter().map(|d| to_feature_vector(&evaluate_ps(d, &w, &grid), true)).collect();
    let y: Vec<f64> = diagrams.iter().map(|d| d.total_persistence()).collect();
    let m = ridge_fit(&x, &y, 1e-2).unwrap();
    let lip = norm(&m.coefficients) * c2;
    for i in 0..diagrams.len() {
        for j in 0..i {
            let gap = (m.predict_one(&x[i]) - m.predict_one(&x[j])).abs();
            assert!(gap <= lip * w1_distance(&diagrams[i], &diagrams[j]) + 1e-9);
        }
    }
}
