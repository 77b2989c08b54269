use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::{check_matrix, LearnError};

/// L2-penalized least squares with an unpenalized intercept.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RidgeModel {
    pub coefficients: Vec<f64>,
    pub intercept: f64,
    pub alpha: f64,
}

impl RidgeModel {
    pub fn predict_one(&self, row: &[f64]) -> f64 {
        self.intercept + row.iter().zip(&self.coefficients).map(|(x, b)| x * b).sum::<f64>()
    }

    pub fn predict(&self, rows: &[Vec<f64>]) -> Vec<f64> {
        rows.iter().map(|r| self.predict_one(r)).collect()
    }
}

/// Column means of `rows`.
pub(crate) fn column_means(rows: &[Vec<f64>], dim: usize) -> Vec<f64> {
    let mut m = vec![0.0; dim];
    for r in rows {
        for (a, x) in m.iter_mut().zip(r) {
            *a += x;
        }
    }
    let n = rows.len() as f64;
    m.iter_mut().for_each(|a| *a /= n);
    m
}

/// Minimizes `||Xβ + b − y||² + α·||β||²`.
///
/// The intercept is removed by centering. The normal equations are solved
/// by Cholesky factorization, in the primal (`XᵀX + αI`) when there are no
/// more features than samples and in the dual (`XXᵀ + αI`) otherwise.
pub fn ridge_fit(features: &[Vec<f64>], targets: &[f64], alpha: f64) -> Result<RidgeModel, LearnError> {
    let dim = check_matrix(features, targets.len())?;
    if features.len() < 2 {
        return Err(LearnError::TooFewSamples(features.len()));
    }
    if targets.iter().any(|t| !t.is_finite()) {
        return Err(LearnError::NonFinite);
    }
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(LearnError::NotPositive("alpha", alpha));
    }
    let n = features.len();
    let xm = column_means(features, dim);
    let ym = targets.iter().sum::<f64>() / n as f64;
    let xc = DMatrix::from_fn(n, dim, |i, j| features[i][j] - xm[j]);
    let yc = DVector::from_iterator(n, targets.iter().map(|y| y - ym));

    let beta = if dim <= n {
        let mut a = xc.tr_mul(&xc);
        for k in 0..dim {
            a[(k, k)] += alpha;
        }
        let chol = a.cholesky().ok_or(LearnError::Singular)?;
        chol.solve(&xc.tr_mul(&yc))
    } else {
        let mut g = &xc * xc.transpose();
        for k in 0..n {
            g[(k, k)] += alpha;
        }
        let chol = g.cholesky().ok_or(LearnError::Singular)?;
        xc.tr_mul(&chol.solve(&yc))
    };
    let coefficients: Vec<f64> = beta.iter().copied().collect();
    let intercept = ym - xm.iter().zip(&coefficients).map(|(m, b)| m * b).sum::<f64>();
    Ok(RidgeModel { coefficients, intercept, alpha })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn objective(x: &[Vec<f64>], y: &[f64], alpha: f64, beta: &[f64], b: f64) -> f64 {
        let m = RidgeModel { coefficients: beta.to_vec(), intercept: b, alpha };
        let r: f64 = x.iter().zip(y).map(|(r, t)| (m.predict_one(r) - t).powi(2)).sum();
        r + alpha * beta.iter().map(|v| v * v).sum::<f64>()
    }

    #[test]
    fn small_penalty_recovers_line() {
        let x = vec![vec![1.0], vec![2.0], vec![3.0]];
        let m = ridge_fit(&x, &[2.0, 4.0, 6.0], 1e-10).unwrap();
        assert!((m.coefficients[0] - 2.0).abs() < 1e-8);
        assert!(m.intercept.abs() < 1e-8);
    }

    #[test]
    fn large_penalty_predicts_the_mean() {
        let x = vec![vec![1.0], vec![2.0], vec![3.0]];
        let m = ridge_fit(&x, &[2.0, 4.0, 9.0], 1e12).unwrap();
        assert!(m.coefficients[0].abs() < 1e-9);
        assert!((m.intercept - 5.0).abs() < 1e-8);
    }

    #[test]
    fn finite_difference_gradient_vanishes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for (n, d) in [(12, 3), (5, 9)] {
            let x: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
            let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let alpha = 0.3;
            let m = ridge_fit(&x, &y, alpha).unwrap();
            let h = 1e-6;
            let mut grad2 = 0.0;
            for k in 0..=d {
                let mut plus = m.coefficients.clone();
                let mut minus = m.coefficients.clone();
                let (mut bp, mut bm) = (m.intercept, m.intercept);
                if k < d {
                    plus[k] += h;
                    minus[k] -= h;
                } else {
                    bp += h;
                    bm -= h;
                }
                let g = (objective(&x, &y, alpha, &plus, bp) - objective(&x, &y, alpha, &minus, bm)) / (2.0 * h);
                grad2 += g * g;
            }
            assert!(grad2.sqrt() <= 1e-8, "gradient norm {}", grad2.sqrt());
        }
    }

    #[test]
    fn primal_and_dual_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x: Vec<Vec<f64>> = (0..6).map(|_| (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        let y: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let primal = ridge_fit(&x, &y, 0.5).unwrap();
        let mut wide = x.clone();
        for r in &mut wide {
            r.push(0.0);
        }
        let dual = ridge_fit(&wide, &y, 0.5).unwrap();
        for k in 0..6 {
            assert!((primal.coefficients[k] - dual.coefficients[k]).abs() < 1e-10);
        }
        assert!(dual.coefficients[6].abs() < 1e-15);
    }

    #[test]
    fn validation_errors() {
        let x = vec![vec![1.0], vec![2.0]];
        assert!(matches!(ridge_fit(&x, &[1.0], 1.0), Err(LearnError::DimensionMismatch { .. })));
        assert!(matches!(ridge_fit(&x, &[1.0, f64::NAN], 1.0), Err(LearnError::NonFinite)));
        assert!(matches!(ridge_fit(&[vec![1.0]], &[1.0], 1.0), Err(LearnError::TooFewSamples(1))));
        assert!(matches!(ridge_fit(&x, &[1.0, 2.0], 0.0), Err(LearnError::NotPositive(..))));
        let ragged = vec![vec![1.0], vec![2.0, 3.0]];
        assert!(matches!(ridge_fit(&ragged, &[1.0, 2.0], 1.0), Err(LearnError::DimensionMismatch { .. })));
    }
}
