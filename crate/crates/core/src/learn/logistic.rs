use serde::Serialize;

use super::{check_matrix, LearnError};

/// Gradient-norm tolerance of [`logistic_fit`].
pub const TOLERANCE: f64 = 1e-8;
/// Iteration cap of [`logistic_fit`].
pub const MAX_ITERATIONS: usize = 100_000;

/// Multinomial logistic regression with per-class coefficients.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogisticModel {
    /// Sorted distinct training labels; row `k` of `coefficients` belongs to `classes[k]`.
    pub classes: Vec<usize>,
    pub coefficients: Vec<Vec<f64>>,
    pub intercepts: Vec<f64>,
    pub c: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn softmax_in_place(z: &mut [f64]) {
    let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut s = 0.0;
    for v in z.iter_mut() {
        *v = (*v - m).exp();
        s += *v;
    }
    z.iter_mut().for_each(|v| *v /= s);
}

impl LogisticModel {
    pub fn predict_proba_one(&self, row: &[f64]) -> Vec<f64> {
        let mut z: Vec<f64> = self
            .coefficients
            .iter()
            .zip(&self.intercepts)
            .map(|(beta, b)| b + beta.iter().zip(row).map(|(w, x)| w * x).sum::<f64>())
            .collect();
        softmax_in_place(&mut z);
        z
    }

    /// Most probable class; ties go to the smallest label.
    pub fn predict_one(&self, row: &[f64]) -> usize {
        let p = self.predict_proba_one(row);
        let mut best = 0;
        for k in 1..p.len() {
            if p[k] > p[best] {
                best = k;
            }
        }
        self.classes[best]
    }

    pub fn predict(&self, rows: &[Vec<f64>]) -> Vec<usize> {
        rows.iter().map(|r| self.predict_one(r)).collect()
    }
}

/// Penalized log-likelihood
/// `Σ_i log softmax(z_i)[y_i] − ||β||² / (2c)` with `z_ik = ⟨β_k, x_i⟩ + b_k`.
///
/// `targets[i]` is the class index (position in the sorted class list).
pub fn logistic_objective(features: &[Vec<f64>], targets: &[usize], c: f64, coefs: &[Vec<f64>], intercepts: &[f64]) -> f64 {
    let mut ll = 0.0;
    for (x, &y) in features.iter().zip(targets) {
        let z: Vec<f64> = coefs
            .iter()
            .zip(intercepts)
            .map(|(beta, b)| b + beta.iter().zip(x).map(|(w, v)| w * v).sum::<f64>())
            .collect();
        let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse = m + z.iter().map(|v| (v - m).exp()).sum::<f64>().ln();
        ll += z[y] - lse;
    }
    let pen: f64 = coefs.iter().flatten().map(|v| v * v).sum();
    ll - pen / (2.0 * c)
}

/// Gradient of [`logistic_objective`] as `(coefficient gradients, intercept gradients)`.
pub fn logistic_gradient(
    features: &[Vec<f64>],
    targets: &[usize],
    c: f64,
    coefs: &[Vec<f64>],
    intercepts: &[f64],
) -> (Vec<Vec<f64>>, Vec<f64>) {
    let k = coefs.len();
    let mut gb: Vec<Vec<f64>> = coefs.iter().map(|beta| beta.iter().map(|v| -v / c).collect()).collect();
    let mut gi = vec![0.0; k];
    for (x, &y) in features.iter().zip(targets) {
        let mut p: Vec<f64> = coefs
            .iter()
            .zip(intercepts)
            .map(|(beta, b)| b + beta.iter().zip(x).map(|(w, v)| w * v).sum::<f64>())
            .collect();
        softmax_in_place(&mut p);
        for cls in 0..k {
            let r = f64::from(u8::from(cls == y)) - p[cls];
            gi[cls] += r;
            for (g, v) in gb[cls].iter_mut().zip(x) {
                *g += r * v;
            }
        }
    }
    (gb, gi)
}

/// Fits a multinomial logistic model by full-batch gradient ascent with the
/// fixed step `1/L`, where `L = ½·||[X 1]||_F² + 1/c` bounds the curvature.
/// Stops once the gradient norm drops to [`TOLERANCE`] or after
/// [`MAX_ITERATIONS`] steps.
///
/// When features outnumber samples the iterates are tracked through
/// `β_k = Σ_i a_ki x_i`, which reproduces the primal iterates from a zero
/// start at `O(n²)` cost per step.
pub fn logistic_fit(features: &[Vec<f64>], labels: &[usize], c: f64) -> Result<LogisticModel, LearnError> {
    let dim = check_matrix(features, labels.len())?;
    if !(c.is_finite() && c > 0.0) {
        return Err(LearnError::NotPositive("c", c));
    }
    let mut classes: Vec<usize> = labels.to_vec();
    classes.sort_unstable();
    classes.dedup();
    if classes.len() < 2 {
        return Err(LearnError::SingleClass);
    }
    for &cls in &classes {
        let count = labels.iter().filter(|&&l| l == cls).count();
        if count < 2 {
            return Err(LearnError::TooFewPerClass { class: cls, count });
        }
    }
    let targets: Vec<usize> = labels.iter().map(|l| classes.binary_search(l).unwrap()).collect();
    let n = features.len();
    let k = classes.len();

    let frob: f64 = features.iter().flatten().map(|v| v * v).sum::<f64>() + n as f64;
    let step = 1.0 / (0.5 * frob + 1.0 / c);

    let mut intercepts = vec![0.0; k];
    let mut iterations = 0;
    let mut converged = false;

    let coefficients = if dim > n {
        // Gram-matrix representation.
        let gram: Vec<Vec<f64>> = features
            .iter()
            .map(|xi| features.iter().map(|xj| xi.iter().zip(xj).map(|(a, b)| a * b).sum()).collect())
            .collect();
        let mut a = vec![vec![0.0; n]; k];
        let mut z = vec![0.0; k];
        let mut dir = vec![vec![0.0; n]; k];
        let mut gi = vec![0.0; k];
        while iterations < MAX_ITERATIONS {
            gi.iter_mut().for_each(|g| *g = 0.0);
            for i in 0..n {
                for cls in 0..k {
                    z[cls] = intercepts[cls] + a[cls].iter().zip(&gram[i]).map(|(u, g)| u * g).sum::<f64>();
                }
                softmax_in_place(&mut z);
                for cls in 0..k {
                    let r = f64::from(u8::from(cls == targets[i])) - z[cls];
                    dir[cls][i] = r - a[cls][i] / c;
                    gi[cls] += r;
                }
            }
            // ||∇β_k||² = dirᵀ G dir
            let mut norm2: f64 = gi.iter().map(|g| g * g).sum();
            for d in &dir {
                for i in 0..n {
                    norm2 += d[i] * d.iter().zip(&gram[i]).map(|(u, g)| u * g).sum::<f64>();
                }
            }
            if norm2.max(0.0).sqrt() <= TOLERANCE {
                converged = true;
                break;
            }
            for cls in 0..k {
                for i in 0..n {
                    a[cls][i] += step * dir[cls][i];
                }
                intercepts[cls] += step * gi[cls];
            }
            iterations += 1;
        }
        a.iter()
            .map(|ak| {
                let mut beta = vec![0.0; dim];
                for (ai, x) in ak.iter().zip(features) {
                    for (b, v) in beta.iter_mut().zip(x) {
                        *b += ai * v;
                    }
                }
                beta
            })
            .collect()
    } else {
        let mut coefs = vec![vec![0.0; dim]; k];
        while iterations < MAX_ITERATIONS {
            let (gb, gi) = logistic_gradient(features, &targets, c, &coefs, &intercepts);
            let norm2: f64 = gb.iter().flatten().chain(&gi).map(|g| g * g).sum();
            if norm2.sqrt() <= TOLERANCE {
                converged = true;
                break;
            }
            for cls in 0..k {
                for (b, g) in coefs[cls].iter_mut().zip(&gb[cls]) {
                    *b += step * g;
                }
                intercepts[cls] += step * gi[cls];
            }
            iterations += 1;
        }
        coefs
    };

    Ok(LogisticModel { classes, coefficients, intercepts, c, iterations, converged })
}
