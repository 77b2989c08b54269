//! Penalized linear models, scores and k-fold cross-validation.

pub mod cv;
pub mod logistic;
pub mod ridge;

use thiserror::Error;

pub use cv::{kfold_cv, CvReport, Targets, Task};
pub use logistic::{logistic_fit, LogisticModel};
pub use ridge::{ridge_fit, RidgeModel};

/// Ridge penalties explored by default.
pub const RIDGE_ALPHAS: [f64; 9] = [1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0];
/// Logistic inverse penalties explored by default.
pub const LOGISTIC_CS: [f64; 5] = [1.0, 10.0, 100.0, 1000.0, 10000.0];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LearnError {
    #[error("dimension mismatch: {what}")]
    DimensionMismatch { what: String },
    #[error("non-finite input")]
    NonFinite,
    #[error("need at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("{0} must be positive, got {1}")]
    NotPositive(&'static str, f64),
    #[error("only one class present")]
    SingleClass,
    #[error("class {class} has {count} samples; at least 2 are required")]
    TooFewPerClass { class: usize, count: usize },
    #[error("normal equations are not positive definite")]
    Singular,
    #[error("empty input")]
    Empty,
    #[error("score is undefined: {0}")]
    UndefinedScore(&'static str),
    #[error("{folds} folds requested for {samples} samples")]
    FoldCount { folds: usize, samples: usize },
    #[error("targets do not match the task")]
    TaskMismatch,
}

/// Checks that `rows` is a non-empty finite rectangular matrix with
/// `expected_rows` rows; returns the column count.
pub(crate) fn check_matrix(rows: &[Vec<f64>], expected_rows: usize) -> Result<usize, LearnError> {
    if rows.len() != expected_rows {
        return Err(LearnError::DimensionMismatch {
            what: format!("{} feature rows vs {} targets", rows.len(), expected_rows),
        });
    }
    let dim = rows.first().map_or(0, Vec::len);
    if rows.is_empty() {
        return Err(LearnError::Empty);
    }
    for (i, r) in rows.iter().enumerate() {
        if r.len() != dim {
            return Err(LearnError::DimensionMismatch { what: format!("row {i} has {} columns, expected {dim}", r.len()) });
        }
        if r.iter().any(|v| !v.is_finite()) {
            return Err(LearnError::NonFinite);
        }
    }
    Ok(dim)
}

/// `1 − SS_res / SS_tot`; undefined for constant targets.
pub fn r2_score(predictions: &[f64], targets: &[f64]) -> Result<f64, LearnError> {
    if predictions.len() != targets.len() {
        return Err(LearnError::DimensionMismatch { what: "predictions vs targets".into() });
    }
    if targets.is_empty() {
        return Err(LearnError::Empty);
    }
    let mean = targets.iter().sum::<f64>() / targets.len() as f64;
    let ss_tot: f64 = targets.iter().map(|t| (t - mean).powi(2)).sum();
    if ss_tot == 0.0 {
        return Err(LearnError::UndefinedScore("targets have zero variance"));
    }
    let ss_res: f64 = predictions.iter().zip(targets).map(|(p, t)| (p - t).powi(2)).sum();
    Ok(1.0 - ss_res / ss_tot)
}

/// Fraction of exact label matches.
pub fn accuracy(predictions: &[usize], targets: &[usize]) -> Result<f64, LearnError> {
    if predictions.len() != targets.len() {
        return Err(LearnError::DimensionMismatch { what: "predictions vs targets".into() });
    }
    if targets.is_empty() {
        return Err(LearnError::Empty);
    }
    let hits = predictions.iter().zip(targets).filter(|(p, t)| p == t).count();
    Ok(hits as f64 / targets.len() as f64)
}

/// R² for regression targets, accuracy for class targets.
pub fn score(predictions: &Targets, targets: &Targets) -> Result<f64, LearnError> {
    match (predictions, targets) {
        (Targets::Regression(p), Targets::Regression(t)) => r2_score(p, t),
        (Targets::Classification(p), Targets::Classification(t)) => accuracy(p, t),
        _ => Err(LearnError::TaskMismatch),
    }
}
