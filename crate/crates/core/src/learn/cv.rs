use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{accuracy, logistic_fit, r2_score, ridge_fit, LearnError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Regression,
    Classification,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Targets {
    Regression(Vec<f64>),
    Classification(Vec<usize>),
}

impl Targets {
    pub fn len(&self) -> usize {
        match self {
            Targets::Regression(v) => v.len(),
            Targets::Classification(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn task(&self) -> Task {
        match self {
            Targets::Regression(_) => Task::Regression,
            Targets::Classification(_) => Task::Classification,
        }
    }

    pub fn subset(&self, idx: &[usize]) -> Targets {
        match self {
            Targets::Regression(v) => Targets::Regression(idx.iter().map(|&i| v[i]).collect()),
            Targets::Classification(v) => Targets::Classification(idx.iter().map(|&i| v[i]).collect()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CvReport {
    pub task: Task,
    pub grid: Vec<f64>,
    pub mean_scores: Vec<f64>,
    /// `fold_scores[g][f]`: score of grid value `g` on fold `f`.
    pub fold_scores: Vec<Vec<f64>>,
    pub chosen: f64,
    pub chosen_index: usize,
    pub folds: usize,
    pub seed: u64,
}

/// Fold index of every sample after a seeded shuffle; fold sizes differ by
/// at most one.
pub fn fold_assignment(n: usize, folds: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut fold = vec![0; n];
    for (pos, &i) in order.iter().enumerate() {
        fold[i] = pos % folds;
    }
    fold
}

/// Seeded split into `(train, test)` index lists with
/// `round(n·test_fraction)` test items.
pub fn train_test_split(n: usize, test_fraction: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_test = ((n as f64) * test_fraction).round() as usize;
    let mut test = order[..n_test].to_vec();
    let mut train = order[n_test..].to_vec();
    test.sort_unstable();
    train.sort_unstable();
    (train, test)
}

fn rows(features: &[Vec<f64>], idx: &[usize]) -> Vec<Vec<f64>> {
    idx.iter().map(|&i| features[i].clone()).collect()
}

/// Fits the task's model with penalty `h` on `train` and scores it on `test`.
pub fn fit_and_score(features: &[Vec<f64>], targets: &Targets, h: f64, train: &[usize], test: &[usize]) -> Result<f64, LearnError> {
    let (xtr, xte) = (rows(features, train), rows(features, test));
    match targets {
        Targets::Regression(y) => {
            let ytr: Vec<f64> = train.iter().map(|&i| y[i]).collect();
            let yte: Vec<f64> = test.iter().map(|&i| y[i]).collect();
            let m = ridge_fit(&xtr, &ytr, h)?;
            r2_score(&m.predict(&xte), &yte)
        }
        Targets::Classification(y) => {
            let ytr: Vec<usize> = train.iter().map(|&i| y[i]).collect();
            let yte: Vec<usize> = test.iter().map(|&i| y[i]).collect();
            let m = logistic_fit(&xtr, &ytr, h)?;
            accuracy(&m.predict(&xte), &yte)
        }
    }
}

/// k-fold cross-validation of ridge (regression, grid over `α`) or logistic
/// regression (classification, grid over `C`).
///
/// The chosen value maximizes the mean validation score; ties go to the
/// stronger penalty (larger `α`, smaller `C`).
pub fn kfold_cv(features: &[Vec<f64>], targets: &Targets, folds: usize, grid: &[f64], seed: u64) -> Result<CvReport, LearnError> {
    let n = targets.len();
    if features.len() != n {
        return Err(LearnError::DimensionMismatch { what: format!("{} feature rows vs {n} targets", features.len()) });
    }
    if folds < 2 || folds > n {
        return Err(LearnError::FoldCount { folds, samples: n });
    }
    if grid.is_empty() {
        return Err(LearnError::Empty);
    }
    let assignment = fold_assignment(n, folds, seed);
    let splits: Vec<(Vec<usize>, Vec<usize>)> = (0..folds)
        .map(|f| {
            let (test, train): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| assignment[i] == f);
            (train, test)
        })
        .collect();

    let jobs: Vec<(usize, usize)> = (0..grid.len()).flat_map(|g| (0..folds).map(move |f| (g, f))).collect();
    let results: Vec<f64> = jobs
        .par_iter()
        .map(|&(g, f)| fit_and_score(features, targets, grid[g], &splits[f].0, &splits[f].1))
        .collect::<Result<_, _>>()?;

    let fold_scores: Vec<Vec<f64>> = results.chunks(folds).map(<[f64]>::to_vec).collect();
    let mean_scores: Vec<f64> = fold_scores.iter().map(|s| s.iter().sum::<f64>() / folds as f64).collect();

    let stronger = |a: f64, b: f64| match targets.task() {
        Task::Regression => a > b,
        Task::Classification => a < b,
    };
    let mut chosen_index = 0;
    for g in 1..grid.len() {
        let (s, best) = (mean_scores[g], mean_scores[chosen_index]);
        if s > best || (s == best && stronger(grid[g], grid[chosen_index])) {
            chosen_index = g;
        }
    }
    Ok(CvReport {
        task: targets.task(),
        grid: grid.to_vec(),
        mean_scores,
        fold_scores,
        chosen: grid[chosen_index],
        chosen_index,
        folds,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linear_data() -> (Vec<Vec<f64>>, Targets) {
        let x: Vec<Vec<f64>> = (0..30).map(|i| vec![i as f64 / 10.0, ((i * 7) % 11) as f64]).collect();
        let y = x.iter().map(|r| 3.0 * r[0] - 0.5 * r[1] + 1.0).collect();
        (x, Targets::Regression(y))
    }

    #[test]
    fn single_value_grid() {
        let (x, y) = linear_data();
        let r = kfold_cv(&x, &y, 3, &[0.1], 1).unwrap();
        assert_eq!(r.chosen, 0.1);
        assert_eq!(r.fold_scores[0].len(), 3);
    }

    #[test]
    fn duplicated_values_score_identically() {
        let (x, y) = linear_data();
        let r = kfold_cv(&x, &y, 3, &[0.1, 0.1, 1.0], 2).unwrap();
        assert_eq!(r.mean_scores[0], r.mean_scores[1]);
    }

    #[test]
    fn perfect_linear_data() {
        let (x, y) = linear_data();
        let r = kfold_cv(&x, &y, 3, &[1e-6, 1e-3], 3).unwrap();
        assert!(r.mean_scores.iter().all(|&s| s >= 0.99));
    }

    #[test]
    fn ties_prefer_stronger_penalty() {
        // Perfectly separated classes: every C reaches accuracy 1.
        let x: Vec<Vec<f64>> = (0..12).map(|i| vec![if i % 2 == 0 { -3.0 } else { 3.0 } + i as f64 * 0.01]).collect();
        let y = Targets::Classification((0..12).map(|i| i % 2).collect());
        let r = kfold_cv(&x, &y, 3, &[100.0, 1.0, 10.0], 4).unwrap();
        assert_eq!(r.chosen, 1.0);
        let (xr, yr) = linear_data();
        let r = kfold_cv(&xr, &yr, 3, &[1e-9, 1e-9], 4).unwrap();
        assert_eq!(r.chosen_index, 0);
    }

    #[test]
    fn deterministic() {
        let (x, y) = linear_data();
        assert_eq!(kfold_cv(&x, &y, 3, &[0.1, 1.0], 5).unwrap(), kfold_cv(&x, &y, 3, &[0.1, 1.0], 5).unwrap());
    }

    #[test]
    fn fold_count_validation() {
        let (x, y) = linear_data();
        assert!(matches!(kfold_cv(&x, &y, 31, &[1.0], 0), Err(LearnError::FoldCount { .. })));
        assert!(matches!(kfold_cv(&x, &y, 1, &[1.0], 0), Err(LearnError::FoldCount { .. })));
    }

    #[test]
    fn folds_are_balanced() {
        let a = fold_assignment(10, 3, 9);
        let counts: Vec<usize> = (0..3).map(|f| a.iter().filter(|&&x| x == f).count()).collect();
        assert_eq!(counts.iter().sum::<usize>(), 10);
        assert!(counts.iter().all(|&c| c == 3 || c == 4));
        let (train, test) = train_test_split(10, 0.3, 1);
        assert_eq!((train.len(), test.len()), (7, 3));
    }
}
