use std::collections::BTreeMap;

use serde_json::{json, Value};

use super::{output, read_all, CliError, DemoArgs, Method};
use crate::baselines::{landscape_features, persistence_image};
use crate::data::io::read_manifest;
use crate::data::{gen_two_class_functions, sublevel_pd0};
use crate::diagram::PersistenceDiagram;
use crate::learn::cv::{kfold_cv, train_test_split};
use crate::learn::{accuracy, logistic_fit, r2_score, ridge_fit, Targets, LOGISTIC_CS, RIDGE_ALPHAS};
use crate::sphere::{evaluate_ps, to_feature_vector};

pub const DEFAULT_PER_CLASS: usize = 40;
pub const DEFAULT_NOISE: f64 = 0.05;
pub const DEFAULT_TEST_FRACTION: f64 = 0.3;

struct Dataset {
    source: String,
    diagrams: Vec<PersistenceDiagram>,
    targets: Targets,
    labels: Option<Vec<String>>,
}

fn synthetic(a: &DemoArgs, seed: u64) -> Result<Dataset, CliError> {
    if !(a.noise.is_finite() && a.noise >= 0.0) {
        return Err(CliError::Usage("--noise must be nonnegative".into()));
    }
    let items = gen_two_class_functions(a.per_class, a.noise, seed);
    Ok(Dataset {
        source: "synthetic-two-class".into(),
        diagrams: items.iter().map(|(f, _)| sublevel_pd0(f)).collect(),
        targets: Targets::Classification(items.iter().map(|(_, c)| *c).collect()),
        labels: None,
    })
}

fn from_manifest(path: &std::path::Path) -> Result<Dataset, CliError> {
    let entries = read_manifest(path).map_err(CliError::data)?;
    if entries.is_empty() {
        return Err(CliError::Data(format!("{}: manifest is empty", path.display())));
    }
    let paths: Vec<_> = entries.iter().map(|e| e.diagram.clone()).collect();
    let diagrams = read_all(&paths)?;
    let all_integer = entries.iter().all(|e| e.target.is_u64());
    let all_string = entries.iter().all(|e| e.target.is_string());
    let all_number = entries.iter().all(|e| e.target.is_number());
    let (targets, labels) = if all_integer || all_string {
        let keys: Vec<String> = entries
            .iter()
            .map(|e| match &e.target {
                Value::String(s) => s.clone(),
                v => v.to_string(),
            })
            .collect();
        let mut index = BTreeMap::new();
        for k in &keys {
            let next = index.len();
            index.entry(k.clone()).or_insert(next);
        }
        let mut sorted: Vec<String> = index.keys().cloned().collect();
        if all_integer {
            sorted.sort_by_key(|k| k.parse::<u64>().unwrap_or(u64::MAX));
        }
        let pos: BTreeMap<&String, usize> = sorted.iter().enumerate().map(|(i, k)| (k, i)).collect();
        (Targets::Classification(keys.iter().map(|k| pos[k]).collect()), Some(sorted))
    } else if all_number {
        (Targets::Regression(entries.iter().map(|e| e.target.as_f64().unwrap_or(f64::NAN)).collect()), None)
    } else {
        return Err(CliError::Data("manifest targets must be all numbers or all labels".into()));
    };
    Ok(Dataset { source: path.display().to_string(), diagrams, targets, labels })
}

fn features(method: Method, a: &DemoArgs, diagrams: &[PersistenceDiagram]) -> Result<(Vec<Vec<f64>>, Value), CliError> {
    match method {
        Method::Ps => {
            let w = a.weighting.build()?;
            let grid = a.grid.build()?;
            let x = diagrams.iter().map(|d| to_feature_vector(&evaluate_ps(d, &w, &grid), true)).collect();
            Ok((x, json!({ "weighting": w, "grid": a.grid.to_string(), "scaled": true })))
        }
        Method::Pi => {
            let p = a.baseline.image_params(diagrams)?;
            let x = diagrams.iter().map(|d| persistence_image(d, &p)).collect();
            Ok((x, serde_json::to_value(p).map_err(CliError::data)?))
        }
        Method::Pl => {
            let p = a.baseline.landscape_params(diagrams)?;
            let x = diagrams.iter().map(|d| landscape_features(d, &p)).collect();
            let g = &p.grid;
            Ok((x, json!({ "k_max": p.k_max, "grid_min": g[0], "grid_max": g[g.len() - 1], "grid_len": g.len() })))
        }
    }
}

fn rows(x: &[Vec<f64>], idx: &[usize]) -> Vec<Vec<f64>> {
    idx.iter().map(|&i| x[i].clone()).collect()
}

fn evaluate(method: Method, a: &DemoArgs, data: &Dataset, train: &[usize], test: &[usize], seed: u64) -> Result<Value, CliError> {
    let (x, parameters) = features(method, a, &data.diagrams)?;
    let (xtr, xte) = (rows(&x, train), rows(&x, test));
    let ytr = data.targets.subset(train);
    let yte = data.targets.subset(test);
    let (grid, hyper): (&[f64], &str) = match data.targets {
        Targets::Classification(_) => (&LOGISTIC_CS, "C"),
        Targets::Regression(_) => (&RIDGE_ALPHAS, "alpha"),
    };
    let cv = kfold_cv(&xtr, &ytr, a.folds, grid, seed).map_err(CliError::data)?;
    let (train_score, test_score, metric) = match (&ytr, &yte) {
        (Targets::Classification(ytr), Targets::Classification(yte)) => {
            let m = logistic_fit(&xtr, ytr, cv.chosen).map_err(CliError::data)?;
            let tr = accuracy(&m.predict(&xtr), ytr).map_err(CliError::data)?;
            let te = accuracy(&m.predict(&xte), yte).map_err(CliError::data)?;
            (tr, te, "accuracy")
        }
        (Targets::Regression(ytr), Targets::Regression(yte)) => {
            let m = ridge_fit(&xtr, ytr, cv.chosen).map_err(CliError::data)?;
            let tr = r2_score(&m.predict(&xtr), ytr).map_err(CliError::data)?;
            let te = r2_score(&m.predict(&xte), yte).map_err(CliError::data)?;
            (tr, te, "r2")
        }
        _ => unreachable!("subsets share the task"),
    };
    Ok(json!({
        "method": method.to_string(),
        "features": x.first().map_or(0, Vec::len),
        "parameters": parameters,
        "hyperparameter": hyper,
        "grid": cv.grid,
        "chosen": cv.chosen,
        "cv_mean_scores": cv.mean_scores,
        "fold_scores": cv.fold_scores,
        "metric": metric,
        "train_score": train_score,
        "test_score": test_score,
    }))
}

/// Builds the full demo report.
pub fn demo_report(a: &DemoArgs, seed: u64) -> Result<Value, CliError> {
    if !(a.test_fraction > 0.0 && a.test_fraction < 1.0) {
        return Err(CliError::Usage("--test-fraction must lie in (0, 1)".into()));
    }
    if a.folds < 2 {
        return Err(CliError::Usage("--folds must be at least 2".into()));
    }
    let data = match &a.manifest {
        Some(p) => from_manifest(p)?,
        None => synthetic(a, seed)?,
    };
    let n = data.diagrams.len();
    let (train, test) = train_test_split(n, a.test_fraction, seed);
    if train.is_empty() || test.is_empty() {
        return Err(CliError::Data(format!("{n} items are too few to split")));
    }
    let methods = [Method::Ps, Method::Pi, Method::Pl]
        .iter()
        .map(|&m| evaluate(m, a, &data, &train, &test, seed))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(json!({
        "seed": seed,
        "dataset": {
            "source": data.source,
            "items": n,
            "train": train.len(),
            "test": test.len(),
            "task": data.targets.task(),
            "labels": data.labels,
            "folds": a.folds,
        },
        "methods": methods,
    }))
}

pub fn cmd_demo(a: &DemoArgs, seed: u64) -> Result<(), CliError> {
    let report = demo_report(a, seed)?;
    let text = serde_json::to_string_pretty(&report).map_err(CliError::data)? + "\n";
    output::emit(a.out.as_deref(), &text)
}
