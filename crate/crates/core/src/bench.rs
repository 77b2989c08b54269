//! Timing harness for persistence-sphere evaluation.

use std::sync::Arc;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::ThreadPool;
use serde::Serialize;

use crate::diagram::PersistenceDiagram;
use crate::sphere::{evaluate_ps, SphereGrid};
use crate::weighting::{SampleBox, Weighting};

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub grids: Vec<(usize, usize)>,
    pub workers: Vec<usize>,
    pub repeats: usize,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            sizes: vec![100, 1_000, 10_000],
            grids: vec![(100, 50), (200, 100), (400, 200)],
            workers: vec![1, 2, 4],
            repeats: 3,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub points: usize,
    pub n_theta: usize,
    pub n_phi: usize,
    pub workers: usize,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReport {
    /// time(2n points) / time(n points) at a fixed grid
    pub size_ratio: f64,
    /// time(2× nodes) / time(nodes) at a fixed diagram
    pub grid_ratio: f64,
    /// time(1 worker) / time(4 workers) on the largest case
    pub speedup: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("evaluation with {workers} workers differs from the single-worker output ({points} points, {n_theta}x{n_phi})")]
pub struct DeterminismViolation {
    pub points: usize,
    pub n_theta: usize,
    pub n_phi: usize,
    pub workers: usize,
}

/// Diagram with exactly `n` distinct points in `[0, 10]²` above the diagonal.
pub fn bench_diagram(n: usize, seed: u64) -> PersistenceDiagram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let square = SampleBox::square(0.0, 10.0);
    loop {
        let pairs: Vec<(f64, f64)> = (0..n).map(|_| square.sample(&mut rng)).collect();
        let d = PersistenceDiagram::from_pairs(pairs).expect("valid points");
        if d.len() == n {
            return d;
        }
    }
}

fn pool(workers: usize) -> ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool")
}

/// Median wall time of `repeats` evaluations inside `pool`, and the last field values.
fn time_eval(pool: &ThreadPool, d: &PersistenceDiagram, grid: &Arc<SphereGrid>, repeats: usize) -> (f64, Vec<f64>) {
    let w = Weighting::default();
    let mut times = Vec::with_capacity(repeats.max(1));
    let mut values = Vec::new();
    for _ in 0..repeats.max(1) {
        let t = Instant::now();
        let f = pool.install(|| evaluate_ps(d, &w, grid));
        times.push(t.elapsed().as_secs_f64());
        values = f.values().to_vec();
    }
    times.sort_by(f64::total_cmp);
    (times[times.len() / 2], values)
}

/// Times every `(size, grid, workers)` combination and checks that all
/// worker counts produce bitwise-identical fields.
pub fn run(cfg: &BenchConfig) -> Result<Vec<BenchRow>, DeterminismViolation> {
    let pools: Vec<(usize, ThreadPool)> = cfg.workers.iter().map(|&w| (w, pool(w))).collect();
    let mut rows = Vec::new();
    for (si, &n) in cfg.sizes.iter().enumerate() {
        let d = bench_diagram(n, cfg.seed.wrapping_add(si as u64));
        for &(nt, np) in &cfg.grids {
            let grid = Arc::new(SphereGrid::new(nt, np).expect("grid size"));
            let mut reference: Option<Vec<f64>> = None;
            for (workers, p) in &pools {
                let (seconds, values) = time_eval(p, &d, &grid, cfg.repeats);
                match &reference {
                    None => reference = Some(values),
                    Some(r) => {
                        let same = r.iter().zip(&values).all(|(a, b)| a.to_bits() == b.to_bits());
                        if !same {
                            return Err(DeterminismViolation { points: n, n_theta: nt, n_phi: np, workers: *workers });
                        }
                    }
                }
                rows.push(BenchRow { points: n, n_theta: nt, n_phi: np, workers: *workers, seconds });
            }
        }
    }
    Ok(rows)
}

/// Measures the three scaling ratios: doubling the diagram at a fixed grid,
/// doubling the grid nodes (azimuthal divisions) at a fixed diagram, and
/// four workers against one on `largest`.
pub fn scaling_check(base_points: usize, base_grid: (usize, usize), largest: (usize, (usize, usize)), repeats: usize, seed: u64) -> ScalingReport {
    let single = pool(1);
    let d = bench_diagram(base_points, seed);
    let d2 = bench_diagram(2 * base_points, seed.wrapping_add(1));
    let g = Arc::new(SphereGrid::new(base_grid.0, base_grid.1).expect("grid size"));
    let g2 = Arc::new(SphereGrid::new(base_grid.0, 2 * base_grid.1).expect("grid size"));
    let (n_big, (nt, np)) = largest;
    let db = bench_diagram(n_big, seed.wrapping_add(2));
    let gb = Arc::new(SphereGrid::new(nt, np).expect("grid size"));
    let quad = pool(4);
    // warm-up
    let _ = time_eval(&single, &d, &g, 1);
    let _ = time_eval(&quad, &db, &gb, 1);

    // Configurations are timed back to back within each repeat and the
    // median of the per-repeat ratios is reported.
    let (mut size, mut grid, mut speedup) = (Vec::new(), Vec::new(), Vec::new());
    for _ in 0..repeats.max(1) {
        let t_base = time_eval(&single, &d, &g, 1).0;
        size.push(time_eval(&single, &d2, &g, 1).0 / t_base);
        grid.push(time_eval(&single, &d, &g2, 1).0 / t_base);
        let t1 = time_eval(&single, &db, &gb, 1).0;
        speedup.push(t1 / time_eval(&quad, &db, &gb, 1).0);
    }
    let median = |mut v: Vec<f64>| {
        v.sort_by(f64::total_cmp);
        v[v.len() / 2]
    };
    ScalingReport { size_ratio: median(size), grid_ratio: median(grid), speedup: median(speedup) }
}

/// Benchmark rows as CSV.
pub fn rows_to_csv(rows: &[BenchRow]) -> String {
    let mut s = String::from("points,n_theta,n_phi,workers,seconds\n");
    for r in rows {
        s.push_str(&format!("{},{},{},{},{:.6}\n", r.points, r.n_theta, r.n_phi, r.workers, r.seconds));
    }
    s
}
