//! The `persphere` command line.

mod demo;
mod output;

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::baselines::{
    landscape_features, persistence_image, pixel_size_for, sw_distance_matrix, ImageBounds, ImageParams,
    LandscapeParams, SwParams, DEFAULT_DIRECTIONS,
};
use crate::bench::{self, BenchConfig};
use crate::data::io::{diagram_sha256, read_diagram, ManifestEntry};
use crate::data::{gen_two_class_functions, random_diagram, serialize_diagram, sublevel_pd0, Format};
use crate::diagram::{w1_distance, PersistenceDiagram};
use crate::parallel::{with_workers, WORKERS_ENV};
use crate::sphere::{evaluate_ps, lp_distance, to_feature_vector, LpNorm, SphereGrid, DEFAULT_GRID};
use crate::weighting::{Weighting, DEFAULT_K};
use crate::zonoid::{hausdorff, lift_zonoid};

use output::Staged;

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 20_240_917;

/// Refinement rounds of the Hausdorff sup search.
pub const HAUSDORFF_REFINE_STEPS: usize = 12;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DATA: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
}

impl CliError {
    fn data(e: impl fmt::Display) -> Self {
        CliError::Data(e.to_string())
    }

    fn usage(e: impl fmt::Display) -> Self {
        CliError::Usage(e.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Data(m) => write!(f, "error: {m}"),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "persphere", version, about = "Persistence spheres for persistence diagrams")]
pub struct Cli {
    /// Worker threads for parallel sections (0 = all cores)
    #[arg(long, global = true, env = WORKERS_ENV, default_value_t = 0)]
    pub workers: usize,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write one feature file per input diagram
    Vectorize(VectorizeArgs),
    /// Pairwise distance matrix between diagrams
    Dist(DistArgs),
    /// Two-class classification pipeline on synthetic or manifest data
    Demo(DemoArgs),
    /// Time persistence-sphere evaluation
    Bench(BenchArgs),
    /// Write synthetic diagrams
    Generate(GenerateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WeightingChoice {
    Lambda,
    Arctan,
}

#[derive(Debug, Clone, Args)]
pub struct WeightingArgs {
    #[arg(long, value_enum, default_value = "arctan")]
    pub weighting: WeightingChoice,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = DEFAULT_K)]
    pub k: f64,
}

impl WeightingArgs {
    pub fn build(&self) -> Result<Weighting, CliError> {
        match self.weighting {
            WeightingChoice::Lambda => Weighting::power_lambda(self.alpha),
            WeightingChoice::Arctan => Weighting::arctan(self.alpha, self.k),
        }
        .map_err(CliError::usage)
    }
}

/// `NxM` grid size: `N` polar by `M` azimuthal divisions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSize(pub usize, pub usize);

impl std::str::FromStr for GridSize {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s
            .split_once(['x', 'X'])
            .ok_or_else(|| format!("expected NxM, got '{s}'"))?;
        let n = a.trim().parse().map_err(|_| format!("bad grid size '{s}'"))?;
        let m = b.trim().parse().map_err(|_| format!("bad grid size '{s}'"))?;
        Ok(GridSize(n, m))
    }
}

impl fmt::Display for GridSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.0, self.1)
    }
}

impl GridSize {
    fn build(self) -> Result<Arc<SphereGrid>, CliError> {
        SphereGrid::new(self.0, self.1).map(Arc::new).map_err(CliError::usage)
    }
}

fn default_grid() -> GridSize {
    GridSize(DEFAULT_GRID.0, DEFAULT_GRID.1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Ps,
    Pi,
    Pl,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Ps => "ps",
            Method::Pi => "pi",
            Method::Pl => "pl",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Persistence image and landscape parameters shared by `vectorize` and `demo`.
#[derive(Debug, Clone, Args)]
pub struct BaselineArgs {
    /// Pixel side for persistence images (default: shortest side / n', rounded to a power of ten)
    #[arg(long)]
    pub pixel_size: Option<f64>,
    #[arg(long, default_value_t = 10)]
    pub n_prime: usize,
    /// Gaussian bandwidth is pixel_size / m
    #[arg(long = "pi-m", default_value_t = 1.0)]
    pub pi_m: f64,
    /// Exponent of the persistence weight
    #[arg(long = "pi-n", default_value_t = 1)]
    pub pi_n: u32,
    #[arg(long, default_value_t = crate::baselines::landscape::DEFAULT_K_MAX)]
    pub k_max: usize,
    /// Number of landscape abscissae
    #[arg(long, default_value_t = 100)]
    pub pl_len: usize,
}

impl BaselineArgs {
    /// Image parameters whose bounds enclose all `diagrams`.
    pub fn image_params(&self, diagrams: &[PersistenceDiagram]) -> Result<ImageParams, CliError> {
        let bounds = ImageBounds::enclosing(diagrams)
            .unwrap_or(ImageBounds { birth_min: 0.0, birth_max: 1.0, pers_min: 0.0, pers_max: 1.0 })
            .padded(0.5);
        let pixel = match self.pixel_size {
            Some(p) => p,
            None => pixel_size_for(&bounds, self.n_prime).map_err(CliError::usage)?,
        };
        ImageParams::from_pixel_size(bounds, pixel, self.pi_m, self.pi_n).map_err(CliError::usage)
    }

    pub fn landscape_params(&self, diagrams: &[PersistenceDiagram]) -> Result<LandscapeParams, CliError> {
        LandscapeParams::common_grid(diagrams, self.k_max, self.pl_len).map_err(CliError::usage)
    }
}

#[derive(Debug, Clone, Args)]
pub struct VectorizeArgs {
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long, value_enum)]
    pub method: Method,
    /// Output directory
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: OutputFormat,
    #[arg(long, default_value_t = default_grid())]
    pub grid: GridSize,
    /// Multiply sphere values by the square root of their quadrature weight
    #[arg(long)]
    pub scaled: bool,
    #[command(flatten)]
    pub weighting: WeightingArgs,
    #[command(flatten)]
    pub baseline: BaselineArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Metric {
    W1,
    Hausdorff,
    Lp,
    Sw,
}

#[derive(Debug, Clone, Args)]
pub struct DistArgs {
    #[arg(required = true, num_args = 2..)]
    pub inputs: Vec<PathBuf>,
    #[arg(long, value_enum)]
    pub metric: Metric,
    #[arg(long, default_value_t = default_grid())]
    pub grid: GridSize,
    /// Norm exponent for `lp` (a number >= 1 or `inf`)
    #[arg(long, default_value = "2")]
    pub p: LpNorm,
    /// Directions for `sw`
    #[arg(long, default_value_t = DEFAULT_DIRECTIONS)]
    pub directions: usize,
    #[arg(long, default_value_t = HAUSDORFF_REFINE_STEPS)]
    pub refine: usize,
    /// Output CSV file (default: stdout)
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub weighting: WeightingArgs,
}

#[derive(Debug, Clone, Args)]
pub struct DemoArgs {
    /// JSON manifest of `{diagram, target}` entries instead of synthetic data
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long, default_value_t = demo::DEFAULT_PER_CLASS)]
    pub per_class: usize,
    #[arg(long, default_value_t = demo::DEFAULT_NOISE)]
    pub noise: f64,
    #[arg(long, default_value_t = demo::DEFAULT_TEST_FRACTION)]
    pub test_fraction: f64,
    #[arg(long, default_value_t = 3)]
    pub folds: usize,
    #[arg(long, default_value_t = default_grid())]
    pub grid: GridSize,
    /// Report path (default: stdout)
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub weighting: WeightingArgs,
    #[command(flatten)]
    pub baseline: BaselineArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_values_t = BenchConfig::default().sizes)]
    pub sizes: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = BenchConfig::default().grids.iter().map(|g| GridSize(g.0, g.1)).collect::<Vec<_>>())]
    pub grids: Vec<GridSize>,
    #[arg(long, value_delimiter = ',', default_values_t = BenchConfig::default().workers)]
    pub worker_counts: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    pub repeats: usize,
    /// Also measure size, grid and worker scaling ratios
    #[arg(long)]
    pub scaling: bool,
    /// Output CSV file (default: stdout)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenerateKind {
    /// Sublevel diagrams of the two-class bump functions, plus a manifest
    TwoClass,
    /// Uniform random diagrams
    Random,
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub kind: GenerateKind,
    /// Output directory
    #[arg(long)]
    pub out: PathBuf,
    /// Diagrams (random) or diagrams per class (two-class)
    #[arg(long, default_value_t = 10)]
    pub count: usize,
    #[arg(long, default_value_t = 10)]
    pub max_points: usize,
    #[arg(long, default_value_t = demo::DEFAULT_NOISE)]
    pub noise: f64,
}

/// Parses `args` (including the program name), runs the subcommand and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    let seed = cli.seed;
    with_workers(cli.workers, || match &cli.command {
        Command::Vectorize(a) => cmd_vectorize(a),
        Command::Dist(a) => cmd_dist(a),
        Command::Demo(a) => demo::cmd_demo(a, seed),
        Command::Bench(a) => cmd_bench(a, seed),
        Command::Generate(a) => cmd_generate(a, seed),
    })
}

fn read_all(paths: &[PathBuf]) -> Result<Vec<PersistenceDiagram>, CliError> {
    for p in paths {
        if !p.is_file() {
            return Err(CliError::Data(format!("{}: no such file", p.display())));
        }
    }
    paths.iter().map(|p| read_diagram(p).map_err(CliError::data)).collect()
}

fn stem(p: &Path) -> String {
    p.file_stem().map_or_else(|| "diagram".into(), |s| s.to_string_lossy().into_owned())
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Data(format!("{}: {e}", dir.display())))
}

fn metadata_lines(pairs: &[(&str, String)]) -> String {
    pairs.iter().map(|(k, v)| format!("# {k}={v}\n")).collect()
}

pub fn cmd_vectorize(a: &VectorizeArgs) -> Result<(), CliError> {
    if a.format == OutputFormat::Json && a.method != Method::Ps {
        return Err(CliError::Usage("json output is only available for --method ps".into()));
    }
    let weighting = a.weighting.build()?;
    let grid = a.grid.build()?;
    let mut names: Vec<String> = a.inputs.iter().map(|p| stem(p)).collect();
    names.sort();
    if names.windows(2).any(|w| w[0] == w[1]) {
        return Err(CliError::Usage("input file names must have distinct stems".into()));
    }
    let diagrams = read_all(&a.inputs)?;
    ensure_dir(&a.out)?;

    let ext = match a.format {
        OutputFormat::Csv => "csv",
        OutputFormat::Json => "json",
    };
    let image = match a.method {
        Method::Pi => Some(a.baseline.image_params(&diagrams)?),
        _ => None,
    };
    let landscape = match a.method {
        Method::Pl => Some(a.baseline.landscape_params(&diagrams)?),
        _ => None,
    };

    let mut staged = Staged::new();
    for (path, d) in a.inputs.iter().zip(&diagrams) {
        let target = a.out.join(format!("{}.{}.{ext}", stem(path), a.method));
        let mut meta = vec![
            ("method", a.method.to_string()),
            ("input", path.display().to_string()),
            ("diagram_sha256", diagram_sha256(d)),
        ];
        let body = match a.method {
            Method::Ps => {
                let field = evaluate_ps(d, &weighting, &grid);
                meta.push(("weighting", weighting.to_string()));
                meta.push(("grid", a.grid.to_string()));
                meta.push(("scaled", a.scaled.to_string()));
                match a.format {
                    OutputFormat::Json => {
                        let mut doc = field.to_json();
                        doc["parameters"] = serde_json::json!({
                            "method": "ps",
                            "weighting": weighting,
                            "scaled": a.scaled,
                            "input": path.display().to_string(),
                        });
                        if a.scaled {
                            doc["values"] = serde_json::json!(to_feature_vector(&field, true));
                        }
                        serde_json::to_string_pretty(&doc).map_err(CliError::data)? + "\n"
                    }
                    OutputFormat::Csv => {
                        let values = to_feature_vector(&field, a.scaled);
                        let mut s = metadata_lines(&meta);
                        s.push_str("theta,phi,value\n");
                        for (i, v) in values.iter().enumerate() {
                            let (t, p) = grid.angles(i);
                            s.push_str(&format!("{t},{p},{v}\n"));
                        }
                        s
                    }
                }
            }
            Method::Pi => {
                let params = image.as_ref().expect("image parameters");
                meta.push(("resolution", format!("{}x{}", params.resolution[0], params.resolution[1])));
                meta.push(("sigma", params.sigma.to_string()));
                meta.push(("weight_exponent", params.weight_exponent.to_string()));
                meta.push(("bounds", serde_json::to_string(&params.bounds).map_err(CliError::data)?));
                meta.push(("order", "row-major birth x persistence".into()));
                indexed_csv(&meta, &persistence_image(d, params))
            }
            Method::Pl => {
                let params = landscape.as_ref().expect("landscape parameters");
                let g = &params.grid;
                meta.push(("k_max", params.k_max.to_string()));
                meta.push(("grid", format!("{}..{} ({} points)", g[0], g[g.len() - 1], g.len())));
                meta.push(("order", "landscape-major".into()));
                indexed_csv(&meta, &landscape_features(d, params))
            }
        };
        staged.write(&target, &body).map_err(CliError::data)?;
    }
    staged.commit().map_err(CliError::data)
}

fn indexed_csv(meta: &[(&str, String)], values: &[f64]) -> String {
    let mut s = metadata_lines(meta);
    s.push_str("index,value\n");
    for (i, v) in values.iter().enumerate() {
        s.push_str(&format!("{i},{v}\n"));
    }
    s
}

/// Symmetric distance matrix from a pairwise function on `i < j`.
fn pairwise(n: usize, f: impl Fn(usize, usize) -> Result<f64, CliError> + Sync) -> Result<Vec<Vec<f64>>, CliError> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let vals: Vec<f64> = pairs.par_iter().map(|&(i, j)| f(i, j)).collect::<Result<_, _>>()?;
    let mut m = vec![vec![0.0; n]; n];
    for (&(i, j), v) in pairs.iter().zip(vals) {
        m[i][j] = v;
        m[j][i] = v;
    }
    Ok(m)
}

pub fn cmd_dist(a: &DistArgs) -> Result<(), CliError> {
    let weighting = a.weighting.build()?;
    let grid = a.grid.build()?;
    if a.metric == Metric::Sw && a.directions == 0 {
        return Err(CliError::Usage("--directions must be at least 1".into()));
    }
    let diagrams = read_all(&a.inputs)?;
    let n = diagrams.len();
    let matrix = match a.metric {
        Metric::W1 => pairwise(n, |i, j| Ok(w1_distance(&diagrams[i], &diagrams[j])))?,
        Metric::Hausdorff => {
            let z: Vec<_> = diagrams.iter().map(|d| lift_zonoid(d, &weighting)).collect();
            pairwise(n, |i, j| Ok(hausdorff(&z[i], &z[j], &grid, a.refine)))?
        }
        Metric::Lp => {
            let fields: Vec<_> = diagrams.iter().map(|d| evaluate_ps(d, &weighting, &grid)).collect();
            pairwise(n, |i, j| lp_distance(&fields[i], &fields[j], a.p).map_err(CliError::data))?
        }
        Metric::Sw => {
            let params = SwParams::new(a.directions, 1.0).map_err(CliError::usage)?;
            sw_distance_matrix(&diagrams, &params)
        }
    };
    let names: Vec<String> = a.inputs.iter().map(|p| stem(p)).collect();
    let mut s = String::from("diagram");
    for name in &names {
        s.push(',');
        s.push_str(name);
    }
    s.push('\n');
    for (name, row) in names.iter().zip(&matrix) {
        s.push_str(name);
        for v in row {
            s.push_str(&format!(",{v}"));
        }
        s.push('\n');
    }
    output::emit(a.out.as_deref(), &s)
}

pub fn cmd_bench(a: &BenchArgs, seed: u64) -> Result<(), CliError> {
    let cfg = BenchConfig {
        sizes: a.sizes.clone(),
        grids: a.grids.iter().map(|g| (g.0, g.1)).collect(),
        workers: a.worker_counts.clone(),
        repeats: a.repeats,
        seed,
    };
    for &(nt, np) in &cfg.grids {
        SphereGrid::new(nt, np).map_err(CliError::usage)?;
    }
    if cfg.workers.contains(&0) || cfg.workers.is_empty() {
        return Err(CliError::Usage("worker counts must be positive".into()));
    }
    let rows = bench::run(&cfg).map_err(CliError::data)?;
    let mut s = bench::rows_to_csv(&rows);
    if a.scaling {
        let largest_n = cfg.sizes.iter().copied().max().unwrap_or(1_000);
        let largest_g = cfg.grids.iter().copied().max_by_key(|g| g.0 * g.1).unwrap_or(DEFAULT_GRID);
        let r = bench::scaling_check(2_000, DEFAULT_GRID, (largest_n, largest_g), a.repeats, seed);
        s.push_str(&format!(
            "# size_ratio={:.3}\n# grid_ratio={:.3}\n# speedup_4_workers={:.3}\n",
            r.size_ratio, r.grid_ratio, r.speedup
        ));
    }
    output::emit(a.out.as_deref(), &s)
}

pub fn cmd_generate(a: &GenerateArgs, seed: u64) -> Result<(), CliError> {
    ensure_dir(&a.out)?;
    let mut staged = Staged::new();
    match a.kind {
        GenerateKind::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for i in 0..a.count {
                let d = random_diagram(&mut rng, a.max_points, 0.0, 10.0);
                let path = a.out.join(format!("random_{i:04}.csv"));
                staged.write(&path, &serialize_diagram(&d, Format::Csv)).map_err(CliError::data)?;
            }
            staged.commit().map_err(CliError::data)
        }
        GenerateKind::TwoClass => {
            if !(a.noise.is_finite() && a.noise >= 0.0) {
                return Err(CliError::Usage("--noise must be nonnegative".into()));
            }
            let mut entries = Vec::new();
            for (i, (f, label)) in gen_two_class_functions(a.count, a.noise, seed).iter().enumerate() {
                let name = format!("item_{i:04}.csv");
                let d = sublevel_pd0(f);
                let path = a.out.join(&name);
                staged.write(&path, &serialize_diagram(&d, Format::Csv)).map_err(CliError::data)?;
                entries.push(ManifestEntry { diagram: PathBuf::from(name), target: serde_json::json!(label) });
            }
            let manifest = serde_json::to_string_pretty(&entries).map_err(CliError::data)? + "\n";
            staged.write(&a.out.join("manifest.json"), &manifest).map_err(CliError::data)?;
            staged.commit().map_err(CliError::data)
        }
    }
}

