//! Command-line front end: argument parsing, file plumbing and SVG output.
//!
//! Every command reads its inputs from files and flags only, so re-running a
//! command with the same arguments writes byte-identical output for any
//! thread count.

pub mod render;
mod verify_cmd;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use hypvoro::exec::Exec;
use hypvoro::graph::{self, DualGraph};
use hypvoro::hypgeo::radius_e_to_h;
use hypvoro::ppp::{self, Sample};
use hypvoro::schemes::{self, Scheme};
use hypvoro::walk::{self, GraphSpace, WalkTrace};
use hypvoro::{io, tess};

pub use verify_cmd::VerifyCommand;

/// Errors surfaced by the front end, mapped to process exit codes.
#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] hypvoro::Error),
    #[error("invalid `{param}`: {reason}")]
    Invalid { param: &'static str, reason: String },
    #[error("cannot access {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn invalid(param: &'static str, reason: impl Into<String>) -> Self {
        CliError::Invalid {
            param,
            reason: reason.into(),
        }
    }

    /// 3 for guard violations, 2 for validation errors, 1 for I/O failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(hypvoro::Error::Guard { .. }) => 3,
            CliError::Core(_) | CliError::Invalid { .. } => 2,
            CliError::Io { .. } => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "hypvoro", version, about = "Hyperbolic Poisson Voronoi / Delaunay toolkit")]
pub struct Cli {
    /// Worker threads for data-parallel loops (0 or unset: all cores).
    #[arg(long, env = "HYPVORO_THREADS", global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample the Poisson process in a window.
    Sample(SampleArgs),
    /// Build the Voronoi or Delaunay dual graph of a sample.
    Tessellate(TessellateArgs),
    /// Draw the tessellation and triangulation of a sample as SVG.
    Render(RenderArgs),
    /// Run simple random walks on a graph.
    Walk(WalkArgs),
    /// Estimate the speed of the walk on a graph.
    Speed(SpeedArgs),
    /// Exact minimum of |boundary|/volume over connected sets at the root.
    Expansion(ExpansionArgs),
    /// Enumerate triangulation schemes on k vertices.
    Schemes(SchemesArgs),
    #[command(flatten)]
    Verify(VerifyCommand),
    /// Summarize verification reports.
    Report(ReportArgs),
}

/// Window radius, hyperbolic or Euclidean.
#[derive(Debug, Clone, Copy, Args)]
#[group(required = true, multiple = false)]
pub struct Radius {
    /// Hyperbolic window radius.
    #[arg(long)]
    pub radius_h: Option<f64>,
    /// Euclidean window radius in the Poincaré disk, in (0, 1).
    #[arg(long)]
    pub radius_e: Option<f64>,
}

impl Radius {
    pub fn hyperbolic(&self) -> CliResult<f64> {
        match (self.radius_h, self.radius_e) {
            (Some(r), None) => Ok(r),
            (None, Some(e)) if e > 0.0 => Ok(radius_e_to_h(e)?),
            (None, Some(e)) => Err(CliError::invalid("radius_e", format!("{e} is not in (0, 1)"))),
            _ => Err(CliError::invalid("radius_h", "give exactly one of --radius-h and --radius-e")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConditioningArg {
    /// Plain process.
    None,
    /// Add a nucleus at the origin.
    Root,
    /// Move a Voronoi vertex to the origin.
    Skeleton,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct SampleArgs {
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[command(flatten)]
    pub radius: Radius,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = ConditioningArg::Root)]
    pub conditioning: ConditioningArg,
    /// Hard-core thinning to this minimum separation, applied last.
    #[arg(long)]
    pub thin: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GraphArg {
    /// Nuclei joined along Voronoi edges.
    Voronoi,
    /// Delaunay triangles joined along shared edges.
    Delaunay,
}

#[derive(Debug, Args)]
pub struct TessellateArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = GraphArg::Voronoi)]
    pub graph: GraphArg,
    /// Distance from the window boundary below which elements are not core.
    #[arg(long)]
    pub core_margin: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = render::DEFAULT_MAX_EDGES)]
    pub max_render_edges: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct WalkArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = 100)]
    pub walks: usize,
    #[arg(long, default_value_t = 400)]
    pub steps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Start vertex; defaults to the graph root.
    #[arg(long)]
    pub root: Option<u32>,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the terminal-angle histogram as CSV.
    #[arg(long)]
    pub histogram: Option<PathBuf>,
    #[arg(long, default_value_t = 64)]
    pub bins: usize,
}

#[derive(Debug, Args)]
pub struct SpeedArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = 200)]
    pub walks: usize,
    #[arg(long, default_value_t = 1000)]
    pub steps: usize,
    /// Evaluation step; defaults to the largest step 95% of the walks reach.
    #[arg(long)]
    pub k_eval: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExpansionArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Largest subset size.
    #[arg(long, default_value_t = 8)]
    pub m: usize,
    #[arg(long)]
    pub root: Option<u32>,
    /// Enumerate inside the core only (non-core subsets are not counted).
    #[arg(long)]
    pub core_only: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SchemesArgs {
    #[arg(long)]
    pub k: u32,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Verification report files.
    #[arg(long = "in", required = true, num_args = 1..)]
    pub inputs: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Write through a temporary file in the target directory, then rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> CliResult<()> {
    let io_err = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut builder = tempfile::Builder::new();
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        builder.permissions(std::fs::Permissions::from_mode(0o644));
    }
    let mut tmp = builder.tempfile_in(dir).map_err(io_err)?;
    tmp.write_all(contents).map_err(io_err)?;
    tmp.as_file().sync_all().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

fn load_sample(path: &Path) -> CliResult<Sample> {
    Ok(io::sample_from_json(&read_text(path)?)?)
}

fn load_graph(path: &Path) -> CliResult<DualGraph> {
    Ok(io::graph_from_json(&read_text(path)?)?)
}

fn rooted_graph(path: &Path, root: Option<u32>) -> CliResult<DualGraph> {
    let g = load_graph(path)?;
    Ok(match root {
        Some(r) => g.with_root(r)?,
        None => g,
    })
}

/// Install the global thread pool. Only the first call has an effect.
pub fn configure_threads(threads: Option<usize>) {
    if let Some(n) = threads.filter(|&n| n > 0) {
        // A second call fails harmlessly when the pool already exists.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

pub fn run(cli: Cli) -> CliResult<()> {
    configure_threads(cli.threads);
    let exec = Exec::default();
    match cli.command {
        Command::Sample(a) => sample(exec, a),
        Command::Tessellate(a) => tessellate(a),
        Command::Render(a) => {
            let s = load_sample(&a.input)?;
            let svg = render::render_sample(&s, a.max_render_edges)?;
            write_atomic(&a.out, svg.document.as_bytes())
        }
        Command::Walk(a) => walk_cmd(exec, a),
        Command::Speed(a) => speed(exec, a),
        Command::Expansion(a) => {
            let g = rooted_graph(&a.input, a.root)?;
            let rep = if a.core_only {
                graph::min_expansion_core(exec, &g, g.root(), a.m)?
            } else {
                graph::min_expansion_exec(exec, &g, g.root(), a.m)?
            };
            write_atomic(&a.out, io::expansion_to_json(&rep).as_bytes())
        }
        Command::Schemes(a) => schemes_cmd(a),
        Command::Verify(v) => verify_cmd::run(exec, v),
        Command::Report(a) => report(a),
    }
}

fn sample(exec: Exec, a: SampleArgs) -> CliResult<()> {
    let r = a.radius.hyperbolic()?;
    let base = ppp::sample_ball_exec(exec, a.lambda, r, a.seed)?;
    let mut s = match a.conditioning {
        ConditioningArg::None => base,
        ConditioningArg::Root => ppp::condition_root(&base)?,
        ConditioningArg::Skeleton => ppp::condition_skeleton_vertex(&base, a.seed)?,
    };
    if let Some(min_sep) = a.thin {
        s = ppp::hardcore_thin(&s, min_sep)?;
    }
    write_atomic(&a.out, io::sample_to_json(&s).as_bytes())
}

fn tessellate(a: TessellateArgs) -> CliResult<()> {
    let s = load_sample(&a.input)?;
    let c = match a.core_margin {
        Some(m) => tess::delaunay_with_margin(&s, m)?,
        None => tess::delaunay(&s)?,
    };
    let g = match a.graph {
        GraphArg::Voronoi => tess::dual_voronoi_graph(&c)?,
        GraphArg::Delaunay => tess::dual_delaunay_graph(&c)?,
    };
    write_atomic(&a.out, io::graph_to_json(&g).as_bytes())
}

fn walks(exec: Exec, g: &DualGraph, n: usize, steps: usize, seed: u64) -> CliResult<Vec<WalkTrace>> {
    if n == 0 {
        return Err(CliError::invalid("walks", "must be positive"));
    }
    let space = GraphSpace::new(g, g.root())?;
    Ok(walk::walk_ensemble(exec, &space, n, steps, seed))
}

fn walk_cmd(exec: Exec, a: WalkArgs) -> CliResult<()> {
    let g = rooted_graph(&a.input, a.root)?;
    let traces = walks(exec, &g, a.walks, a.steps, a.seed)?;
    if let Some(path) = &a.histogram {
        let h = walk::harmonic_measure(&traces, a.bins)?;
        write_atomic(path, io::histogram_csv(&h).as_bytes())?;
    }
    write_atomic(&a.out, io::traces_to_json(g.root(), a.seed, &traces).as_bytes())
}

/// Largest step that at least 95% of the traces reach.
pub fn k_eval_95(traces: &[WalkTrace]) -> usize {
    let mut steps: Vec<usize> = traces.iter().map(WalkTrace::steps).collect();
    steps.sort_unstable();
    steps[(0.05 * steps.len() as f64).floor() as usize]
}

fn speed(exec: Exec, a: SpeedArgs) -> CliResult<()> {
    let g = load_graph(&a.input)?;
    let traces = walks(exec, &g, a.walks, a.steps, a.seed)?;
    let k = match a.k_eval {
        Some(k) => k,
        None => k_eval_95(&traces).max(1),
    };
    let s = walk::speed_estimate(&traces, k, a.seed)?;
    write_atomic(&a.out, io::speed_to_json(&s).as_bytes())
}

#[derive(Serialize)]
struct SchemeList<'a> {
    k: u32,
    count: usize,
    /// `f(i) = [a, b]` for `i = 3, ..., k`.
    schemes: Vec<&'a [[u32; 2]]>,
}

fn schemes_cmd(a: SchemesArgs) -> CliResult<()> {
    let all: Vec<Scheme> = schemes::enumerate_schemes(a.k)?;
    let list = SchemeList {
        k: a.k,
        count: all.len(),
        schemes: all.iter().map(Scheme::pairs).collect(),
    };
    write_atomic(&a.out, to_json(&list).as_bytes())
}

#[derive(Serialize)]
struct ReportSummary {
    name: String,
    seed: u64,
    trials: u64,
    rows: usize,
    failed_rows: usize,
    passed: bool,
}

fn report(a: ReportArgs) -> CliResult<()> {
    let mut out = Vec::new();
    for path in &a.inputs {
        let r = io::report_from_json(&read_text(path)?)?;
        out.push(ReportSummary {
            name: r.name.clone(),
            seed: r.seed,
            trials: r.trials,
            rows: r.rows.len(),
            failed_rows: r.rows.iter().filter(|row| !row.pass).count(),
            passed: r.passed(),
        });
    }
    write_atomic(&a.out, to_json(&out).as_bytes())
}
