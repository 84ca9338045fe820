//! `verify-*` commands. Each writes a verification report as JSON, except
//! `verify-geodesic`, which is exploratory and writes CSV.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::path::PathBuf;

use clap::{Args, Subcommand, ValueEnum};
use rand::Rng;

use hypvoro::exec::Exec;
use hypvoro::hypgeo::{ball_area, HPoint};
use hypvoro::ppp::{self, radial_inverse_cdf};
use hypvoro::rng::{self, domain};
use hypvoro::schemes::{self, Scheme, ZParams};
use hypvoro::verify::{self, wilson_interval, ReportRow, VerificationReport};
use hypvoro::walk::{self, RootBias};
use hypvoro::{io, tess};

use crate::{load_graph, load_sample, write_atomic, CliError, CliResult};

/// Frozen constants from the calibration run.
pub const REGION_C: f64 = 15.4;
pub const PHI_STAR_C: f64 = 21.7;
pub const PLANAR_C: f64 = 0.92;

#[derive(Debug, Subcommand)]
pub enum VerifyCommand {
    /// Tail of the triangle star around the origin.
    #[command(name = "verify-tail")]
    Tail(TailArgs),
    /// Probability of a thin triangle with a circumdisk on a fixed edge.
    #[command(name = "verify-region")]
    Region(RegionArgs),
    /// Constant-area locus of the third vertex.
    #[command(name = "verify-locus")]
    Locus(LocusArgs),
    /// Closed forms against intersections for the two region boundaries.
    #[command(name = "verify-ell")]
    Ell(OutArgs),
    /// Closed form of the critical angle and its linear bound.
    #[command(name = "verify-phi-star")]
    PhiStar(OutArgs),
    /// Hull area against 4 pi times the number of points.
    #[command(name = "verify-hull")]
    Hull(HullArgs),
    /// Minimum mean triangle area of patches through the origin.
    #[command(name = "verify-area")]
    Area(AreaArgs),
    /// Graph distance over hyperbolic distance per annulus.
    #[command(name = "verify-distance")]
    Distance(DistanceArgs),
    /// Geodesic deviation of graph paths (CSV, exploratory).
    #[command(name = "verify-geodesic")]
    Geodesic(GeodesicArgs),
    /// Lower tail of the tree-indexed product process.
    #[command(name = "verify-z-tail")]
    ZTail(ZTailArgs),
    /// Planar (ordering, scheme) counts against (Ck)^k.
    #[command(name = "verify-planar")]
    Planar(PlanarArgs),
    /// Degree-biased reversibility of one walk step.
    #[command(name = "verify-reversibility")]
    Reversibility(ReversibilityArgs),
}

#[derive(Debug, Args)]
pub struct OutArgs {
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TailArgs {
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, value_delimiter = ',', default_values_t = [2.0, 2.5, 3.0, 3.5])]
    pub r_grid: Vec<f64>,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RegionArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [0.05, 0.15, 0.25, 0.35, 0.45, 0.55, 0.65, 0.75, 0.85, 0.95])]
    pub x_grid: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [1e-3, 1e-2, 1e-1])]
    pub theta_grid: Vec<f64>,
    #[arg(long, default_value_t = 2.0)]
    pub window_r: f64,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, default_value_t = REGION_C)]
    pub bound: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct LocusArgs {
    #[arg(long, default_value_t = 64)]
    pub n_probe: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct HullArgs {
    #[arg(long, default_value_t = 1000)]
    pub sets: usize,
    #[arg(long, default_value_t = 3)]
    pub min_size: usize,
    #[arg(long, default_value_t = 100)]
    pub max_size: usize,
    #[arg(long, default_value_t = 8.0)]
    pub r_max: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AreaArgs {
    /// Sample conditioned to have a nucleus or skeleton vertex at the origin.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = 8)]
    pub k_max: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DistanceArgs {
    /// Voronoi dual graph with positions.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GeodesicArgs {
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, value_delimiter = ',', default_values_t = [4.0, 6.0, 8.0])]
    pub radii: Vec<f64>,
    #[arg(long, default_value_t = 100)]
    pub seeds: u64,
    /// Window radius beyond the largest probe radius, also used as core margin.
    #[arg(long, default_value_t = 4.0)]
    pub margin: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ZTailArgs {
    #[arg(long, default_value_t = 3.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.1)]
    pub beta: f64,
    #[arg(long, default_value_t = 0.003)]
    pub eps: f64,
    #[arg(long, value_delimiter = ',', default_values_t = [10, 20, 40])]
    pub k_grid: Vec<u32>,
    #[arg(long, default_value_t = 1_000_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PlanarArgs {
    #[arg(long, default_value_t = 60)]
    pub sets: u64,
    #[arg(long, default_value_t = 6)]
    pub max_size: usize,
    #[arg(long, default_value_t = PLANAR_C)]
    pub c: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BiasArg {
    Degree,
    Uniform,
}

#[derive(Debug, Args)]
pub struct ReversibilityArgs {
    /// Voronoi dual graphs; trials cycle through them.
    #[arg(long = "in", required = true, num_args = 1..)]
    pub inputs: Vec<PathBuf>,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, value_enum, default_value_t = BiasArg::Degree)]
    pub bias: BiasArg,
    #[arg(long, default_value_t = 0.05)]
    pub threshold: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

fn report(name: &str, seed: u64, trials: u64, rows: Vec<ReportRow>) -> VerificationReport {
    VerificationReport {
        name: name.into(),
        seed,
        trials,
        rows,
    }
}

fn bounded(mut row: ReportRow, bound: f64, pass: bool) -> ReportRow {
    row.bound = Some(bound);
    row.pass = pass;
    row
}

pub fn run(exec: Exec, cmd: VerifyCommand) -> CliResult<()> {
    let (out, rep) = match cmd {
        VerifyCommand::Tail(a) => {
            let t = verify::tail_triangle(exec, a.lambda, &a.r_grid, a.trials, a.seed)?;
            (a.out, t.report())
        }
        VerifyCommand::Region(a) => (a.out.clone(), region(exec, &a)?),
        VerifyCommand::Locus(a) => {
            let mut rows = Vec::new();
            for i in 0..10 {
                let x = 0.05 + 0.1 * i as f64;
                for j in 1..=10 {
                    let alpha = verify::locus_alpha_max(x) * j as f64 / 11.0;
                    let dev = verify::locus_check(x, alpha, a.n_probe)?;
                    rows.push(bounded(ReportRow::new(&[("x_e", x), ("alpha", alpha)], dev), 1e-6, dev < 1e-6));
                }
            }
            (a.out, report("locus", 0, a.n_probe as u64, rows))
        }
        VerifyCommand::Ell(a) => {
            let mut rows = Vec::new();
            for i in 1..10 {
                let x = 0.1 * i as f64;
                for j in 0..=8 {
                    let phi = FRAC_PI_2 * j as f64 / 8.0;
                    let dev = verify::ell_formulas(x, phi)?.max_deviation();
                    rows.push(bounded(ReportRow::new(&[("x_e", x), ("phi", phi)], dev), 1e-10, dev < 1e-10));
                }
            }
            (a.out, report("ell_formulas", 0, 0, rows))
        }
        VerifyCommand::PhiStar(a) => {
            let mut rows = Vec::new();
            for i in 0..7 {
                let x = 0.3 + 0.1 * i as f64;
                for &theta in &[1e-4, 1e-3, 1e-2] {
                    let p = verify::phi_star_check(x, theta)?;
                    let dev = p.deviation();
                    rows.push(bounded(ReportRow::new(&[("x_e", x), ("theta", theta)], dev), 1e-9, dev < 1e-9));
                    let ratio = p.bound_ratio(x, theta);
                    let params = [("x_e", x), ("theta", theta), ("c_prime", PHI_STAR_C)];
                    rows.push(bounded(ReportRow::new(&params, ratio), PHI_STAR_C, ratio <= PHI_STAR_C));
                }
            }
            (a.out, report("phi_star", 0, 0, rows))
        }
        VerifyCommand::Hull(a) => {
            let h = verify::hull_bound(exec, a.sets, (a.min_size, a.max_size), a.r_max, a.seed)?;
            let params = [("sets", a.sets as f64), ("r_max", a.r_max), ("window_violations", h.window_violations as f64)];
            let row = bounded(
                ReportRow::new(&params, h.worst_ratio),
                1.0,
                h.worst_ratio <= 1.0 && h.window_violations == 0,
            );
            (a.out, report("hull_bound", a.seed, a.sets as u64, vec![row]))
        }
        VerifyCommand::Area(a) => {
            let s = load_sample(&a.input)?;
            let c = tess::delaunay(&s)?;
            let scan = verify::strong_area_scan(exec, &c, a.k_max)?;
            let rows = scan
                .min_mean_area
                .iter()
                .zip(&scan.collections)
                .enumerate()
                .filter_map(|(i, (m, &n))| {
                    m.map(|m| {
                        let mut row = ReportRow::new(&[("k", (i + 1) as f64), ("collections", n as f64)], m);
                        row.pass = m > 0.0;
                        row
                    })
                })
                .collect();
            (a.out, report("strong_area", s.seed, 0, rows))
        }
        VerifyCommand::Distance(a) => {
            let g = load_graph(&a.input)?;
            let rows = verify::distance_compare(&g)?
                .into_iter()
                .map(|r| {
                    let mut row = ReportRow::new(&[("r", r.r as f64), ("vertices", r.vertices as f64)], r.min_ratio);
                    row.pass = r.min_ratio > 0.0;
                    row
                })
                .collect();
            (a.out, report("distance_compare", 0, 0, rows))
        }
        VerifyCommand::Geodesic(a) => return geodesic(exec, &a),
        VerifyCommand::ZTail(a) => (a.out.clone(), z_tail(exec, &a)?),
        VerifyCommand::Planar(a) => (a.out.clone(), planar(&a)?),
        VerifyCommand::Reversibility(a) => {
            let graphs = a.inputs.iter().map(|p| load_graph(p)).collect::<CliResult<Vec<_>>>()?;
            let bias = match a.bias {
                BiasArg::Degree => RootBias::Degree,
                BiasArg::Uniform => RootBias::Uniform,
            };
            let r = walk::reversibility_test(exec, &graphs, bias, a.trials, a.seed)?;
            let row = bounded(
                ReportRow::new(&[("graphs", graphs.len() as f64)], r.tv),
                a.threshold,
                r.tv < a.threshold,
            );
            (a.out, report("reversibility", a.seed, a.trials, vec![row]))
        }
    };
    write_atomic(&out, io::report_to_json(&rep).as_bytes())
}

fn region(exec: Exec, a: &RegionArgs) -> CliResult<VerificationReport> {
    let mut rows = Vec::new();
    for &x in &a.x_grid {
        for &theta in &a.theta_grid {
            let e = verify::geometry_region(exec, x, theta, a.window_r, a.trials, a.seed)?;
            // Same normalization as the ratio: d(0, x) |B(0, r)| / theta.
            let scale = 2.0 * x.atanh() * ball_area(a.window_r) / theta;
            let mut row = ReportRow::new(&[("x_e", x), ("theta", theta), ("window_r", a.window_r)], e.ratio);
            row.ci_low = Some(e.ci_low * scale);
            row.ci_high = Some(e.ci_high * scale);
            rows.push(bounded(row, a.bound, e.ratio <= a.bound));
        }
    }
    Ok(report("geometry_region", a.seed, a.trials, rows))
}

fn z_tail(exec: Exec, a: &ZTailArgs) -> CliResult<VerificationReport> {
    let k_max = a.k_grid.iter().copied().max().ok_or_else(|| CliError::invalid("k_grid", "empty grid"))?;
    let p = ZParams::new(a.alpha, a.beta, a.seed)?;
    let scheme = Scheme::strip(k_max)?;
    let mut rows: Vec<ReportRow> = Vec::new();
    for &k in &a.k_grid {
        let t = schemes::z_tail(exec, &p, &scheme, k, a.eps, a.trials)?;
        let mut row = ReportRow::new(&[("k", k as f64), ("eps", a.eps), ("alpha", a.alpha), ("beta", a.beta)], t.p_hat());
        let (lo, hi) = wilson_interval(t.hits, t.trials);
        row.ci_low = Some(lo);
        row.ci_high = Some(hi);
        row.pass = rows.last().is_none_or(|prev| row.value <= prev.value);
        rows.push(row);
    }
    Ok(report("z_tail", a.seed, a.trials, rows))
}

fn planar(a: &PlanarArgs) -> CliResult<VerificationReport> {
    if a.max_size < 3 || a.max_size > schemes::MAX_PLANAR_POINTS {
        return Err(CliError::invalid(
            "max_size",
            format!("{} is not in [3, {}]", a.max_size, schemes::MAX_PLANAR_POINTS),
        ));
    }
    let span = (a.max_size - 2) as u64;
    let mut rows = Vec::new();
    for set in 0..a.sets {
        let k = 3 + (set % span) as usize;
        let mut g = rng::stream(a.seed, domain::VERIFY, set);
        let r = 0.5 + 7.5 * g.random::<f64>();
        let pts: Vec<HPoint> = (0..k)
            .map(|_| HPoint::polar(radial_inverse_cdf(g.random(), r), g.random::<f64>() * TAU))
            .collect();
        let n = schemes::count_planar_pairs(&pts, true)?;
        let kf = k as f64;
        let value = (n as f64).powf(1.0 / kf) / kf;
        let row = ReportRow::new(&[("size", kf), ("r", r), ("count", n as f64)], value);
        rows.push(bounded(row, a.c, value <= a.c));
    }
    Ok(report("planar_pairs", a.seed, a.sets, rows))
}

fn geodesic(exec: Exec, a: &GeodesicArgs) -> CliResult<()> {
    let r_max = a.radii.iter().copied().fold(f64::NAN, f64::max);
    if !(r_max >= 0.0) {
        return Err(CliError::invalid("radii", "need at least one nonnegative radius"));
    }
    let mut csv = String::from("r,seed,d_r\n");
    for seed in 0..a.seeds {
        let s = ppp::condition_root(&ppp::sample_ball_exec(exec, a.lambda, r_max + a.margin, seed)?)?;
        let c = tess::delaunay_with_margin(&s, a.margin)?;
        let g = tess::dual_voronoi_graph(&c)?;
        for &r in &a.radii {
            let d = verify::geodesic_deviation(&g, r)?;
            csv.push_str(&format!("{r},{seed},{d}\n"));
        }
    }
    write_atomic(&a.out, csv.as_bytes())
}
