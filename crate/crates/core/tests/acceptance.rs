//! Acceptance suite. Each criterion prints one `PASS` or `FAIL` line with
//! its measured values and runtime; the process exits non-zero if any fails.
//!
//! Run everything with `cargo test -p hypvoro --test acceptance`, or a subset
//! with `cargo test -p hypvoro --test acceptance -- 3 7`.

use std::collections::BTreeSet;
use std::f64::consts::{PI, TAU};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use num_rational::Ratio;
use rand::Rng;

use hypvoro::exec::Exec;
use hypvoro::graph::{min_expansion_core, DualGraph, GraphKind};
use hypvoro::hypgeo::{ball_area, dist_h, HPoint};
use hypvoro::io;
use hypvoro::ppp::{condition_root, radial_inverse_cdf, sample_ball, sample_ball_exec, Conditioning, Sample};
use hypvoro::rng::{self, domain};
use hypvoro::schemes::{count_planar_pairs, enumerate_schemes, patch_shape, z_tail, Scheme, ZParams};
use hypvoro::tess::{self, delaunay, delaunay_bruteforce};
use hypvoro::verify::{
    ell_formulas, hull_bound, locus_alpha_max, locus_check, phi_star_check, tail_negligible_radius, tail_triangle,
};
use hypvoro::walk::{
    boundary_convergence, reversibility_test, speed_estimate, tree_ensemble, walk_ensemble, GraphSpace, RootBias,
    WalkTrace,
};

/// Calibrated on fixed-seed grids (worst observed value times 1.5).
const C_PHI_STAR: f64 = 21.7;
const C_PLANAR: f64 = 0.92;
const Z_EPS: f64 = 0.003;

const SEED: u64 = 20_240_601;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn exec() -> Exec {
    Exec::default()
}

fn rooted(lambda: f64, r: f64, seed: u64) -> Sample {
    condition_root(&sample_ball(lambda, r, seed).unwrap()).unwrap()
}

/// Simpson's rule with `n` (even) panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|i| f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 }).sum();
    (f(a) + f(b) + inner) * h / 3.0
}

fn c1_closed_forms() -> Outcome {
    // Oracle: integrate the circumference 2 pi sinh s instead of using cosh.
    let mut worst: f64 = 0.0;
    for &r in &[0.5, 1.0, 2.0, 5.0] {
        let oracle = simpson(|s| TAU * s.sinh(), 0.0, r, 20_000);
        worst = worst.max((ball_area(r) - oracle).abs() / oracle.max(1.0));
    }
    let half = HPoint::from_poincare(0.5, 0.0).unwrap();
    let d = dist_h(&HPoint::polar(0.0, 0.0), &half);
    let d_err = (d - 3f64.ln()).abs();
    let a1 = ball_area(1.0);
    let a2 = ball_area(2.0);
    // The quoted four-decimal targets: only the second matches 2 pi (cosh r - 1).
    let quoted = [(a1, 3.4616), (a2, 17.3552)];
    let quoted_gap: Vec<String> = quoted.iter().map(|(v, q)| format!("{:.2e}", (v - q).abs())).collect();
    outcome(
        worst < 1e-9 && d_err < 1e-9,
        format!(
            "ball_area(1)={a1:.6} ball_area(2)={a2:.6} max rel err vs quadrature {worst:.1e}; \
             dist_h(0,0.5)-ln3={d_err:.1e}; gap to quoted 3.4616/17.3552 = {}",
            quoted_gap.join("/")
        ),
    )
}

fn c2_delaunay_oracle() -> Outcome {
    let mut mismatches = 0;
    let mut sizes = (usize::MAX, 0);
    for seed in 0..200u64 {
        let r = 1.0 + 5.0 * (seed % 11) as f64 / 10.0;
        let n = 3 + (seed % 38) as usize;
        let mut g = rng::stream(SEED, domain::VERIFY, seed);
        let points: Vec<HPoint> = (0..n)
            .map(|_| HPoint::polar(radial_inverse_cdf(g.random(), r), g.random::<f64>() * TAU))
            .collect();
        let s = Sample::from_points(1.0, r, seed, Conditioning::None, points).unwrap();
        sizes = (sizes.0.min(n), sizes.1.max(n));
        let fast = delaunay(&s).unwrap();
        let slow = delaunay_bruteforce(&s).unwrap();
        if fast.triangles() != slow.triangles() {
            mismatches += 1;
        }
    }
    outcome(
        mismatches == 0,
        format!("200 point sets of {}..={} points, {mismatches} triangle-set mismatches", sizes.0, sizes.1),
    )
}

fn c3_locus() -> Outcome {
    let mut worst: f64 = 0.0;
    for i in 0..10 {
        let x = 0.05 + 0.1 * i as f64;
        for j in 1..=10 {
            let alpha = locus_alpha_max(x) * j as f64 / 11.0;
            worst = worst.max(locus_check(x, alpha, 64).unwrap());
        }
    }
    outcome(worst < 1e-6, format!("max area deviation {worst:.2e} on 10x10 grid (tol 1e-6)"))
}

fn c4_formulas() -> Outcome {
    let mut ell: f64 = 0.0;
    let mut g = rng::stream(SEED, domain::VERIFY, 4);
    for _ in 0..200 {
        let x = 0.01 + 0.98 * g.random::<f64>();
        let phi = g.random::<f64>() * PI / 2.0;
        ell = ell.max(ell_formulas(x, phi).unwrap().max_deviation());
    }
    let mut phi_dev: f64 = 0.0;
    let mut bound: f64 = 0.0;
    for i in 0..7 {
        let x = 0.3 + 0.1 * i as f64;
        for &theta in &[1e-4, 1e-3, 1e-2] {
            let p = phi_star_check(x, theta).unwrap();
            phi_dev = phi_dev.max(p.deviation());
            bound = bound.max(p.bound_ratio(x, theta));
        }
    }
    outcome(
        ell < 1e-9 && phi_dev < 1e-9 && bound <= C_PHI_STAR,
        format!(
            "ell max dev {ell:.1e}, phi* max dev {phi_dev:.1e} (tol 1e-9); \
             sin(2phi*)/(theta(1-x)) max {bound:.3} <= C'={C_PHI_STAR}"
        ),
    )
}

fn c5_hull() -> Outcome {
    let h = hull_bound(exec(), 1000, (3, 100), 8.0, SEED).unwrap();
    outcome(
        h.worst_ratio <= 1.0 && h.window_violations == 0,
        format!(
            "{} sets, worst Vol(conv)/(4pi|S|) = {:.4}, window-bound violations {}",
            h.sets, h.worst_ratio, h.window_violations
        ),
    )
}

fn c6_tail() -> Outcome {
    let r_star = tail_negligible_radius(1.0);
    let grid = [2.0, 2.5, 3.0, 3.5, r_star];
    let t = tail_triangle(exec(), 1.0, &grid, 10_000, SEED).unwrap();
    let decreasing = t.events[..4].windows(2).all(|w| w[1] < w[0]);
    let p: Vec<String> = t.p_hat().iter().map(|p| format!("{p:.4}")).collect();
    outcome(
        decreasing && t.events[4] == 0,
        format!(
            "P[S0 not in B(0,r)] at r=2,2.5,3,3.5,{r_star:.3} over {} trials: {}",
            t.trials,
            p.join(", ")
        ),
    )
}

fn strip(k: u32) -> Vec<[u32; 3]> {
    (0..k).map(|i| [i, i + 1, i + 2]).collect()
}

fn fan(n: u32, closed: bool) -> Vec<[u32; 3]> {
    let m = if closed { n } else { n - 1 };
    (0..m).map(|i| [0, 1 + i, 1 + (i + 1) % n]).collect()
}

fn c7_regularity() -> Outcome {
    let mut bad = 0usize;
    let mut core = 0usize;
    for seed in 0..50u64 {
        let s = rooted(1.0, 10.0, seed);
        let c = delaunay(&s).unwrap();
        let g = tess::dual_delaunay_graph(&c).unwrap();
        for v in 0..g.n() as u32 {
            if g.is_core(v) {
                core += 1;
                bad += usize::from(g.degree(v) != 3);
            }
        }
    }
    let mut euler_bad = 0;
    let fixtures = [fan(12, false), fan(20, true), fan(3, true), strip(1), strip(15)];
    for tris in &fixtures {
        for i in 1..=tris.len() {
            let set: Vec<usize> = (0..i).collect();
            let sh = patch_shape(tris, &set);
            if sh.edges - sh.triangles != sh.vertices - 1 {
                euler_bad += 1;
            }
        }
    }
    outcome(
        bad == 0 && core > 0 && euler_bad == 0,
        format!("{core} core D-vertices over 50 samples, {bad} not of degree 3; {euler_bad} fan/strip prefixes with e-k != |X|-1"),
    )
}

fn c8_tree_speed() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for d in 3..=5usize {
        let traces = tree_ensemble(exec(), d, 200, 400, SEED + d as u64).unwrap();
        let s = speed_estimate(&traces, 400, SEED).unwrap();
        let target = (d - 2) as f64 / d as f64;
        pass &= (s.mean - target).abs() <= 0.02;
        parts.push(format!("d={d}: {:.4} vs {target:.4}", s.mean));
    }
    outcome(pass, parts.join(", "))
}

/// Walk ensembles on five `r = 14` windows, shared by criteria 9 and 14.
struct LargeWindows {
    d_traces: Vec<WalkTrace>,
    v_traces: Vec<WalkTrace>,
}

const LARGE_R: f64 = 14.0;
const LARGE_SAMPLES: u64 = 5;
const WALKS_PER_SAMPLE: usize = 40;

fn large_windows() -> &'static LargeWindows {
    static CELL: OnceLock<LargeWindows> = OnceLock::new();
    CELL.get_or_init(|| {
        let mut d_traces = Vec::new();
        let mut v_traces = Vec::new();
        for i in 0..LARGE_SAMPLES {
            // One window in memory at a time.
            let s = rooted(1.0, LARGE_R, rng::derive(SEED, i));
            let (gv, gd) = {
                let c = delaunay(&s).unwrap();
                (tess::dual_voronoi_graph(&c).unwrap(), tess::dual_delaunay_graph(&c).unwrap())
            };
            drop(s);
            let walk_seed = rng::derive(SEED ^ 0x77, i);
            for (g, out) in [(&gv, &mut v_traces), (&gd, &mut d_traces)] {
                let space = GraphSpace::new(g, g.root()).unwrap();
                out.extend(walk_ensemble(exec(), &space, WALKS_PER_SAMPLE, 1000, walk_seed));
            }
        }
        LargeWindows { d_traces, v_traces }
    })
}

/// Largest `k` that at least 95% of the traces reach.
fn k_eval_95(traces: &[WalkTrace]) -> usize {
    let mut steps: Vec<usize> = traces.iter().map(WalkTrace::steps).collect();
    steps.sort_unstable();
    steps[(0.05 * steps.len() as f64).floor() as usize]
}

fn c9_speed() -> Outcome {
    let w = large_windows();
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, traces) in [("D", &w.d_traces), ("V", &w.v_traces)] {
        let k = k_eval_95(traces).max(1);
        let s = speed_estimate(traces, k, SEED).unwrap();
        pass &= s.is_valid() && s.excludes_zero();
        parts.push(format!(
            "{name}: k_eval={k} speed {:.3} CI [{:.3}, {:.3}] ({} of {} excluded)",
            s.mean,
            s.ci_low,
            s.ci_high,
            s.excluded,
            traces.len()
        ));
    }
    outcome(pass, parts.join("; "))
}

/// `(median oscillation at k0 = 1, median oscillation at the start of the
/// last quarter)` over traces long enough to have both.
fn oscillation_drop(traces: &[WalkTrace], take: usize) -> (f64, f64, usize) {
    let mut first = Vec::new();
    let mut last = Vec::new();
    for t in traces.iter().take(take) {
        let prof = boundary_convergence(t).unwrap();
        let Some(&(k0, a)) = prof.first() else { continue };
        let q = (3 * t.steps()).div_ceil(4);
        let Some(&(kq, b)) = prof.iter().find(|&&(j, _)| j >= q) else { continue };
        if kq <= k0 {
            continue;
        }
        first.push(a);
        last.push(b);
    }
    let median = |v: &mut Vec<f64>| {
        v.sort_by(f64::total_cmp);
        v[v.len() / 2]
    };
    let n = first.len();
    (median(&mut first), median(&mut last), n)
}

fn c14_boundary() -> Outcome {
    let w = large_windows();
    let per = 100 / LARGE_SAMPLES as usize;
    let pick = |traces: &[WalkTrace]| -> Vec<WalkTrace> {
        traces.chunks(WALKS_PER_SAMPLE).flat_map(|c| c[..per].to_vec()).collect()
    };
    let v = pick(&w.v_traces);
    let d = pick(&w.d_traces);
    let (v0, v1, vn) = oscillation_drop(&v, 100);
    let (d0, d1, dn) = oscillation_drop(&d, 100);
    let vf = v0 / v1;
    outcome(
        vf >= 4.0,
        format!(
            "V: median oscillation {v0:.4} at k0=1 -> {v1:.4} in last quarter, factor {vf:.2} over {vn} walks; \
             D (diagnostic): {d0:.4} -> {d1:.4}, factor {:.2} over {dn} walks",
            d0 / d1
        ),
    )
}

fn c10_expansion() -> Outcome {
    const M: usize = 10;
    let mut ensemble: Vec<Option<Ratio<u64>>> = vec![None; M];
    let mut nonpositive = 0;
    let mut missing = 0;
    let mut seed_violations = 0;
    for seed in 0..50u64 {
        let s = rooted(1.0, 10.0, seed);
        let g = {
            let c = delaunay(&s).unwrap();
            tess::dual_voronoi_graph(&c).unwrap()
        };
        let rep = min_expansion_core(exec(), &g, g.root(), M).unwrap();
        let mut prev: Option<Ratio<u64>> = None;
        for (i, m) in rep.per_size.iter().enumerate() {
            let Some(m) = m else {
                missing += 1;
                continue;
            };
            let r = m.ratio();
            nonpositive += usize::from(m.boundary == 0);
            if prev.is_some_and(|p| r > p) {
                seed_violations += 1;
            }
            prev = Some(r);
            if ensemble[i].is_none_or(|e| r < e) {
                ensemble[i] = Some(r);
            }
        }
    }
    let mins: Vec<Ratio<u64>> = ensemble.iter().flatten().copied().collect();
    let monotone = mins.len() == M && mins.windows(2).all(|w| w[1] <= w[0]);
    let shown: Vec<String> = mins.iter().map(|r| format!("{r}")).collect();
    outcome(
        nonpositive == 0 && missing == 0 && monotone,
        format!(
            "ensemble minima by size 1..{M}: [{}]; nonpositive {nonpositive}, missing {missing}, \
             per-seed increases {seed_violations}",
            shown.join(", ")
        ),
    )
}

fn c11_schemes() -> Outcome {
    let n3 = enumerate_schemes(3).unwrap().len();
    let n4 = enumerate_schemes(4).unwrap().len();
    let mut worst: f64 = 0.0;
    let mut over = 0;
    for set in 0..60u64 {
        let k = 3 + (set % 4) as usize;
        let mut g = rng::stream(SEED, domain::VERIFY, 1_000 + set);
        let r = 0.5 + 7.5 * g.random::<f64>();
        let pts: Vec<HPoint> = (0..k)
            .map(|_| HPoint::polar(radial_inverse_cdf(g.random(), r), g.random::<f64>() * TAU))
            .collect();
        let n = count_planar_pairs(&pts, true).unwrap();
        let kf = k as f64;
        over += usize::from(n as f64 > (C_PLANAR * kf).powf(kf));
        worst = worst.max((n as f64).powf(1.0 / kf) / kf);
    }
    outcome(
        n3 == 1 && n4 == 3 && over == 0,
        format!("schemes k=3: {n3}, k=4: {n4}; 60 sets |X|<=6: max count^(1/k)/k {worst:.4} vs C={C_PLANAR}, {over} above (Ck)^k"),
    )
}

fn c12_z_tail() -> Outcome {
    let p = ZParams::new(3.0, 0.1, SEED).unwrap();
    let scheme = Scheme::strip(40).unwrap();
    let a = z_tail(exec(), &p, &scheme, 10, Z_EPS, 1_000_000).unwrap();
    let b = z_tail(exec(), &p, &scheme, 40, Z_EPS, 1_000_000).unwrap();
    let factor = a.p_hat() / b.p_hat();
    outcome(
        factor >= 10.0,
        format!(
            "eps={Z_EPS}: P(k=10) {:.3e}, P(k=40) {:.3e}, decay factor {factor:.1} (>= 10)",
            a.p_hat(),
            b.p_hat()
        ),
    )
}

fn star(leaves: u32) -> DualGraph {
    let edges: Vec<(u32, u32)> = (1..=leaves).map(|v| (0, v)).collect();
    let n = leaves as usize + 1;
    DualGraph::from_edges(GraphKind::Synthetic, n, &edges, 0, vec![true; n], vec![]).unwrap()
}

fn c13_reversibility() -> Outcome {
    let graphs: Vec<DualGraph> = (0..20u64)
        .map(|i| {
            let s = rooted(1.0, 12.0, rng::derive(SEED ^ 0x13, i));
            let c = delaunay(&s).unwrap();
            tess::dual_voronoi_graph(&c).unwrap()
        })
        .collect();
    let deg = reversibility_test(exec(), &graphs, RootBias::Degree, 100_000, SEED).unwrap();
    let unif = reversibility_test(exec(), &graphs, RootBias::Uniform, 100_000, SEED).unwrap();
    let control = reversibility_test(exec(), &[star(5)], RootBias::Uniform, 100_000, SEED).unwrap();
    outcome(
        deg.tv < 0.05 && control.tv > 0.2,
        format!(
            "V (20 windows r=12): degree-biased TV {:.4} (< 0.05), uniform-root TV {:.4}; star control TV {:.4} (> 0.2)",
            deg.tv, unif.tv, control.tv
        ),
    )
}

fn pipeline(exec: Exec) -> String {
    let s = condition_root(&sample_ball_exec(exec, 1.0, 10.0, SEED).unwrap()).unwrap();
    let c = delaunay(&s).unwrap();
    let g = tess::dual_voronoi_graph(&c).unwrap();
    let rep = min_expansion_core(exec, &g, g.root(), 8).unwrap();
    let mut out = io::sample_to_json(&s);
    out.push_str(&io::graph_to_json(&g));
    out.push_str(&io::expansion_to_json(&rep));
    out
}

fn c15_determinism() -> Outcome {
    let reference = pipeline(Exec::Sequential);
    let mut runs = 1;
    let mut differ = 0;
    let mut configs: Vec<String> = vec!["sequential".into()];
    #[cfg(feature = "parallel")]
    for threads in [1, 2, 4] {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        for _ in 0..3 {
            runs += 1;
            differ += usize::from(pool.install(|| pipeline(Exec::Parallel)) != reference);
        }
        configs.push(format!("{threads} threads x3"));
    }
    outcome(
        differ == 0,
        format!(
            "{runs} runs ({}), {} bytes of JSON, {differ} differ from the sequential run",
            configs.join(", "),
            reference.len()
        ),
    )
}

type Criterion = (u32, u64, fn() -> Outcome);

const CRITERIA: [Criterion; 15] = [
    (1, 1, c1_closed_forms),
    (2, 120, c2_delaunay_oracle),
    (3, 30, c3_locus),
    (4, 30, c4_formulas),
    (5, 120, c5_hull),
    (6, 600, c6_tail),
    (7, 300, c7_regularity),
    (8, 60, c8_tree_speed),
    (9, 900, c9_speed),
    (10, 600, c10_expansion),
    (11, 300, c11_schemes),
    (12, 300, c12_z_tail),
    (13, 600, c13_reversibility),
    (14, 300, c14_boundary),
    (15, 120, c15_determinism),
];

fn main() {
    let wanted: BTreeSet<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = Vec::new();
    for &(id, budget, f) in &CRITERIA {
        if !wanted.is_empty() && !wanted.contains(&id) {
            continue;
        }
        let t0 = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f));
        let elapsed = t0.elapsed();
        let in_time = elapsed <= Duration::from_secs(budget);
        let (pass, detail) = match result {
            Ok(o) => (o.pass && in_time, o.detail),
            Err(e) => {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                (false, format!("panicked: {msg}"))
            }
        };
        let tag = if pass { "PASS" } else { "FAIL" };
        let late = if in_time { "" } else { " over budget" };
        println!("{tag} criterion {id}: {detail} [{:.1}s of {budget}s{late}]", elapsed.as_secs_f64());
        if !pass {
            failed.push(id);
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
