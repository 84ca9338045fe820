//! Numerical checks of the geometric and probabilistic estimates: closed-form
//! locus and intersection formulas, Monte Carlo tail and region
//! probabilities, hull areas, strongly connected patch areas and
//! graph-versus-hyperbolic distances.
//!
//! Every check is a pure function of its parameters and seed.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::exec::Exec;
use crate::graph::{bfs_distances, enumerate_connected, DualGraph, LocalGraph, SubsetVisitor, UNREACHABLE};
use crate::hypgeo::{
    ball_area, circumdisk, convex_hull_h, dist_h, polygon_area_h, triangle_area, HPoint, RAD_CAP,
};
use crate::ppp::{poisson_count, radial_inverse_cdf, radial_inverse_cdf_annulus, Conditioning, Sample};
use crate::rng::{self, domain};
use crate::schemes::patch_shape;
use crate::tess::{self, DelaunayComplex};
use crate::{Error, Result};

/// Largest collection size accepted by [`strong_area_scan`].
pub const MAX_SCAN_SIZE: usize = 12;
/// Threshold below which the tail exponent predicts no events.
pub const TAIL_NEGLIGIBLE: f64 = 1e-6;
/// Radius of the first ball sampled by the origin-star sampler.
pub const STAR_START_RADIUS: f64 = 4.0;
/// Width of each additional shell.
pub const STAR_SHELL_WIDTH: f64 = 2.0;
/// The sampler gives up beyond this radius.
pub const STAR_MAX_RADIUS: f64 = 16.0;
/// Normal quantile for two-sided 95% intervals.
const Z95: f64 = 1.959_963_984_540_054;

/// One grid point of a verification run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub params: BTreeMap<String, f64>,
    pub value: f64,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub bound: Option<f64>,
    pub pass: bool,
}

impl ReportRow {
    pub fn new(params: &[(&str, f64)], value: f64) -> ReportRow {
        ReportRow {
            params: params.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
            value,
            ci_low: None,
            ci_high: None,
            bound: None,
            pass: true,
        }
    }
}

/// Outcome of a verifier over a parameter grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub name: String,
    pub seed: u64,
    pub trials: u64,
    pub rows: Vec<ReportRow>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

/// Wilson score interval for `hits` successes out of `n`.
pub fn wilson_interval(hits: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = hits as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    if hits == 0 {
        return (0.0, (center + half).min(1.0));
    }
    ((center - half).max(0.0), (center + half).min(1.0))
}

fn check_unit(name: &'static str, x: f64) -> Result<()> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::invalid(name, format!("{x} is not in (0, 1)")));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Tail of the origin star.

/// `3r/4 - lambda pi e^(r/4)`, the log of the star tail bound up to a constant.
pub fn tail_exponent(lambda: f64, r: f64) -> f64 {
    0.75 * r - lambda * PI * (0.25 * r).exp()
}

/// First radius beyond which the tail exponent stays below `ln 1e-6`.
pub fn tail_negligible_radius(lambda: f64) -> f64 {
    tess::default_core_margin(lambda)
}

/// Star radius of the origin for the root-conditioned process, exact for the
/// process on the whole plane.
///
/// Points are drawn in a ball and then in successive shells. Once the star
/// closes and every circumdisk of its triangles lies inside the sampled
/// ball, no outside point can change it.
pub fn origin_star_radius(lambda: f64, seed: u64, trial: u64) -> Result<f64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::invalid("lambda", format!("{lambda} is not a positive intensity")));
    }
    let key = rng::derive(seed, trial);
    let mut points = vec![HPoint::ORIGIN];
    let mut inner = 0.0;
    let mut outer = STAR_START_RADIUS;
    for shell in 0u64.. {
        let n = poisson_count(lambda * (ball_area(outer) - ball_area(inner)), key, shell);
        for i in 0..n {
            let mut g = rng::stream(key, domain::SHELL, (shell << 32) | i);
            let u: f64 = g.random();
            let t: f64 = g.random();
            points.push(HPoint::polar(radial_inverse_cdf_annulus(u, inner, outer), t * TAU));
        }
        let s = Sample::from_points(lambda, outer, key, Conditioning::RootAtOrigin, points)?;
        let c = tess::delaunay_with_margin(&s, 0.0)?;
        let star = tess::triangle_star(&c, 0)?;
        let settled = star.is_closed(&c, 0)
            && star
                .triangles
                .iter()
                .all(|&t| c.circumdisk(t).max_rad_h() < outer);
        if settled {
            return Ok(star.radius);
        }
        if outer + STAR_SHELL_WIDTH > STAR_MAX_RADIUS {
            return Err(Error::guard("star radius", outer + STAR_SHELL_WIDTH, STAR_MAX_RADIUS));
        }
        points = s.points;
        inner = outer;
        outer += STAR_SHELL_WIDTH;
    }
    unreachable!()
}

/// Counts of `S_0 ⊄ B(0, r)` per radius over independent trials.
#[derive(Clone, Debug, PartialEq)]
pub struct TailEvents {
    pub lambda: f64,
    pub r_grid: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
    pub events: Vec<u64>,
}

impl TailEvents {
    pub fn p_hat(&self) -> Vec<f64> {
        self.events.iter().map(|&e| e as f64 / self.trials as f64).collect()
    }

    /// Rows pass when the count does not exceed the previous one, and is zero
    /// once the exponent drops below `ln 1e-6`.
    pub fn report(&self) -> VerificationReport {
        let mut rows = Vec::new();
        for (i, (&r, &e)) in self.r_grid.iter().zip(&self.events).enumerate() {
            let mut row = ReportRow::new(&[("lambda", self.lambda), ("r", r)], e as f64 / self.trials as f64);
            let (lo, hi) = wilson_interval(e, self.trials);
            row.ci_low = Some(lo);
            row.ci_high = Some(hi);
            let bound = tail_exponent(self.lambda, r).exp();
            row.bound = Some(bound);
            row.pass = (i == 0 || e <= self.events[i - 1]) && (bound >= TAIL_NEGLIGIBLE || e == 0);
            rows.push(row);
        }
        VerificationReport {
            name: "tail_triangle".into(),
            seed: self.seed,
            trials: self.trials,
            rows,
        }
    }
}

/// Star tail events for each `r` in `r_grid`, one origin star per trial.
pub fn tail_triangle(exec: Exec, lambda: f64, r_grid: &[f64], trials: u64, seed: u64) -> Result<TailEvents> {
    if let Some(&r) = r_grid.iter().find(|&&r| !(r > 0.0) || r + STAR_SHELL_WIDTH > RAD_CAP) {
        return Err(Error::invalid("r_grid", format!("radius {r} is outside (0, RAD_CAP - margin]")));
    }
    let radii = exec.map(trials as usize, |t| origin_star_radius(lambda, seed, t as u64));
    let radii = radii.into_iter().collect::<Result<Vec<f64>>>()?;
    let events = r_grid
        .iter()
        .map(|&r| radii.iter().filter(|&&s| s > r).count() as u64)
        .collect();
    Ok(TailEvents {
        lambda,
        r_grid: r_grid.to_vec(),
        trials,
        seed,
        events,
    })
}

// ---------------------------------------------------------------------------
// Thin Delaunay triangles on a fixed edge.

/// Estimate of the probability that a uniform third point spans a thin
/// triangle with a circumdisk.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegionEstimate {
    pub hits: u64,
    pub trials: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// `p_hat * d(x, y) * |B(0, r)| / theta`.
    pub ratio: f64,
    /// Same with the Euclidean coordinate of `x` in place of `d(x, y)`.
    pub ratio_e: f64,
}

/// Hit probability for `y = 0`, `x = x_e` on the real axis and `z` uniform
/// in `B(0, window_r)`.
pub fn geometry_region(exec: Exec, x_e: f64, theta: f64, window_r: f64, trials: u64, seed: u64) -> Result<RegionEstimate> {
    check_unit("x_e", x_e)?;
    if !(theta >= 0.0) || !theta.is_finite() {
        return Err(Error::invalid("theta", format!("{theta} is not a nonnegative area")));
    }
    if !(window_r > 0.0 && window_r <= RAD_CAP) {
        return Err(Error::invalid("window_r", format!("{window_r} is not in (0, RAD_CAP]")));
    }
    if trials == 0 {
        return Err(Error::invalid("trials", "must be positive"));
    }
    let x = HPoint::from_poincare(x_e, 0.0)?;
    let y = HPoint::ORIGIN;
    let hits = exec.count(trials as usize, |i| {
        let mut g = rng::stream(seed, domain::TRIAL, i as u64);
        let u: f64 = g.random();
        let t: f64 = g.random();
        let z = HPoint::polar(radial_inverse_cdf(u, window_r), t * TAU);
        u64::from(triangle_area(&x, &y, &z) <= theta && circumdisk(&x, &y, &z).is_some())
    });
    let p_hat = hits as f64 / trials as f64;
    let (ci_low, ci_high) = wilson_interval(hits, trials);
    let scale = ball_area(window_r) / theta;
    Ok(RegionEstimate {
        hits,
        trials,
        p_hat,
        ci_low,
        ci_high,
        ratio: p_hat * dist_h(&x, &y) * scale,
        ratio_e: p_hat * x_e * scale,
    })
}

// ---------------------------------------------------------------------------
// Closed-form geometry of the thin-triangle region.

/// Largest `|area(0, x, y) - alpha|` over `n_probe` points `y` evenly spread
/// on the part inside the disk of the ray from `1/x_e` at angle `alpha/2`
/// above the negative real axis.
pub fn locus_check(x_e: f64, alpha: f64, n_probe: usize) -> Result<f64> {
    check_unit("x_e", x_e)?;
    if !(alpha > 0.0 && alpha < PI) {
        return Err(Error::invalid("alpha", format!("{alpha} is not in (0, pi)")));
    }
    let (s0, s1) = locus_chord(x_e, alpha)?;
    let x = HPoint::from_poincare(x_e, 0.0)?;
    let (dx, dy) = (-(0.5 * alpha).cos(), (0.5 * alpha).sin());
    let mut worst: f64 = 0.0;
    for j in 0..n_probe {
        let s = s0 + (s1 - s0) * (j as f64 + 0.5) / n_probe as f64;
        let y = HPoint::from_poincare(1.0 / x_e + s * dx, s * dy)?;
        worst = worst.max((triangle_area(&HPoint::ORIGIN, &x, &y) - alpha).abs());
    }
    Ok(worst)
}

/// Parameters along the locus ray where it is inside the unit disk.
fn locus_chord(x_e: f64, alpha: f64) -> Result<(f64, f64)> {
    let a = 1.0 / x_e;
    let c = (0.5 * alpha).cos();
    // |a + s d|^2 = 1 with d = (-c, sin): s^2 - 2ac s + a^2 - 1 = 0.
    let disc = a * a * c * c - (a * a - 1.0);
    if !(disc > 0.0) {
        return Err(Error::invalid(
            "alpha",
            format!("the ray at angle {} misses the disk for x_e = {x_e}", 0.5 * alpha),
        ));
    }
    let r = disc.sqrt();
    Ok((a * c - r, a * c + r))
}

/// Largest `alpha` whose locus ray still meets the disk.
pub fn locus_alpha_max(x_e: f64) -> f64 {
    2.0 * x_e.clamp(0.0, 1.0).asin()
}

/// Distances from 0 along the ray at angle `phi` to the circle on `[0, x]`
/// and to the horocycle through 0 and `x`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EllPair {
    pub closed_form: (f64, f64),
    pub intersection: (f64, f64),
}

impl EllPair {
    pub fn max_deviation(&self) -> f64 {
        (self.closed_form.0 - self.intersection.0)
            .abs()
            .max((self.closed_form.1 - self.intersection.1).abs())
    }
}

/// Center and radius of the horocycle through 0 and `x_e`: the circle through
/// both points tangent to the unit circle from inside, centered above the axis.
pub fn horocycle(x_e: f64) -> ([f64; 2], f64) {
    let h = 0.5 * x_e;
    // |c| + rho = 1 with rho^2 = h^2 + k^2 gives k = sqrt(1 - 4h^2) / 2.
    let k = 0.5 * (1.0 - 4.0 * h * h).sqrt();
    ([h, k], h.hypot(k))
}

/// Nonzero root `t` of `|t u - c| = rho` for a unit `u`, where the circle
/// passes through the origin.
fn second_hit_through_origin(u: [f64; 2], c: [f64; 2], rho: f64) -> f64 {
    // t^2 - 2 t (u.c) + |c|^2 - rho^2 = 0, and the constant vanishes up to
    // rounding; solve the full quadratic anyway.
    let b = u[0] * c[0] + u[1] * c[1];
    let q = c[0] * c[0] + c[1] * c[1] - rho * rho;
    let disc = (b * b - q).max(0.0);
    b + disc.sqrt()
}

pub fn ell_formulas(x_e: f64, phi: f64) -> Result<EllPair> {
    check_unit("x_e", x_e)?;
    if !(0.0..=FRAC_PI_2).contains(&phi) {
        return Err(Error::invalid("phi", format!("{phi} is not in [0, pi/2]")));
    }
    let closed_form = (
        x_e * phi.cos(),
        x_e * phi.cos() + (1.0 - x_e * x_e).sqrt() * phi.sin(),
    );
    let u = [phi.cos(), phi.sin()];
    let (hc, hr) = horocycle(x_e);
    let intersection = (
        second_hit_through_origin(u, [0.5 * x_e, 0.0], 0.5 * x_e),
        second_hit_through_origin(u, hc, hr),
    );
    Ok(EllPair {
        closed_form,
        intersection,
    })
}

/// `phi*`, the angle at 0 between `x` and the first point where the locus ray
/// of area `theta` meets the circle on `[0, x]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhiStar {
    pub closed_form: f64,
    pub intersection: f64,
}

impl PhiStar {
    pub fn deviation(&self) -> f64 {
        (self.closed_form - self.intersection).abs()
    }

    /// `sin(2 phi*) / (theta (1 - x))`, bounded on `x > delta` by a constant.
    pub fn bound_ratio(&self, x_e: f64, theta: f64) -> f64 {
        (2.0 * self.closed_form).sin() / (theta * (1.0 - x_e))
    }
}

pub fn phi_star_check(x_e: f64, theta: f64) -> Result<PhiStar> {
    check_unit("x_e", x_e)?;
    if !(theta > 0.0 && theta < PI) {
        return Err(Error::invalid("theta", format!("{theta} is not in (0, pi)")));
    }
    let (sh, ch) = (0.5 * theta).sin_cos();
    let z = (2.0 - x_e * x_e) / (x_e * x_e);
    let inner = 1.0 - z * z * sh * sh;
    // Ray from 1/x with direction (-ch, sh) against the circle on [0, x]:
    // |1/x - x/2 + s d|^2 = (x/2)^2.
    let a = 1.0 / x_e - 0.5 * x_e;
    let disc = a * a * ch * ch - (a * a - 0.25 * x_e * x_e);
    if !(inner > 0.0) || !(disc > 0.0) {
        return Err(Error::invalid(
            "theta",
            format!("the locus ray for theta = {theta} does not cross the circle on [0, {x_e}] twice"),
        ));
    }
    let closed_form = 0.5 * (sh * (z * ch - inner.sqrt())).asin();
    let s = a * ch - disc.sqrt();
    let w0 = [1.0 / x_e - s * ch, s * sh];
    let intersection = w0[1].atan2(w0[0]);
    Ok(PhiStar {
        closed_form,
        intersection,
    })
}

// ---------------------------------------------------------------------------
// Convex hull areas.

/// `Vol(conv S) / (4 pi |S|)`.
pub fn hull_ratio(points: &[HPoint]) -> Result<f64> {
    if points.len() < 3 {
        return Err(Error::invalid("points", format!("need at least 3 points, got {}", points.len())));
    }
    Ok(polygon_area_h(&convex_hull_h(points))? / (4.0 * PI * points.len() as f64))
}

/// Worst hull ratios over random point sets.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HullSummary {
    pub sets: usize,
    pub worst_ratio: f64,
    /// Worst `|B(0, r)| / (4 pi |S|)` over the same sets, the trivial bound.
    pub worst_window_ratio: f64,
    /// Sets whose ratio exceeded the trivial window bound.
    pub window_violations: usize,
}

/// `sets` random sets: set `i` has a size uniform in `sizes` and uniform
/// points in `B(0, r)` with `r` uniform in `(0, r_max]`.
pub fn hull_bound(exec: Exec, sets: usize, sizes: (usize, usize), r_max: f64, seed: u64) -> Result<HullSummary> {
    if sizes.0 < 3 || sizes.1 < sizes.0 {
        return Err(Error::invalid("sizes", format!("{sizes:?} is not a range starting at 3 or more")));
    }
    if !(r_max > 0.0 && r_max <= RAD_CAP) {
        return Err(Error::invalid("r_max", format!("{r_max} is not in (0, RAD_CAP]")));
    }
    let per_set = exec.map(sets, |i| -> Result<(f64, f64)> {
        let mut g = rng::stream(seed, domain::VERIFY, i as u64);
        let n = g.random_range(sizes.0..=sizes.1);
        let r = r_max * (1.0 - g.random::<f64>());
        let pts: Vec<HPoint> = (0..n)
            .map(|_| {
                let u: f64 = g.random();
                let t: f64 = g.random();
                HPoint::polar(radial_inverse_cdf(u, r), t * TAU)
            })
            .collect();
        Ok((hull_ratio(&pts)?, ball_area(r) / (4.0 * PI * n as f64)))
    });
    let mut summary = HullSummary {
        sets,
        worst_ratio: 0.0,
        worst_window_ratio: 0.0,
        window_violations: 0,
    };
    for res in per_set {
        let (ratio, window) = res?;
        summary.worst_ratio = summary.worst_ratio.max(ratio);
        summary.worst_window_ratio = summary.worst_window_ratio.max(window);
        // Hull and window areas are both computed, so allow rounding.
        if ratio > window * (1.0 + 1e-9) {
            summary.window_violations += 1;
        }
    }
    Ok(summary)
}

// ---------------------------------------------------------------------------
// Strongly connected patches through the origin.

struct AreaVisitor<'a> {
    local: &'a LocalGraph,
    triangles: &'a [[u32; 3]],
    areas: &'a [f64],
    sum: f64,
    min: Vec<Option<f64>>,
    counted: Vec<u64>,
    scratch: Vec<usize>,
}

impl SubsetVisitor for AreaVisitor<'_> {
    fn enter(&mut self, v: u32, _set: &[u32]) {
        self.sum += self.areas[self.local.global[v as usize] as usize];
    }

    fn leave(&mut self, v: u32, _set: &[u32]) {
        self.sum -= self.areas[self.local.global[v as usize] as usize];
    }

    fn visit(&mut self, set: &[u32]) {
        self.scratch.clear();
        self.scratch
            .extend(set.iter().map(|&v| self.local.global[v as usize] as usize));
        if !patch_shape(self.triangles, &self.scratch).simply_connected() {
            return;
        }
        let k = set.len();
        self.counted[k - 1] += 1;
        let mean = self.sum / k as f64;
        let slot = &mut self.min[k - 1];
        if slot.is_none_or(|m| mean < m) {
            *slot = Some(mean);
        }
    }
}

/// Per-size minimum of the mean triangle area.
#[derive(Clone, Debug, PartialEq)]
pub struct AreaScan {
    pub root_triangle: u32,
    /// Indexed by size - 1.
    pub min_mean_area: Vec<Option<f64>>,
    /// Simply connected collections seen per size.
    pub collections: Vec<u64>,
}

/// Exact scan over connected collections of Delaunay triangles of size at
/// most `k_max` that contain the triangle at the origin and have a simply
/// connected union.
pub fn strong_area_scan(exec: Exec, c: &DelaunayComplex<'_>, k_max: usize) -> Result<AreaScan> {
    if k_max > MAX_SCAN_SIZE {
        return Err(Error::guard("k_max", k_max as f64, MAX_SCAN_SIZE as f64));
    }
    if k_max == 0 {
        return Err(Error::invalid("k_max", "must be at least 1"));
    }
    let g = tess::dual_delaunay_graph(c)?;
    let root = g.root();
    let pts = c.points();
    let areas: Vec<f64> = c
        .triangles()
        .iter()
        .map(|t| triangle_area(&pts[t[0] as usize], &pts[t[1] as usize], &pts[t[2] as usize]))
        .collect();
    let local = LocalGraph::ball(&g, root, k_max - 1);
    let visitors = enumerate_connected(exec, &local, k_max, || AreaVisitor {
        local: &local,
        triangles: c.triangles(),
        areas: &areas,
        sum: 0.0,
        min: vec![None; k_max],
        counted: vec![0; k_max],
        scratch: Vec::new(),
    });
    let mut min_mean_area: Vec<Option<f64>> = vec![None; k_max];
    let mut collections = vec![0; k_max];
    for v in visitors {
        for k in 0..k_max {
            collections[k] += v.counted[k];
            if let Some(m) = v.min[k] {
                if min_mean_area[k].is_none_or(|cur| m < cur) {
                    min_mean_area[k] = Some(m);
                }
            }
        }
    }
    Ok(AreaScan {
        root_triangle: root,
        min_mean_area,
        collections,
    })
}

// ---------------------------------------------------------------------------
// Graph distance against hyperbolic distance.

/// Minimum of `d_G(root, v) / d(root, v)` over core vertices in one annulus.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnnulusRatio {
    /// The annulus is `[r, r + 1)` in hyperbolic distance from the root.
    pub r: u32,
    pub min_ratio: f64,
    pub vertices: usize,
}

/// Per-annulus minima over core vertices other than the root.
pub fn distance_compare(g: &DualGraph) -> Result<Vec<AnnulusRatio>> {
    let root = g.root();
    let origin = *g
        .position(root)
        .ok_or_else(|| Error::invalid("graph", "distance comparison needs vertex positions"))?;
    let dist = bfs_distances(g, root);
    let mut by_annulus: BTreeMap<u32, (f64, usize)> = BTreeMap::new();
    for v in 0..g.n() as u32 {
        if v == root || !g.is_core(v) || dist[v as usize] == UNREACHABLE {
            continue;
        }
        let dh = dist_h(&origin, &g.geometry()[v as usize]);
        if !(dh > 0.0) {
            continue;
        }
        let ratio = dist[v as usize] as f64 / dh;
        let e = by_annulus.entry(dh.floor() as u32).or_insert((f64::INFINITY, 0));
        e.0 = e.0.min(ratio);
        e.1 += 1;
    }
    Ok(by_annulus
        .into_iter()
        .map(|(r, (min_ratio, vertices))| AnnulusRatio { r, min_ratio, vertices })
        .collect())
}

// ---------------------------------------------------------------------------
// Deviation of graph geodesics from the origin.

/// Nucleus whose Voronoi cell contains `p` (smallest index on ties).
pub fn cell_containing(points: &[HPoint], p: &HPoint) -> Option<u32> {
    let mut best: Option<(f64, u32)> = None;
    for (i, q) in points.iter().enumerate() {
        let d = dist_h(p, q);
        if best.is_none_or(|(b, _)| d < b) {
            best = Some((d, i as u32));
        }
    }
    best.map(|(_, i)| i)
}

/// Graph distance from the cell of 0 to a shortest graph path between the
/// cells of `-r` and `r`. Parents are the smallest-index predecessor, so the
/// path is deterministic.
pub fn geodesic_deviation(g: &DualGraph, r: f64) -> Result<u32> {
    let pts = g.geometry();
    if pts.is_empty() {
        return Err(Error::invalid("graph", "geodesic deviation needs vertex positions"));
    }
    if !(r >= 0.0 && r < RAD_CAP) {
        return Err(Error::invalid("r", format!("{r} is not in [0, RAD_CAP)")));
    }
    let cell = |p: HPoint| -> Result<u32> {
        let v = cell_containing(pts, &p).expect("nonempty");
        if !g.is_core(v) {
            return Err(Error::invalid("r", format!("the cell containing {p:?} is not in the core")));
        }
        Ok(v)
    };
    let a = cell(HPoint::polar(r, PI))?;
    let b = cell(HPoint::polar(r, 0.0))?;
    let o = cell(HPoint::ORIGIN)?;
    let from_a = bfs_distances(g, a);
    if from_a[b as usize] == UNREACHABLE {
        return Err(Error::invalid("r", "the two cells are not connected"));
    }
    let from_o = bfs_distances(g, o);
    let mut v = b;
    let mut best = from_o[v as usize];
    while v != a {
        let d = from_a[v as usize];
        v = *g
            .neighbors(v)
            .iter()
            .filter(|&&w| from_a[w as usize] + 1 == d)
            .min()
            .expect("bfs predecessor");
        best = best.min(from_o[v as usize]);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures;
    use crate::ppp::{condition_root, sample_ball};

    #[test]
    fn wilson_contains_the_estimate() {
        let (lo, hi) = wilson_interval(30, 100);
        assert!(lo < 0.3 && 0.3 < hi);
        assert_eq!(wilson_interval(0, 100).0, 0.0);
        assert!(wilson_interval(0, 10_000).1 < 4e-4);
    }

    #[test]
    fn locus_is_exact() {
        for &x in &[0.1, 0.4, 0.8, 0.95] {
            let amax = locus_alpha_max(x);
            for j in 1..10 {
                let a = amax * j as f64 / 10.0;
                assert!(locus_check(x, a, 50).unwrap() < 1e-9, "x={x} a={a}");
            }
            assert!(locus_check(x, amax * 1.01, 5).is_err());
        }
    }

    #[test]
    fn locus_hugs_the_axis_for_small_alpha() {
        let (s0, s1) = locus_chord(0.5, 1e-6).unwrap();
        assert!((s0 - 1.0).abs() < 1e-9 && (s1 - 3.0).abs() < 1e-9);
        assert!(locus_check(0.5, 1e-4, 20).unwrap() < 1e-9);
    }

    #[test]
    fn ell_endpoints() {
        let e = ell_formulas(0.6, 0.0).unwrap();
        assert!((e.closed_form.0 - 0.6).abs() < 1e-15 && (e.closed_form.1 - 0.6).abs() < 1e-15);
        let e = ell_formulas(0.6, FRAC_PI_2).unwrap();
        assert!(e.closed_form.0.abs() < 1e-15 && (e.closed_form.1 - 0.8).abs() < 1e-15);
        for i in 0..=20 {
            for &x in &[0.05, 0.5, 0.99] {
                let e = ell_formulas(x, FRAC_PI_2 * i as f64 / 20.0).unwrap();
                assert!(e.max_deviation() < 1e-12);
            }
        }
    }

    #[test]
    fn horocycle_is_tangent() {
        for &x in &[0.1, 0.5, 0.9] {
            let (c, r) = horocycle(x);
            assert!((c[0].hypot(c[1]) + r - 1.0).abs() < 1e-15);
            assert!((c[0].hypot(c[1]) - r).abs() < 1e-15);
            assert!(((c[0] - x).hypot(c[1]) - r).abs() < 1e-15);
        }
    }

    #[test]
    fn phi_star_agrees_and_vanishes() {
        for &x in &[0.3, 0.6, 0.9] {
            for &t in &[1e-4, 1e-3, 1e-2] {
                let p = phi_star_check(x, t).unwrap();
                assert!(p.deviation() < 1e-9, "x={x} t={t}: {p:?}");
                assert!(p.closed_form > 0.0);
            }
        }
        assert!(phi_star_check(0.6, 1e-9).unwrap().closed_form < 1e-7);
        // The ray misses the circle for wide angles when x is small.
        assert!(phi_star_check(0.3, 1.0).is_err());
    }

    #[test]
    fn hull_ratios() {
        let collinear: Vec<HPoint> = (0..5).map(|i| HPoint::polar(0.3 * i as f64, 1.0)).collect();
        assert_eq!(hull_ratio(&collinear).unwrap(), 0.0);
        let s = hull_bound(Exec::Parallel, 100, (50, 50), 8.0, 1).unwrap();
        assert!(s.worst_ratio <= 1.0);
        assert_eq!(s.window_violations, 0);
        assert_eq!(s, hull_bound(Exec::Sequential, 100, (50, 50), 8.0, 1).unwrap());
    }

    #[test]
    fn star_sampler_is_deterministic_and_local() {
        let a = origin_star_radius(1.0, 3, 7).unwrap();
        assert_eq!(a, origin_star_radius(1.0, 3, 7).unwrap());
        assert!(a > 0.0 && a < STAR_START_RADIUS);
        // Sparse processes need the shells.
        assert!(origin_star_radius(0.05, 3, 7).unwrap() > 0.0);
    }

    #[test]
    fn tail_decreases_and_denser_is_thinner() {
        let grid = [1.0, 1.5, 2.0, 3.0];
        let t1 = tail_triangle(Exec::Parallel, 1.0, &grid, 400, 5).unwrap();
        let t2 = tail_triangle(Exec::Parallel, 2.0, &grid, 400, 5).unwrap();
        assert!(t1.report().passed(), "{:?}", t1.events);
        assert!(t1.events[0] > t1.events[2]);
        for (a, b) in t1.events.iter().zip(&t2.events) {
            assert!(b <= a, "{:?} vs {:?}", t1.events, t2.events);
        }
        assert_eq!(t1, tail_triangle(Exec::Sequential, 1.0, &grid, 400, 5).unwrap());
    }

    #[test]
    fn region_vanishes_at_zero_theta() {
        let e = geometry_region(Exec::Parallel, 0.5, 0.0, 2.0, 1000, 1).unwrap();
        assert_eq!(e.hits, 0);
        let e = geometry_region(Exec::Parallel, 0.5, 0.1, 2.0, 20_000, 1).unwrap();
        assert!(e.hits > 0 && e.ci_low <= e.p_hat && e.p_hat <= e.ci_high);
    }

    #[test]
    fn area_scan_on_a_sample() {
        let s = condition_root(&sample_ball(1.0, 5.0, 2).unwrap()).unwrap();
        let c = tess::delaunay(&s).unwrap();
        let scan = strong_area_scan(Exec::Parallel, &c, 6).unwrap();
        let t = c.triangles()[scan.root_triangle as usize];
        let p = c.points();
        let a1 = triangle_area(&p[t[0] as usize], &p[t[1] as usize], &p[t[2] as usize]);
        assert!((scan.min_mean_area[0].unwrap() - a1).abs() < 1e-15);
        assert!(scan.min_mean_area.iter().all(|m| m.unwrap() > 0.0));
        assert_eq!(scan.collections[0], 1);
        assert_eq!(scan.collections[1], 3);
        assert_eq!(scan, strong_area_scan(Exec::Sequential, &c, 6).unwrap());
        assert!(strong_area_scan(Exec::Parallel, &c, 13).is_err());
    }

    #[test]
    fn distance_ratios() {
        let s = condition_root(&sample_ball(1.0, 9.0, 4).unwrap()).unwrap();
        let c = tess::delaunay(&s).unwrap();
        let g = tess::dual_voronoi_graph(&c).unwrap();
        let rows = distance_compare(&g).unwrap();
        assert!(!rows.is_empty());
        assert!(rows.iter().all(|r| r.min_ratio > 0.0 && r.min_ratio.is_finite()));
        // Root neighbors have ratio 1 / d.
        let root_pos = g.geometry()[0];
        for &w in g.neighbors(0) {
            let d = dist_h(&root_pos, &g.geometry()[w as usize]);
            let row = rows.iter().find(|r| r.r == d.floor() as u32).unwrap();
            assert!(row.min_ratio <= 1.0 / d + 1e-15);
        }
        assert!(distance_compare(&fixtures::path(3)).is_err());
    }

    #[test]
    fn deviation_bounds() {
        let s = condition_root(&sample_ball(1.0, 10.0, 6).unwrap()).unwrap();
        let c = tess::delaunay(&s).unwrap();
        let g = tess::dual_voronoi_graph(&c).unwrap();
        assert_eq!(geodesic_deviation(&g, 0.0).unwrap(), 0);
        for r in [1.0, 2.0] {
            let d = geodesic_deviation(&g, r).unwrap();
            let a = cell_containing(g.geometry(), &HPoint::polar(r, PI)).unwrap();
            assert!(d <= bfs_distances(&g, 0)[a as usize]);
        }
    }
}
