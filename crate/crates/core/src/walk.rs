//! Simple random walk on rooted graphs: traces, speed estimates, boundary
//! convergence, harmonic measure and the degree-biased reversibility check.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::TAU;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::exec::Exec;
use crate::graph::{bfs_distances, DualGraph, UNREACHABLE};
use crate::hypgeo::HPoint;
use crate::rng::{self, domain};
use crate::{Error, Result};

/// Maximum share of excluded traces for a speed estimate to count as valid.
pub const MAX_EXCLUDED_SHARE: f64 = 0.05;
/// Bootstrap resamples behind the speed confidence interval.
pub const BOOTSTRAP_RESAMPLES: usize = 2000;

/// Graph seen by a walker. Vertices may be created lazily, hence `&mut`.
pub trait WalkSpace {
    fn degree(&mut self, v: u32) -> usize;
    fn neighbor(&mut self, v: u32, i: usize) -> u32;
    fn dist_to_root(&self, v: u32) -> u32;
    fn is_core(&self, _v: u32) -> bool {
        true
    }
    fn position(&self, _v: u32) -> Option<HPoint> {
        None
    }
}

/// A [`DualGraph`] with distances from a fixed root.
#[derive(Clone, Debug)]
pub struct GraphSpace<'g> {
    g: &'g DualGraph,
    root: u32,
    dist: Vec<u32>,
}

impl<'g> GraphSpace<'g> {
    pub fn new(g: &'g DualGraph, root: u32) -> Result<Self> {
        if root as usize >= g.n() {
            return Err(Error::invalid("root", format!("{root} is not a vertex")));
        }
        Ok(GraphSpace {
            g,
            root,
            dist: bfs_distances(g, root),
        })
    }

    pub fn root(&self) -> u32 {
        self.root
    }

    pub fn graph(&self) -> &'g DualGraph {
        self.g
    }
}

impl WalkSpace for &GraphSpace<'_> {
    fn degree(&mut self, v: u32) -> usize {
        self.g.degree(v)
    }

    fn neighbor(&mut self, v: u32, i: usize) -> u32 {
        self.g.neighbors(v)[i]
    }

    fn dist_to_root(&self, v: u32) -> u32 {
        self.dist[v as usize]
    }

    fn is_core(&self, v: u32) -> bool {
        self.g.is_core(v)
    }

    fn position(&self, v: u32) -> Option<HPoint> {
        self.g.position(v).copied()
    }
}

/// The infinite `d`-regular tree rooted at vertex 0, grown on demand.
#[derive(Clone, Debug)]
pub struct RegularTree {
    d: usize,
    parent: Vec<u32>,
    depth: Vec<u32>,
    children: HashMap<(u32, usize), u32>,
}

impl RegularTree {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::invalid("d", format!("{d}-regular tree needs d >= 2")));
        }
        Ok(RegularTree {
            d,
            parent: vec![u32::MAX],
            depth: vec![0],
            children: HashMap::new(),
        })
    }
}

impl WalkSpace for RegularTree {
    fn degree(&mut self, _v: u32) -> usize {
        self.d
    }

    /// Neighbor 0 is the parent for every vertex but the root.
    fn neighbor(&mut self, v: u32, i: usize) -> u32 {
        let is_root = v == 0;
        if !is_root && i == 0 {
            return self.parent[v as usize];
        }
        if let Some(&c) = self.children.get(&(v, i)) {
            return c;
        }
        let c = self.parent.len() as u32;
        self.parent.push(v);
        self.depth.push(self.depth[v as usize] + 1);
        self.children.insert((v, i), c);
        c
    }

    fn dist_to_root(&self, v: u32) -> u32 {
        self.depth[v as usize]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StopReason {
    StepsExhausted,
    /// The last vertex is the first non-core vertex visited.
    LeftCore,
    /// The root has no neighbors.
    Isolated,
}

impl StopReason {
    pub fn as_str(self) -> &'static str {
        match self {
            StopReason::StepsExhausted => "steps-exhausted",
            StopReason::LeftCore => "left-core",
            StopReason::Isolated => "isolated",
        }
    }
}

/// A walk `X_0, ..., X_k` with per-step distances and geometry.
#[derive(Clone, Debug, PartialEq)]
pub struct WalkTrace {
    pub vertices: Vec<u32>,
    /// `d_G(root, X_j)`.
    pub dist: Vec<u32>,
    pub positions: Vec<Option<HPoint>>,
    pub stop: StopReason,
}

impl WalkTrace {
    /// Number of steps taken.
    pub fn steps(&self) -> usize {
        self.vertices.len() - 1
    }

    /// Boundary angle of `X_j`, undefined at the origin or without geometry.
    pub fn angle(&self, j: usize) -> Option<f64> {
        let p = self.positions[j]?;
        (!p.is_origin()).then(|| p.theta().rem_euclid(TAU))
    }

    /// Angle of the last vertex where it is defined.
    pub fn terminal_angle(&self) -> Option<f64> {
        (0..self.vertices.len()).rev().find_map(|j| self.angle(j))
    }
}

/// Walk from `root` with uniform neighbor choices drawn from `rng`.
pub fn walk_in<S: WalkSpace>(mut space: S, root: u32, max_steps: usize, rng: &mut ChaCha8Rng) -> WalkTrace {
    let mut vertices = vec![root];
    let mut dist = vec![space.dist_to_root(root)];
    let mut positions = vec![space.position(root)];
    let mut v = root;
    let stop = if space.degree(root) == 0 {
        StopReason::Isolated
    } else if !space.is_core(root) {
        StopReason::LeftCore
    } else {
        let mut stop = StopReason::StepsExhausted;
        for _ in 0..max_steps {
            let deg = space.degree(v);
            v = space.neighbor(v, rng.random_range(0..deg));
            vertices.push(v);
            dist.push(space.dist_to_root(v));
            positions.push(space.position(v));
            if !space.is_core(v) {
                stop = StopReason::LeftCore;
                break;
            }
        }
        stop
    };
    WalkTrace {
        vertices,
        dist,
        positions,
        stop,
    }
}

/// One walk on `g` from `root`, seeded by `(seed, walk index 0)`.
pub fn simple_walk(g: &DualGraph, root: u32, max_steps: usize, seed: u64) -> Result<WalkTrace> {
    let space = GraphSpace::new(g, root)?;
    Ok(walk_in(&space, root, max_steps, &mut rng::stream(seed, domain::WALK, 0)))
}

/// `n_walks` independent walks from the same root; walk `i` uses stream `i`.
pub fn walk_ensemble(exec: Exec, space: &GraphSpace<'_>, n_walks: usize, max_steps: usize, seed: u64) -> Vec<WalkTrace> {
    exec.map(n_walks, |i| {
        walk_in(space, space.root(), max_steps, &mut rng::stream(seed, domain::WALK, i as u64))
    })
}

/// Walks on fresh copies of the `d`-regular tree.
pub fn tree_ensemble(exec: Exec, d: usize, n_walks: usize, max_steps: usize, seed: u64) -> Result<Vec<WalkTrace>> {
    RegularTree::new(d)?;
    Ok(exec.map(n_walks, |i| {
        let tree = RegularTree::new(d).expect("checked above");
        walk_in(tree, 0, max_steps, &mut rng::stream(seed, domain::WALK, i as u64))
    }))
}

/// Mean of `d_G(root, X_k)/k` with a bootstrap percentile interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpeedEstimate {
    pub k_eval: usize,
    pub mean: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub eligible: usize,
    pub excluded: usize,
}

impl SpeedEstimate {
    /// Whether at most the allowed share of traces stopped early.
    pub fn is_valid(&self) -> bool {
        (self.excluded as f64) <= MAX_EXCLUDED_SHARE * (self.eligible + self.excluded) as f64
    }

    pub fn excludes_zero(&self) -> bool {
        self.ci_low > 0.0
    }
}

/// Speed at `k_eval` over the traces that lasted that long.
pub fn speed_estimate(traces: &[WalkTrace], k_eval: usize, seed: u64) -> Result<SpeedEstimate> {
    if k_eval == 0 {
        return Err(Error::invalid("k_eval", "must be positive"));
    }
    let values: Vec<f64> = traces
        .iter()
        .filter(|t| t.steps() >= k_eval && t.dist[k_eval] != UNREACHABLE)
        .map(|t| t.dist[k_eval] as f64 / k_eval as f64)
        .collect();
    if values.is_empty() {
        return Err(Error::invalid("traces", format!("no trace reaches step {k_eval}")));
    }
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let mut r = rng::stream(seed, domain::BOOTSTRAP, 0);
    let mut means: Vec<f64> = (0..BOOTSTRAP_RESAMPLES)
        .map(|_| (0..n).map(|_| values[r.random_range(0..n)]).sum::<f64>() / n as f64)
        .collect();
    means.sort_by(f64::total_cmp);
    let q = |p: f64| means[((p * (BOOTSTRAP_RESAMPLES - 1) as f64).round()) as usize];
    Ok(SpeedEstimate {
        k_eval,
        mean,
        ci_low: q(0.025),
        ci_high: q(0.975),
        eligible: n,
        excluded: traces.len() - n,
    })
}

fn circ_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Oscillation profile `(k0, sup_{j,l >= k0} |theta(X_j) - theta(X_l)|)`
/// for `k0 >= 1` where the angle is defined, with circular distances.
/// Nonincreasing in `k0`.
pub fn boundary_convergence(trace: &WalkTrace) -> Result<Vec<(usize, f64)>> {
    if trace.positions.iter().all(Option::is_none) {
        return Err(Error::invalid("trace", "the walk carries no geometric labels"));
    }
    let angles: Vec<(usize, f64)> = (1..trace.vertices.len())
        .filter_map(|j| trace.angle(j).map(|a| (j, a)))
        .collect();
    let mut out = vec![(0, 0.0); angles.len()];
    let mut sup: f64 = 0.0;
    for i in (0..angles.len()).rev() {
        let a = angles[i].1;
        for &(_, b) in &angles[i + 1..] {
            sup = sup.max(circ_dist(a, b));
        }
        out[i] = (angles[i].0, sup);
    }
    Ok(out)
}

/// Empirical law of terminal angles over equal bins of the circle.
#[derive(Clone, Debug, PartialEq)]
pub struct AngleHistogram {
    pub counts: Vec<u64>,
    pub total: u64,
}

impl AngleHistogram {
    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn bin_center(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * TAU / self.counts.len() as f64
    }

    pub fn mass(&self) -> Vec<f64> {
        self.counts.iter().map(|&c| c as f64 / self.total as f64).collect()
    }

    /// Largest over smallest bin mass; infinite with an empty bin.
    pub fn max_min_ratio(&self) -> f64 {
        let max = *self.counts.iter().max().unwrap_or(&0) as f64;
        let min = *self.counts.iter().min().unwrap_or(&0) as f64;
        max / min
    }
}

pub fn bin_of(angle: f64, bins: usize) -> usize {
    ((angle.rem_euclid(TAU) / TAU * bins as f64) as usize).min(bins - 1)
}

/// Histogram of terminal angles; traces without one are skipped.
pub fn harmonic_measure(traces: &[WalkTrace], bins: usize) -> Result<AngleHistogram> {
    if bins == 0 {
        return Err(Error::invalid("bins", "need at least one bin"));
    }
    let mut counts = vec![0u64; bins];
    for a in traces.iter().filter_map(WalkTrace::terminal_angle) {
        counts[bin_of(a, bins)] += 1;
    }
    let total = counts.iter().sum();
    if total == 0 {
        return Err(Error::invalid("traces", "no trace has a terminal angle"));
    }
    Ok(AngleHistogram { counts, total })
}

/// How the root of each reversibility trial is drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RootBias {
    /// Proportional to degree among core vertices.
    Degree,
    /// Uniform among core vertices, for the control experiment.
    Uniform,
}

/// Empirical law of `(deg X_0, deg X_1)` and its asymmetry.
#[derive(Clone, Debug, PartialEq)]
pub struct Reversibility {
    pub trials: u64,
    pub joint: BTreeMap<(usize, usize), u64>,
    /// Total variation between the law and its transpose.
    pub tv: f64,
}

fn tv_of(joint: &BTreeMap<(usize, usize), f64>) -> f64 {
    0.5 * joint
        .iter()
        .map(|(&(a, b), &p)| (p - joint.get(&(b, a)).copied().unwrap_or(0.0)).abs())
        .sum::<f64>()
}

/// Root weights over core vertices with a positive degree.
fn root_table(g: &DualGraph, bias: RootBias) -> (Vec<u32>, Vec<f64>) {
    let mut verts = Vec::new();
    let mut cum = Vec::new();
    let mut acc = 0.0;
    for v in 0..g.n() as u32 {
        if g.is_core(v) && g.degree(v) > 0 {
            acc += match bias {
                RootBias::Degree => g.degree(v) as f64,
                RootBias::Uniform => 1.0,
            };
            verts.push(v);
            cum.push(acc);
        }
    }
    (verts, cum)
}

/// Exact law of `(deg X_0, deg X_1)` on one graph and its asymmetry.
pub fn exact_reversibility_tv(g: &DualGraph, bias: RootBias) -> Result<f64> {
    let (verts, cum) = root_table(g, bias);
    let total = *cum.last().ok_or_else(|| Error::invalid("graph", "no core vertex with neighbors"))?;
    let mut joint: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut prev = 0.0;
    for (i, &v) in verts.iter().enumerate() {
        let w = (cum[i] - prev) / total;
        prev = cum[i];
        let d = g.degree(v);
        for &u in g.neighbors(v) {
            *joint.entry((d, g.degree(u))).or_insert(0.0) += w / d as f64;
        }
    }
    Ok(tv_of(&joint))
}

/// Monte Carlo reversibility statistic over an ensemble of graphs. Trial `t`
/// picks graph `t mod len`, a root under `bias` and one uniform step.
pub fn reversibility_test(exec: Exec, graphs: &[DualGraph], bias: RootBias, trials: u64, seed: u64) -> Result<Reversibility> {
    if graphs.is_empty() || trials == 0 {
        return Err(Error::invalid("trials", "need at least one graph and one trial"));
    }
    let tables: Vec<(Vec<u32>, Vec<f64>)> = graphs.iter().map(|g| root_table(g, bias)).collect();
    if tables.iter().any(|(v, _)| v.is_empty()) {
        return Err(Error::invalid("graphs", "some graph has no core vertex with neighbors"));
    }
    let pairs = exec.map(trials as usize, |t| {
        let gi = t % graphs.len();
        let g = &graphs[gi];
        let (verts, cum) = &tables[gi];
        let mut r = rng::stream(seed, domain::ROOT_CHOICE, t as u64);
        let x = r.random::<f64>() * cum[cum.len() - 1];
        let i = cum.partition_point(|&c| c <= x).min(verts.len() - 1);
        let v = verts[i];
        let nb = g.neighbors(v);
        let u = nb[r.random_range(0..nb.len())];
        (g.degree(v), g.degree(u))
    });
    let mut joint: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    for p in pairs {
        *joint.entry(p).or_insert(0) += 1;
    }
    let freq: BTreeMap<(usize, usize), f64> = joint.iter().map(|(&k, &c)| (k, c as f64 / trials as f64)).collect();
    Ok(Reversibility {
        trials,
        tv: tv_of(&freq),
        joint,
    })
}
