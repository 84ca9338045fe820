//! Rooted graphs: distances, growth, boundary/volume functionals, exact
//! anchored-expansion search and isolated cores.

use std::cmp::Ordering;
use std::collections::VecDeque;

use num_rational::Ratio;

use crate::exec::Exec;
use crate::hypgeo::HPoint;
use crate::{Error, Result};

/// Largest subset size accepted by [`min_expansion`].
pub const MAX_EXPANSION_SIZE: usize = 14;
/// Largest set accepted by [`is_isolated_core`].
pub const MAX_CORE_SCAN: usize = 20;
/// Distance value for unreachable vertices.
pub const UNREACHABLE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GraphKind {
    /// Vertices are nuclei, edges are valid Delaunay edges.
    VoronoiDual,
    /// Vertices are Delaunay triangles, edges join triangles sharing a side.
    DelaunayDual,
    /// Test fixtures and synthetic graphs.
    Synthetic,
}

impl GraphKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GraphKind::VoronoiDual => "voronoi-dual",
            GraphKind::DelaunayDual => "delaunay-dual",
            GraphKind::Synthetic => "synthetic",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "voronoi-dual" => Ok(GraphKind::VoronoiDual),
            "delaunay-dual" => Ok(GraphKind::DelaunayDual),
            "synthetic" => Ok(GraphKind::Synthetic),
            other => Err(Error::invalid("kind", format!("unknown graph kind `{other}`"))),
        }
    }
}

/// Rooted simple graph in compressed adjacency form.
///
/// `geometry` is either empty or holds one label per vertex (nucleus
/// position or triangle circumcenter).
#[derive(Clone, Debug, PartialEq)]
pub struct DualGraph {
    kind: GraphKind,
    root: u32,
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
    core: Vec<bool>,
    geometry: Vec<HPoint>,
}

impl DualGraph {
    /// Build from per-vertex neighbor lists. Lists are sorted and checked for
    /// symmetry, self-loops and duplicates.
    pub fn from_adjacency(
        kind: GraphKind,
        mut adjacency: Vec<Vec<u32>>,
        root: u32,
        core: Vec<bool>,
        geometry: Vec<HPoint>,
    ) -> Result<DualGraph> {
        let n = adjacency.len();
        if core.len() != n {
            return Err(Error::invalid("core", format!("{} flags for {n} vertices", core.len())));
        }
        if !geometry.is_empty() && geometry.len() != n {
            return Err(Error::invalid("geometry", format!("{} labels for {n} vertices", geometry.len())));
        }
        if n > 0 && root as usize >= n {
            return Err(Error::invalid("root", format!("{root} is not a vertex of a graph with {n} vertices")));
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        let mut total = 0;
        for (v, list) in adjacency.iter_mut().enumerate() {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::invalid("adjacency", format!("vertex {v} has a repeated neighbor")));
            }
            if list.binary_search(&(v as u32)).is_ok() {
                return Err(Error::invalid("adjacency", format!("vertex {v} has a self-loop")));
            }
            if list.last().is_some_and(|&w| w as usize >= n) {
                return Err(Error::invalid("adjacency", format!("vertex {v} has an out-of-range neighbor")));
            }
            total += list.len();
            offsets.push(total);
        }
        for (v, list) in adjacency.iter().enumerate() {
            for &w in list {
                if adjacency[w as usize].binary_search(&(v as u32)).is_err() {
                    return Err(Error::invalid("adjacency", format!("edge {v}-{w} is not symmetric")));
                }
            }
        }
        let neighbors = adjacency.into_iter().flatten().collect();
        Ok(DualGraph {
            kind,
            root,
            offsets,
            neighbors,
            core,
            geometry,
        })
    }

    /// Build from an undirected edge list; duplicate edges are merged.
    pub fn from_edges(
        kind: GraphKind,
        n: usize,
        edges: &[(u32, u32)],
        root: u32,
        core: Vec<bool>,
        geometry: Vec<HPoint>,
    ) -> Result<DualGraph> {
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a as usize >= n || b as usize >= n {
                return Err(Error::invalid("edges", format!("edge {a}-{b} is out of range")));
            }
            if a == b {
                return Err(Error::invalid("edges", format!("self-loop at {a}")));
            }
            adjacency[a as usize].push(b);
            adjacency[b as usize].push(a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        DualGraph::from_adjacency(kind, adjacency, root, core, geometry)
    }

    /// Same graph with a different root.
    pub fn with_root(mut self, root: u32) -> Result<DualGraph> {
        if root as usize >= self.n() {
            return Err(Error::invalid("root", format!("{root} is not a vertex")));
        }
        self.root = root;
        Ok(self)
    }

    pub fn kind(&self) -> GraphKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    pub fn root(&self) -> u32 {
        self.root
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.neighbors[self.offsets[v as usize]..self.offsets[v as usize + 1]]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.offsets[v as usize + 1] - self.offsets[v as usize]
    }

    pub fn is_core(&self, v: u32) -> bool {
        self.core[v as usize]
    }

    pub fn core_flags(&self) -> &[bool] {
        &self.core
    }

    pub fn geometry(&self) -> &[HPoint] {
        &self.geometry
    }

    pub fn position(&self, v: u32) -> Option<&HPoint> {
        self.geometry.get(v as usize)
    }

    pub fn has_edge(&self, a: u32, b: u32) -> bool {
        self.neighbors(a).binary_search(&b).is_ok()
    }

    /// Edges `(a, b)` with `a < b`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.n() as u32).flat_map(move |a| {
            self.neighbors(a)
                .iter()
                .filter(move |&&b| b > a)
                .map(move |&b| (a, b))
        })
    }
}

/// Breadth-first distances from `from`; [`UNREACHABLE`] where not reachable.
pub fn bfs_distances(g: &DualGraph, from: u32) -> Vec<u32> {
    let mut dist = vec![UNREACHABLE; g.n()];
    if from as usize >= g.n() {
        return dist;
    }
    let mut queue = VecDeque::new();
    dist[from as usize] = 0;
    queue.push_back(from);
    while let Some(v) = queue.pop_front() {
        let d = dist[v as usize] + 1;
        for &w in g.neighbors(v) {
            if dist[w as usize] == UNREACHABLE {
                dist[w as usize] = d;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Ball sizes around a root, restricted to radii where the ball is core-only.
#[derive(Clone, Debug, PartialEq)]
pub struct BallGrowth {
    /// `counts[r] = |B(root, r)|` for `r = 0..=trusted_radius`.
    pub counts: Vec<u64>,
    /// `counts[r]^(1/r)`, with 1 at `r = 0`.
    pub growth: Vec<f64>,
    pub trusted_radius: u32,
}

/// `|B(root, r)|` for `r <= r_max`, stopping before the first radius whose
/// ball contains a non-core vertex.
pub fn ball_growth(g: &DualGraph, root: u32, r_max: u32) -> BallGrowth {
    let mut counts = Vec::new();
    let mut dist = vec![UNREACHABLE; g.n()];
    let mut frontier = vec![root];
    dist[root as usize] = 0;
    let mut total = 0u64;
    for r in 0..=r_max {
        if frontier.iter().any(|&v| !g.is_core(v)) {
            break;
        }
        total += frontier.len() as u64;
        counts.push(total);
        let mut next = Vec::new();
        for &v in &frontier {
            for &w in g.neighbors(v) {
                if dist[w as usize] == UNREACHABLE {
                    dist[w as usize] = r + 1;
                    next.push(w);
                }
            }
        }
        frontier = next;
    }
    let growth = counts
        .iter()
        .enumerate()
        .map(|(r, &c)| if r == 0 { 1.0 } else { (c as f64).powf(1.0 / r as f64) })
        .collect();
    let trusted_radius = counts.len().saturating_sub(1) as u32;
    BallGrowth {
        counts,
        growth,
        trusted_radius,
    }
}

/// `(|∂S|, Vol(S))` for a vertex set. Duplicates in `s` are ignored.
pub fn boundary_volume(g: &DualGraph, s: &[u32]) -> (u64, u64) {
    let mut set: Vec<u32> = s.to_vec();
    set.sort_unstable();
    set.dedup();
    let mut boundary = 0;
    let mut volume = 0;
    for &v in &set {
        volume += g.degree(v) as u64;
        boundary += g
            .neighbors(v)
            .iter()
            .filter(|w| set.binary_search(w).is_err())
            .count() as u64;
    }
    (boundary, volume)
}

/// `Δ_i(S) = i|S| - |∂S|`.
pub fn delta_i(g: &DualGraph, s: &[u32], i: Ratio<i64>) -> Ratio<i64> {
    let mut set: Vec<u32> = s.to_vec();
    set.sort_unstable();
    set.dedup();
    let (boundary, _) = boundary_volume(g, &set);
    i * Ratio::from_integer(set.len() as i64) - Ratio::from_integer(boundary as i64)
}

/// Whether `S` is an isolated `i`-core: `Δ_i(S) > Δ_i(A)` for every proper
/// subset `A`, including the empty set.
pub fn is_isolated_core(g: &DualGraph, s: &[u32], i: Ratio<i64>) -> Result<bool> {
    let mut set: Vec<u32> = s.to_vec();
    set.sort_unstable();
    set.dedup();
    let k = set.len();
    if k > MAX_CORE_SCAN {
        return Err(Error::guard("|S|", k as f64, MAX_CORE_SCAN as f64));
    }
    if let Some(&v) = set.iter().find(|&&v| v as usize >= g.n()) {
        return Err(Error::invalid("S", format!("{v} is not a vertex")));
    }
    if k == 0 {
        // The empty set has no proper subset.
        return Ok(true);
    }
    let (p, q) = (*i.numer() as i128, *i.denom() as i128);
    let deg: Vec<i128> = set.iter().map(|&v| g.degree(v) as i128).collect();
    let inner: Vec<u32> = set
        .iter()
        .map(|&v| {
            g.neighbors(v)
                .iter()
                .filter_map(|w| set.binary_search(w).ok())
                .fold(0u32, |m, j| m | (1 << j))
        })
        .collect();
    let full: u32 = if k == 32 { u32::MAX } else { (1u32 << k) - 1 };
    let boundary_of = |mask: u32| -> i128 {
        (0..k)
            .filter(|&j| mask >> j & 1 == 1)
            .map(|j| deg[j] - (inner[j] & mask).count_ones() as i128)
            .sum()
    };
    // Δ scaled by q to stay in integers.
    let delta = |size: i128, boundary: i128| p * size - q * boundary;
    let target = delta(k as i128, boundary_of(full));

    // Gray-code walk over all subsets, updating |A| and |∂A| incrementally.
    let mut mask = 0u32;
    let mut size = 0i128;
    let mut boundary = 0i128;
    if target <= delta(0, 0) {
        return Ok(false);
    }
    for step in 1u64..(1u64 << k) {
        let j = step.trailing_zeros() as usize;
        let bit = 1u32 << j;
        let links = (inner[j] & mask & !bit).count_ones() as i128;
        if mask & bit == 0 {
            boundary += deg[j] - 2 * links;
            size += 1;
        } else {
            boundary -= deg[j] - 2 * links;
            size -= 1;
        }
        mask ^= bit;
        if mask != full && target <= delta(size, boundary) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Minimum ratio at one subset size with its witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SizeMinimum {
    pub boundary: u64,
    pub volume: u64,
    /// Sorted vertex ids of a minimizing subset.
    pub witness: Vec<u32>,
}

impl SizeMinimum {
    pub fn ratio(&self) -> Ratio<u64> {
        Ratio::new(self.boundary, self.volume.max(1))
    }

    fn cmp_key(&self, other: &SizeMinimum) -> Ordering {
        // b1/v1 vs b2/v2 without rounding.
        let l = self.boundary as u128 * other.volume as u128;
        let r = other.boundary as u128 * self.volume as u128;
        l.cmp(&r).then_with(|| self.witness.cmp(&other.witness))
    }
}

fn merge_min(slot: &mut Option<SizeMinimum>, cand: SizeMinimum) {
    match slot {
        Some(cur) if cur.cmp_key(&cand) != Ordering::Greater => {}
        _ => *slot = Some(cand),
    }
}

/// Result of the exact connected-subset search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpansionReport {
    pub root: u32,
    pub max_size: usize,
    /// Minimum over core-only subsets, indexed by size - 1.
    pub per_size: Vec<Option<SizeMinimum>>,
    /// Minimum over subsets touching non-core vertices, reported separately.
    pub per_size_noncore: Vec<Option<SizeMinimum>>,
    pub global: Option<SizeMinimum>,
    /// Connected subsets containing the root that were enumerated.
    pub enumerated: u64,
    /// Of those, subsets touching a non-core vertex.
    pub noncore_subsets: u64,
}

/// Callbacks for [`enumerate_connected`]. `enter`/`leave` bracket each
/// vertex addition; `visit` is called once per subset with the current set.
pub trait SubsetVisitor {
    fn enter(&mut self, v: u32, set: &[u32]);
    fn leave(&mut self, v: u32, set: &[u32]);
    fn visit(&mut self, set: &[u32]);
}

/// Neighborhood of the root up to a radius, reindexed compactly. Local id 0
/// is the root.
pub struct LocalGraph {
    pub global: Vec<u32>,
    pub offsets: Vec<usize>,
    pub neighbors: Vec<u32>,
}

impl LocalGraph {
    /// Ball of radius `radius` around `root` with induced edges.
    pub fn ball(g: &DualGraph, root: u32, radius: usize) -> LocalGraph {
        Self::ball_within(g, root, radius, |_| true)
    }

    /// Ball of radius `radius` around `root` in the subgraph induced by the
    /// vertices with `keep(v)`. The root is always kept.
    pub fn ball_within(g: &DualGraph, root: u32, radius: usize, keep: impl Fn(u32) -> bool) -> LocalGraph {
        let mut local_of = std::collections::HashMap::new();
        let mut global = vec![root];
        local_of.insert(root, 0u32);
        let mut frontier = vec![root];
        for _ in 0..radius {
            let mut next = Vec::new();
            for &v in &frontier {
                for &w in g.neighbors(v).iter().filter(|&&w| keep(w)) {
                    if let std::collections::hash_map::Entry::Vacant(e) = local_of.entry(w) {
                        e.insert(global.len() as u32);
                        global.push(w);
                        next.push(w);
                    }
                }
            }
            frontier = next;
        }
        let mut offsets = vec![0];
        let mut neighbors = Vec::new();
        for &v in &global {
            let mut list: Vec<u32> = g
                .neighbors(v)
                .iter()
                .filter_map(|w| local_of.get(w).copied())
                .collect();
            list.sort_unstable();
            neighbors.extend(list);
            offsets.push(neighbors.len());
        }
        LocalGraph {
            global,
            offsets,
            neighbors,
        }
    }

    pub fn n(&self) -> usize {
        self.global.len()
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.neighbors[self.offsets[v as usize]..self.offsets[v as usize + 1]]
    }
}

struct Enumerator<'a, V> {
    g: &'a LocalGraph,
    max_size: usize,
    seen: Vec<bool>,
    set: Vec<u32>,
    visitor: V,
}

impl<V: SubsetVisitor> Enumerator<'_, V> {
    fn recurse(&mut self, ext: &[u32]) {
        self.visitor.visit(&self.set);
        if self.set.len() == self.max_size {
            return;
        }
        for (i, &v) in ext.iter().enumerate() {
            self.include(v, &ext[i + 1..]);
        }
    }

    // Include `v` with candidates `rest` (everything before `v` in the parent
    // candidate list stays excluded through the `seen` marks).
    fn include(&mut self, v: u32, rest: &[u32]) {
        self.visitor.enter(v, &self.set);
        self.set.push(v);
        let mut child: Vec<u32> = rest.to_vec();
        let fresh = child.len();
        for &w in self.g.neighbors(v) {
            if !self.seen[w as usize] {
                self.seen[w as usize] = true;
                child.push(w);
            }
        }
        self.recurse(&child);
        for &w in &child[fresh..] {
            self.seen[w as usize] = false;
        }
        self.set.pop();
        self.visitor.leave(v, &self.set);
    }
}

/// Enumerate every connected vertex set of size `<= max_size` containing
/// local vertex 0, each exactly once. Work is split over the first-level
/// branches; `make` builds one visitor per branch and the visitors are
/// returned in branch order.
pub fn enumerate_connected<V, F>(exec: Exec, g: &LocalGraph, max_size: usize, make: F) -> Vec<V>
where
    V: SubsetVisitor + Send,
    F: Fn() -> V + Sync + Send,
{
    if max_size == 0 || g.n() == 0 {
        return Vec::new();
    }
    let first: Vec<u32> = g.neighbors(0).to_vec();
    let fresh_enumerator = || {
        let mut seen = vec![false; g.n()];
        seen[0] = true;
        for &w in &first {
            seen[w as usize] = true;
        }
        let mut visitor = make();
        visitor.enter(0, &[]);
        Enumerator {
            g,
            max_size,
            seen,
            set: vec![0],
            visitor,
        }
    };
    // Branch 0 visits {root} alone; branch i + 1 includes first[i] and
    // excludes first[..i].
    exec.map(first.len() + 1, |b| {
        let mut e = fresh_enumerator();
        if b == 0 {
            e.visitor.visit(&e.set);
        } else if max_size > 1 {
            e.include(first[b - 1], &first[b..]);
        }
        e.visitor
    })
}

struct ExpansionVisitor<'a> {
    g: &'a DualGraph,
    local: &'a LocalGraph,
    in_set: Vec<bool>,
    boundary: i64,
    volume: u64,
    noncore: usize,
    enumerated: u64,
    noncore_subsets: u64,
    per_size: Vec<Option<SizeMinimum>>,
    per_size_noncore: Vec<Option<SizeMinimum>>,
}

impl SubsetVisitor for ExpansionVisitor<'_> {
    fn enter(&mut self, v: u32, _set: &[u32]) {
        let gv = self.local.global[v as usize];
        let deg = self.g.degree(gv) as i64;
        let links = self
            .local
            .neighbors(v)
            .iter()
            .filter(|&&w| self.in_set[w as usize])
            .count() as i64;
        self.boundary += deg - 2 * links;
        self.volume += deg as u64;
        if !self.g.is_core(gv) {
            self.noncore += 1;
        }
        self.in_set[v as usize] = true;
    }

    fn leave(&mut self, v: u32, _set: &[u32]) {
        self.in_set[v as usize] = false;
        let gv = self.local.global[v as usize];
        let deg = self.g.degree(gv) as i64;
        let links = self
            .local
            .neighbors(v)
            .iter()
            .filter(|&&w| self.in_set[w as usize])
            .count() as i64;
        self.boundary -= deg - 2 * links;
        self.volume -= deg as u64;
        if !self.g.is_core(gv) {
            self.noncore -= 1;
        }
    }

    fn visit(&mut self, set: &[u32]) {
        self.enumerated += 1;
        let size = set.len();
        let cand_key = |this: &Self| -> (u64, u64) { (this.boundary as u64, this.volume) };
        let (boundary, volume) = cand_key(self);
        let slots = if self.noncore == 0 {
            &mut self.per_size
        } else {
            self.noncore_subsets += 1;
            &mut self.per_size_noncore
        };
        let slot = &mut slots[size - 1];
        // Cheap rejection before materializing the witness.
        if let Some(cur) = slot {
            let l = boundary as u128 * cur.volume as u128;
            let r = cur.boundary as u128 * volume as u128;
            if l > r {
                return;
            }
        }
        let mut witness: Vec<u32> = set.iter().map(|&v| self.local.global[v as usize]).collect();
        witness.sort_unstable();
        merge_min(
            slot,
            SizeMinimum {
                boundary,
                volume,
                witness,
            },
        );
    }
}

/// Exact minimum of `|∂S| / Vol(S)` over connected `S` containing `root`
/// with `1 <= |S| <= m`. Subsets touching non-core vertices are kept out of
/// the headline minima and reported separately.
pub fn min_expansion(g: &DualGraph, root: u32, m: usize) -> Result<ExpansionReport> {
    min_expansion_exec(Exec::default(), g, root, m)
}

pub fn min_expansion_exec(exec: Exec, g: &DualGraph, root: u32, m: usize) -> Result<ExpansionReport> {
    expansion_search(exec, g, root, m, false)
}

/// Same minima over core-only subsets, without enumerating subsets that
/// touch non-core vertices. Much faster when the core is a small part of the
/// ball of radius `m - 1`; the non-core fields stay empty.
pub fn min_expansion_core(exec: Exec, g: &DualGraph, root: u32, m: usize) -> Result<ExpansionReport> {
    expansion_search(exec, g, root, m, true)
}

fn expansion_search(exec: Exec, g: &DualGraph, root: u32, m: usize, core_only: bool) -> Result<ExpansionReport> {
    if m > MAX_EXPANSION_SIZE {
        return Err(Error::guard("m", m as f64, MAX_EXPANSION_SIZE as f64));
    }
    if m == 0 {
        return Err(Error::invalid("m", "subset size must be at least 1"));
    }
    if root as usize >= g.n() {
        return Err(Error::invalid("root", format!("{root} is not a vertex")));
    }
    if core_only && !g.is_core(root) {
        return Err(Error::invalid("root", format!("{root} is not a core vertex")));
    }
    let local = if core_only {
        LocalGraph::ball_within(g, root, m - 1, |v| g.is_core(v))
    } else {
        LocalGraph::ball(g, root, m - 1)
    };
    let visitors = enumerate_connected(exec, &local, m, || ExpansionVisitor {
        g,
        local: &local,
        in_set: vec![false; local.n()],
        boundary: 0,
        volume: 0,
        noncore: 0,
        enumerated: 0,
        noncore_subsets: 0,
        per_size: vec![None; m],
        per_size_noncore: vec![None; m],
    });
    let mut per_size: Vec<Option<SizeMinimum>> = vec![None; m];
    let mut per_size_noncore: Vec<Option<SizeMinimum>> = vec![None; m];
    let mut enumerated = 0;
    let mut noncore_subsets = 0;
    for v in visitors {
        enumerated += v.enumerated;
        noncore_subsets += v.noncore_subsets;
        for (slot, cand) in per_size.iter_mut().zip(v.per_size) {
            if let Some(c) = cand {
                merge_min(slot, c);
            }
        }
        for (slot, cand) in per_size_noncore.iter_mut().zip(v.per_size_noncore) {
            if let Some(c) = cand {
                merge_min(slot, c);
            }
        }
    }
    let mut global = None;
    for c in per_size.iter().flatten() {
        merge_min(&mut global, c.clone());
    }
    Ok(ExpansionReport {
        root,
        max_size: m,
        per_size,
        per_size_noncore,
        global,
        enumerated,
        noncore_subsets,
    })
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    fn r(n: i64, d: i64) -> Ratio<i64> {
        Ratio::new(n, d)
    }

    #[test]
    fn bfs_examples() {
        assert_eq!(bfs_distances(&cycle(3), 0), vec![0, 1, 1]);
        assert_eq!(bfs_distances(&path(5), 0), vec![0, 1, 2, 3, 4]);
        let g = graph(3, &[(0, 1)]);
        assert_eq!(bfs_distances(&g, 0)[2], UNREACHABLE);
    }

    #[test]
    fn tree_ball_growth() {
        let t = regular_tree(3, 8);
        let b = ball_growth(&t, 0, 20);
        assert_eq!(b.trusted_radius, 7);
        for (r, &c) in b.counts.iter().enumerate() {
            assert_eq!(c, 3 * (1u64 << r) - 2);
        }
        let single = graph(1, &[]);
        let b = ball_growth(&single, 0, 5);
        assert_eq!(b.counts[0], 1);
        assert_eq!(b.growth[0], 1.0);
    }

    #[test]
    fn boundary_volume_examples() {
        let t = regular_tree(3, 2);
        assert_eq!(boundary_volume(&t, &[0]), (3, 3));
        let k4 = complete(4);
        assert_eq!(boundary_volume(&k4, &[0, 1, 2, 3]), (0, 12));
        assert_eq!(boundary_volume(&k4, &[1, 3]), (4, 6));
    }

    #[test]
    fn expansion_examples() {
        let p = path(5);
        let rep = min_expansion(&p, 0, 3).unwrap();
        let ratios: Vec<Ratio<u64>> = rep.per_size.iter().map(|s| s.as_ref().unwrap().ratio()).collect();
        assert_eq!(ratios, vec![Ratio::new(1, 1), Ratio::new(1, 3), Ratio::new(1, 5)]);
        assert_eq!(rep.global.as_ref().unwrap().witness, vec![0, 1, 2]);

        let t = regular_tree(3, 5);
        let rep = min_expansion(&t, 0, 2).unwrap();
        assert_eq!(rep.global.unwrap().ratio(), Ratio::new(2, 3));

        let rep = min_expansion(&cycle(7), 3, 1).unwrap();
        assert_eq!(rep.per_size[0].as_ref().unwrap().ratio(), Ratio::new(1, 1));
        assert!(min_expansion(&p, 0, 15).is_err());
    }

    #[test]
    fn enumeration_counts_match_brute_force() {
        // Connected subsets containing 0 in K5: every subset containing 0.
        let rep = min_expansion(&complete(5), 0, 5).unwrap();
        assert_eq!(rep.enumerated, 16);
        // Cycle C6, connected sets containing 0 of size <= 6:
        // sizes 1..5 give 1,2,3,4,5 arcs and the whole cycle once.
        let rep = min_expansion(&cycle(6), 0, 6).unwrap();
        assert_eq!(rep.enumerated, 1 + 2 + 3 + 4 + 5 + 1);
    }

    #[test]
    fn sequential_and_parallel_reports_agree() {
        let t = regular_tree(4, 6);
        let a = min_expansion_exec(Exec::Sequential, &t, 0, 6).unwrap();
        let b = min_expansion_exec(Exec::Parallel, &t, 0, 6).unwrap();
        assert_eq!(a, b);
        assert!(a.noncore_subsets == 0);
        let c = min_expansion_exec(Exec::Sequential, &regular_tree(3, 3), 0, 6).unwrap();
        assert!(c.noncore_subsets > 0);
    }

    #[test]
    fn delta_examples() {
        let t = regular_tree(3, 2);
        assert_eq!(delta_i(&t, &[], r(1, 1)), r(0, 1));
        assert_eq!(delta_i(&t, &[0], r(1, 1)), r(-2, 1));
        let leaf = graph(2, &[(0, 1)]);
        assert_eq!(delta_i(&leaf, &[0], r(2, 1)), r(1, 1));
    }

    #[test]
    fn isolated_core_examples() {
        let leaf = graph(2, &[(0, 1)]);
        assert!(is_isolated_core(&leaf, &[0], r(2, 1)).unwrap());
        let t = regular_tree(3, 2);
        assert!(!is_isolated_core(&t, &[0], r(1, 1)).unwrap());
        // Two pendant vertices far apart: each is an isolated 2-core and so
        // is their union.
        let g = path(6);
        assert!(is_isolated_core(&g, &[0], r(2, 1)).unwrap());
        assert!(is_isolated_core(&g, &[5], r(2, 1)).unwrap());
        assert!(is_isolated_core(&g, &[0, 5], r(2, 1)).unwrap());
        let big: Vec<u32> = (0..21).collect();
        assert!(is_isolated_core(&path(25), &big, r(1, 1)).is_err());
    }

    #[test]
    fn isolated_core_matches_definition_scan() {
        // Compare the Gray-code scan with a direct scan over subsets.
        let g = graph(
            7,
            &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 6), (6, 3), (1, 5)],
        );
        for mask in 1u32..(1 << 7) {
            let s: Vec<u32> = (0..7).filter(|j| mask >> j & 1 == 1).collect();
            for i in [r(1, 2), r(1, 1), r(3, 2), r(2, 1), r(3, 1)] {
                let ds = delta_i(&g, &s, i);
                let direct = (0..mask).filter(|a| a & !mask == 0).all(|a| {
                    let sub: Vec<u32> = (0..7).filter(|j| a >> j & 1 == 1).collect();
                    ds > delta_i(&g, &sub, i)
                });
                assert_eq!(is_isolated_core(&g, &s, i).unwrap(), direct, "{s:?} {i}");
            }
        }
    }

    #[test]
    fn rejects_asymmetric_adjacency() {
        let adj = vec![vec![1], vec![]];
        assert!(DualGraph::from_adjacency(GraphKind::Synthetic, adj, 0, vec![true; 2], vec![]).is_err());
        let adj = vec![vec![0]];
        assert!(DualGraph::from_adjacency(GraphKind::Synthetic, adj, 0, vec![true], vec![]).is_err());
    }

    #[test]
    fn core_only_search_matches_full_search() {
        // Core = vertices 0..6 of a 3-regular tree of depth 3.
        let t = regular_tree(3, 3);
        let core: Vec<bool> = (0..t.n()).map(|v| v < 10).collect();
        let adj: Vec<Vec<u32>> = (0..t.n() as u32).map(|v| t.neighbors(v).to_vec()).collect();
        let g = DualGraph::from_adjacency(GraphKind::Synthetic, adj, 0, core, vec![]).unwrap();
        let full = min_expansion(&g, 0, 6).unwrap();
        for exec in [Exec::Sequential, Exec::Parallel] {
            let fast = min_expansion_core(exec, &g, 0, 6).unwrap();
            assert_eq!(fast.per_size, full.per_size);
            assert_eq!(fast.global, full.global);
            assert_eq!(fast.noncore_subsets, 0);
            assert!(fast.enumerated < full.enumerated);
        }
    }
}
