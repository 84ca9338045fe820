//! Triangulation schemes, the triangle ordering that produces them from a
//! simply connected patch, planar-pair counting and the tree-indexed
//! product process `Z`.
//!
//! Vertex labels inside a scheme are 1-based, so `f(3) = {1, 2}` always.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use rand::Rng;

use crate::exec::Exec;
use crate::hypgeo::HPoint;
use crate::rng::{self, domain};
use crate::{Error, Result};

/// Size guard for [`enumerate_schemes`].
pub const MAX_ENUM_K: u32 = 9;
/// Size guard for [`count_planar_pairs`].
pub const MAX_PLANAR_POINTS: usize = 7;

/// A valid triangulation scheme on `k` vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Scheme {
    k: u32,
    f: Vec<[u32; 2]>,
}

/// First failed condition of the scheme definition: 1 injectivity, 2 range,
/// 3 prefix connectivity, 4 at most two hits per maximum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Violation {
    pub condition: u8,
    pub index: u32,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "condition {} fails at i = {}", self.condition, self.index)
    }
}

fn norm(p: [u32; 2]) -> [u32; 2] {
    [p[0].min(p[1]), p[0].max(p[1])]
}

/// Check the four scheme conditions for `f(3), ..., f(k)` given in order.
/// Conditions are checked index by index, so the reported violation has the
/// smallest failing `i`.
pub fn is_scheme(k: u32, f: &[[u32; 2]]) -> std::result::Result<(), Violation> {
    if k < 3 {
        return Err(Violation { condition: 2, index: k });
    }
    let len = (k - 2) as usize;
    let mut seen: BTreeSet<[u32; 2]> = BTreeSet::new();
    let mut touched = vec![false; k as usize + 1];
    let mut hits = vec![0u8; k as usize + 1];
    for i in 3..=k {
        let Some(&raw) = f.get((i - 3) as usize) else {
            return Err(Violation { condition: 2, index: i });
        };
        let [a, b] = norm(raw);
        if a == b || a < 1 || b >= i {
            return Err(Violation { condition: 2, index: i });
        }
        if i >= 4 && !seen.insert([a, b]) {
            return Err(Violation { condition: 1, index: i });
        }
        // A connected edge set stays connected iff the new edge touches it.
        if i > 3 && !touched[a as usize] && !touched[b as usize] {
            return Err(Violation { condition: 3, index: i });
        }
        touched[a as usize] = true;
        touched[b as usize] = true;
        hits[b as usize] += 1;
        if hits[b as usize] > 2 {
            return Err(Violation { condition: 4, index: i });
        }
    }
    if f.len() > len {
        return Err(Violation { condition: 2, index: k + 1 });
    }
    Ok(())
}

impl Scheme {
    /// Validated scheme from `f(3), ..., f(k)`.
    pub fn new(k: u32, f: Vec<[u32; 2]>) -> Result<Scheme> {
        is_scheme(k, &f).map_err(|v| Error::invalid("scheme", v.to_string()))?;
        Ok(Scheme {
            k,
            f: f.into_iter().map(norm).collect(),
        })
    }

    /// The strip `f(i) = {i - 2, i - 1}`, whose tree is the chain `g(i) = i - 1`.
    pub fn strip(k: u32) -> Result<Scheme> {
        if k < 3 {
            return Err(Error::invalid("k", "a scheme needs at least 3 vertices"));
        }
        Ok(Scheme {
            k,
            f: (3..=k).map(|i| [i - 2, i - 1]).collect(),
        })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// `f(3), ..., f(k)`, each as an ascending pair.
    pub fn pairs(&self) -> &[[u32; 2]] {
        &self.f
    }

    pub fn f(&self, i: u32) -> [u32; 2] {
        self.f[(i - 3) as usize]
    }

    /// `g(i) = max f(i)`.
    pub fn g(&self, i: u32) -> u32 {
        self.f(i)[1]
    }

    /// Edges `(i, g(i))` of the tree on `{2, ..., k}`.
    pub fn tree_edges(&self) -> Vec<(u32, u32)> {
        (3..=self.k).map(|i| (i, self.g(i))).collect()
    }

    /// Labels of the triangle `{x_i, x_f(i)_1, x_f(i)_2}`.
    pub fn triangle(&self, i: u32) -> [u32; 3] {
        let [a, b] = self.f(i);
        [a, b, i]
    }
}

/// Depth-first enumeration of all schemes on `k` vertices, calling `visit`
/// with `f(3), ..., f(k)`. `first` restricts `f(4)` when present.
fn enumerate_into(k: u32, first: Option<[u32; 2]>, visit: &mut dyn FnMut(&[[u32; 2]])) {
    let mut f = vec![[1, 2]];
    // Vertex 1 and 2 are touched by f(3), and 2 has one hit.
    let touched: u32 = 0b110;
    let mut hits = vec![0u8; k as usize + 1];
    hits[2] = 1;
    fn rec(
        k: u32,
        i: u32,
        first: Option<[u32; 2]>,
        f: &mut Vec<[u32; 2]>,
        touched: u32,
        hits: &mut [u8],
        visit: &mut dyn FnMut(&[[u32; 2]]),
    ) {
        if i > k {
            visit(f);
            return;
        }
        for b in 2..i {
            if hits[b as usize] >= 2 {
                continue;
            }
            for a in 1..b {
                if i == 4 && first.is_some_and(|p| p != [a, b]) {
                    continue;
                }
                if touched & ((1 << a) | (1 << b)) == 0 {
                    continue;
                }
                if f[1..].contains(&[a, b]) {
                    continue;
                }
                f.push([a, b]);
                hits[b as usize] += 1;
                rec(k, i + 1, first, f, touched | (1 << a) | (1 << b), hits, visit);
                hits[b as usize] -= 1;
                f.pop();
            }
        }
    }
    rec(k, 4, first, &mut f, touched, &mut hits, visit);
}

fn check_enum_k(k: u32) -> Result<()> {
    if k < 3 {
        return Err(Error::invalid("k", "a scheme needs at least 3 vertices"));
    }
    if k > MAX_ENUM_K {
        return Err(Error::guard("k", k, MAX_ENUM_K));
    }
    Ok(())
}

/// Every scheme on `k` vertices, in lexicographic order of `(f(4), f(5), ...)`.
pub fn enumerate_schemes(k: u32) -> Result<Vec<Scheme>> {
    check_enum_k(k)?;
    let mut out = Vec::new();
    enumerate_into(k, None, &mut |f| {
        out.push(Scheme { k, f: f.to_vec() });
    });
    Ok(out)
}

/// Number of schemes on `k` vertices, split over the choices of `f(4)`.
pub fn count_schemes(exec: Exec, k: u32) -> Result<u64> {
    check_enum_k(k)?;
    if k == 3 {
        return Ok(1);
    }
    let firsts = [[1, 2], [1, 3], [2, 3]];
    let counts = exec.map_slice(&firsts, |&p| {
        let mut n = 0u64;
        enumerate_into(k, Some(p), &mut |_| n += 1);
        n
    });
    Ok(counts.into_iter().sum())
}

type EdgeKey = (u32, u32);

fn edge(a: u32, b: u32) -> EdgeKey {
    (a.min(b), a.max(b))
}

fn tri_edges(t: [u32; 3]) -> [EdgeKey; 3] {
    [edge(t[0], t[1]), edge(t[1], t[2]), edge(t[0], t[2])]
}

/// Triangles of `set` on each edge.
fn edge_map(tris: &[[u32; 3]], set: &[usize]) -> HashMap<EdgeKey, Vec<usize>> {
    let mut m: HashMap<EdgeKey, Vec<usize>> = HashMap::new();
    for &t in set {
        for e in tri_edges(tris[t]) {
            m.entry(e).or_default().push(t);
        }
    }
    m
}

/// Strongly connected components of `set` (sharing an edge), each sorted.
fn components(tris: &[[u32; 3]], set: &[usize]) -> Vec<Vec<usize>> {
    let em = edge_map(tris, set);
    let mut comp: HashMap<usize, usize> = HashMap::new();
    let mut out: Vec<Vec<usize>> = Vec::new();
    for &s in set {
        if comp.contains_key(&s) {
            continue;
        }
        let id = out.len();
        let mut stack = vec![s];
        comp.insert(s, id);
        let mut members = Vec::new();
        while let Some(t) = stack.pop() {
            members.push(t);
            for e in tri_edges(tris[t]) {
                for &u in &em[&e] {
                    if let std::collections::hash_map::Entry::Vacant(v) = comp.entry(u) {
                        v.insert(id);
                        stack.push(u);
                    }
                }
            }
        }
        members.sort_unstable();
        out.push(members);
    }
    out
}

/// Shape of a triangle collection as a 2-complex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PatchShape {
    pub triangles: usize,
    pub edges: usize,
    pub vertices: usize,
    pub strongly_connected: bool,
    /// Each edge lies on at most two triangles.
    pub manifold: bool,
}

impl PatchShape {
    /// For a strongly connected planar patch, `e - k = |X| - 1` exactly when
    /// the union has no holes.
    pub fn simply_connected(&self) -> bool {
        self.strongly_connected && self.manifold && self.edges + 1 == self.vertices + self.triangles
    }
}

/// Shape of the sub-collection `set` of `tris`.
pub fn patch_shape(tris: &[[u32; 3]], set: &[usize]) -> PatchShape {
    let em = edge_map(tris, set);
    let verts: BTreeSet<u32> = set.iter().flat_map(|&t| tris[t]).collect();
    PatchShape {
        triangles: set.len(),
        edges: em.len(),
        vertices: verts.len(),
        strongly_connected: !set.is_empty() && components(tris, set).len() == 1,
        manifold: em.values().all(|v| v.len() <= 2),
    }
}

fn ordering_rec(tris: &[[u32; 3]], set: Vec<usize>, tstar: usize, v: BTreeSet<EdgeKey>, out: &mut Vec<usize>) {
    if set.len() == 1 {
        out.push(set[0]);
        return;
    }
    let em = edge_map(tris, &set);
    let is_boundary = |e: &EdgeKey| em[e].len() == 1;

    // A triangle with two sides on the boundary hangs on by one edge.
    let ear = set.iter().copied().find(|&t| {
        t != tstar && tri_edges(tris[t]).iter().filter(|e| is_boundary(e)).count() >= 2
    });
    if let Some(t) = ear {
        let e = tri_edges(tris[t]).into_iter().find(|e| !is_boundary(e)).expect("ear has an interior side");
        let rest: Vec<usize> = set.iter().copied().filter(|&u| u != t).collect();
        let rest_edges: BTreeSet<EdgeKey> = rest.iter().flat_map(|&u| tri_edges(tris[u])).collect();
        let mut v2: BTreeSet<EdgeKey> = v.iter().copied().filter(|e| rest_edges.contains(e)).collect();
        v2.insert(e);
        ordering_rec(tris, rest, tstar, v2, out);
        out.push(t);
        return;
    }

    // Boundary edges around each vertex; in a disk every boundary vertex
    // has exactly two.
    let boundary: Vec<EdgeKey> = {
        let mut b: Vec<EdgeKey> = em.keys().copied().filter(|e| is_boundary(e)).collect();
        b.sort_unstable();
        b
    };
    let mut at: HashMap<u32, Vec<EdgeKey>> = HashMap::new();
    for &e in &boundary {
        at.entry(e.0).or_default().push(e);
        at.entry(e.1).or_default().push(e);
    }
    let isolated = |e: &EdgeKey| {
        v.contains(e)
            && [e.0, e.1]
                .iter()
                .all(|x| at[x].iter().all(|n| n == e || !v.contains(n)))
    };
    let owner = |e: &EdgeKey| em[e][0];
    let pick = boundary
        .iter()
        .copied()
        .find(|e| owner(e) != tstar && !isolated(e))
        .or_else(|| boundary.iter().copied().find(|e| owner(e) != tstar))
        .expect("a patch of two or more triangles has a boundary edge off the first triangle");
    let t = owner(&pick);
    let rest: Vec<usize> = set.iter().copied().filter(|&u| u != t).collect();
    let comps = components(tris, &rest);
    if comps.len() == 1 {
        let mut v2 = v;
        v2.remove(&pick);
        ordering_rec(tris, rest, tstar, v2, out);
        out.push(t);
        return;
    }
    let (c1, c2): (Vec<usize>, Vec<usize>) = if comps[0].contains(&tstar) {
        (comps[0].clone(), comps[1].clone())
    } else {
        (comps[1].clone(), comps[0].clone())
    };
    let e1: BTreeSet<EdgeKey> = c1.iter().flat_map(|&u| tri_edges(tris[u])).collect();
    let g = tri_edges(tris[t])
        .into_iter()
        .find(|e| e1.contains(e))
        .expect("the removed triangle touches the first component");
    let mut t2 = c2;
    t2.push(t);
    let e2: BTreeSet<EdgeKey> = t2.iter().flat_map(|&u| tri_edges(tris[u])).collect();
    let mut v1: BTreeSet<EdgeKey> = v.iter().copied().filter(|e| e1.contains(e)).collect();
    v1.insert(g);
    let mut v2: BTreeSet<EdgeKey> = v.iter().copied().filter(|e| e2.contains(e)).collect();
    v2.insert(g);
    ordering_rec(tris, c1, tstar, v1, out);
    ordering_rec(tris, t2, t, v2, out);
}

/// Order a strongly connected, simply connected collection of triangles,
/// starting at `t0`, so that every prefix is again strongly and simply
/// connected and the single shared edges of the prefix extensions form a
/// connected graph. Returns positions into `tris`.
pub fn order_triangles(tris: &[[u32; 3]], t0: usize) -> Result<Vec<usize>> {
    if t0 >= tris.len() {
        return Err(Error::invalid("t0", format!("{t0} is not a triangle of the patch")));
    }
    let all: Vec<usize> = (0..tris.len()).collect();
    let shape = patch_shape(tris, &all);
    if !shape.strongly_connected {
        return Err(Error::invalid("triangles", "the patch is not strongly connected"));
    }
    if !shape.simply_connected() {
        return Err(Error::invalid("triangles", "the union of the patch is not simply connected"));
    }
    let mut out = Vec::with_capacity(tris.len());
    ordering_rec(tris, all, t0, BTreeSet::new(), &mut out);
    Ok(out)
}

/// For each position `i > 0` of `order`, the edge `e_i` when the triangle
/// shares exactly one edge with the earlier ones, `None` otherwise.
pub fn shared_edges(tris: &[[u32; 3]], order: &[usize]) -> Vec<Option<(u32, u32)>> {
    let mut have: BTreeSet<EdgeKey> = BTreeSet::new();
    let mut out = Vec::with_capacity(order.len());
    for (i, &t) in order.iter().enumerate() {
        let es = tri_edges(tris[t]);
        let shared: Vec<EdgeKey> = es.iter().copied().filter(|e| have.contains(e)).collect();
        out.push((i > 0 && shared.len() == 1).then(|| shared[0]));
        have.extend(es);
    }
    out
}

/// Labels and scheme read off a triangle ordering, or `None` if some
/// single-edge extension reuses a vertex.
fn labels_from_order(tris: &[[u32; 3]], order: &[usize]) -> Option<(Vec<u32>, Vec<[u32; 2]>)> {
    let mut t1 = tris[order[0]];
    t1.sort_unstable();
    let mut xs: Vec<u32> = t1.to_vec();
    let mut label: HashMap<u32, u32> = xs.iter().enumerate().map(|(i, &x)| (x, i as u32 + 1)).collect();
    let mut f = vec![[1, 2]];
    for (pos, e) in shared_edges(tris, order).into_iter().enumerate() {
        let Some((a, b)) = e else { continue };
        let apex = tris[order[pos]].into_iter().find(|&x| x != a && x != b)?;
        if label.contains_key(&apex) {
            return None;
        }
        xs.push(apex);
        label.insert(apex, xs.len() as u32);
        f.push(norm([label[&a], label[&b]]));
    }
    Some((xs, f))
}

/// Node budget of the fallback ordering search.
const SEARCH_BUDGET: u64 = 1_000_000;

/// Depth-first search for an ordering whose scheme passes every condition.
/// Extensions sharing two edges are taken eagerly: they add no scheme edge
/// and only open new boundary edges. Single-edge extensions must bring a new
/// vertex, touch an earlier scheme edge and respect the two-hit limit.
fn search_order(tris: &[[u32; 3]], t0: usize) -> Option<Vec<usize>> {
    struct State<'a> {
        tris: &'a [[u32; 3]],
        em: HashMap<EdgeKey, Vec<usize>>,
        placed: Vec<bool>,
        order: Vec<usize>,
        label: HashMap<u32, u32>,
        touched: BTreeSet<u32>,
        hits: HashMap<u32, u8>,
        edges: BTreeSet<EdgeKey>,
        nodes: u64,
    }
    impl State<'_> {
        fn shared(&self, t: usize) -> Vec<EdgeKey> {
            tri_edges(self.tris[t]).into_iter().filter(|e| self.edges.contains(e)).collect()
        }
        fn frontier(&self) -> Vec<usize> {
            let mut c: Vec<usize> = self
                .edges
                .iter()
                .flat_map(|e| self.em[e].iter().copied())
                .filter(|&u| !self.placed[u])
                .collect();
            c.sort_unstable();
            c.dedup();
            c
        }
        fn run(&mut self) -> bool {
            self.nodes += 1;
            if self.nodes > SEARCH_BUDGET {
                return false;
            }
            // Eager fills.
            let mut filled = Vec::new();
            loop {
                let fill = self.frontier().into_iter().find(|&u| self.shared(u).len() >= 2);
                let Some(u) = fill else { break };
                self.placed[u] = true;
                self.order.push(u);
                self.edges.extend(tri_edges(self.tris[u]));
                filled.push(u);
            }
            if self.order.len() == self.tris.len() {
                return true;
            }
            let snapshot = self.edges.clone();
            for u in self.frontier() {
                let sh = self.shared(u);
                let [e] = sh[..] else { continue };
                let apex = self.tris[u].into_iter().find(|&x| x != e.0 && x != e.1).expect("three vertices");
                if self.label.contains_key(&apex) {
                    continue;
                }
                if !self.touched.contains(&e.0) && !self.touched.contains(&e.1) {
                    continue;
                }
                let top = if self.label[&e.0] > self.label[&e.1] { e.0 } else { e.1 };
                if self.hits.get(&top).copied().unwrap_or(0) >= 2 {
                    continue;
                }
                let new_t: Vec<u32> = [e.0, e.1].into_iter().filter(|x| !self.touched.contains(x)).collect();
                self.placed[u] = true;
                self.order.push(u);
                self.label.insert(apex, self.label.len() as u32 + 1);
                self.touched.extend(&new_t);
                *self.hits.entry(top).or_insert(0) += 1;
                self.edges.extend(tri_edges(self.tris[u]));
                if self.run() {
                    return true;
                }
                self.edges = snapshot.clone();
                *self.hits.get_mut(&top).expect("just inserted") -= 1;
                for x in &new_t {
                    self.touched.remove(x);
                }
                self.label.remove(&apex);
                self.order.pop();
                self.placed[u] = false;
                if self.nodes > SEARCH_BUDGET {
                    break;
                }
            }
            for u in filled.into_iter().rev() {
                self.placed[u] = false;
                self.order.pop();
            }
            false
        }
    }
    let all: Vec<usize> = (0..tris.len()).collect();
    let mut t1 = tris[t0];
    t1.sort_unstable();
    let mut st = State {
        tris,
        em: edge_map(tris, &all),
        placed: vec![false; tris.len()],
        order: vec![t0],
        label: t1.iter().enumerate().map(|(i, &x)| (x, i as u32 + 1)).collect(),
        touched: [t1[0], t1[1]].into(),
        hits: [(t1[1], 1)].into(),
        edges: tri_edges(tris[t0]).into(),
        nodes: 0,
    };
    st.placed[t0] = true;
    st.run().then_some(st.order)
}

/// Vertex ordering `x_1, ..., x_k` (as global ids) and scheme built from a
/// patch, with the triangle `t0` becoming `{x_1, x_2, x_3}` in ascending id
/// order.
///
/// The triangle ordering comes from [`order_triangles`]. That ordering makes
/// the whole set of shared edges connected but not always each prefix of it,
/// which the scheme conditions require; in that case a backtracking search
/// over orderings takes over.
pub fn scheme_from_triangles(tris: &[[u32; 3]], t0: usize) -> Result<(Vec<u32>, Scheme)> {
    let order = order_triangles(tris, t0)?;
    let build = |order: &[usize]| {
        let (xs, f) = labels_from_order(tris, order)?;
        let k = xs.len() as u32;
        is_scheme(k, &f).ok()?;
        Some((xs, Scheme { k, f }))
    };
    build(&order)
        .or_else(|| search_order(tris, t0).and_then(|o| build(&o)))
        .ok_or_else(|| Error::invalid("triangles", "no ordering of the patch yields a triangulation scheme"))
}

/// Whether two Klein triangles have disjoint interiors: some edge line of
/// one of them weakly separates the two, tested with exact orientations.
fn interiors_disjoint(p: &[[f64; 2]; 3], q: &[[f64; 2]; 3]) -> bool {
    let c = |a: [f64; 2]| robust::Coord { x: a[0], y: a[1] };
    let split = |t: &[[f64; 2]; 3], u: &[[f64; 2]; 3]| {
        (0..3).any(|i| {
            let (a, b) = (c(t[i]), c(t[(i + 1) % 3]));
            let side = robust::orient2d(a, b, c(t[(i + 2) % 3]));
            u.iter().all(|&w| robust::orient2d(a, b, c(w)) * side <= 0.0)
        })
    };
    split(p, q) || split(q, p)
}

fn is_degenerate(t: &[[f64; 2]; 3]) -> bool {
    let c = |a: [f64; 2]| robust::Coord { x: a[0], y: a[1] };
    robust::orient2d(c(t[0]), c(t[1]), c(t[2])) == 0.0
}

fn triple_id(t: [usize; 3], n: usize) -> usize {
    let mut s = t;
    s.sort_unstable();
    (s[0] * n + s[1]) * n + s[2]
}

/// Number of (ordering, scheme) pairs on `points` whose triangles have
/// pairwise disjoint interiors. With `nondegenerate`, pairs using a
/// collinear triple are not counted.
pub fn count_planar_pairs(points: &[HPoint], nondegenerate: bool) -> Result<u64> {
    count_planar_pairs_exec(Exec::default(), points, nondegenerate)
}

pub fn count_planar_pairs_exec(exec: Exec, points: &[HPoint], nondegenerate: bool) -> Result<u64> {
    let n = points.len();
    if n > MAX_PLANAR_POINTS {
        return Err(Error::guard("points", n as f64, MAX_PLANAR_POINTS as f64));
    }
    if n < 3 {
        return Ok(0);
    }
    let kl: Vec<[f64; 2]> = points.iter().map(|p| p.klein()).collect();
    let tri = |t: [usize; 3]| [kl[t[0]], kl[t[1]], kl[t[2]]];
    let mut triples = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                triples.push([a, b, c]);
            }
        }
    }
    let m = n * n * n;
    let mut degenerate = vec![false; m];
    for &t in &triples {
        degenerate[triple_id(t, n)] = is_degenerate(&tri(t));
    }
    let mut disjoint = vec![true; m * m];
    for &s in &triples {
        for &t in &triples {
            let ok = degenerate[triple_id(s, n)]
                || degenerate[triple_id(t, n)]
                || (s != t && interiors_disjoint(&tri(s), &tri(t)));
            disjoint[triple_id(s, n) * m + triple_id(t, n)] = ok;
        }
    }
    let schemes = enumerate_schemes(n as u32)?;
    let mut perms = Vec::new();
    permutations(n, &mut perms);
    let counts = exec.map_slice(&schemes, |sc| {
        let mut count = 0u64;
        let mut ids = vec![0usize; n - 2];
        for pi in &perms {
            let mut ok = true;
            for i in 3..=n as u32 {
                let [a, b, c] = sc.triangle(i);
                let id = triple_id([pi[a as usize - 1], pi[b as usize - 1], pi[c as usize - 1]], n);
                if nondegenerate && degenerate[id] {
                    ok = false;
                    break;
                }
                let j = (i - 3) as usize;
                if ids[..j].iter().any(|&prev| !disjoint[prev * m + id]) {
                    ok = false;
                    break;
                }
                ids[j] = id;
            }
            count += u64::from(ok);
        }
        count
    });
    Ok(counts.into_iter().sum())
}

fn permutations(n: usize, out: &mut Vec<Vec<usize>>) {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    rec(&mut Vec::with_capacity(n), &mut vec![false; n], out);
}

/// Parameters of the product process `Z_i = beta U_i^(alpha/2) Z_g(i)^(1/alpha)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZParams {
    pub alpha: f64,
    pub beta: f64,
    pub seed: u64,
}

impl ZParams {
    pub fn new(alpha: f64, beta: f64, seed: u64) -> Result<ZParams> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::invalid("alpha", format!("{alpha} must be positive")));
        }
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::invalid("beta", format!("{beta} must lie in (0, 1]")));
        }
        Ok(ZParams { alpha, beta, seed })
    }
}

/// Source of the uniforms `U_i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Uniforms {
    /// Counter-based stream for the given trial.
    Random { trial: u64 },
    /// `U_i = 1` for every `i`, for deterministic checks.
    Ones,
}

/// One realization: `z[i - 2]` is `Z_i` for `i = 2, ..., k`.
#[derive(Clone, Debug, PartialEq)]
pub struct ZRealization {
    pub z: Vec<f64>,
    /// `Z_3 + ... + Z_k`.
    pub sum: f64,
}

fn check_k(scheme: &Scheme, k: u32) -> Result<()> {
    if k < 3 || k > scheme.k() {
        return Err(Error::invalid(
            "k",
            format!("{k} must lie in [3, {}] for this scheme", scheme.k()),
        ));
    }
    Ok(())
}

fn realize(p: &ZParams, scheme: &Scheme, k: u32, u: Uniforms, logz: &mut Vec<f64>) -> f64 {
    logz.clear();
    let lb = p.beta.ln();
    let mut stream = match u {
        Uniforms::Random { trial } => Some(rng::stream(p.seed, domain::ZPROCESS, trial)),
        Uniforms::Ones => None,
    };
    let mut log_u = || match stream.as_mut() {
        // 1 - U is uniform on (0, 1], so its log is finite.
        Some(r) => (1.0 - r.random::<f64>()).ln(),
        None => 0.0,
    };
    logz.push(lb + 0.5 * p.alpha * log_u());
    let mut sum = 0.0;
    for i in 3..=k {
        let parent = logz[(scheme.g(i) - 2) as usize];
        let lz = lb + 0.5 * p.alpha * log_u() + parent / p.alpha;
        logz.push(lz);
        sum += lz.exp();
    }
    sum
}

/// A single realization of `Z_2, ..., Z_k`.
pub fn z_process(p: &ZParams, scheme: &Scheme, k: u32, u: Uniforms) -> Result<ZRealization> {
    check_k(scheme, k)?;
    let mut logz = Vec::with_capacity(k as usize);
    let sum = realize(p, scheme, k, u, &mut logz);
    Ok(ZRealization {
        z: logz.into_iter().map(f64::exp).collect(),
        sum,
    })
}

/// Monte Carlo estimate of `P[Z_3 + ... + Z_k <= eps k]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailEstimate {
    pub k: u32,
    pub eps: f64,
    pub hits: u64,
    pub trials: u64,
}

impl TailEstimate {
    pub fn p_hat(&self) -> f64 {
        self.hits as f64 / self.trials as f64
    }

    /// Natural log of the estimate, `-inf` when no trial hit.
    pub fn log_p_hat(&self) -> f64 {
        self.p_hat().ln()
    }
}

/// Tail estimate over `trials` independent realizations; needs `alpha > 2`.
pub fn z_tail(exec: Exec, p: &ZParams, scheme: &Scheme, k: u32, eps: f64, trials: u64) -> Result<TailEstimate> {
    check_k(scheme, k)?;
    if !(p.alpha > 2.0) {
        return Err(Error::invalid("alpha", format!("{} must exceed 2 for the tail estimate", p.alpha)));
    }
    if !(eps > 0.0) {
        return Err(Error::invalid("eps", format!("{eps} must be positive")));
    }
    if trials == 0 {
        return Err(Error::invalid("trials", "at least one trial is needed"));
    }
    let threshold = eps * k as f64;
    let hits = exec.count(trials as usize, |t| {
        thread_local! {
            static BUF: std::cell::RefCell<Vec<f64>> = const { std::cell::RefCell::new(Vec::new()) };
        }
        BUF.with(|b| realize(p, scheme, k, Uniforms::Random { trial: t as u64 }, &mut b.borrow_mut()) <= threshold)
            .into()
    });
    Ok(TailEstimate { k, eps, hits, trials })
}
