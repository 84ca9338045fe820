//! Hyperbolic Delaunay complex, Voronoi cells and the two dual graphs.
//!
//! Hyperbolic circles are Euclidean circles in the Poincaré disk, so the
//! hyperbolic Delaunay triangles are exactly the Euclidean Delaunay
//! triangles of the Poincaré coordinates whose circumcircle lies inside the
//! unit disk. Edges with no such triangle are kept only if some empty disk
//! inside the unit disk passes through both endpoints.

mod euclid;
pub mod voronoi;

use robust::{orient2d, Coord};

use crate::graph::{DualGraph, GraphKind};
use crate::hypgeo::{circumdisk, dist_h, HDisk, HPoint, CONTAINMENT_MARGIN};
use crate::ppp::{Conditioning, Sample};
use crate::{Error, Result};

pub use voronoi::{voronoi_cells, Cell, Piece, VoronoiCells};

use euclid::{in_circle_sos, Triangulation, NONE};

/// Marker for "no neighbor" in triangle adjacency.
pub const NO_TRIANGLE: u32 = NONE;
/// Size guard for [`delaunay_bruteforce`].
pub const MAX_BRUTEFORCE_POINTS: usize = 200;

/// Candidate edge of the Euclidean triangulation between two nuclei.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub a: u32,
    pub b: u32,
    /// Whether an empty hyperbolic disk passes through both endpoints.
    pub valid: bool,
}

/// Delaunay triangles and edges of a sample, with core bookkeeping.
#[derive(Clone, Debug)]
pub struct DelaunayComplex<'s> {
    sample: &'s Sample,
    triangles: Vec<[u32; 3]>,
    adjacency: Vec<[u32; 3]>,
    edges: Vec<Edge>,
    core_margin: f64,
    vertex_core: Vec<bool>,
    triangle_core: Vec<bool>,
}

/// Smallest `m` beyond which `exp(3m/4 - lambda pi e^(m/4)) < 1e-6` holds
/// for good.
pub fn default_core_margin(lambda: f64) -> f64 {
    if !(lambda > 0.0) {
        return f64::INFINITY;
    }
    let g = |m: f64| 0.75 * m - lambda * std::f64::consts::PI * (0.25 * m).exp() + 1e6f64.ln();
    // g is concave with its maximum at 4 ln(3 / (lambda pi)).
    let peak = (4.0 * (3.0 / (lambda * std::f64::consts::PI)).ln()).max(0.0);
    if g(peak) < 0.0 {
        return 0.0;
    }
    let mut lo = peak;
    let mut hi = peak + 1.0;
    while g(hi) >= 0.0 {
        hi = peak + 2.0 * (hi - peak);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

fn coords(s: &Sample) -> Vec<Coord<f64>> {
    s.points.iter().map(|p| p.coord()).collect()
}

/// Frame for circles through `p` and `q`: centers `m + t n`, with `n` the
/// unit normal pointing to the left of `p -> q`.
struct EdgeFrame {
    p: [f64; 2],
    q: [f64; 2],
    m: [f64; 2],
    n: [f64; 2],
    h: f64,
}

impl EdgeFrame {
    fn new(p: Coord<f64>, q: Coord<f64>) -> EdgeFrame {
        let (dx, dy) = (q.x - p.x, q.y - p.y);
        let len = dx.hypot(dy);
        EdgeFrame {
            p: [p.x, p.y],
            q: [q.x, q.y],
            m: [0.5 * (p.x + q.x), 0.5 * (p.y + q.y)],
            n: [-dy / len, dx / len],
            h: 0.5 * len,
        }
    }

    /// Constraint from a third point `w`: `Upper(t)` means the circle avoids
    /// `w` iff `t < t_w`, `Lower` iff `t > t_w`. `Kill` if `w` lies strictly
    /// between `p` and `q`.
    fn bound(&self, w: Coord<f64>) -> Bound {
        let (wp, wq) = ([w.x - self.p[0], w.y - self.p[1]], [w.x - self.q[0], w.y - self.q[1]]);
        let side = self.n[0] * wp[0] + self.n[1] * wp[1];
        // |c - w|^2 - |c - p|^2 = (w - p).(w - q) - 2 t n.(w - p)
        let pow = wp[0] * wq[0] + wp[1] * wq[1];
        if side == 0.0 {
            return if pow < 0.0 { Bound::Kill } else { Bound::Free };
        }
        let t = pow / (2.0 * side);
        if side > 0.0 {
            Bound::Upper(t)
        } else {
            Bound::Lower(t)
        }
    }

    /// Open interval of `t` for which the circle lies inside the disk of
    /// radius `1 - CONTAINMENT_MARGIN`, solved in closed form.
    fn containment(&self) -> Option<(f64, f64)> {
        let l = 1.0 - CONTAINMENT_MARGIN;
        let mn = self.m[0].hypot(self.m[1]);
        let mu = self.m[0] * self.n[0] + self.m[1] * self.n[1];
        let h2 = self.h * self.h;
        // 2L|c(t)| < A + 2 mu t with A = L^2 + |m|^2 - h^2, squared into
        // a t^2 + b t + c > 0.
        let a_lin = l * l + mn * mn - h2;
        let gap = (1.0 - mn) - CONTAINMENT_MARGIN;
        let qa = 4.0 * (mu * mu - l * l);
        let qb = -4.0 * mu * ((l - mn) * (l + mn) + h2);
        let qc = (gap * gap - h2) * (a_lin + 2.0 * l * mn);
        let disc = qb * qb - 4.0 * qa * qc;
        if !(disc > 0.0) || qa >= 0.0 {
            return None;
        }
        let sq = disc.sqrt();
        let qq = -0.5 * (qb + qb.signum() * sq);
        let (mut lo, mut hi) = if qq == 0.0 {
            let r = -qb / (2.0 * qa);
            (r, r)
        } else {
            let (r1, r2) = (qq / qa, qc / qq);
            (r1.min(r2), r1.max(r2))
        };
        // Keep the branch where the unsquared right-hand side is positive.
        if mu > 0.0 {
            lo = lo.max(-a_lin / (2.0 * mu));
        } else if mu < 0.0 {
            hi = hi.min(-a_lin / (2.0 * mu));
        }
        (lo < hi).then_some((lo, hi))
    }

    /// Same interval by ternary search for the minimum of the convex
    /// function `|c(t)| + |c(t) - p|` and bisection of both level crossings.
    fn containment_bisect(&self) -> Option<(f64, f64)> {
        let l = 1.0 - CONTAINMENT_MARGIN;
        let f = |t: f64| {
            let c = [self.m[0] + t * self.n[0], self.m[1] + t * self.n[1]];
            c[0].hypot(c[1]) + (c[0] - self.p[0]).hypot(c[1] - self.p[1]) - l
        };
        let (mut a, mut b) = (-2.0, 2.0);
        for _ in 0..200 {
            let m1 = a + (b - a) / 3.0;
            let m2 = b - (b - a) / 3.0;
            if f(m1) < f(m2) {
                b = m2;
            } else {
                a = m1;
            }
        }
        let tmin = 0.5 * (a + b);
        if !(f(tmin) < 0.0) {
            return None;
        }
        let cross = |mut inside: f64, mut outside: f64| {
            for _ in 0..64 {
                let mid = 0.5 * (inside + outside);
                if f(mid) < 0.0 {
                    inside = mid;
                } else {
                    outside = mid;
                }
            }
            0.5 * (inside + outside)
        };
        Some((cross(tmin, -2.0), cross(tmin, 2.0)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Bound {
    Upper(f64),
    Lower(f64),
    Kill,
    Free,
}

/// Witness search: is there an open `t`-interval of circles through the
/// edge that are inside the unit disk and avoid every constraint?
fn has_witness(containment: Option<(f64, f64)>, bounds: impl IntoIterator<Item = Bound>) -> bool {
    let Some((mut lo, mut hi)) = containment else {
        return false;
    };
    for b in bounds {
        match b {
            Bound::Upper(t) => hi = hi.min(t),
            Bound::Lower(t) => lo = lo.max(t),
            Bound::Kill => return false,
            Bound::Free => {}
        }
        if lo >= hi {
            return false;
        }
    }
    lo < hi
}

fn sorted3(mut t: [u32; 3]) -> [u32; 3] {
    t.sort_unstable();
    t
}

/// Neighbor table for a sorted triangle list: `adj[t][k]` is the triangle
/// across the edge opposite vertex `k`.
fn adjacency_of(triangles: &[[u32; 3]]) -> Vec<[u32; 3]> {
    let mut sides: Vec<(u32, u32, u32, u8)> = Vec::with_capacity(3 * triangles.len());
    for (t, v) in triangles.iter().enumerate() {
        for k in 0..3u8 {
            let (a, b) = match k {
                0 => (v[1], v[2]),
                1 => (v[0], v[2]),
                _ => (v[0], v[1]),
            };
            sides.push((a, b, t as u32, k));
        }
    }
    sides.sort_unstable();
    let mut adj = vec![[NONE; 3]; triangles.len()];
    for w in sides.windows(2) {
        if w[0].0 == w[1].0 && w[0].1 == w[1].1 {
            adj[w[0].2 as usize][w[0].3 as usize] = w[1].2;
            adj[w[1].2 as usize][w[1].3 as usize] = w[0].2;
        }
    }
    adj
}

impl<'s> DelaunayComplex<'s> {
    fn assemble(s: &'s Sample, triangles: Vec<[u32; 3]>, edges: Vec<Edge>, core_margin: f64) -> Self {
        let limit = s.window_r - core_margin;
        let vertex_core: Vec<bool> = s.points.iter().map(|p| p.rad_h() <= limit).collect();
        let triangle_core = triangles
            .iter()
            .map(|t| t.iter().all(|&v| vertex_core[v as usize]))
            .collect();
        let adjacency = adjacency_of(&triangles);
        DelaunayComplex {
            sample: s,
            triangles,
            adjacency,
            edges,
            core_margin,
            vertex_core,
            triangle_core,
        }
    }

    pub fn sample(&self) -> &'s Sample {
        self.sample
    }

    pub fn points(&self) -> &'s [HPoint] {
        &self.sample.points
    }

    /// Triangles as ascending vertex triples, in lexicographic order.
    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }

    /// `adjacency()[t][k]`: triangle across the side opposite vertex `k`, or
    /// [`NO_TRIANGLE`].
    pub fn adjacency(&self) -> &[[u32; 3]] {
        &self.adjacency
    }

    /// All candidate edges with their validity flag, sorted.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn valid_edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.edges.iter().filter(|e| e.valid).map(|e| (e.a, e.b))
    }

    pub fn core_margin(&self) -> f64 {
        self.core_margin
    }

    pub fn is_vertex_core(&self, v: u32) -> bool {
        self.vertex_core[v as usize]
    }

    pub fn is_triangle_core(&self, t: u32) -> bool {
        self.triangle_core[t as usize]
    }

    pub fn vertex_core_flags(&self) -> &[bool] {
        &self.vertex_core
    }

    pub fn triangle_core_flags(&self) -> &[bool] {
        &self.triangle_core
    }

    /// Hyperbolic circumdisk of triangle `t` (always present).
    pub fn circumdisk(&self, t: u32) -> HDisk {
        let [a, b, c] = self.triangles[t as usize];
        let p = &self.sample.points;
        circumdisk(&p[a as usize], &p[b as usize], &p[c as usize])
            .expect("stored triangles have a circumdisk")
    }

    /// Triangles incident to each vertex, in compressed form.
    pub fn vertex_triangles(&self) -> (Vec<usize>, Vec<u32>) {
        let n = self.sample.points.len();
        let mut counts = vec![0usize; n + 1];
        for t in &self.triangles {
            for &v in t {
                counts[v as usize + 1] += 1;
            }
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let mut fill = counts.clone();
        let mut ids = vec![0u32; counts[n]];
        for (ti, t) in self.triangles.iter().enumerate() {
            for &v in t {
                ids[fill[v as usize]] = ti as u32;
                fill[v as usize] += 1;
            }
        }
        (counts, ids)
    }
}

/// Delaunay complex with the default core margin for the sample's intensity.
pub fn delaunay(s: &Sample) -> Result<DelaunayComplex<'_>> {
    delaunay_with_margin(s, default_core_margin(s.lambda))
}

pub fn delaunay_with_margin(s: &Sample, core_margin: f64) -> Result<DelaunayComplex<'_>> {
    if s.points.len() > u32::MAX as usize / 4 {
        return Err(Error::guard("points", s.points.len() as f64, (u32::MAX / 4) as f64));
    }
    if s.points.len() < 3 {
        return bruteforce(s, core_margin);
    }
    let pts = coords(s);
    let tr = Triangulation::build(&pts)
        .map_err(|i| Error::invalid("points", format!("point {i} repeats an earlier point")))?;

    // Keep triangles of real vertices with a contained circumdisk.
    let mut kept_flag = vec![false; tr.tris.len()];
    let mut triangles = Vec::new();
    for (i, t) in tr.tris.iter().enumerate() {
        if !t.alive() || !t.v.iter().all(|&v| tr.is_real(v)) {
            continue;
        }
        let v = sorted3(t.v);
        let p = &s.points;
        if circumdisk(&p[v[0] as usize], &p[v[1] as usize], &p[v[2] as usize]).is_some() {
            kept_flag[i] = true;
            triangles.push(v);
        }
    }
    triangles.sort_unstable();

    let mut edges = Vec::with_capacity(3 * s.points.len());
    for (i, t) in tr.tris.iter().enumerate() {
        if !t.alive() {
            continue;
        }
        for k in 0..3 {
            let nb = t.n[k];
            if nb == NONE || (nb as usize) < i {
                continue;
            }
            let (a, b) = (t.v[(k + 1) % 3], t.v[(k + 2) % 3]);
            if !tr.is_real(a) || !tr.is_real(b) {
                continue;
            }
            let valid = kept_flag[i] || kept_flag[nb as usize] || {
                let other = tr.tris[nb as usize].v;
                let apex_nb = other.iter().copied().find(|&w| w != a && w != b).unwrap_or(NONE);
                let frame = EdgeFrame::new(pts[a as usize], pts[b as usize]);
                let bounds = [t.v[k], apex_nb]
                    .into_iter()
                    .filter(|&w| w != NONE)
                    .map(|w| frame.bound(tr.pts[w as usize]));
                has_witness(frame.containment(), bounds)
            };
            edges.push(Edge {
                a: a.min(b),
                b: a.max(b),
                valid,
            });
        }
    }
    edges.sort_unstable();
    Ok(DelaunayComplex::assemble(s, triangles, edges, core_margin))
}

/// Direct-definition oracle: every triple with an empty contained
/// circumdisk, every pair with an empty contained witness disk.
pub fn delaunay_bruteforce(s: &Sample) -> Result<DelaunayComplex<'_>> {
    if s.points.len() > MAX_BRUTEFORCE_POINTS {
        return Err(Error::guard("points", s.points.len() as f64, MAX_BRUTEFORCE_POINTS as f64));
    }
    bruteforce(s, default_core_margin(s.lambda))
}

fn bruteforce(s: &Sample, core_margin: f64) -> Result<DelaunayComplex<'_>> {
    let pts = coords(s);
    let n = pts.len() as u32;
    for i in 0..pts.len() {
        for j in 0..i {
            if pts[i].x == pts[j].x && pts[i].y == pts[j].y {
                return Err(Error::invalid("points", format!("point {i} repeats an earlier point")));
            }
        }
    }
    let p = &s.points;
    let mut triangles = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if circumdisk(&p[i as usize], &p[j as usize], &p[k as usize]).is_none() {
                    continue;
                }
                let o = orient2d(pts[i as usize], pts[j as usize], pts[k as usize]);
                let (b, c) = if o > 0.0 { (j, k) } else { (k, j) };
                let empty = (0..n)
                    .filter(|&d| d != i && d != j && d != k)
                    .all(|d| !in_circle_sos(&pts, i, b, c, d));
                if empty {
                    triangles.push([i, j, k]);
                }
            }
        }
    }
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let frame = EdgeFrame::new(pts[i as usize], pts[j as usize]);
            let bounds = (0..n)
                .filter(|&w| w != i && w != j)
                .map(|w| frame.bound(pts[w as usize]));
            if has_witness(frame.containment_bisect(), bounds) {
                edges.push(Edge { a: i, b: j, valid: true });
            }
        }
    }
    Ok(DelaunayComplex::assemble(s, triangles, edges, core_margin))
}

/// Root of the Voronoi dual implied by the sample's conditioning: the origin
/// nucleus, or the nucleus nearest to the origin for the skeleton-vertex
/// conditioning.
pub fn voronoi_root(s: &Sample) -> Result<u32> {
    match s.conditioning {
        Conditioning::RootAtOrigin => Ok(0),
        Conditioning::SkeletonVertexAtOrigin => s
            .nearest_to_origin()
            .map(|i| i as u32)
            .ok_or_else(|| Error::invalid("sample", "no nuclei")),
        Conditioning::None => Err(Error::invalid(
            "conditioning",
            "a root was requested but the sample is unconditioned",
        )),
    }
}

/// The Voronoi dual rooted according to the sample's conditioning.
pub fn dual_voronoi_graph(c: &DelaunayComplex<'_>) -> Result<DualGraph> {
    dual_voronoi_graph_rooted(c, voronoi_root(c.sample)?)
}

/// The Voronoi dual with an explicit root.
pub fn dual_voronoi_graph_rooted(c: &DelaunayComplex<'_>, root: u32) -> Result<DualGraph> {
    let edges: Vec<(u32, u32)> = c.valid_edges().collect();
    DualGraph::from_edges(
        GraphKind::VoronoiDual,
        c.sample.points.len(),
        &edges,
        root,
        c.vertex_core.clone(),
        c.sample.points.clone(),
    )
}

/// Whether the origin lies in the closed geodesic triangle. Geodesic sides
/// are chords in the Klein model, and the Klein map scales each point by a
/// positive factor, so the side tests reduce to exact Poincaré cross signs.
fn contains_origin(p: &[HPoint], t: [u32; 3]) -> bool {
    let o = Coord { x: 0.0, y: 0.0 };
    let s: Vec<f64> = (0..3)
        .map(|k| orient2d(o, p[t[k] as usize].coord(), p[t[(k + 1) % 3] as usize].coord()))
        .collect();
    (s.iter().all(|&x| x >= 0.0) || s.iter().all(|&x| x <= 0.0)) && s.iter().any(|&x| x != 0.0)
}

/// Smallest id of a triangle containing the origin.
pub fn origin_triangle(c: &DelaunayComplex<'_>) -> Option<u32> {
    c.triangles
        .iter()
        .position(|&t| contains_origin(&c.sample.points, t))
        .map(|i| i as u32)
}

/// The Delaunay dual rooted at the triangle containing the origin.
pub fn dual_delaunay_graph(c: &DelaunayComplex<'_>) -> Result<DualGraph> {
    let root = origin_triangle(c).ok_or_else(|| Error::invalid("root", "no triangle contains the origin"))?;
    dual_delaunay_graph_rooted(c, root)
}

pub fn dual_delaunay_graph_rooted(c: &DelaunayComplex<'_>, root: u32) -> Result<DualGraph> {
    let adjacency: Vec<Vec<u32>> = c
        .adjacency
        .iter()
        .map(|a| {
            let mut l: Vec<u32> = a.iter().copied().filter(|&x| x != NONE).collect();
            l.sort_unstable();
            l
        })
        .collect();
    let geometry = (0..c.triangles.len() as u32).map(|t| c.circumdisk(t).center_h).collect();
    if c.triangles.is_empty() {
        return DualGraph::from_adjacency(GraphKind::DelaunayDual, vec![], 0, vec![], vec![]);
    }
    DualGraph::from_adjacency(GraphKind::DelaunayDual, adjacency, root, c.triangle_core.clone(), geometry)
}

/// Triangles incident to a nucleus and the largest distance from the
/// nucleus to a point of their union.
#[derive(Clone, Debug, PartialEq)]
pub struct Star {
    pub triangles: Vec<u32>,
    pub radius: f64,
}

impl Star {
    /// Whether the triangles close up into a full fan around the nucleus.
    pub fn is_closed(&self, c: &DelaunayComplex<'_>, v: u32) -> bool {
        if self.triangles.is_empty() {
            return false;
        }
        let mut spokes: Vec<u32> = self
            .triangles
            .iter()
            .flat_map(|&t| c.triangles[t as usize].into_iter().filter(move |&w| w != v))
            .collect();
        spokes.sort_unstable();
        spokes.chunk_by(|a, b| a == b).all(|g| g.len() == 2)
    }
}

/// Star of a nucleus. Distance from a point is convex along geodesics, so
/// the supremum over the union is attained at a vertex.
pub fn triangle_star(c: &DelaunayComplex<'_>, v: u32) -> Result<Star> {
    let p = &c.sample.points;
    if v as usize >= p.len() {
        return Err(Error::invalid("nucleus", format!("{v} is not a nucleus")));
    }
    let mut triangles = Vec::new();
    let mut radius: f64 = 0.0;
    for (i, t) in c.triangles.iter().enumerate() {
        if t.contains(&v) {
            triangles.push(i as u32);
            for &w in t {
                radius = radius.max(dist_h(&p[v as usize], &p[w as usize]));
            }
        }
    }
    Ok(Star { triangles, radius })
}
