//! Voronoi cells clipped to the sampling window.
//!
//! Bisectors are straight lines in the Klein model, so every cell is a convex
//! Klein polygon cut out by the half-planes of its Delaunay neighbors. The
//! window is the Klein disk of radius `tanh(window_r)`.

use std::f64::consts::TAU;

use crate::hypgeo::{bisector_klein, circumdisk, dist_h, from_klein, signed_triangle_area, HPoint};

use super::DelaunayComplex;

const BOX: u32 = u32::MAX;
const BOX_HALF: f64 = 1.5;

/// One boundary piece of a clipped cell, traversed counterclockwise.
#[derive(Clone, Debug, PartialEq)]
pub enum Piece {
    /// Part of the bisector with `neighbor`.
    Segment { from: HPoint, to: HPoint, neighbor: u32 },
    /// Counterclockwise arc of the window circle sweeping `sweep` radians.
    Arc { from: HPoint, to: HPoint, sweep: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub nucleus: u32,
    pub pieces: Vec<Piece>,
    /// Voronoi vertices inside the window, counterclockwise.
    pub vertices: Vec<HPoint>,
    /// The cell reaches the window circle.
    pub clipped: bool,
}

impl Cell {
    /// Hyperbolic area, as a signed fan of geodesic triangles and window
    /// sectors seen from the origin.
    pub fn area(&self, window_r: f64) -> f64 {
        let sector = window_r.cosh() - 1.0;
        self.pieces
            .iter()
            .map(|p| match p {
                Piece::Segment { from, to, .. } => signed_triangle_area(&HPoint::ORIGIN, from, to),
                Piece::Arc { sweep, .. } => sector * sweep,
            })
            .sum()
    }

    /// Neighbors sharing a boundary segment inside the window.
    pub fn neighbors(&self) -> impl Iterator<Item = u32> + '_ {
        self.pieces.iter().filter_map(|p| match p {
            Piece::Segment { neighbor, .. } => Some(*neighbor),
            Piece::Arc { .. } => None,
        })
    }
}

/// All cells of a complex, indexed by nucleus.
#[derive(Clone, Debug)]
pub struct VoronoiCells {
    pub window_r: f64,
    pub cells: Vec<Cell>,
}

impl VoronoiCells {
    /// Every Voronoi edge once, as `(lower nucleus, higher nucleus, from, to)`.
    pub fn edges(&self) -> Vec<(u32, u32, HPoint, HPoint)> {
        let mut out = Vec::new();
        for c in &self.cells {
            for p in &c.pieces {
                if let Piece::Segment { from, to, neighbor } = p {
                    if c.nucleus < *neighbor {
                        out.push((c.nucleus, *neighbor, *from, *to));
                    }
                }
            }
        }
        out
    }

    /// Whether `p` lies in the closed cell of `nucleus` within the window.
    pub fn contains(&self, points: &[HPoint], nucleus: u32, p: &HPoint) -> bool {
        if p.rad_h() > self.window_r {
            return false;
        }
        let cell = &self.cells[nucleus as usize];
        if cell.pieces.is_empty() {
            return false;
        }
        let x = &points[nucleus as usize];
        cell.neighbors()
            .all(|y| dist_h(p, x) <= dist_h(p, &points[y as usize]))
    }

    pub fn total_area(&self) -> f64 {
        self.cells.iter().map(|c| c.area(self.window_r)).sum()
    }
}

type Poly = Vec<([f64; 2], u32)>;

/// Clip a counterclockwise polygon, whose edge `i` runs from vertex `i` and
/// carries tag `i`, by `{k : n.k < c}`. New edges carry `tag`.
fn clip(poly: &Poly, n: [f64; 2], c: f64, tag: u32) -> Poly {
    let mut out = Vec::with_capacity(poly.len() + 1);
    let f = |p: [f64; 2]| n[0] * p[0] + n[1] * p[1] - c;
    for i in 0..poly.len() {
        let (a, ta) = poly[i];
        let (b, _) = poly[(i + 1) % poly.len()];
        let (fa, fb) = (f(a), f(b));
        let cut = |fa: f64, fb: f64| {
            let s = fa / (fa - fb);
            [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]
        };
        match (fa < 0.0, fb < 0.0) {
            (true, true) => out.push((a, ta)),
            (true, false) => {
                out.push((a, ta));
                out.push((cut(fa, fb), tag));
            }
            (false, true) => out.push((cut(fa, fb), ta)),
            (false, false) => {}
        }
    }
    out
}

/// Parameter range `[s0, s1]` of `a + s(b - a)`, `s` in `[0, 1]`, inside the
/// disk of radius `rho`.
fn inside_range(a: [f64; 2], b: [f64; 2], rho: f64) -> Option<(f64, f64)> {
    let d = [b[0] - a[0], b[1] - a[1]];
    let qa = d[0] * d[0] + d[1] * d[1];
    let qb = a[0] * d[0] + a[1] * d[1];
    let qc = a[0] * a[0] + a[1] * a[1] - rho * rho;
    if qa == 0.0 {
        return None;
    }
    let disc = qb * qb - qa * qc;
    if disc <= 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    // Cancellation-free roots of qa s^2 + 2 qb s + qc.
    let q = -(qb + qb.signum() * sq);
    let (r1, r2) = if q == 0.0 { (-sq / qa, sq / qa) } else { (q / qa, qc / q) };
    let (s0, s1) = (r1.min(r2).max(0.0), r1.max(r2).min(1.0));
    (s0 < s1).then_some((s0, s1))
}

fn lerp(a: [f64; 2], b: [f64; 2], s: f64) -> [f64; 2] {
    [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]
}

fn point(k: [f64; 2], rho: f64) -> HPoint {
    let n = k[0].hypot(k[1]);
    let k = if n > rho { [k[0] * rho / n, k[1] * rho / n] } else { k };
    from_klein(k).expect("clipped points lie inside the window")
}

fn on_window(k: [f64; 2], window_r: f64) -> HPoint {
    HPoint::polar(window_r, k[1].atan2(k[0]))
}

fn ccw_sweep(from: [f64; 2], to: [f64; 2]) -> f64 {
    let a = to[1].atan2(to[0]) - from[1].atan2(from[0]);
    let a = a.rem_euclid(TAU);
    if a == 0.0 {
        TAU
    } else {
        a
    }
}

/// Cell of nucleus `x` given its Delaunay neighbors.
pub(crate) fn cell_of(points: &[HPoint], window_r: f64, x: u32, neighbors: &[u32]) -> Cell {
    let rho = window_r.tanh();
    let b = BOX_HALF;
    let mut poly: Poly = vec![([-b, -b], BOX), ([b, -b], BOX), ([b, b], BOX), ([-b, b], BOX)];
    let px = &points[x as usize];
    for &y in neighbors {
        let (n, c) = bisector_klein(px, &points[y as usize]);
        // Rescale so the cut tolerances are independent of the distance.
        let s = n[0].hypot(n[1]);
        poly = clip(&poly, [n[0] / s, n[1] / s], c / s, y);
        if poly.is_empty() {
            break;
        }
    }

    // (from, to, neighbor, starts at a polygon vertex, ends at one)
    let mut runs: Vec<([f64; 2], [f64; 2], u32, bool, bool)> = Vec::new();
    for i in 0..poly.len() {
        let (a, tag) = poly[i];
        let (bv, _) = poly[(i + 1) % poly.len()];
        if let Some((s0, s1)) = inside_range(a, bv, rho) {
            runs.push((lerp(a, bv, s0), lerp(a, bv, s1), tag, s0 == 0.0, s1 == 1.0));
        }
    }

    let mut pieces = Vec::new();
    let mut vertices = Vec::new();
    if runs.is_empty() {
        // The window lies entirely inside or entirely outside the polygon.
        let inside = !poly.is_empty()
            && (0..poly.len()).all(|i| {
                let (a, _) = poly[i];
                let (bv, _) = poly[(i + 1) % poly.len()];
                a[0] * bv[1] - a[1] * bv[0] >= 0.0
            });
        if inside {
            let start = HPoint::polar(window_r, 0.0);
            pieces.push(Piece::Arc {
                from: start,
                to: start,
                sweep: TAU,
            });
        }
        return Cell {
            nucleus: x,
            clipped: inside,
            pieces,
            vertices,
        };
    }

    let mut clipped = false;
    let m = runs.len();
    for i in 0..m {
        let (from, to, tag, _, ends_at_vertex) = runs[i];
        let next = runs[(i + 1) % m];
        if tag != BOX {
            pieces.push(Piece::Segment {
                from: point(from, rho),
                to: point(to, rho),
                neighbor: tag,
            });
        }
        if ends_at_vertex && next.3 {
            // Polygon vertex inside the window: a Voronoi vertex of x and
            // the two neighbors meeting there.
            if tag != BOX && next.2 != BOX {
                let (p1, p2) = (&points[tag as usize], &points[next.2 as usize]);
                let v = circumdisk(px, p1, p2).map_or_else(|| point(to, rho), |d| d.center_h);
                vertices.push(v);
            }
        } else {
            clipped = true;
            pieces.push(Piece::Arc {
                from: on_window(to, window_r),
                to: on_window(next.0, window_r),
                sweep: ccw_sweep(to, next.0),
            });
        }
    }
    Cell {
        nucleus: x,
        pieces,
        vertices,
        clipped,
    }
}

/// Clipped Voronoi cells of every nucleus in the complex.
pub fn voronoi_cells(c: &DelaunayComplex<'_>) -> VoronoiCells {
    let s = c.sample();
    let n = s.points.len();
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
    for (a, b) in c.valid_edges() {
        adj[a as usize].push(b);
        adj[b as usize].push(a);
    }
    let cells = (0..n as u32)
        .map(|x| cell_of(&s.points, s.window_r, x, &adj[x as usize]))
        .collect();
    VoronoiCells {
        window_r: s.window_r,
        cells,
    }
}
