// Incremental Euclidean Delaunay triangulation (Bowyer-Watson) with exact
// predicates and symbolic tie-breaking. Internal to `tess`.

use robust::{incircle, orient2d, Coord};

pub(crate) const NONE: u32 = u32::MAX;

// Inradius 2 around the origin, so the unit disk sits well inside.
const SUPER: [[f64; 2]; 3] = [
    [0.0, 4.0],
    [-3.464_101_615_137_754_4, -2.0],
    [3.464_101_615_137_754_4, -2.0],
];

/// Triangle with counterclockwise vertices; `n[k]` is the neighbor across
/// the edge opposite `v[k]`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Tri {
    pub v: [u32; 3],
    pub n: [u32; 3],
}

impl Tri {
    fn dead() -> Tri {
        Tri {
            v: [NONE; 3],
            n: [NONE; 3],
        }
    }

    pub fn alive(&self) -> bool {
        self.v[0] != NONE
    }
}

/// Whether `d` lies inside the circumcircle of the counterclockwise triangle
/// `(a, b, c)`. Exact cocircular ties are broken as if every point were
/// lifted by an infinitesimal amount decreasing with its index: if `d` has
/// the smallest index it is outside, otherwise it is inside iff it lies on
/// the same side of the opposite edge as the smallest-index vertex.
pub(crate) fn in_circle_sos(pts: &[Coord<f64>], a: u32, b: u32, c: u32, d: u32) -> bool {
    let det = incircle(pts[a as usize], pts[b as usize], pts[c as usize], pts[d as usize]);
    if det != 0.0 {
        return det > 0.0;
    }
    let low = a.min(b).min(c);
    if d < low {
        return false;
    }
    let (b, c) = if low == a {
        (b, c)
    } else if low == b {
        (c, a)
    } else {
        (a, b)
    };
    orient2d(pts[b as usize], pts[c as usize], pts[d as usize]) > 0.0
}

fn hilbert_key(x: f64, y: f64) -> u64 {
    let scale = u32::MAX as f64;
    let mut xi = ((x.clamp(-1.0, 1.0) + 1.0) * 0.5 * scale) as u32;
    let mut yi = ((y.clamp(-1.0, 1.0) + 1.0) * 0.5 * scale) as u32;
    let mut d = 0u64;
    let mut s = 1u32 << 31;
    while s > 0 {
        let rx = u32::from(xi & s != 0);
        let ry = u32::from(yi & s != 0);
        d += (s as u64) * (s as u64) * u64::from((3 * rx) ^ ry);
        if ry == 0 {
            if rx == 1 {
                xi = !xi;
                yi = !yi;
            }
            std::mem::swap(&mut xi, &mut yi);
        }
        s >>= 1;
    }
    d
}

pub(crate) struct Triangulation {
    pub pts: Vec<Coord<f64>>,
    pub n_real: usize,
    pub tris: Vec<Tri>,
    free: Vec<u32>,
    stamp: Vec<u32>,
    generation: u32,
    last: u32,
}

impl Triangulation {
    /// Triangulate `points` (all inside the unit disk). Returns the index of
    /// a repeated point on failure.
    pub fn build(points: &[Coord<f64>]) -> std::result::Result<Triangulation, usize> {
        let n = points.len();
        let mut pts = points.to_vec();
        pts.extend(SUPER.iter().map(|&[x, y]| Coord { x, y }));
        let s = n as u32;
        let mut t = Triangulation {
            pts,
            n_real: n,
            tris: vec![Tri {
                v: [s, s + 1, s + 2],
                n: [NONE; 3],
            }],
            free: Vec::new(),
            stamp: vec![0],
            generation: 0,
            last: 0,
        };
        let mut order: Vec<(u64, u32)> = points
            .iter()
            .enumerate()
            .map(|(i, p)| (hilbert_key(p.x, p.y), i as u32))
            .collect();
        order.sort_unstable();
        for (_, i) in order {
            t.insert(i)?;
        }
        Ok(t)
    }

    fn locate(&self, p: Coord<f64>) -> u32 {
        let mut t = self.last;
        let mut rot = 0usize;
        loop {
            let tri = &self.tris[t as usize];
            let mut next = NONE;
            for j in 0..3 {
                let k = (j + rot) % 3;
                let a = self.pts[tri.v[(k + 1) % 3] as usize];
                let b = self.pts[tri.v[(k + 2) % 3] as usize];
                if orient2d(a, b, p) < 0.0 {
                    next = tri.n[k];
                    break;
                }
            }
            if next == NONE {
                return t;
            }
            t = next;
            rot = rot.wrapping_add(1);
        }
    }

    fn alloc(&mut self) -> u32 {
        if let Some(id) = self.free.pop() {
            id
        } else {
            self.tris.push(Tri::dead());
            self.stamp.push(0);
            (self.tris.len() - 1) as u32
        }
    }

    fn insert(&mut self, p: u32) -> std::result::Result<(), usize> {
        let pc = self.pts[p as usize];
        let t0 = self.locate(pc);
        if self.tris[t0 as usize]
            .v
            .iter()
            .any(|&v| self.pts[v as usize].x == pc.x && self.pts[v as usize].y == pc.y)
        {
            return Err(p as usize);
        }

        self.generation = self.generation.wrapping_add(1);
        let gen = self.generation;
        let mut bad = vec![t0];
        self.stamp[t0 as usize] = gen;
        let mut i = 0;
        while i < bad.len() {
            let t = bad[i];
            i += 1;
            for k in 0..3 {
                let nb = self.tris[t as usize].n[k];
                if nb == NONE || self.stamp[nb as usize] == gen {
                    continue;
                }
                let [a, b, c] = self.tris[nb as usize].v;
                if in_circle_sos(&self.pts, a, b, c, p) {
                    self.stamp[nb as usize] = gen;
                    bad.push(nb);
                }
            }
        }

        // Cavity boundary, as edges (a, b) seen counterclockwise from p.
        let mut boundary: Vec<(u32, u32, u32)> = Vec::with_capacity(bad.len() + 2);
        for &t in &bad {
            let tri = self.tris[t as usize];
            for k in 0..3 {
                let nb = tri.n[k];
                if nb == NONE || self.stamp[nb as usize] != gen {
                    boundary.push((tri.v[(k + 1) % 3], tri.v[(k + 2) % 3], nb));
                }
            }
        }

        let mut ids = Vec::with_capacity(boundary.len());
        for j in 0..boundary.len() {
            let id = if j < bad.len() { bad[j] } else { self.alloc() };
            ids.push(id);
        }
        for &t in bad.iter().skip(boundary.len()) {
            self.tris[t as usize] = Tri::dead();
            self.free.push(t);
        }
        for (j, &(a, b, nb)) in boundary.iter().enumerate() {
            let id = ids[j];
            let mut n = [NONE, NONE, nb];
            for (l, &(a2, b2, _)) in boundary.iter().enumerate() {
                if a2 == b {
                    n[0] = ids[l];
                }
                if b2 == a {
                    n[1] = ids[l];
                }
            }
            self.tris[id as usize] = Tri { v: [a, b, p], n };
            if nb != NONE {
                let other = &mut self.tris[nb as usize];
                for k in 0..3 {
                    if other.v[(k + 1) % 3] == b && other.v[(k + 2) % 3] == a {
                        other.n[k] = id;
                    }
                }
            }
        }
        self.last = ids[0];
        Ok(())
    }

    pub fn is_real(&self, v: u32) -> bool {
        (v as usize) < self.n_real
    }
}
