//! Hyperbolic plane primitives in the Poincaré disk, with Klein-model and
//! hyperboloid conversions.
//!
//! Points carry hyperbolic polar coordinates (authoritative) and derived
//! Poincaré coordinates. Near the boundary `1 - |z|^2` is computed from the
//! polar radius as `sech^2(r/2)` rather than from the Cartesian values, which
//! keeps distances accurate out to [`RAD_CAP`].

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use robust::{orient2d, Coord};

use crate::{Error, Result};

/// Largest hyperbolic radius accepted for sampling windows.
pub const RAD_CAP: f64 = 25.0;

/// Margin for "Euclidean circumcircle contained in the open unit disk".
pub const CONTAINMENT_MARGIN: f64 = 1e-12;

/// Relative collinearity threshold: `|b' x c'| <= COLLINEAR_REL * |b'| |c'|`.
pub const COLLINEAR_REL: f64 = 1e-16;

/// A point of the hyperbolic plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HPoint {
    rad_h: f64,
    theta: f64,
    re: f64,
    im: f64,
}

fn norm_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

impl HPoint {
    pub const ORIGIN: HPoint = HPoint {
        rad_h: 0.0,
        theta: 0.0,
        re: 0.0,
        im: 0.0,
    };

    /// Point at hyperbolic distance `rad_h` from the origin in direction `theta`.
    ///
    /// Does not enforce [`RAD_CAP`]; see [`HPoint::checked_polar`].
    pub fn polar(rad_h: f64, theta: f64) -> HPoint {
        debug_assert!(rad_h >= 0.0 && rad_h.is_finite());
        let theta = norm_angle(theta);
        if rad_h == 0.0 {
            return HPoint {
                theta,
                ..HPoint::ORIGIN
            };
        }
        let e = (0.5 * rad_h).tanh();
        let (s, c) = theta.sin_cos();
        HPoint {
            rad_h,
            theta,
            re: e * c,
            im: e * s,
        }
    }

    pub fn checked_polar(rad_h: f64, theta: f64) -> Result<HPoint> {
        if !(rad_h >= 0.0) || !rad_h.is_finite() {
            return Err(Error::invalid("rad_h", format!("{rad_h} is not a finite nonnegative radius")));
        }
        if !theta.is_finite() {
            return Err(Error::invalid("theta", "angle is not finite"));
        }
        if rad_h > RAD_CAP {
            return Err(Error::guard("rad_h", rad_h, RAD_CAP));
        }
        Ok(HPoint::polar(rad_h, theta))
    }

    /// Point with Poincaré coordinates `(re, im)`; requires `re^2 + im^2 < 1`.
    pub fn from_poincare(re: f64, im: f64) -> Result<HPoint> {
        let e = re.hypot(im);
        if !(e < 1.0) {
            return Err(Error::invalid("point", format!("({re}, {im}) is not inside the unit disk")));
        }
        Ok(Self::poincare_unchecked(re, im))
    }

    pub(crate) fn poincare_unchecked(re: f64, im: f64) -> HPoint {
        let e = re.hypot(im);
        if e == 0.0 {
            return HPoint::ORIGIN;
        }
        HPoint {
            rad_h: 2.0 * e.atanh(),
            theta: norm_angle(im.atan2(re)),
            re,
            im,
        }
    }

    pub fn rad_h(&self) -> f64 {
        self.rad_h
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn re(&self) -> f64 {
        self.re
    }

    pub fn im(&self) -> f64 {
        self.im
    }

    pub fn z(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    /// Euclidean norm of the Poincaré coordinates.
    pub fn norm_e(&self) -> f64 {
        (0.5 * self.rad_h).tanh()
    }

    /// `1 - |z|^2`, accurate near the boundary.
    pub fn one_minus_norm2(&self) -> f64 {
        let c = (0.5 * self.rad_h).cosh();
        1.0 / (c * c)
    }

    /// Klein coordinates `tanh(r) (cos theta, sin theta)`.
    pub fn klein(&self) -> [f64; 2] {
        let t = self.rad_h.tanh();
        let (s, c) = self.theta.sin_cos();
        [t * c, t * s]
    }

    /// Hyperboloid coordinates `(cosh r, sinh r cos theta, sinh r sin theta)`.
    pub fn hyperboloid(&self) -> [f64; 3] {
        let sh = self.rad_h.sinh();
        let (s, c) = self.theta.sin_cos();
        [self.rad_h.cosh(), sh * c, sh * s]
    }

    /// Unit vector `(cos theta, sin theta)` on the ideal boundary.
    pub fn direction(&self) -> [f64; 2] {
        let (s, c) = self.theta.sin_cos();
        [c, s]
    }

    pub fn is_origin(&self) -> bool {
        self.rad_h == 0.0
    }

    pub(crate) fn coord(&self) -> Coord<f64> {
        Coord {
            x: self.re,
            y: self.im,
        }
    }
}

/// Hyperbolic distance.
pub fn dist_h(p: &HPoint, q: &HPoint) -> f64 {
    if p.is_origin() {
        return q.rad_h;
    }
    if q.is_origin() {
        return p.rad_h;
    }
    let d = (p.re - q.re).hypot(p.im - q.im);
    if d == 0.0 {
        return 0.0;
    }
    2.0 * (d / (p.one_minus_norm2() * q.one_minus_norm2()).sqrt()).asinh()
}

/// Area of a hyperbolic ball of radius `r`: `2 pi (cosh r - 1)`.
pub fn ball_area(r: f64) -> f64 {
    let s = (0.5 * r).sinh();
    4.0 * PI * s * s
}

/// Euclidean radius of the Poincaré disk image of a hyperbolic ball at 0.
pub fn radius_h_to_e(r: f64) -> f64 {
    (0.5 * r).tanh()
}

pub fn radius_e_to_h(e: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&e) {
        return Err(Error::invalid("radius_e", format!("{e} is not in [0, 1)")));
    }
    Ok(2.0 * e.atanh())
}

/// Klein coordinates of `p`.
pub fn to_klein(p: &HPoint) -> [f64; 2] {
    p.klein()
}

/// Inverse of [`to_klein`]; requires `|k| < 1`.
pub fn from_klein(k: [f64; 2]) -> Result<HPoint> {
    let n = k[0].hypot(k[1]);
    if !(n < 1.0) {
        return Err(Error::invalid("klein", format!("{k:?} is not inside the unit disk")));
    }
    if n == 0.0 {
        return Ok(HPoint::ORIGIN);
    }
    Ok(HPoint::polar(n.atanh(), k[1].atan2(k[0])))
}

/// Direction (unnormalized) of the geodesic from `v` towards `b`, after the
/// isometry moving `v` to the origin.
fn tangent(v: &HPoint, b: &HPoint) -> Complex64 {
    let vz = v.z();
    let bz = b.z();
    (bz - vz) * (Complex64::new(1.0, 0.0) - vz.conj() * bz).conj()
}

/// Interior angle at `v` of the geodesic triangle `(v, b, c)`.
pub fn angle_at(v: &HPoint, b: &HPoint, c: &HPoint) -> f64 {
    let u = tangent(v, b);
    let w = tangent(v, c);
    let cross = u.re * w.im - u.im * w.re;
    let dot = u.re * w.re + u.im * w.im;
    cross.abs().atan2(dot)
}

/// Hyperbolic area of the geodesic triangle, by angle defect.
pub fn triangle_area(a: &HPoint, b: &HPoint, c: &HPoint) -> f64 {
    let s = angle_at(a, b, c) + angle_at(b, c, a) + angle_at(c, a, b);
    (PI - s).max(0.0)
}

/// Triangle area with the sign of the orientation of `(a, b, c)`.
pub fn signed_triangle_area(a: &HPoint, b: &HPoint, c: &HPoint) -> f64 {
    let o = orient2d(a.coord(), b.coord(), c.coord());
    if o == 0.0 {
        0.0
    } else {
        o.signum() * triangle_area(a, b, c)
    }
}

/// A hyperbolic disk given both as hyperbolic and Euclidean circle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HDisk {
    pub center_h: HPoint,
    pub radius_h: f64,
    pub center_e: [f64; 2],
    pub radius_e: f64,
}

impl HDisk {
    /// Build from the Euclidean circle; `None` unless it lies inside the open
    /// unit disk with margin [`CONTAINMENT_MARGIN`].
    pub fn from_euclidean(center_e: [f64; 2], radius_e: f64) -> Option<HDisk> {
        let c = center_e[0].hypot(center_e[1]);
        let slack = (1.0 - c) - radius_e;
        if !(slack > CONTAINMENT_MARGIN) || !(radius_e > 0.0) {
            return None;
        }
        // Signed Euclidean positions of the two boundary points on the line
        // through 0 and the center.
        let near = c - radius_e;
        let far = c + radius_e;
        let r1 = 2.0 * near.atanh();
        let r2 = ((1.0 + far) / slack).ln();
        let mid = 0.5 * (r1 + r2);
        let theta = if c > 0.0 { center_e[1].atan2(center_e[0]) } else { 0.0 };
        let center_h = if mid >= 0.0 {
            HPoint::polar(mid, theta)
        } else {
            HPoint::polar(-mid, theta + PI)
        };
        Some(HDisk {
            center_h,
            radius_h: 0.5 * (r2 - r1),
            center_e,
            radius_e,
        })
    }

    /// Build from hyperbolic center and radius.
    pub fn from_hyperbolic(center_h: HPoint, radius_h: f64) -> HDisk {
        let r1 = center_h.rad_h - radius_h;
        let r2 = center_h.rad_h + radius_h;
        let e1 = (0.5 * r1).tanh();
        let e2 = (0.5 * r2).tanh();
        let c = 0.5 * (e1 + e2);
        let [dx, dy] = center_h.direction();
        HDisk {
            center_h,
            radius_h,
            center_e: [c * dx, c * dy],
            radius_e: 0.5 * (e2 - e1),
        }
    }

    /// Strict Euclidean containment of `p` in the open disk.
    pub fn contains_strict(&self, p: &HPoint) -> bool {
        let d = (p.re - self.center_e[0]).hypot(p.im - self.center_e[1]);
        d < self.radius_e
    }

    /// Largest hyperbolic radius reached by the closed disk.
    pub fn max_rad_h(&self) -> f64 {
        self.center_h.rad_h + self.radius_h
    }
}

/// Euclidean circumcircle of three points, computed relative to `a`.
/// `None` for (relatively) collinear input.
pub fn circumcircle_e(a: &HPoint, b: &HPoint, c: &HPoint) -> Option<([f64; 2], f64)> {
    let (bx, by) = (b.re - a.re, b.im - a.im);
    let (cx, cy) = (c.re - a.re, c.im - a.im);
    let cross = bx * cy - by * cx;
    let lb = bx.hypot(by);
    let lc = cx.hypot(cy);
    if cross.abs() <= COLLINEAR_REL * lb * lc || lb == 0.0 || lc == 0.0 {
        return None;
    }
    let d = 2.0 * cross;
    let b2 = bx * bx + by * by;
    let c2 = cx * cx + cy * cy;
    let ux = (cy * b2 - by * c2) / d;
    let uy = (bx * c2 - cx * b2) / d;
    Some(([a.re + ux, a.im + uy], ux.hypot(uy)))
}

/// Hyperbolic circumdisk, present iff the Euclidean circumcircle of the
/// Poincaré coordinates is contained in the unit disk.
pub fn circumdisk(a: &HPoint, b: &HPoint, c: &HPoint) -> Option<HDisk> {
    let (center, rho) = circumcircle_e(a, b, c)?;
    HDisk::from_euclidean(center, rho)
}

/// A geodesic segment, with the Euclidean circle carrying it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Geodesic {
    pub p: HPoint,
    pub q: HPoint,
    pub arc: GeodesicArc,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GeodesicArc {
    /// Straight chord through the origin.
    Diameter,
    /// Circle orthogonal to the unit circle.
    Circle { center: [f64; 2], radius: f64 },
}

impl Geodesic {
    pub fn through(p: &HPoint, q: &HPoint) -> Geodesic {
        let cross = p.re * q.im - p.im * q.re;
        let scale = p.norm_e() * q.norm_e();
        let arc = if cross.abs() <= 1e-12 * scale || scale == 0.0 {
            GeodesicArc::Diameter
        } else {
            let sp = 0.5 * (1.0 + p.re * p.re + p.im * p.im);
            let sq = 0.5 * (1.0 + q.re * q.re + q.im * q.im);
            let cx = (sp * q.im - sq * p.im) / cross;
            let cy = (sq * p.re - sp * q.re) / cross;
            let r2 = cx * cx + cy * cy - 1.0;
            if r2 <= 0.0 || !r2.is_finite() {
                GeodesicArc::Diameter
            } else {
                GeodesicArc::Circle {
                    center: [cx, cy],
                    radius: r2.sqrt(),
                }
            }
        };
        Geodesic { p: *p, q: *q, arc }
    }

    /// Whether the arc from `p` to `q` runs counterclockwise around its
    /// circle center (math orientation). Diameters return `false`.
    pub fn ccw(&self) -> bool {
        match self.arc {
            GeodesicArc::Diameter => false,
            GeodesicArc::Circle { center, .. } => {
                let (ax, ay) = (self.p.re - center[0], self.p.im - center[1]);
                let (bx, by) = (self.q.re - center[0], self.q.im - center[1]);
                ax * by - ay * bx > 0.0
            }
        }
    }
}

/// Indices of the hyperbolic convex hull vertices, counterclockwise, computed
/// as the Euclidean hull in Klein coordinates. Points lying in the relative
/// interior of a hull edge are not vertices.
pub fn convex_hull_indices(points: &[HPoint]) -> Vec<usize> {
    let ks: Vec<Coord<f64>> = points
        .iter()
        .map(|p| {
            let [x, y] = p.klein();
            Coord { x, y }
        })
        .collect();
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&i, &j| {
        ks[i]
            .x
            .total_cmp(&ks[j].x)
            .then(ks[i].y.total_cmp(&ks[j].y))
            .then(i.cmp(&j))
    });
    idx.dedup_by(|a, b| ks[*a].x == ks[*b].x && ks[*a].y == ks[*b].y);
    if idx.len() <= 2 {
        return idx;
    }
    let mut hull: Vec<usize> = Vec::with_capacity(2 * idx.len());
    for pass in 0..2 {
        let start = hull.len();
        let seq: Box<dyn Iterator<Item = &usize>> = if pass == 0 {
            Box::new(idx.iter())
        } else {
            Box::new(idx.iter().rev())
        };
        for &i in seq {
            while hull.len() >= start + 2 {
                let a = hull[hull.len() - 2];
                let b = hull[hull.len() - 1];
                if orient2d(ks[a], ks[b], ks[i]) <= 0.0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(i);
        }
        hull.pop();
    }
    if hull.len() == 2 && hull[0] == hull[1] {
        hull.truncate(1);
    }
    hull
}

/// Hull vertices of the hyperbolic convex hull in boundary order.
pub fn convex_hull_h(points: &[HPoint]) -> Vec<HPoint> {
    convex_hull_indices(points).into_iter().map(|i| points[i]).collect()
}

fn segments_cross(a: Coord<f64>, b: Coord<f64>, c: Coord<f64>, d: Coord<f64>) -> bool {
    let o1 = orient2d(a, b, c);
    let o2 = orient2d(a, b, d);
    let o3 = orient2d(c, d, a);
    let o4 = orient2d(c, d, b);
    if o1 * o2 < 0.0 && o3 * o4 < 0.0 {
        return true;
    }
    let on = |p: Coord<f64>, q: Coord<f64>, r: Coord<f64>| {
        r.x >= p.x.min(q.x) && r.x <= p.x.max(q.x) && r.y >= p.y.min(q.y) && r.y <= p.y.max(q.y)
    };
    (o1 == 0.0 && on(a, b, c))
        || (o2 == 0.0 && on(a, b, d))
        || (o3 == 0.0 && on(c, d, a))
        || (o4 == 0.0 && on(c, d, b))
}

/// Area of a simple geodesic polygon (either orientation).
///
/// Fewer than three vertices give zero. Self-intersecting boundaries are
/// rejected.
pub fn polygon_area_h(vertices: &[HPoint]) -> Result<f64> {
    let n = vertices.len();
    if n < 3 {
        return Ok(0.0);
    }
    // Geodesics are chords in the Klein model, so simplicity is a planar test.
    let ks: Vec<Coord<f64>> = vertices
        .iter()
        .map(|p| {
            let [x, y] = p.klein();
            Coord { x, y }
        })
        .collect();
    for i in 0..n {
        for j in i + 1..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                continue;
            }
            if segments_cross(ks[i], ks[(i + 1) % n], ks[j], ks[(j + 1) % n]) {
                return Err(Error::invalid("vertices", format!("edges {i} and {j} intersect")));
            }
        }
    }
    let mut total = 0.0;
    for i in 0..n {
        total += signed_triangle_area(&HPoint::ORIGIN, &vertices[i], &vertices[(i + 1) % n]);
    }
    Ok(total.abs())
}

/// Orientation-preserving disk automorphism `z -> rot (z - a) / (1 - conj(a) z)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiskAutomorphism {
    a: HPoint,
    rot: Complex64,
}

impl DiskAutomorphism {
    pub fn identity() -> Self {
        DiskAutomorphism {
            a: HPoint::ORIGIN,
            rot: Complex64::new(1.0, 0.0),
        }
    }

    /// Automorphism sending `a` to 0, followed by rotation by `phi`.
    pub fn new(a: HPoint, phi: f64) -> Self {
        DiskAutomorphism {
            a,
            rot: Complex64::from_polar(1.0, phi),
        }
    }

    pub fn apply(&self, p: &HPoint) -> HPoint {
        if self.a.is_origin() {
            return HPoint::polar(p.rad_h, p.theta + self.rot.arg());
        }
        let a = self.a.z();
        let z = p.z();
        // 1 - conj(a) z rewritten to avoid cancellation when z is near a.
        let den = Complex64::new(self.a.one_minus_norm2(), 0.0) + a.conj() * (a - z);
        let w = self.rot * (z - a) / den;
        if w.norm() == 0.0 {
            return HPoint::ORIGIN;
        }
        // Radius from the (accurate) distance to a, angle from w.
        HPoint::polar(dist_h(&self.a, p), w.arg())
    }
}

/// Automorphism moving `p` to the origin.
pub fn isometry_to_origin(p: &HPoint) -> DiskAutomorphism {
    if p.is_origin() {
        DiskAutomorphism::identity()
    } else {
        DiskAutomorphism::new(*p, 0.0)
    }
}

/// Klein-model half-plane of points strictly closer to `x` than to `y`:
/// `{k : n[0] k0 + n[1] k1 < c}` with return value `(n, c)`.
pub fn bisector_klein(x: &HPoint, y: &HPoint) -> ([f64; 2], f64) {
    let hx = x.hyperboloid();
    let hy = y.hyperboloid();
    ([hy[1] - hx[1], hy[2] - hx[2]], hy[0] - hx[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pt(x: f64, y: f64) -> HPoint {
        HPoint::from_poincare(x, y).unwrap()
    }

    fn random_point(rng: &mut ChaCha8Rng, rmax: f64) -> HPoint {
        HPoint::polar(rng.random::<f64>() * rmax, rng.random::<f64>() * TAU)
    }

    // Composite Simpson rule, used as an independent integrator.
    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(a + i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn distances_match_metric_integral() {
        assert_eq!(dist_h(&HPoint::ORIGIN, &HPoint::ORIGIN), 0.0);
        let d = dist_h(&HPoint::ORIGIN, &pt(0.5, 0.0));
        let oracle = simpson(|t| 2.0 / (1.0 - t * t), 0.0, 0.5, 2000);
        assert!((d - oracle).abs() < 1e-12);
        assert!((d - 3f64.ln()).abs() < 1e-14);
        let d = dist_h(&pt(0.3, 0.0), &pt(-0.3, 0.0));
        let oracle = simpson(|t| 2.0 / (1.0 - t * t), -0.3, 0.3, 2000);
        assert!((d - oracle).abs() < 1e-12);
        assert!((d - 1.2381).abs() < 1e-4);
    }

    #[test]
    fn ball_area_values() {
        assert_eq!(ball_area(0.0), 0.0);
        assert!((ball_area(1.0) - 2.0 * PI * (1f64.cosh() - 1.0)).abs() < 1e-14);
        assert!((ball_area(1.0) - 3.41228).abs() < 1e-5);
        assert!((ball_area(2.0) - 17.355387).abs() < 1e-6);
        // Area as the integral of the circumference 2 pi sinh(s).
        let q = simpson(|s| TAU * s.sinh(), 0.0, 2.0, 2000);
        assert!((ball_area(2.0) - q).abs() < 1e-9);
        for r in [0.5, 3.0, 10.0] {
            assert!(ball_area(r) <= PI * r.exp());
        }
    }

    #[test]
    fn radius_conversions() {
        assert_eq!(radius_h_to_e(0.0), 0.0);
        assert!((radius_e_to_h(0.9995).unwrap() - 8.294).abs() < 1e-3);
        assert!((radius_e_to_h(radius_h_to_e(5.0)).unwrap() - 5.0).abs() < 1e-12);
        assert!(radius_e_to_h(1.0).is_err());
    }

    #[test]
    fn polar_and_poincare_agree() {
        let p = HPoint::polar(3.0, 1.0);
        let e = (1.5f64).tanh();
        assert!((p.re() - e * 1f64.cos()).abs() < 1e-12);
        assert!((p.im() - e * 1f64.sin()).abs() < 1e-12);
        let q = HPoint::from_poincare(p.re(), p.im()).unwrap();
        assert!((q.rad_h() - 3.0).abs() < 1e-12);
        assert!(HPoint::polar(1.0, -0.1).theta() >= 0.0);
        assert!(HPoint::from_poincare(1.0, 0.0).is_err());
        assert!(HPoint::checked_polar(RAD_CAP + 1.0, 0.0).is_err());
    }

    #[test]
    fn klein_round_trip() {
        assert_eq!(to_klein(&HPoint::ORIGIN), [0.0, 0.0]);
        let k = to_klein(&pt(0.5, 0.0));
        assert!((k[0] - 0.8).abs() < 1e-15 && k[1] == 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let p = random_point(&mut rng, 8.0);
            let q = from_klein(to_klein(&p)).unwrap();
            assert!((p.re() - q.re()).abs() < 1e-12 && (p.im() - q.im()).abs() < 1e-12);
        }
    }

    #[test]
    fn triangle_area_basics() {
        assert_eq!(triangle_area(&pt(-0.5, 0.0), &pt(0.1, 0.0), &pt(0.7, 0.0)), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..1000 {
            let (a, b, c) = (
                random_point(&mut rng, 10.0),
                random_point(&mut rng, 10.0),
                random_point(&mut rng, 10.0),
            );
            let t = triangle_area(&a, &b, &c);
            assert!((0.0..PI).contains(&t));
        }
    }

    #[test]
    fn equilateral_area_matches_klein_quadrature() {
        // Vertices at Euclidean radius 0.9; area by integrating the Klein
        // area density over the straight triangle in polar form about 0.
        let vs: Vec<HPoint> = (0..3)
            .map(|i| {
                let t = i as f64 * TAU / 3.0;
                pt(0.9 * t.cos(), 0.9 * t.sin())
            })
            .collect();
        let area = triangle_area(&vs[0], &vs[1], &vs[2]);
        let kr = 2.0 * 0.9 / (1.0 + 0.81);
        // Distance from center to a side of the Klein triangle is kr/2.
        let h = 0.5 * kr;
        let f = |phi: f64| {
            let r = h / (phi - PI / 3.0).cos();
            1.0 / (1.0 - r * r).sqrt() - 1.0
        };
        let oracle = 3.0 * simpson(f, 0.0, 2.0 * PI / 3.0, 20000);
        assert!((area - oracle).abs() < 1e-7, "{area} vs {oracle}");
    }

    #[test]
    fn law_of_cosines_angle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let r: f64 = 0.2 + 6.0 * rng.random::<f64>();
            let phi = rng.random::<f64>() * TAU;
            let want = ((r / 2.0).cosh().powi(2) - (r / 4.0).cosh()) / (r / 2.0).sinh().powi(2);
            let gamma = want.clamp(-1.0, 1.0).acos();
            let b = HPoint::polar(r / 2.0, phi);
            let c = HPoint::polar(r / 2.0, phi + gamma);
            assert!((dist_h(&b, &c) - r / 4.0).abs() < 1e-9);
            // Move the configuration somewhere random and measure.
            let m = DiskAutomorphism::new(random_point(&mut rng, 3.0), rng.random::<f64>());
            let (o, b, c) = (m.apply(&HPoint::ORIGIN), m.apply(&b), m.apply(&c));
            assert!((angle_at(&o, &b, &c) - gamma).abs() < 1e-9);
        }
    }

    #[test]
    fn circumdisk_examples() {
        let d = circumdisk(&pt(0.1, 0.0), &pt(-0.1, 0.0), &pt(0.0, 0.1)).unwrap();
        assert!(d.center_e[0].abs() < 1e-15 && d.center_e[1].abs() < 1e-15);
        assert!((d.radius_e - 0.1).abs() < 1e-15);
        assert!(circumdisk(&pt(0.1, 0.0), &pt(0.2, 0.0), &pt(0.3, 0.0)).is_none());
        assert!(circumdisk(&pt(-0.9, 0.01), &pt(0.0, 0.012), &pt(0.9, 0.01)).is_none());
    }

    #[test]
    fn circumdisk_center_is_equidistant() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut seen = 0;
        for _ in 0..2000 {
            let (a, b, c) = (
                random_point(&mut rng, 6.0),
                random_point(&mut rng, 6.0),
                random_point(&mut rng, 6.0),
            );
            if let Some(d) = circumdisk(&a, &b, &c) {
                seen += 1;
                for p in [a, b, c] {
                    assert!((dist_h(&d.center_h, &p) - d.radius_h).abs() < 1e-9);
                    let e = (p.re() - d.center_e[0]).hypot(p.im() - d.center_e[1]);
                    assert!((e - d.radius_e).abs() < 1e-12);
                }
                // Both parameterizations describe the same circle.
                let back = HDisk::from_hyperbolic(d.center_h, d.radius_h);
                assert!((back.radius_e - d.radius_e).abs() < 1e-10);
                for i in 0..8 {
                    let t = i as f64 * TAU / 8.0;
                    let bx = d.center_e[0] + d.radius_e * t.cos();
                    let by = d.center_e[1] + d.radius_e * t.sin();
                    let q = pt(bx, by);
                    assert!((dist_h(&q, &d.center_h) - d.radius_h).abs() < 1e-10 * d.radius_h.max(1.0));
                }
            }
        }
        assert!(seen > 100);
    }

    #[test]
    fn isometries_preserve_geometry() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = random_point(&mut rng, 4.0);
        assert!(isometry_to_origin(&p).apply(&p).is_origin() || isometry_to_origin(&p).apply(&p).rad_h() < 1e-12);
        let id = isometry_to_origin(&HPoint::ORIGIN);
        assert_eq!(id.apply(&p), HPoint::polar(p.rad_h(), p.theta()));
        for _ in 0..1000 {
            let (a, b, c) = (
                random_point(&mut rng, 5.0),
                random_point(&mut rng, 5.0),
                random_point(&mut rng, 5.0),
            );
            let m = DiskAutomorphism::new(random_point(&mut rng, 3.0), rng.random::<f64>() * TAU);
            let (ma, mb, mc) = (m.apply(&a), m.apply(&b), m.apply(&c));
            assert!((dist_h(&a, &b) - dist_h(&ma, &mb)).abs() < 1e-9);
            assert!((triangle_area(&a, &b, &c) - triangle_area(&ma, &mb, &mc)).abs() < 1e-9);
            let before = circumcircle_e(&a, &b, &c).map(|(cc, r)| 1.0 - cc[0].hypot(cc[1]) - r);
            let after = circumdisk(&ma, &mb, &mc);
            if let Some(slack) = before {
                if slack.abs() > 1e-6 {
                    assert_eq!(slack > CONTAINMENT_MARGIN, after.is_some());
                }
            }
        }
    }

    #[test]
    fn triangle_inequality() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..10_000 {
            let (a, b, c) = (
                random_point(&mut rng, 12.0),
                random_point(&mut rng, 12.0),
                random_point(&mut rng, 12.0),
            );
            assert!(dist_h(&a, &c) <= dist_h(&a, &b) + dist_h(&b, &c) + 1e-12 * (1.0 + dist_h(&a, &c)));
        }
    }

    #[test]
    fn ball_area_monte_carlo() {
        // Rejection sampling of B(0, 2) under the density 4 / (1 - r^2)^2,
        // bounded on the Euclidean disk of radius tanh(1).
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let e = 1f64.tanh();
        let fmax = 4.0 / (1.0 - e * e).powi(2);
        let n = 1_000_000;
        let mut acc = 0u64;
        for _ in 0..n {
            let x = (2.0 * rng.random::<f64>() - 1.0) * e;
            let y = (2.0 * rng.random::<f64>() - 1.0) * e;
            let r2 = x * x + y * y;
            if r2 < e * e && rng.random::<f64>() * fmax < 4.0 / (1.0 - r2).powi(2) {
                acc += 1;
            }
        }
        let est = acc as f64 / n as f64 * fmax * 4.0 * e * e;
        assert!((est / ball_area(2.0) - 1.0).abs() < 0.01, "{est}");
    }

    #[test]
    fn hull_examples() {
        let p = pt(0.2, 0.3);
        assert_eq!(convex_hull_h(&[p]), vec![p]);
        let three = [pt(0.1, 0.0), pt(0.0, 0.5), pt(-0.4, -0.2)];
        assert_eq!(convex_hull_indices(&three).len(), 3);

        // Six extreme points on a circle, four interior near the center.
        let mut pts: Vec<HPoint> = (0..6)
            .map(|i| HPoint::polar(3.0, i as f64 * TAU / 6.0 + 0.1))
            .collect();
        for i in 0..4 {
            pts.push(HPoint::polar(0.5, i as f64));
        }
        let hull = convex_hull_indices(&pts);
        // Brute force: a point is interior iff it lies in a Klein triangle of others.
        let ks: Vec<Coord<f64>> = pts.iter().map(|p| { let [x, y] = p.klein(); Coord { x, y } }).collect();
        let mut extreme: Vec<usize> = (0..pts.len())
            .filter(|&i| {
                let others: Vec<usize> = (0..pts.len()).filter(|&j| j != i).collect();
                for a in 0..others.len() {
                    for b in a + 1..others.len() {
                        for c in b + 1..others.len() {
                            let (x, y, z) = (ks[others[a]], ks[others[b]], ks[others[c]]);
                            let o1 = orient2d(x, y, ks[i]).signum();
                            let o2 = orient2d(y, z, ks[i]).signum();
                            let o3 = orient2d(z, x, ks[i]).signum();
                            if o1 == o2 && o2 == o3 {
                                return false;
                            }
                        }
                    }
                }
                true
            })
            .collect();
        let mut got = hull.clone();
        got.sort();
        extreme.sort();
        assert_eq!(got, extreme);
        assert_eq!(got, vec![0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn polygon_area_consistency() {
        let (a, b, c) = (pt(0.1, 0.2), pt(-0.5, 0.1), pt(0.3, -0.6));
        assert!((polygon_area_h(&[a, b, c]).unwrap() - triangle_area(&a, &b, &c)).abs() < 1e-12);
        assert_eq!(polygon_area_h(&[a, b]).unwrap(), 0.0);

        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut angles: Vec<f64> = (0..6).map(|_| rng.random::<f64>() * TAU).collect();
        angles.sort_by(f64::total_cmp);
        let hex: Vec<HPoint> = angles
            .iter()
            .map(|&t| HPoint::polar(1.0 + 3.0 * rng.random::<f64>(), t))
            .collect();
        let hex = convex_hull_h(&hex);
        let area = polygon_area_h(&hex).unwrap();
        let n = hex.len();
        let fan0: f64 = (1..n - 1).map(|i| triangle_area(&hex[0], &hex[i], &hex[i + 1])).sum();
        let fan2: f64 = (1..n - 1)
            .map(|i| triangle_area(&hex[2], &hex[(2 + i) % n], &hex[(3 + i) % n]))
            .sum();
        assert!((area - fan0).abs() < 1e-9);
        assert!((fan0 - fan2).abs() < 1e-9);

        let bowtie = [pt(-0.5, -0.5), pt(0.5, 0.5), pt(0.5, -0.5), pt(-0.5, 0.5)];
        assert!(polygon_area_h(&bowtie).is_err());
    }

    #[test]
    fn geodesic_arcs_are_orthogonal_and_pass_through_endpoints() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..500 {
            let (p, q) = (random_point(&mut rng, 6.0), random_point(&mut rng, 6.0));
            match Geodesic::through(&p, &q).arc {
                GeodesicArc::Diameter => {}
                GeodesicArc::Circle { center, radius } => {
                    let c2 = center[0] * center[0] + center[1] * center[1];
                    assert!((c2 - radius * radius - 1.0).abs() < 1e-8 * c2);
                    for s in [p, q] {
                        let d = (s.re() - center[0]).hypot(s.im() - center[1]);
                        assert!((d - radius).abs() < 1e-9 * radius.max(1.0));
                    }
                }
            }
        }
        let g = Geodesic::through(&pt(-0.5, 0.0), &pt(0.5, 0.0));
        assert_eq!(g.arc, GeodesicArc::Diameter);
    }

    #[test]
    fn bisector_separates_by_distance() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..2000 {
            let (x, y, z) = (
                random_point(&mut rng, 8.0),
                random_point(&mut rng, 8.0),
                random_point(&mut rng, 8.0),
            );
            let (n, c) = bisector_klein(&x, &y);
            let k = z.klein();
            let closer = n[0] * k[0] + n[1] * k[1] < c;
            let (dx, dy) = (dist_h(&z, &x), dist_h(&z, &y));
            if (dx - dy).abs() > 1e-6 {
                assert_eq!(closer, dx < dy);
            }
        }
    }
}
