//! Poisson point process on hyperbolic balls, its conditioned variants and a
//! hard-core thinning.

use std::f64::consts::TAU;

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::exec::Exec;
use crate::hypgeo::{ball_area, dist_h, HPoint, RAD_CAP};
use crate::rng::{self, domain};
use crate::{Error, Result};

/// Guard on the expected number of points of a single sample.
pub const MAX_EXPECTED_POINTS: f64 = 2.0e7;

/// Radial tolerance for "on the boundary of the smallest disk about 0".
pub const SKELETON_RADIAL_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Conditioning {
    None,
    /// The origin is added as `points[0]`.
    RootAtOrigin,
    /// Two points are added on the circle about 0 through the nearest point,
    /// making the origin a vertex of the Voronoi skeleton.
    SkeletonVertexAtOrigin,
}

impl Conditioning {
    pub fn as_str(self) -> &'static str {
        match self {
            Conditioning::None => "none",
            Conditioning::RootAtOrigin => "root_at_origin",
            Conditioning::SkeletonVertexAtOrigin => "skeleton_vertex_at_origin",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Conditioning::None),
            "root_at_origin" => Ok(Conditioning::RootAtOrigin),
            "skeleton_vertex_at_origin" => Ok(Conditioning::SkeletonVertexAtOrigin),
            other => Err(Error::invalid("conditioning", format!("unknown mode `{other}`"))),
        }
    }
}

/// A realization of the process in the window `B(0, window_r)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub lambda: f64,
    pub window_r: f64,
    pub seed: u64,
    pub conditioning: Conditioning,
    pub points: Vec<HPoint>,
}

impl Sample {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Build a sample from explicit points, validating the window.
    pub fn from_points(
        lambda: f64,
        window_r: f64,
        seed: u64,
        conditioning: Conditioning,
        points: Vec<HPoint>,
    ) -> Result<Sample> {
        validate(lambda, window_r)?;
        if let Some(i) = points.iter().position(|p| p.rad_h() > window_r) {
            return Err(Error::invalid(
                "points",
                format!("point {i} at radius {} lies outside the window", points[i].rad_h()),
            ));
        }
        if conditioning == Conditioning::RootAtOrigin && !points.first().is_some_and(|p| p.is_origin()) {
            return Err(Error::invalid("points", "root_at_origin requires points[0] = 0"));
        }
        Ok(Sample {
            lambda,
            window_r,
            seed,
            conditioning,
            points,
        })
    }

    /// Index of the nucleus closest to the origin (smallest index on ties).
    pub fn nearest_to_origin(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, p) in self.points.iter().enumerate() {
            if best.is_none_or(|b| p.rad_h() < self.points[b].rad_h()) {
                best = Some(i);
            }
        }
        best
    }
}

fn validate(lambda: f64, window_r: f64) -> Result<()> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::invalid("lambda", format!("{lambda} is not a finite nonnegative intensity")));
    }
    if !(window_r > 0.0) || !window_r.is_finite() {
        return Err(Error::invalid("window_r", format!("{window_r} is not a positive radius")));
    }
    if window_r > RAD_CAP {
        return Err(Error::guard("window_r", window_r, RAD_CAP));
    }
    Ok(())
}

/// Radius with CDF `(cosh s - 1) / (cosh r - 1)` on `[0, r]`, by inversion.
///
/// Uses `sinh(s/2) = sqrt(u) sinh(r/2)`, which is the same inversion written
/// without the cancellation in `cosh r - 1`.
pub fn radial_inverse_cdf(u: f64, r: f64) -> f64 {
    (2.0 * (u.sqrt() * (0.5 * r).sinh()).asinh()).min(r)
}

/// Radius with the same law restricted to the annulus `[r0, r1]`.
pub(crate) fn radial_inverse_cdf_annulus(u: f64, r0: f64, r1: f64) -> f64 {
    let s0 = (0.5 * r0).sinh();
    let s1 = (0.5 * r1).sinh();
    let v = s0 * s0 + u * (s1 * s1 - s0 * s0);
    (2.0 * v.sqrt().asinh()).clamp(r0, r1)
}

pub(crate) fn poisson_count(mean: f64, seed: u64, index: u64) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    let mut g = rng::stream(seed, domain::COUNT, index);
    Poisson::new(mean).map(|d| d.sample(&mut g) as u64).unwrap_or(0)
}

/// Sample the process of intensity `lambda` on `B(0, window_r)`.
pub fn sample_ball(lambda: f64, window_r: f64, seed: u64) -> Result<Sample> {
    sample_ball_exec(Exec::default(), lambda, window_r, seed)
}

pub fn sample_ball_exec(exec: Exec, lambda: f64, window_r: f64, seed: u64) -> Result<Sample> {
    validate(lambda, window_r)?;
    let mean = lambda * ball_area(window_r);
    if mean > MAX_EXPECTED_POINTS {
        return Err(Error::guard("lambda * ball_area(window_r)", mean, MAX_EXPECTED_POINTS));
    }
    let n = poisson_count(mean, seed, 0) as usize;
    let points = exec.map(n, |i| {
        let mut g = rng::stream(seed, domain::POINT, i as u64);
        let u: f64 = g.random();
        let t: f64 = g.random();
        HPoint::polar(radial_inverse_cdf(u, window_r), t * TAU)
    });
    Ok(Sample {
        lambda,
        window_r,
        seed,
        conditioning: Conditioning::None,
        points,
    })
}

/// Prepend the origin.
pub fn condition_root(s: &Sample) -> Result<Sample> {
    if s.conditioning != Conditioning::None {
        return Err(Error::invalid("conditioning", "sample is already conditioned"));
    }
    let mut points = Vec::with_capacity(s.points.len() + 1);
    points.push(HPoint::ORIGIN);
    points.extend_from_slice(&s.points);
    Ok(Sample {
        conditioning: Conditioning::RootAtOrigin,
        points,
        ..s.clone()
    })
}

/// Append two points uniform on the circle about 0 through the nearest point.
pub fn condition_skeleton_vertex(s: &Sample, seed: u64) -> Result<Sample> {
    if s.conditioning != Conditioning::None {
        return Err(Error::invalid("conditioning", "sample is already conditioned"));
    }
    let nearest = s
        .nearest_to_origin()
        .ok_or_else(|| Error::invalid("sample", "skeleton-vertex conditioning needs a nonempty sample"))?;
    let rho = s.points[nearest].rad_h();
    let mut points = s.points.clone();
    for k in 0..2 {
        let mut g = rng::stream(seed, domain::SKELETON, k);
        let t: f64 = g.random();
        points.push(HPoint::polar(rho, t * TAU));
    }
    Ok(Sample {
        conditioning: Conditioning::SkeletonVertexAtOrigin,
        points,
        ..s.clone()
    })
}

/// Sequential hard-core thinning in a seed-determined random order: a point
/// is kept iff it is at distance `>= min_sep` from every point kept before
/// it. Under `RootAtOrigin` the origin is scanned first, so it always stays
/// at index 0. Output keeps the original relative order.
pub fn hardcore_thin(s: &Sample, min_sep: f64) -> Result<Sample> {
    if !(min_sep > 0.0) || !min_sep.is_finite() {
        return Err(Error::invalid("min_sep", format!("{min_sep} is not a positive length")));
    }
    let n = s.points.len();
    let mut order: Vec<(u64, usize)> = (0..n)
        .map(|i| {
            let key = if i == 0 && s.conditioning == Conditioning::RootAtOrigin {
                0
            } else {
                rng::stream(s.seed, domain::THINNING, i as u64).random::<u64>() | 1
            };
            (key, i)
        })
        .collect();
    order.sort_unstable();

    // Kept points sorted by radius; any conflicting neighbour lies within
    // `min_sep` in radius, which bounds the scan.
    let mut by_rad: Vec<(f64, usize)> = Vec::new();
    let mut keep = vec![false; n];
    for &(_, i) in &order {
        let p = &s.points[i];
        let lo = by_rad.partition_point(|&(r, _)| r < p.rad_h() - min_sep);
        let ok = by_rad[lo..]
            .iter()
            .take_while(|&&(r, _)| r <= p.rad_h() + min_sep)
            .all(|&(_, j)| dist_h(p, &s.points[j]) >= min_sep);
        if ok {
            keep[i] = true;
            let at = by_rad.partition_point(|&(r, _)| r < p.rad_h());
            by_rad.insert(at, (p.rad_h(), i));
        }
    }
    let points = (0..n).filter(|&i| keep[i]).map(|i| s.points[i]).collect();
    Ok(Sample {
        points,
        ..s.clone()
    })
}
