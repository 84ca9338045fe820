//! Simulation and verification toolkit for the hyperbolic Poisson Voronoi
//! tessellation and its Delaunay dual.
//!
//! The crate is organised bottom-up:
//!
//! - [`hypgeo`]: Poincaré-disk geometry (distances, areas, circumdisks,
//!   Klein-model hulls, disk automorphisms).
//! - [`ppp`]: Poisson point process sampling on hyperbolic windows, the
//!   origin / skeleton-vertex conditionings and hard-core thinning.
//! - [`tess`]: Delaunay complex, Voronoi cells and the two dual graphs.
//! - [`graph`]: rooted graph algorithms, exact anchored-expansion search and
//!   isolated cores.
//! - [`schemes`]: triangulation schemes, triangle orderings and the
//!   tree-indexed product process.
//! - [`walk`]: simple random walk, speed estimation, boundary convergence,
//!   harmonic measure and the degree-biased reversibility statistic.
//! - [`verify`]: Monte Carlo and exact checks of the analytic estimates.
//! - [`io`]: JSON / CSV file formats shared by the command-line front end.
//!
//! Data-parallel loops go through [`exec`], which runs on rayon when the
//! `parallel` feature is enabled and sequentially otherwise. Every result is
//! a pure function of its inputs and seed, independent of the thread count.

pub mod exec;
pub mod graph;
pub mod hypgeo;
pub mod io;
pub mod ppp;
pub mod rng;
pub mod schemes;
pub mod tess;
pub mod verify;
pub mod walk;

use thiserror::Error;

/// Errors raised by the toolkit. Every variant names the offending parameter.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter failed validation.
    #[error("invalid `{param}`: {reason}")]
    Invalid { param: &'static str, reason: String },
    /// A size or range guard was exceeded.
    #[error("`{param}` = {value} exceeds the guard limit {limit}")]
    Guard {
        param: &'static str,
        value: f64,
        limit: f64,
    },
}

impl Error {
    pub(crate) fn invalid(param: &'static str, reason: impl Into<String>) -> Self {
        Error::Invalid {
            param,
            reason: reason.into(),
        }
    }

    pub(crate) fn guard(param: &'static str, value: impl Into<f64>, limit: impl Into<f64>) -> Self {
        Error::Guard {
            param,
            value: value.into(),
            limit: limit.into(),
        }
    }

    /// Name of the parameter the error refers to.
    pub fn param(&self) -> &'static str {
        match self {
            Error::Invalid { param, .. } | Error::Guard { param, .. } => param,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub use graph::{DualGraph, ExpansionReport, GraphKind};
pub use hypgeo::{HDisk, HPoint};
pub use ppp::{Conditioning, Sample};
pub use tess::{DelaunayComplex, VoronoiCells};
