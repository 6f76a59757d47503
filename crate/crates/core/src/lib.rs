//! Mumford-Shah and Potts regularization of manifold-valued signals and images.
//!
//! The univariate problems are solved exactly by dynamic programming
//! ([`dp1d`]), with per-interval errors from intrinsic means/medians
//! ([`stats`]) or the cyclic proximal point algorithm ([`prox`]). Images are
//! handled by a penalty splitting into families of univariate problems
//! ([`solver2d`]). Backends for Euclidean space, the sphere and SPD(3) live in
//! [`manifold`]; [`dti`] and [`qball`] provide the data pipelines and [`io`]
//! the file formats.

pub mod dp1d;
pub mod dti;
pub mod error;
pub mod image;
pub mod io;
pub mod manifold;
pub mod prox;
pub mod qball;
pub mod solver2d;
pub mod stats;

pub use dp1d::{solve_1d, Model, MsParams, Partition, Segment, Solution1d, SolverConfig};
pub use error::{Error, Result};
pub use image::Image;
pub use manifold::{Euclidean, Manifold, ManifoldKind, Spd3, Sphere};
pub use prox::{cppa_solve, CppaConfig, VqProblem};
pub use solver2d::{solve_2d, Neighborhood, SplitConfig};
pub use stats::{frechet_point, MeanConfig};

use serde::{Deserialize, Serialize};

/// Exponent of a data or coupling term. Closed-form proximal maps exist only
/// for 1 and 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Exponent {
    One,
    Two,
}

impl Exponent {
    pub fn value(self) -> f64 {
        match self {
            Exponent::One => 1.0,
            Exponent::Two => 2.0,
        }
    }

    /// `t^e`
    pub fn pow(self, t: f64) -> f64 {
        match self {
            Exponent::One => t,
            Exponent::Two => t * t,
        }
    }

    pub fn from_value(v: u32) -> Result<Self> {
        match v {
            1 => Ok(Exponent::One),
            2 => Ok(Exponent::Two),
            _ => Err(error::invalid(format!("exponent must be 1 or 2, got {v}"))),
        }
    }
}

/// Extra data term `weight · (1/p) Σ d^p(x_i, points_i)` pulling a solution
/// towards another signal.
#[derive(Debug)]
pub struct Anchor<'a, P> {
    pub points: &'a [P],
    pub weight: f64,
}

impl<P> Clone for Anchor<'_, P> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<P> Copy for Anchor<'_, P> {}

impl<'a, P> Anchor<'a, P> {
    pub fn new(points: &'a [P], weight: f64) -> Self {
        Self { points, weight }
    }

    pub fn slice(&self, l: usize, r: usize) -> Anchor<'a, P> {
        Anchor {
            points: &self.points[l..=r],
            weight: self.weight,
        }
    }
}
