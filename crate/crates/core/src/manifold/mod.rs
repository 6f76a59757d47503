//! Riemannian manifold backends.
//!
//! Every solver in this crate is generic over [`Manifold`]. Points are stored in
//! ambient coordinates: plain vectors for Euclidean space and the sphere, 3×3
//! symmetric matrices for the positive-definite cone. The three backends share
//! the operations the algorithms need: distance, exponential and logarithm maps
//! and unit-speed geodesic points.

mod euclidean;
mod spd;
mod sphere;

use std::fmt::{self, Debug};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use euclidean::Euclidean;
pub use spd::{sym_eigen, Spd3, SpdLog, SymEigen};
pub use sphere::Sphere;

use crate::error::{invalid, Error, Result};

/// Runtime tag identifying a backend and its dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "manifold", rename_all = "lowercase")]
pub enum ManifoldKind {
    Euclidean { dim: usize },
    Sphere { ambient_dim: usize },
    Spd3,
}

impl ManifoldKind {
    /// Number of f64 coordinates stored per point.
    pub fn coord_len(&self) -> usize {
        match *self {
            ManifoldKind::Euclidean { dim } => dim,
            ManifoldKind::Sphere { ambient_dim } => ambient_dim,
            ManifoldKind::Spd3 => 9,
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            ManifoldKind::Euclidean { .. } => "euclidean",
            ManifoldKind::Sphere { .. } => "sphere",
            ManifoldKind::Spd3 => "spd3",
        }
    }

    /// The dimension written next to the tag in file headers.
    pub fn header_dim(&self) -> usize {
        match *self {
            ManifoldKind::Euclidean { dim } => dim,
            ManifoldKind::Sphere { ambient_dim } => ambient_dim,
            ManifoldKind::Spd3 => 3,
        }
    }

    pub fn from_tag(tag: &str, dim: usize) -> Result<Self> {
        match tag {
            "euclidean" if dim >= 1 => Ok(ManifoldKind::Euclidean { dim }),
            "sphere" if dim >= 2 => Ok(ManifoldKind::Sphere { ambient_dim: dim }),
            "spd3" if dim == 3 => Ok(ManifoldKind::Spd3),
            _ => Err(invalid(format!("unknown manifold `{tag} {dim}`"))),
        }
    }
}

impl fmt::Display for ManifoldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.tag(), self.header_dim())
    }
}

impl FromStr for ManifoldKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut it = s.split_whitespace();
        let tag = it.next().ok_or_else(|| invalid("empty manifold tag"))?;
        let dim = it
            .next()
            .ok_or_else(|| invalid("missing manifold dimension"))?
            .parse()
            .map_err(|_| invalid(format!("bad manifold dimension in `{s}`")))?;
        Self::from_tag(tag, dim)
    }
}

/// A complete Riemannian manifold with closed-form exponential and logarithm.
pub trait Manifold: Send + Sync {
    type Point: Clone + Debug + PartialEq + Send + Sync;
    type Tangent: Clone + Debug + Send + Sync;
    /// Data cached at a base point so that many logarithms/exponentials at the
    /// same base are cheap.
    type Chart: Send + Sync;

    fn kind(&self) -> ManifoldKind;

    fn dist(&self, x: &Self::Point, y: &Self::Point) -> Result<f64>;
    fn exp(&self, base: &Self::Point, v: &Self::Tangent) -> Result<Self::Point>;
    fn log(&self, base: &Self::Point, target: &Self::Point) -> Result<Self::Tangent>;

    /// Riemannian norm of `v` in the tangent space at `base`.
    fn norm(&self, base: &Self::Point, v: &Self::Tangent) -> Result<f64>;

    fn zero_tangent(&self, base: &Self::Point) -> Self::Tangent;
    fn scale_tangent(&self, v: &mut Self::Tangent, a: f64);
    /// `acc += a * v`
    fn add_scaled(&self, acc: &mut Self::Tangent, a: f64, v: &Self::Tangent);

    fn chart(&self, base: &Self::Point) -> Result<Self::Chart>;
    /// Logarithm at the chart's base point together with its Riemannian norm.
    fn chart_log(&self, chart: &Self::Chart, target: &Self::Point) -> Result<(Self::Tangent, f64)>;
    fn chart_exp(&self, chart: &Self::Chart, v: &Self::Tangent) -> Result<Self::Point>;
    fn chart_norm(&self, chart: &Self::Chart, v: &Self::Tangent) -> f64;
    /// Coordinates of `v` in an orthonormal frame at the chart's base point.
    fn tangent_coords(&self, chart: &Self::Chart, v: &Self::Tangent) -> Vec<f64>;
    /// Inverse of [`Manifold::tangent_coords`].
    fn tangent_from_coords(&self, chart: &Self::Chart, coords: &[f64]) -> Self::Tangent;

    fn coords(&self, x: &Self::Point) -> Vec<f64>;
    /// Decodes and validates a point.
    fn from_coords(&self, coords: &[f64]) -> Result<Self::Point>;

    /// `Some(r)` when Fréchet points of data inside a ball of radius `r` are
    /// unique; `None` on Cartan-Hadamard manifolds where they always are.
    fn uniqueness_radius(&self) -> Option<f64> {
        None
    }

    /// Point at fraction `tau` of the geodesic from `x` to `y`.
    fn geodesic_fraction(&self, x: &Self::Point, y: &Self::Point, tau: f64) -> Result<Self::Point> {
        if tau == 0.0 {
            return Ok(x.clone());
        }
        let mut v = self.log(x, y)?;
        self.scale_tangent(&mut v, tau);
        self.exp(x, &v)
    }

    /// The point `[x, y]_t` reached after arclength `t` on the unit-speed
    /// geodesic from `x` towards `y`.
    fn geopoint(&self, x: &Self::Point, y: &Self::Point, t: f64) -> Result<Self::Point> {
        let d = self.dist(x, y)?;
        let slack = 1e-12 * (1.0 + d);
        if !(t >= -slack && t <= d + slack) {
            return Err(Error::GeodesicParameterOutOfRange { t, max: d });
        }
        if d == 0.0 || t <= 0.0 {
            return Ok(x.clone());
        }
        self.geodesic_fraction(x, y, (t / d).min(1.0))
    }
}

/// Checks that two coordinate lengths agree.
pub(crate) fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, actual })
    }
}
