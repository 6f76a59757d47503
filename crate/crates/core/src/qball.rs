//! Q-ball orientation distribution functions on a finite spherical sample
//! set, stored as square roots so that they are points of `S^{n-1}`.

use std::io::Write;

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dti::pixel_rng;
use crate::error::{invalid, Error, Result};
use crate::image::Image;

pub const DEFAULT_SAMPLES: usize = 181;

/// Sample directions, at most one of each antipodal pair.
#[derive(Debug, Clone, PartialEq)]
pub struct OdfGrid {
    samples: Vec<Vector3<f64>>,
}

impl OdfGrid {
    pub fn new(samples: Vec<Vector3<f64>>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyInput);
        }
        for s in &samples {
            if (s.norm() - 1.0).abs() > 1e-10 {
                return Err(Error::NotUnit(s.norm()));
            }
        }
        for (a, u) in samples.iter().enumerate() {
            if samples[a + 1..].iter().any(|v| (u - v).norm() < 1e-9 || (u + v).norm() < 1e-9) {
                return Err(invalid("duplicate or antipodal sample directions"));
            }
        }
        Ok(Self { samples })
    }

    /// The 181 antipodal classes of the 362 vertices of the frequency-6
    /// geodesic icosahedron.
    pub fn default_181() -> Self {
        Self {
            samples: geodesic_hemisphere(6),
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Vector3<f64>] {
        &self.samples
    }
}

fn icosahedron() -> (Vec<Vector3<f64>>, Vec<[usize; 3]>) {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut v = Vec::with_capacity(12);
    for &a in &[-1.0, 1.0] {
        for &b in &[-phi, phi] {
            v.push(Vector3::new(0.0, a, b));
            v.push(Vector3::new(a, b, 0.0));
            v.push(Vector3::new(b, 0.0, a));
        }
    }
    let mut faces = Vec::with_capacity(20);
    for i in 0..12 {
        for j in i + 1..12 {
            for k in j + 1..12 {
                let edge = |a: usize, b: usize| ((v[a] - v[b]).norm() - 2.0).abs() < 1e-9;
                if edge(i, j) && edge(j, k) && edge(i, k) {
                    faces.push([i, j, k]);
                }
            }
        }
    }
    (v, faces)
}

/// One representative of each antipodal pair of the vertices of the
/// frequency-`freq` geodesic icosahedron, in a deterministic order.
fn geodesic_hemisphere(freq: usize) -> Vec<Vector3<f64>> {
    let (v, faces) = icosahedron();
    let mut pts: Vec<Vector3<f64>> = Vec::new();
    for f in faces {
        for a in 0..=freq {
            for b in 0..=freq - a {
                let c = freq - a - b;
                let p = (v[f[0]] * a as f64 + v[f[1]] * b as f64 + v[f[2]] * c as f64).normalize();
                let p = canonical(p);
                if !pts.iter().any(|q| (q - p).norm() < 1e-9) {
                    pts.push(p);
                }
            }
        }
    }
    pts.sort_by(|a, b| {
        (b.z, a.y.atan2(a.x))
            .partial_cmp(&(a.z, b.y.atan2(b.x)))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    pts
}

/// Representative of `{p, −p}` with `z > 0`, or `y > 0` on the equator, or
/// `x > 0` at the poles of the equator.
fn canonical(p: Vector3<f64>) -> Vector3<f64> {
    let eps = 1e-12;
    let flip = if p.z.abs() > eps {
        p.z < 0.0
    } else if p.y.abs() > eps {
        p.y < 0.0
    } else {
        p.x < 0.0
    };
    let q = if flip { -p } else { p };
    // clean signed zeros so the ordering is reproducible
    q.map(|c| if c.abs() < eps { 0.0 } else { c })
}

/// `φ(s) = √(raw(s) / Σ raw)`.
pub fn odf_from_diffusivity(grid: &OdfGrid, raw: &[f64]) -> Result<Vec<f64>> {
    if raw.len() != grid.len() {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            actual: raw.len(),
        });
    }
    if raw.iter().any(|r| !(*r >= 0.0) || !r.is_finite()) {
        return Err(invalid("raw ODF values must be finite and nonnegative"));
    }
    let total: f64 = raw.iter().sum();
    if !(total > 0.0) {
        return Err(invalid("raw ODF values are all zero"));
    }
    let mut phi: Vec<f64> = raw.iter().map(|r| (r / total).sqrt()).collect();
    // one more normalization removes the rounding of the square roots
    let norm = phi.iter().map(|x| x * x).sum::<f64>().sqrt();
    phi.iter_mut().for_each(|x| *x /= norm);
    Ok(phi)
}

/// Fiber configuration of a synthetic ODF.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "geometry", rename_all = "snake_case")]
pub enum Geometry {
    SinglePeak { dir: [f64; 3] },
    /// Peaks weighted 1 and `ratio`.
    TwoPeak { dir1: [f64; 3], dir2: [f64; 3], ratio: f64 },
}

/// `raw(s) = Σ_peaks w exp(κ (s·dir)²)`, normalized.
pub fn synth_crossing(grid: &OdfGrid, geometry: &Geometry, kappa: f64) -> Result<Vec<f64>> {
    if !(kappa >= 0.0) || !kappa.is_finite() {
        return Err(invalid("sharpness must be finite and nonnegative"));
    }
    let peaks: Vec<(Vector3<f64>, f64)> = match *geometry {
        Geometry::SinglePeak { dir } => vec![(unit(dir)?, 1.0)],
        Geometry::TwoPeak { dir1, dir2, ratio } => {
            if !(ratio >= 0.0) {
                return Err(invalid("peak ratio must be nonnegative"));
            }
            vec![(unit(dir1)?, 1.0), (unit(dir2)?, ratio)]
        }
    };
    // exp(κ(c² − 1)) is exp(κ c²) up to a common factor and cannot overflow
    let raw: Vec<f64> = grid
        .samples()
        .iter()
        .map(|s| {
            peaks
                .iter()
                .map(|(d, w)| {
                    let c = s.dot(d);
                    w * (kappa * (c * c - 1.0)).exp()
                })
                .sum()
        })
        .collect();
    odf_from_diffusivity(grid, &raw)
}

fn unit(v: [f64; 3]) -> Result<Vector3<f64>> {
    let v = Vector3::from(v);
    if (v.norm() - 1.0).abs() > 1e-10 {
        return Err(Error::NotUnit(v.norm()));
    }
    Ok(v)
}

/// Adds `N(0, σ²)` to `φ²`, clamps at `1e-8` and renormalizes.
pub fn odf_noise<R: Rng>(grid: &OdfGrid, odf: &[f64], sigma: f64, rng: &mut R) -> Result<Vec<f64>> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(invalid(format!("noise level must be positive, got {sigma}")));
    }
    let raw: Vec<f64> = odf
        .iter()
        .map(|phi| {
            let e: f64 = rng.sample(StandardNormal);
            (phi * phi + sigma * e).max(1e-8)
        })
        .collect();
    odf_from_diffusivity(grid, &raw)
}

/// [`odf_noise`] on every pixel with per-pixel generators.
pub fn odf_image_noise(grid: &OdfGrid, img: &Image<Vec<f64>>, sigma: f64, seed: u64) -> Result<Image<Vec<f64>>> {
    let data = img
        .as_slice()
        .par_iter()
        .enumerate()
        .map(|(px, odf)| odf_noise(grid, odf, sigma, &mut pixel_rng(seed, px)))
        .collect::<Result<Vec<_>>>()?;
    Image::new(img.rows(), img.cols(), data)
}

/// Number of entries that are not strictly positive.
pub fn nonpositive_components(odf: &[f64]) -> usize {
    odf.iter().filter(|&&x| !(x > 0.0)).count()
}

/// Radii of one pixel's polar plot: the point for sample `s` is `r_s · s`.
#[derive(Debug, Clone, PartialEq)]
pub struct OdfGlyph {
    pub i: usize,
    pub j: usize,
    /// Slice index; always 0 for 2D images.
    pub k: usize,
    pub radii: Vec<f64>,
}

impl OdfGlyph {
    pub fn points(&self, grid: &OdfGrid) -> Vec<Vector3<f64>> {
        self.radii.iter().zip(grid.samples()).map(|(r, s)| s * *r).collect()
    }
}

pub fn export_odf_glyphs(img: &Image<Vec<f64>>, grid: &OdfGrid) -> Result<Vec<OdfGlyph>> {
    img.indexed()
        .map(|(i, j, odf)| {
            if odf.len() != grid.len() {
                return Err(Error::DimensionMismatch {
                    expected: grid.len(),
                    actual: odf.len(),
                });
            }
            Ok(OdfGlyph {
                i,
                j,
                k: 0,
                radii: odf.clone(),
            })
        })
        .collect()
}

/// Writes `grid <n>`, the `n` sample directions `x y z`, then `i j k r_1 ... r_n`
/// per pixel.
pub fn write_odf_glyphs<W: Write>(glyphs: &[OdfGlyph], grid: &OdfGrid, mut w: W) -> Result<()> {
    writeln!(w, "grid {}", grid.len())?;
    for s in grid.samples() {
        writeln!(w, "{} {} {}", s.x, s.y, s.z)?;
    }
    for g in glyphs {
        write!(w, "{} {} {}", g.i, g.j, g.k)?;
        for r in &g.radii {
            write!(w, " {r}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Synthetic Q-ball image with its region labels.
#[derive(Debug, Clone)]
pub struct OdfPhantom {
    pub odfs: Image<Vec<f64>>,
    pub labels: Image<usize>,
    /// In-plane angle of the first fiber.
    pub angle: f64,
}

/// Crossing phantom: one fiber in the xy-plane, at an angle drawn from
/// `seed`, on the left half; a 90° crossing with the same fiber on the right
/// half.
pub fn crossing_phantom(rows: usize, cols: usize, grid: &OdfGrid, kappa: f64, seed: u64) -> Result<OdfPhantom> {
    if rows == 0 || cols == 0 {
        return Err(invalid("phantom needs at least one row and one column"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let angle = rng.gen_range(0.0..std::f64::consts::FRAC_PI_2);
    let (s, c) = angle.sin_cos();
    let d1 = [c, s, 0.0];
    let d2 = [-s, c, 0.0];
    let single = synth_crossing(grid, &Geometry::SinglePeak { dir: d1 }, kappa)?;
    let cross = synth_crossing(
        grid,
        &Geometry::TwoPeak {
            dir1: d1,
            dir2: d2,
            ratio: 1.0,
        },
        kappa,
    )?;
    let labels = Image::from_fn(rows, cols, |_, j| usize::from(2 * j >= cols))?;
    let odfs = labels.map(|&l| if l == 0 { single.clone() } else { cross.clone() });
    Ok(OdfPhantom { odfs, labels, angle })
}
