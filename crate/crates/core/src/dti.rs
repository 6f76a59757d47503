//! Diffusion tensor imaging: Stejskal-Tanner simulation, Rician noise,
//! log-linear tensor fitting, ellipsoid glyphs and synthetic phantoms.

use std::io::Write;

use nalgebra::{DMatrix, DVector, Matrix3, Quaternion, UnitQuaternion, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::image::Image;
use crate::manifold::{sym_eigen, Spd3};

pub const DEFAULT_B: f64 = 800.0;
pub const DEFAULT_A0: f64 = 1000.0;

/// Diffusion weighted images, one per gradient direction.
#[derive(Debug, Clone, PartialEq)]
pub struct DwiStack {
    pub directions: Vec<Vector3<f64>>,
    pub b: f64,
    pub a0: f64,
    pub images: Vec<Image<f64>>,
}

impl DwiStack {
    pub fn shape(&self) -> (usize, usize) {
        self.images.first().map(|im| im.shape()).unwrap_or((0, 0))
    }

    pub fn validate(&self) -> Result<()> {
        if self.directions.len() != self.images.len() {
            return Err(invalid(format!(
                "{} directions but {} images",
                self.directions.len(),
                self.images.len()
            )));
        }
        if self.directions.len() < 6 {
            return Err(invalid("at least 6 gradient directions are required"));
        }
        if !(self.b > 0.0) || !(self.a0 > 0.0) {
            return Err(invalid("b and A0 must be positive"));
        }
        for v in &self.directions {
            if (v.norm() - 1.0).abs() > 1e-10 {
                return Err(Error::NotUnit(v.norm()));
            }
        }
        let shape = self.shape();
        if self.images.iter().any(|im| im.shape() != shape) {
            return Err(invalid("images differ in shape"));
        }
        Ok(())
    }
}

/// The 15 edge midpoints of a regular icosahedron, one of each antipodal
/// pair, normalized.
pub fn default_directions() -> Vec<Vector3<f64>> {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut verts = Vec::with_capacity(12);
    for &a in &[-1.0, 1.0] {
        for &b in &[-phi, phi] {
            verts.push(Vector3::new(0.0, a, b));
            verts.push(Vector3::new(a, b, 0.0));
            verts.push(Vector3::new(b, 0.0, a));
        }
    }
    let mut out: Vec<Vector3<f64>> = Vec::with_capacity(15);
    for i in 0..verts.len() {
        for j in i + 1..verts.len() {
            // edges have length 2
            if ((verts[i] - verts[j]).norm() - 2.0).abs() > 1e-9 {
                continue;
            }
            let mid = canonical_sign(((verts[i] + verts[j]) * 0.5).normalize());
            if out.iter().any(|d| (d - mid).norm() < 1e-9) {
                continue;
            }
            out.push(mid);
        }
    }
    debug_assert_eq!(out.len(), 15);
    out
}

/// Flips `v` so that its first nonzero coordinate is positive.
fn canonical_sign(v: Vector3<f64>) -> Vector3<f64> {
    let lead = v.iter().copied().find(|c| c.abs() > 1e-12).unwrap_or(0.0);
    if lead < 0.0 {
        -v
    } else {
        v
    }
}

/// `D_v = A0 exp(−b vᵀ S v)` for every pixel and direction.
pub fn simulate_dwi(tensors: &Image<Matrix3<f64>>, directions: &[Vector3<f64>], b: f64, a0: f64) -> Result<DwiStack> {
    let images = directions
        .iter()
        .map(|v| tensors.map(|s| a0 * (-b * v.dot(&(s * v))).exp()))
        .collect();
    let stack = DwiStack {
        directions: directions.to_vec(),
        b,
        a0,
        images,
    };
    stack.validate()?;
    Ok(stack)
}

/// Generator for the noise of pixel `pixel`; independent of evaluation order.
pub fn pixel_rng(seed: u64, pixel: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(pixel as u64);
    rng
}

/// Rician magnitude `√((D + X)² + Y²)` with `X, Y ~ N(0, σ²)` independent per
/// pixel and direction.
pub fn add_rician(stack: &DwiStack, sigma: f64, seed: u64) -> Result<DwiStack> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(invalid(format!("noise level must be positive, got {sigma}")));
    }
    let (rows, cols) = stack.shape();
    let nd = stack.images.len();
    let noisy: Vec<Vec<f64>> = (0..rows * cols)
        .into_par_iter()
        .map(|px| {
            let mut rng = pixel_rng(seed, px);
            (0..nd)
                .map(|d| {
                    let x: f64 = rng.sample(StandardNormal);
                    let y: f64 = rng.sample(StandardNormal);
                    rician(stack.images[d].as_slice()[px], sigma * x, sigma * y)
                })
                .collect()
        })
        .collect();
    let images = (0..nd)
        .map(|d| Image::new(rows, cols, noisy.iter().map(|v| v[d]).collect()))
        .collect::<Result<_>>()?;
    Ok(DwiStack {
        directions: stack.directions.clone(),
        b: stack.b,
        a0: stack.a0,
        images,
    })
}

/// `√((d + x)² + y²)`
pub fn rician(d: f64, x: f64, y: f64) -> f64 {
    (d + x).hypot(y)
}

/// Least-squares operator mapping log signals to tensor coefficients.
struct LogLinearFit {
    pinv: DMatrix<f64>,
}

impl LogLinearFit {
    fn new(directions: &[Vector3<f64>]) -> Result<Self> {
        let rows: Vec<f64> = directions
            .iter()
            .flat_map(|v| {
                [
                    v.x * v.x,
                    v.y * v.y,
                    v.z * v.z,
                    2.0 * v.x * v.y,
                    2.0 * v.x * v.z,
                    2.0 * v.y * v.z,
                ]
            })
            .collect();
        let a = DMatrix::from_row_slice(directions.len(), 6, &rows);
        let svd = a.clone().svd(true, true);
        let smax = svd.singular_values.max();
        let rank = svd.singular_values.iter().filter(|&&s| s > 1e-10 * smax).count();
        if rank < 6 {
            return Err(Error::RankDeficient { rank });
        }
        let pinv = svd.pseudo_inverse(0.0).map_err(|e| invalid(e.to_string()))?;
        Ok(Self { pinv })
    }

    fn solve(&self, y: &DVector<f64>) -> Matrix3<f64> {
        let c = &self.pinv * y;
        Matrix3::new(c[0], c[3], c[4], c[3], c[1], c[5], c[4], c[5], c[2])
    }
}

/// Fitted tensors and the pixels whose fit had to be made positive definite.
#[derive(Debug, Clone)]
pub struct TensorFit {
    pub tensors: Image<Matrix3<f64>>,
    pub clamped: Vec<usize>,
}

/// Per pixel, the symmetric `S` minimizing `Σ_v (vᵀ S v − log(A0 / D_v) / b)²`,
/// with eigenvalues raised to at least `1e-6 λ_max` (and `1e-12`).
pub fn fit_tensors(stack: &DwiStack) -> Result<TensorFit> {
    stack.validate()?;
    let fit = LogLinearFit::new(&stack.directions)?;
    let (rows, cols) = stack.shape();
    let floor = 1e-6 * stack.a0;
    let fitted: Vec<(Matrix3<f64>, bool)> = (0..rows * cols)
        .into_par_iter()
        .map(|px| {
            let y = DVector::from_iterator(
                stack.images.len(),
                stack
                    .images
                    .iter()
                    .map(|im| (stack.a0 / im.as_slice()[px].max(floor)).ln() / stack.b),
            );
            clamp_spd(&fit.solve(&y))
        })
        .collect();
    let clamped = fitted.iter().enumerate().filter(|(_, f)| f.1).map(|(i, _)| i).collect();
    let tensors = Image::new(rows, cols, fitted.into_iter().map(|f| f.0).collect())?;
    Ok(TensorFit { tensors, clamped })
}

/// Raises eigenvalues to `max(1e-6 λ_max, 1e-12)`; reports whether any moved.
pub fn clamp_spd(s: &Matrix3<f64>) -> (Matrix3<f64>, bool) {
    let eig = sym_eigen(s);
    let lmax: f64 = eig.eigenvalues.max();
    let floor = (1e-6 * lmax).max(1e-12);
    if eig.eigenvalues.iter().all(|&l| l >= floor) {
        return ((s + s.transpose()) * 0.5, false);
    }
    let vals = eig.eigenvalues.map(|l| l.max(floor));
    (Spd3::from_eigen(vals, eig.eigenvectors), true)
}

/// Ellipsoid glyph `{x : (x − p)ᵀ S (x − p) = c}` of one pixel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Glyph {
    pub i: usize,
    pub j: usize,
    /// Descending.
    pub eigenvalues: [f64; 3],
    /// Unit eigenvectors matching `eigenvalues`.
    pub eigenvectors: [[f64; 3]; 3],
    pub c: f64,
}

impl Glyph {
    /// Semi-axis lengths `√(c / λ)`.
    pub fn semi_axes(&self) -> [f64; 3] {
        self.eigenvalues.map(|l| (self.c / l).sqrt())
    }
}

/// Sorted eigen decomposition with deterministic eigenvector signs.
pub fn sorted_eigen(s: &Matrix3<f64>) -> ([f64; 3], [Vector3<f64>; 3]) {
    let eig = sym_eigen(s);
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let vals = idx.map(|k| eig.eigenvalues[k]);
    let vecs = idx.map(|k| {
        let v: Vector3<f64> = eig.eigenvectors.column(k).into_owned();
        let big = v.iamax();
        if v[big] < 0.0 {
            -v
        } else {
            v
        }
    });
    (vals, vecs)
}

/// One glyph per pixel, row-major.
pub fn export_glyphs(tensors: &Image<Matrix3<f64>>, c: f64) -> Result<Vec<Glyph>> {
    if !(c > 0.0) {
        return Err(invalid(format!("glyph level must be positive, got {c}")));
    }
    tensors
        .indexed()
        .map(|(i, j, s)| {
            Spd3::check(s).map_err(|e| Error::InvalidCell {
                cell: i * tensors.cols() + j,
                source: Box::new(e),
            })?;
            let (vals, vecs) = sorted_eigen(s);
            Ok(Glyph {
                i,
                j,
                eigenvalues: vals,
                eigenvectors: vecs.map(|v| [v.x, v.y, v.z]),
                c,
            })
        })
        .collect()
}

/// Writes `i j lambda1 lambda2 lambda3 e1x e1y e1z e2x e2y e2z e3x e3y e3z c`
/// per line.
pub fn write_glyphs<W: Write>(glyphs: &[Glyph], mut w: W) -> Result<()> {
    for g in glyphs {
        write!(w, "{} {}", g.i, g.j)?;
        for l in g.eigenvalues {
            write!(w, " {l}")?;
        }
        for v in g.eigenvectors {
            for c in v {
                write!(w, " {c}")?;
            }
        }
        writeln!(w, " {}", g.c)?;
    }
    Ok(())
}

/// Random rotation drawn from `rng` (uniform on SO(3)).
pub fn random_rotation<R: Rng>(rng: &mut R) -> Matrix3<f64> {
    let q = Quaternion::new(
        rng.sample::<f64, _>(StandardNormal),
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
    );
    UnitQuaternion::from_quaternion(q).to_rotation_matrix().into_inner()
}

/// `R diag(eigenvalues) Rᵀ`
pub fn rotated_tensor(rotation: &Matrix3<f64>, eigenvalues: [f64; 3]) -> Matrix3<f64> {
    Spd3::from_eigen(Vector3::from(eigenvalues), *rotation)
}

/// Rotation by `angle` about the z axis.
pub fn rotation_z(angle: f64) -> Matrix3<f64> {
    let (s, c) = angle.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

/// A ground-truth tensor image with its region labels.
#[derive(Debug, Clone)]
pub struct Phantom {
    pub tensors: Image<Matrix3<f64>>,
    pub labels: Image<usize>,
    /// First index of every segment after the first (1-row phantoms only).
    pub jumps: Vec<usize>,
}

const LO: f64 = 1.5e-4;
const HI: f64 = 3e-3;

/// Segment tensors of the 1D piecewise-constant phantom, as diagonals in a
/// common frame. In log-eigenvalue coordinates they form a regular
/// tetrahedron, so every pair of segments is at affine-invariant distance
/// `√2 ln 20`.
pub const PWCONST_SEGMENTS: [[f64; 3]; 4] = [[HI, HI, HI], [HI, LO, LO], [LO, HI, LO], [LO, LO, HI]];

/// Eigenvalues of the two regions of the 2D piecewise-constant phantom; the
/// inner region is additionally rotated by 90° about z.
pub const TWO_REGION: [[f64; 3]; 2] = [[2.5e-3, 2.5e-4, 2.5e-4], [2.5e-3, 2.5e-4, 2.5e-4]];

/// Piecewise-constant tensor phantom.
///
/// One row: four segments of (nearly) equal length, all tensors rotated by one
/// random rotation drawn from `seed`. Several rows: an elliptic inner region
/// whose principal direction is turned by 90° against the background.
pub fn pwconst_phantom(rows: usize, cols: usize, seed: u64) -> Result<Phantom> {
    if rows == 0 || cols == 0 {
        return Err(invalid("phantom needs at least one row and one column"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rot = random_rotation(&mut rng);
    if rows == 1 {
        if cols < 4 {
            return Err(invalid("a 1-row phantom needs at least 4 columns"));
        }
        let jumps: Vec<usize> = (1..4).map(|k| k * cols / 4).collect();
        let label = |j: usize| jumps.iter().filter(|&&s| j >= s).count();
        let labels = Image::from_fn(1, cols, |_, j| label(j))?;
        let tensors = labels.map(|&l| rotated_tensor(&rot, PWCONST_SEGMENTS[l]));
        return Ok(Phantom { tensors, labels, jumps });
    }
    let (ci, cj) = ((rows as f64 - 1.0) / 2.0, (cols as f64 - 1.0) / 2.0);
    let (ri, rj) = (rows as f64 * 0.3, cols as f64 * 0.3);
    let labels = Image::from_fn(rows, cols, |i, j| {
        let u = (i as f64 - ci) / ri;
        let v = (j as f64 - cj) / rj;
        usize::from(u * u + v * v <= 1.0)
    })?;
    let rot_inner = rot * rotation_z(std::f64::consts::FRAC_PI_2);
    let tensors = labels.map(|&l| {
        if l == 0 {
            rotated_tensor(&rot, TWO_REGION[0])
        } else {
            rotated_tensor(&rot_inner, TWO_REGION[1])
        }
    });
    Ok(Phantom {
        tensors,
        labels,
        jumps: Vec::new(),
    })
}

/// Piecewise-smooth tensor phantom: a principal direction turning smoothly
/// in the xy-plane along the columns, with a jump of the diffusivities at
/// the middle column.
pub fn smooth_phantom(rows: usize, cols: usize, seed: u64) -> Result<Phantom> {
    if rows == 0 || cols < 2 {
        return Err(invalid("smooth phantom needs at least two columns"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let offset: f64 = rng.gen_range(0.0..std::f64::consts::PI);
    let half = cols / 2;
    let labels = Image::from_fn(rows, cols, |_, j| usize::from(j >= half))?;
    let tensors = Image::from_fn(rows, cols, |i, j| {
        let t = j as f64 / (cols - 1) as f64 + 0.25 * i as f64 / rows as f64;
        let angle = offset + std::f64::consts::PI * t;
        let vals = if j < half {
            [1.8e-3, 4e-4, 3e-4]
        } else {
            [9e-4, 8e-4, 1e-4]
        };
        rotated_tensor(&rotation_z(angle), vals)
    })?;
    let jumps = if rows == 1 { vec![half] } else { Vec::new() };
    Ok(Phantom { tensors, labels, jumps })
}
