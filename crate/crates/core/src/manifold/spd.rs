use nalgebra::{Matrix3, Vector3};

use super::{check_len, Manifold, ManifoldKind};
use crate::error::{Error, Result};

/// Symmetric positive definite 3×3 matrices with the affine-invariant metric
/// `g_D(W, V) = tr(D^{-1/2} W D^{-1} V D^{-1/2})`.
///
/// This is a Cartan-Hadamard manifold: geodesics are unique and Fréchet
/// points of any finite data set are unique.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Spd3;

/// Eigenvalues of log arguments are clamped from below at this value.
pub const EIGEN_FLOOR: f64 = 1e-12;
const SYMMETRY_TOL: f64 = 1e-10;

/// Result of a logarithm that reports eigenvalue clamping.
#[derive(Debug, Clone, Copy)]
pub struct SpdLog {
    pub tangent: Matrix3<f64>,
    pub dist: f64,
    /// Set when an eigenvalue of `D^{-1/2} E D^{-1/2}` had to be raised to
    /// [`EIGEN_FLOOR`] (numerically singular input).
    pub clamped: bool,
}

/// Factorization `D = G Gᵀ` cached at a base point.
#[derive(Debug, Clone, Copy)]
pub struct SpdChart {
    g: Matrix3<f64>,
    g_inv: Matrix3<f64>,
}

impl Spd3 {
    /// Validates symmetry and positive definiteness.
    pub fn check(m: &Matrix3<f64>) -> Result<()> {
        if m.iter().any(|c| !c.is_finite()) {
            return Err(Error::NotPositiveDefinite);
        }
        let asym = (m - m.transpose()).amax();
        if asym > SYMMETRY_TOL * m.amax().max(1.0) {
            return Err(Error::NotSymmetric(asym));
        }
        let eig = sym_eigen(m).eigenvalues;
        if eig.iter().any(|&l| !(l > 0.0)) {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(())
    }

    /// Builds `Q diag(eigenvalues) Qᵀ`.
    pub fn from_eigen(eigenvalues: Vector3<f64>, eigenvectors: Matrix3<f64>) -> Matrix3<f64> {
        symmetrize(&(eigenvectors * Matrix3::from_diagonal(&eigenvalues) * eigenvectors.transpose()))
    }

    /// Logarithm with an explicit clamping flag.
    pub fn log_checked(&self, base: &Matrix3<f64>, target: &Matrix3<f64>) -> Result<SpdLog> {
        let chart = self.chart(base)?;
        let (tangent, dist, clamped) = log_in_chart(&chart, target);
        Ok(SpdLog { tangent, dist, clamped })
    }

    /// Matrix exponential of a symmetric matrix.
    pub fn expm(w: &Matrix3<f64>) -> Matrix3<f64> {
        map_eigenvalues(w, f64::exp)
    }

    /// Matrix logarithm of a symmetric positive definite matrix.
    pub fn logm(d: &Matrix3<f64>) -> Matrix3<f64> {
        map_eigenvalues(d, |l| l.max(EIGEN_FLOOR).ln())
    }
}

pub(crate) fn symmetrize(m: &Matrix3<f64>) -> Matrix3<f64> {
    (m + m.transpose()) * 0.5
}

/// Eigenvalues (unordered) and matching orthonormal eigenvectors (columns).
#[derive(Debug, Clone, Copy)]
pub struct SymEigen {
    pub eigenvalues: Vector3<f64>,
    pub eigenvectors: Matrix3<f64>,
}

/// Eigendecomposition of the symmetric part of `m` by cyclic Jacobi
/// rotations, accurate to rounding even for nearly repeated eigenvalues.
pub fn sym_eigen(m: &Matrix3<f64>) -> SymEigen {
    let mut a = symmetrize(m);
    let mut v = Matrix3::identity();
    for sweep in 0..50 {
        let off = a[(0, 1)].abs() + a[(0, 2)].abs() + a[(1, 2)].abs();
        if off == 0.0 || !off.is_finite() {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            let apq = a[(p, q)];
            let g = 100.0 * apq.abs();
            if sweep > 0 && a[(p, p)].abs() + g == a[(p, p)].abs() && a[(q, q)].abs() + g == a[(q, q)].abs() {
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                continue;
            }
            if apq == 0.0 {
                continue;
            }
            let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            // a ← Jᵀ a J and v ← v J for the plane rotation J in (p, q)
            let r = 3 - p - q;
            let (arp, arq) = (a[(r, p)], a[(r, q)]);
            a[(p, p)] -= t * apq;
            a[(q, q)] += t * apq;
            a[(p, q)] = 0.0;
            a[(q, p)] = 0.0;
            a[(r, p)] = c * arp - s * arq;
            a[(p, r)] = a[(r, p)];
            a[(r, q)] = s * arp + c * arq;
            a[(q, r)] = a[(r, q)];
            for k in 0..3 {
                let (vp, vq) = (v[(k, p)], v[(k, q)]);
                v[(k, p)] = c * vp - s * vq;
                v[(k, q)] = s * vp + c * vq;
            }
        }
    }
    SymEigen {
        eigenvalues: a.diagonal(),
        eigenvectors: v,
    }
}

fn map_eigenvalues(m: &Matrix3<f64>, f: impl Fn(f64) -> f64) -> Matrix3<f64> {
    let eig = sym_eigen(m);
    Spd3::from_eigen(eig.eigenvalues.map(f), eig.eigenvectors)
}

fn whiten(chart: &SpdChart, m: &Matrix3<f64>) -> Matrix3<f64> {
    symmetrize(&(chart.g_inv * m * chart.g_inv.transpose()))
}

fn log_in_chart(chart: &SpdChart, target: &Matrix3<f64>) -> (Matrix3<f64>, f64, bool) {
    let eig = sym_eigen(&whiten(chart, target));
    let mut clamped = false;
    let logs = eig.eigenvalues.map(|l| {
        if l < EIGEN_FLOOR {
            clamped = true;
        }
        l.max(EIGEN_FLOOR).ln()
    });
    let dist = logs.norm();
    let y = Spd3::from_eigen(logs, eig.eigenvectors);
    let w = symmetrize(&(chart.g * y * chart.g.transpose()));
    (w, dist, clamped)
}

impl Manifold for Spd3 {
    type Point = Matrix3<f64>;
    type Tangent = Matrix3<f64>;
    type Chart = SpdChart;

    fn kind(&self) -> ManifoldKind {
        ManifoldKind::Spd3
    }

    /// `(Σ log² κ_l)^{1/2}` with `κ_l` the eigenvalues of `D^{-1/2} E D^{-1/2}`.
    fn dist(&self, x: &Matrix3<f64>, y: &Matrix3<f64>) -> Result<f64> {
        let chart = self.chart(x)?;
        if x == y {
            return Ok(0.0);
        }
        let eig = sym_eigen(&whiten(&chart, y)).eigenvalues;
        if eig.iter().any(|&l| !(l > 0.0)) {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(eig.map(f64::ln).norm())
    }

    fn exp(&self, base: &Matrix3<f64>, v: &Matrix3<f64>) -> Result<Matrix3<f64>> {
        let chart = self.chart(base)?;
        self.chart_exp(&chart, v)
    }

    fn log(&self, base: &Matrix3<f64>, target: &Matrix3<f64>) -> Result<Matrix3<f64>> {
        let chart = self.chart(base)?;
        self.chart_log(&chart, target).map(|(w, _)| w)
    }

    fn norm(&self, base: &Matrix3<f64>, v: &Matrix3<f64>) -> Result<f64> {
        let chart = self.chart(base)?;
        Ok(self.chart_norm(&chart, v))
    }

    fn zero_tangent(&self, _base: &Matrix3<f64>) -> Matrix3<f64> {
        Matrix3::zeros()
    }

    fn scale_tangent(&self, v: &mut Matrix3<f64>, a: f64) {
        *v *= a;
    }

    fn add_scaled(&self, acc: &mut Matrix3<f64>, a: f64, v: &Matrix3<f64>) {
        *acc += v * a;
    }

    fn chart(&self, base: &Matrix3<f64>) -> Result<SpdChart> {
        let chol = symmetrize(base).cholesky().ok_or(Error::NotPositiveDefinite)?;
        let g = chol.l();
        let g_inv = g.try_inverse().ok_or(Error::NotPositiveDefinite)?;
        Ok(SpdChart { g, g_inv })
    }

    fn chart_log(&self, chart: &SpdChart, target: &Matrix3<f64>) -> Result<(Matrix3<f64>, f64)> {
        let (w, d, clamped) = log_in_chart(chart, target);
        if clamped {
            log::warn!("spd3 log: eigenvalue clamped at {EIGEN_FLOOR:e} (numerically singular input)");
        }
        Ok((w, d))
    }

    fn chart_exp(&self, chart: &SpdChart, v: &Matrix3<f64>) -> Result<Matrix3<f64>> {
        let e = Spd3::expm(&whiten(chart, v));
        Ok(symmetrize(&(chart.g * e * chart.g.transpose())))
    }

    fn chart_norm(&self, chart: &SpdChart, v: &Matrix3<f64>) -> f64 {
        whiten(chart, v).norm()
    }

    fn tangent_coords(&self, chart: &SpdChart, v: &Matrix3<f64>) -> Vec<f64> {
        let w = whiten(chart, v);
        let r = std::f64::consts::SQRT_2;
        vec![w[(0, 0)], w[(1, 1)], w[(2, 2)], r * w[(0, 1)], r * w[(0, 2)], r * w[(1, 2)]]
    }

    fn tangent_from_coords(&self, chart: &SpdChart, c: &[f64]) -> Matrix3<f64> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let w = Matrix3::new(c[0], h * c[3], h * c[4], h * c[3], c[1], h * c[5], h * c[4], h * c[5], c[2]);
        symmetrize(&(chart.g * w * chart.g.transpose()))
    }

    fn coords(&self, x: &Matrix3<f64>) -> Vec<f64> {
        // row-major
        let mut out = Vec::with_capacity(9);
        for i in 0..3 {
            for j in 0..3 {
                out.push(x[(i, j)]);
            }
        }
        out
    }

    fn from_coords(&self, coords: &[f64]) -> Result<Matrix3<f64>> {
        check_len(9, coords.len())?;
        let m = Matrix3::from_row_slice(coords);
        Spd3::check(&m)?;
        Ok(m)
    }
}
