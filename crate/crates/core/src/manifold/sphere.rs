use super::{check_len, Manifold, ManifoldKind};
use crate::error::{invalid, Error, Result};

/// Unit sphere `S^{n-1}` embedded in `R^n` with the round metric.
///
/// Square-root parametrized discrete ODFs live on this manifold (restricted
/// to the positive orthant).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sphere {
    ambient_dim: usize,
}

/// Inner products at or below this value are treated as antipodal.
const ANTIPODAL_COS: f64 = -1.0 + 1e-12;
pub(crate) const UNIT_TOL: f64 = 1e-10;

impl Sphere {
    pub fn new(ambient_dim: usize) -> Result<Self> {
        if ambient_dim < 2 {
            return Err(invalid("sphere needs ambient dimension >= 2"));
        }
        Ok(Self { ambient_dim })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Normalizes a nonzero vector onto the sphere.
    pub fn project(&self, v: &[f64]) -> Result<Vec<f64>> {
        check_len(self.ambient_dim, v.len())?;
        let n = norm(v);
        if !(n > 0.0) || !n.is_finite() {
            return Err(invalid("cannot project a zero vector onto the sphere"));
        }
        Ok(v.iter().map(|c| c / n).collect())
    }

    fn check(&self, x: &[f64]) -> Result<()> {
        check_len(self.ambient_dim, x.len())
    }
}

impl Manifold for Sphere {
    type Point = Vec<f64>;
    type Tangent = Vec<f64>;
    type Chart = Vec<f64>;

    fn kind(&self) -> ManifoldKind {
        ManifoldKind::Sphere { ambient_dim: self.ambient_dim }
    }

    /// Great-circle distance. Evaluated as `2 atan2(|x-y|, |x+y|)`, which equals
    /// the arccosine of the (clamped) inner product but keeps full precision for
    /// nearby points.
    fn dist(&self, x: &Vec<f64>, y: &Vec<f64>) -> Result<f64> {
        self.check(x)?;
        self.check(y)?;
        let (mut dm, mut dp) = (0.0, 0.0);
        for (a, b) in x.iter().zip(y) {
            dm += (a - b) * (a - b);
            dp += (a + b) * (a + b);
        }
        Ok(2.0 * dm.sqrt().atan2(dp.sqrt()))
    }

    fn exp(&self, base: &Vec<f64>, v: &Vec<f64>) -> Result<Vec<f64>> {
        self.check(base)?;
        self.check(v)?;
        // drop any normal component picked up through roundoff
        let c = dot(base, v);
        let t: Vec<f64> = v.iter().zip(base).map(|(vi, bi)| vi - c * bi).collect();
        let n = norm(&t);
        if n == 0.0 {
            return Ok(base.clone());
        }
        let (s, co) = n.sin_cos();
        let out: Vec<f64> = base.iter().zip(&t).map(|(b, ti)| b * co + ti * s / n).collect();
        let on = norm(&out);
        Ok(out.into_iter().map(|c| c / on).collect())
    }

    fn log(&self, base: &Vec<f64>, target: &Vec<f64>) -> Result<Vec<f64>> {
        self.chart_log(base, target).map(|(v, _)| v)
    }

    fn norm(&self, base: &Vec<f64>, v: &Vec<f64>) -> Result<f64> {
        self.check(base)?;
        self.check(v)?;
        Ok(norm(v))
    }

    fn zero_tangent(&self, _base: &Vec<f64>) -> Vec<f64> {
        vec![0.0; self.ambient_dim]
    }

    fn scale_tangent(&self, v: &mut Vec<f64>, a: f64) {
        v.iter_mut().for_each(|c| *c *= a);
    }

    fn add_scaled(&self, acc: &mut Vec<f64>, a: f64, v: &Vec<f64>) {
        acc.iter_mut().zip(v).for_each(|(c, x)| *c += a * x);
    }

    fn chart(&self, base: &Vec<f64>) -> Result<Vec<f64>> {
        self.check(base)?;
        Ok(base.clone())
    }

    fn chart_log(&self, base: &Vec<f64>, target: &Vec<f64>) -> Result<(Vec<f64>, f64)> {
        self.check(base)?;
        self.check(target)?;
        let c = dot(base, target);
        if c <= ANTIPODAL_COS {
            return Err(Error::AntipodalPoints);
        }
        let d = self.dist(base, target)?;
        let mut u: Vec<f64> = target.iter().zip(base).map(|(t, b)| t - c * b).collect();
        let un = norm(&u);
        if d == 0.0 || un == 0.0 {
            return Ok((vec![0.0; self.ambient_dim], 0.0));
        }
        let s = d / un;
        u.iter_mut().for_each(|x| *x *= s);
        Ok((u, d))
    }

    fn chart_exp(&self, chart: &Vec<f64>, v: &Vec<f64>) -> Result<Vec<f64>> {
        self.exp(chart, v)
    }

    fn chart_norm(&self, _chart: &Vec<f64>, v: &Vec<f64>) -> f64 {
        norm(v)
    }

    fn tangent_coords(&self, _chart: &Vec<f64>, v: &Vec<f64>) -> Vec<f64> {
        v.clone()
    }

    fn tangent_from_coords(&self, _chart: &Vec<f64>, coords: &[f64]) -> Vec<f64> {
        coords.to_vec()
    }

    fn coords(&self, x: &Vec<f64>) -> Vec<f64> {
        x.clone()
    }

    fn from_coords(&self, coords: &[f64]) -> Result<Vec<f64>> {
        self.check(coords)?;
        let n = norm(coords);
        if !n.is_finite() || (n - 1.0).abs() > UNIT_TOL {
            return Err(Error::NotUnit(n));
        }
        Ok(coords.to_vec())
    }

    fn uniqueness_radius(&self) -> Option<f64> {
        Some(std::f64::consts::FRAC_PI_2)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn orthogonal_points_are_a_quarter_circle_apart() {
        let m = Sphere::new(3).unwrap();
        let d = m.dist(&vec![1.0, 0.0, 0.0], &vec![0.0, 1.0, 0.0]).unwrap();
        assert!((d - FRAC_PI_2).abs() <= 1e-12);
    }

    #[test]
    fn exp_along_quarter_circle() {
        let m = Sphere::new(3).unwrap();
        let p = m.exp(&vec![1.0, 0.0, 0.0], &vec![0.0, FRAC_PI_2, 0.0]).unwrap();
        assert!((p[0]).abs() < 1e-15 && (p[1] - 1.0).abs() < 1e-15 && p[2].abs() < 1e-15);
        let same = m.exp(&vec![1.0, 0.0, 0.0], &vec![0.0; 3]).unwrap();
        assert_eq!(same, vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn antipodal_log_is_rejected() {
        let m = Sphere::new(3).unwrap();
        let err = m.log(&vec![0.0, 0.0, 1.0], &vec![0.0, 0.0, -1.0]).unwrap_err();
        assert!(matches!(err, Error::AntipodalPoints));
        assert!(m.geopoint(&vec![0.0, 0.0, 1.0], &vec![0.0, 0.0, -1.0], 0.5).is_err());
    }

    #[test]
    fn non_unit_coordinates_are_rejected() {
        let m = Sphere::new(3).unwrap();
        assert!(m.from_coords(&[1.0, 1.0, 0.0]).is_err());
        assert!(m.from_coords(&[0.6, 0.8, 0.0]).is_ok());
    }

    #[test]
    fn log_at_self_is_zero() {
        let m = Sphere::new(4).unwrap();
        let x = m.project(&[1.0, 2.0, -1.0, 0.5]).unwrap();
        let v = m.log(&x, &x).unwrap();
        assert!(v.iter().all(|c| *c == 0.0));
    }
}
