use super::{check_len, Manifold, ManifoldKind};
use crate::error::{invalid, Result};

/// Flat space `R^dim` with the standard metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Euclidean {
    dim: usize,
}

impl Euclidean {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("euclidean dimension must be positive"));
        }
        Ok(Self { dim })
    }

    /// The real line, used for scalar signals.
    pub fn scalar() -> Self {
        Self { dim: 1 }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn check(&self, x: &[f64]) -> Result<()> {
        check_len(self.dim, x.len())
    }
}

impl Manifold for Euclidean {
    type Point = Vec<f64>;
    type Tangent = Vec<f64>;
    type Chart = Vec<f64>;

    fn kind(&self) -> ManifoldKind {
        ManifoldKind::Euclidean { dim: self.dim }
    }

    fn dist(&self, x: &Vec<f64>, y: &Vec<f64>) -> Result<f64> {
        self.check(x)?;
        self.check(y)?;
        if self.dim == 1 {
            return Ok((x[0] - y[0]).abs());
        }
        Ok(x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
    }

    fn exp(&self, base: &Vec<f64>, v: &Vec<f64>) -> Result<Vec<f64>> {
        self.check(base)?;
        self.check(v)?;
        Ok(base.iter().zip(v).map(|(a, b)| a + b).collect())
    }

    fn log(&self, base: &Vec<f64>, target: &Vec<f64>) -> Result<Vec<f64>> {
        self.check(base)?;
        self.check(target)?;
        Ok(target.iter().zip(base).map(|(a, b)| a - b).collect())
    }

    fn norm(&self, base: &Vec<f64>, v: &Vec<f64>) -> Result<f64> {
        self.check(base)?;
        self.check(v)?;
        Ok(l2(v))
    }

    fn zero_tangent(&self, _base: &Vec<f64>) -> Vec<f64> {
        vec![0.0; self.dim]
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

    fn chart_log(&self, chart: &Vec<f64>, target: &Vec<f64>) -> Result<(Vec<f64>, f64)> {
        let v = self.log(chart, target)?;
        let n = l2(&v);
        Ok((v, n))
    }

    fn chart_exp(&self, chart: &Vec<f64>, v: &Vec<f64>) -> Result<Vec<f64>> {
        self.exp(chart, v)
    }

    fn chart_norm(&self, _chart: &Vec<f64>, v: &Vec<f64>) -> f64 {
        l2(v)
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
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(invalid("non-finite coordinate"));
        }
        Ok(coords.to_vec())
    }
}

fn l2(v: &[f64]) -> f64 {
    if v.len() == 1 {
        v[0].abs()
    } else {
        v.iter().map(|c| c * c).sum::<f64>().sqrt()
    }
}
