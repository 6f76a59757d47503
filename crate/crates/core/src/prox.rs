//! Proximal maps of the `L^p-V^q` summands and the cyclic proximal point
//! algorithm (CPPA).
//!
//! `V_α(x; f) = (1/p) Σ d^p(x_i, f_i) + (α/q) Σ d^q(x_i, x_{i+1})`, optionally
//! plus `μ (1/p) Σ d^p(x_i, a_i)` for an anchor signal `a`. Every proximal map
//! moves points along geodesics by a closed-form arclength.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::image::Image;
use crate::manifold::Manifold;
use crate::{Anchor, Exponent};

/// Moves `x` towards `y` by the arclength `step(d(x, y))`, clamped to `[0, d]`.
fn advance<M: Manifold>(
    m: &M,
    x: &M::Point,
    y: &M::Point,
    step: impl FnOnce(f64) -> f64,
) -> Result<M::Point> {
    if x == y {
        return Ok(x.clone());
    }
    let chart = m.chart(x)?;
    let (mut v, d) = m.chart_log(&chart, y)?;
    if d == 0.0 {
        return Ok(x.clone());
    }
    let t = step(d).clamp(0.0, d);
    if t == 0.0 {
        return Ok(x.clone());
    }
    if t == d {
        return Ok(y.clone());
    }
    m.scale_tangent(&mut v, t / d);
    m.chart_exp(&chart, &v)
}

/// Arclength moved by each endpoint under `prox_{λ G_i}`, `G_i = d^q / q`.
pub fn coupling_step(d: f64, lambda: f64, q: Exponent) -> f64 {
    match q {
        Exponent::One => {
            if lambda < 0.5 * d {
                lambda
            } else {
                0.5 * d
            }
        }
        Exponent::Two => lambda / (1.0 + 2.0 * lambda) * d,
    }
}

/// Arclength moved towards the data under `prox_{λ F}`, `F = d^p / p`.
pub fn data_step(d: f64, lambda: f64, p: Exponent) -> f64 {
    match p {
        Exponent::One => {
            if lambda < d {
                lambda
            } else {
                d
            }
        }
        Exponent::Two => lambda / (1.0 + lambda) * d,
    }
}

/// Proximal map of `λ d^q(x_i, x_{i+1}) / q`: both points move towards each
/// other along the connecting geodesic.
pub fn prox_pair<M: Manifold>(
    m: &M,
    x: &M::Point,
    y: &M::Point,
    lambda: f64,
    q: Exponent,
) -> Result<(M::Point, M::Point)> {
    if !(lambda > 0.0) {
        return Err(invalid(format!("prox parameter must be positive, got {lambda}")));
    }
    let nx = advance(m, x, y, |d| coupling_step(d, lambda, q))?;
    let ny = advance(m, y, x, |d| coupling_step(d, lambda, q))?;
    Ok((nx, ny))
}

/// Proximal map of `λ d^p(·, f) / p`.
pub fn prox_data<M: Manifold>(
    m: &M,
    x: &M::Point,
    f: &M::Point,
    lambda: f64,
    p: Exponent,
) -> Result<M::Point> {
    if !(lambda > 0.0) {
        return Err(invalid(format!("prox parameter must be positive, got {lambda}")));
    }
    advance(m, x, f, |d| data_step(d, lambda, p))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CppaConfig {
    /// `λ_k = lambda0 / k` for sweep `k = 1, 2, ...`
    pub lambda0: f64,
    pub sweeps: usize,
    /// Relative energy change per sweep below which iteration stops. A sweep
    /// that returns exactly its starting iterate (all steps saturated while
    /// `λ_k` is large) does not count as converged.
    pub tol: f64,
}

impl Default for CppaConfig {
    fn default() -> Self {
        Self {
            lambda0: 2.0,
            sweeps: 300,
            tol: 1e-8,
        }
    }
}

impl CppaConfig {
    fn validate(&self) -> Result<()> {
        if !(self.lambda0 > 0.0) || self.sweeps == 0 || !(self.tol >= 0.0) {
            return Err(invalid("cppa config needs lambda0 > 0, sweeps >= 1, tol >= 0"));
        }
        Ok(())
    }
}

/// An `L^p-V^q` problem on a 1D signal.
#[derive(Debug, Clone, Copy)]
pub struct VqProblem<'a, P> {
    pub data: &'a [P],
    pub p: Exponent,
    pub q: Exponent,
    pub alpha: f64,
    pub extra: Option<Anchor<'a, P>>,
}

impl<'a, P> VqProblem<'a, P> {
    pub fn new(data: &'a [P], p: Exponent, q: Exponent, alpha: f64) -> Self {
        Self { data, p, q, alpha, extra: None }
    }

    pub fn with_anchor(mut self, anchor: Anchor<'a, P>) -> Self {
        self.extra = Some(anchor);
        self
    }

    fn validate(&self) -> Result<()> {
        if self.data.is_empty() {
            return Err(crate::Error::EmptyInput);
        }
        if !(self.alpha >= 0.0) || !self.alpha.is_finite() {
            return Err(invalid("alpha must be finite and nonnegative"));
        }
        if let Some(a) = self.extra {
            if !(a.weight >= 0.0) || !a.weight.is_finite() {
                return Err(invalid("anchor weight must be finite and nonnegative"));
            }
            if a.points.len() != self.data.len() {
                return Err(invalid("anchor length differs from data length"));
            }
        }
        Ok(())
    }
}

/// `V_α(x; f)` including the anchor term.
pub fn vq_energy<M: Manifold>(m: &M, prob: &VqProblem<'_, M::Point>, x: &[M::Point]) -> Result<f64> {
    if x.len() != prob.data.len() {
        return Err(invalid("signal length differs from data length"));
    }
    let p = prob.p;
    let mut e = 0.0;
    for (xi, fi) in x.iter().zip(prob.data) {
        e += p.pow(m.dist(xi, fi)?);
    }
    if let Some(a) = prob.extra {
        if a.weight > 0.0 {
            let mut ea = 0.0;
            for (xi, ai) in x.iter().zip(a.points) {
                ea += p.pow(m.dist(xi, ai)?);
            }
            e += a.weight * ea;
        }
    }
    e /= p.value();
    if prob.alpha > 0.0 {
        let mut tv = 0.0;
        for w in x.windows(2) {
            tv += prob.q.pow(m.dist(&w[0], &w[1])?);
        }
        e += prob.alpha / prob.q.value() * tv;
    }
    Ok(e)
}

#[derive(Debug, Clone)]
pub struct CppaResult<P> {
    pub signal: Vec<P>,
    pub energy: f64,
    pub sweeps: usize,
    /// True when the relative energy change dropped below `tol` before the
    /// sweep cap.
    pub converged: bool,
}

/// Minimizes `V_α` by cyclic proximal point sweeps.
///
/// One sweep applies the data prox to every sample, then the anchor prox (with
/// parameter `λ_k μ`), then the coupling proxes left to right with parameter
/// `λ_k α`. `λ_k` decreases once per sweep.
pub fn cppa_solve<M: Manifold>(
    m: &M,
    prob: &VqProblem<'_, M::Point>,
    init: Option<&[M::Point]>,
    cfg: &CppaConfig,
) -> Result<CppaResult<M::Point>> {
    prob.validate()?;
    cfg.validate()?;
    let n = prob.data.len();
    let mut x: Vec<M::Point> = match init {
        Some(s) if s.len() == n => s.to_vec(),
        Some(s) => {
            return Err(invalid(format!("init has length {}, data {}", s.len(), n)));
        }
        None => prob.data.to_vec(),
    };
    let anchor = prob.extra.filter(|a| a.weight > 0.0);
    let mut energy = vq_energy(m, prob, &x)?;
    let mut sweeps = 0;
    let mut converged = false;
    for k in 1..=cfg.sweeps {
        sweeps = k;
        let lambda = cfg.lambda0 / k as f64;
        let start = x.clone();
        for (xi, fi) in x.iter_mut().zip(prob.data) {
            *xi = prox_data(m, xi, fi, lambda, prob.p)?;
        }
        if let Some(a) = anchor {
            for (xi, ai) in x.iter_mut().zip(a.points) {
                *xi = prox_data(m, xi, ai, lambda * a.weight, prob.p)?;
            }
        }
        if prob.alpha > 0.0 {
            for i in 0..n.saturating_sub(1) {
                let (a, b) = prox_pair(m, &x[i], &x[i + 1], lambda * prob.alpha, prob.q)?;
                x[i] = a;
                x[i + 1] = b;
            }
        }
        let next = vq_energy(m, prob, &x)?;
        let change = (energy - next).abs();
        energy = next;
        if energy == 0.0 || (change <= cfg.tol * energy && x != start) {
            converged = true;
            break;
        }
    }
    Ok(CppaResult {
        signal: x,
        energy,
        sweeps,
        converged,
    })
}

/// Pixel pairs `((i, j), (i, j) + a)` with both ends inside a `rows × cols` grid.
pub fn grid_pairs(rows: usize, cols: usize, a: (isize, isize)) -> impl Iterator<Item = (usize, usize)> {
    (0..rows).flat_map(move |i| {
        (0..cols).filter_map(move |j| {
            let ni = i as isize + a.0;
            let nj = j as isize + a.1;
            (ni >= 0 && nj >= 0 && (ni as usize) < rows && (nj as usize) < cols)
                .then(|| (i * cols + j, ni as usize * cols + nj as usize))
        })
    })
}

/// `L^p-V^q` energy of an image: `(1/p) Σ d^p(x, f) + (α/q) Σ_s w_s Σ d^q(x_ij, x_{(i,j)+a_s})`.
pub fn vq_image_energy<M: Manifold>(
    m: &M,
    f: &Image<M::Point>,
    x: &Image<M::Point>,
    p: Exponent,
    q: Exponent,
    alpha: f64,
    dirs: &[((isize, isize), f64)],
) -> Result<f64> {
    let mut e = 0.0;
    for (xi, fi) in x.as_slice().iter().zip(f.as_slice()) {
        e += p.pow(m.dist(xi, fi)?);
    }
    e /= p.value();
    let xs = x.as_slice();
    for &(a, w) in dirs {
        let mut tv = 0.0;
        for (s, t) in grid_pairs(x.rows(), x.cols(), a) {
            tv += q.pow(m.dist(&xs[s], &xs[t])?);
        }
        e += alpha * w / q.value() * tv;
    }
    Ok(e)
}

/// CPPA for the image `L^p-V^q` problem over the given weighted offsets.
pub fn cppa_solve_image<M: Manifold>(
    m: &M,
    f: &Image<M::Point>,
    p: Exponent,
    q: Exponent,
    alpha: f64,
    dirs: &[((isize, isize), f64)],
    cfg: &CppaConfig,
) -> Result<(Image<M::Point>, CppaResult<()>)> {
    cfg.validate()?;
    if !(alpha >= 0.0) {
        return Err(invalid("alpha must be nonnegative"));
    }
    let mut x = f.clone();
    let mut energy = vq_image_energy(m, f, &x, p, q, alpha, dirs)?;
    let mut sweeps = 0;
    let mut converged = false;
    for k in 1..=cfg.sweeps {
        sweeps = k;
        let lambda = cfg.lambda0 / k as f64;
        let start = x.clone();
        for (xi, fi) in x.as_mut_slice().iter_mut().zip(f.as_slice()) {
            *xi = prox_data(m, xi, fi, lambda, p)?;
        }
        if alpha > 0.0 {
            let (rows, cols) = x.shape();
            let xs = x.as_mut_slice();
            for &(a, w) in dirs {
                if w <= 0.0 {
                    continue;
                }
                for (s, t) in grid_pairs(rows, cols, a) {
                    let (u, v) = prox_pair(m, &xs[s], &xs[t], lambda * alpha * w, q)?;
                    xs[s] = u;
                    xs[t] = v;
                }
            }
        }
        let next = vq_image_energy(m, f, &x, p, q, alpha, dirs)?;
        let change = (energy - next).abs();
        energy = next;
        if energy == 0.0 || (change <= cfg.tol * energy && x.as_slice() != start.as_slice()) {
            converged = true;
            break;
        }
    }
    Ok((
        x,
        CppaResult {
            signal: Vec::new(),
            energy,
            sweeps,
            converged,
        },
    ))
}
