//! Approximate Potts and Mumford-Shah regularization of images by penalty
//! splitting.
//!
//! The image functional `(1/p) Σ d^p(x, f) + Σ_s ω_s Ψ_{a_s}(x)` couples pixels
//! along the offsets `a_s` of a neighborhood. The splitting keeps one copy
//! `x_s` per offset and replaces the constraints `x_s = x_{s+1}` by penalties
//! `μ_k d^p(x_s, x_{s-1})` with `μ_k` growing geometrically. Each block update
//! decomposes into independent univariate problems along the lines of the
//! grid in direction `a_s`, which are solved exactly by [`crate::dp1d`].

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dp1d::{energy_1d, solve_1d_anchored, Model, MsParams, SolverConfig};
use crate::error::{invalid, Error, Result};
use crate::image::Image;
use crate::manifold::Manifold;
use crate::prox::grid_pairs;
use crate::{Anchor, Exponent};

/// Offsets `a_s = (row step, column step)` and their weights `ω_s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Neighborhood {
    pub dirs: Vec<(isize, isize)>,
    pub weights: Vec<f64>,
}

impl Default for Neighborhood {
    /// Axis and diagonal offsets with weights `√2 − 1` and `1 − √2/2`.
    fn default() -> Self {
        let axis = std::f64::consts::SQRT_2 - 1.0;
        let diag = 1.0 - std::f64::consts::SQRT_2 / 2.0;
        Self {
            dirs: vec![(1, 0), (0, 1), (1, 1), (1, -1)],
            weights: vec![axis, axis, diag, diag],
        }
    }
}

impl Neighborhood {
    pub fn new(dirs: Vec<(isize, isize)>, weights: Vec<f64>) -> Result<Self> {
        let nb = Self { dirs, weights };
        nb.validate()?;
        Ok(nb)
    }

    /// Axis offsets only, unit weights.
    pub fn axis() -> Self {
        Self {
            dirs: vec![(1, 0), (0, 1)],
            weights: vec![1.0, 1.0],
        }
    }

    pub fn len(&self) -> usize {
        self.dirs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dirs.is_empty()
    }

    /// `(offset, weight)` pairs.
    pub fn weighted(&self) -> Vec<((isize, isize), f64)> {
        self.dirs.iter().copied().zip(self.weights.iter().copied()).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.dirs.is_empty() || self.dirs.len() != self.weights.len() {
            return Err(invalid("neighborhood needs equally many offsets and weights, at least one"));
        }
        if self.dirs.iter().any(|&d| d == (0, 0)) {
            return Err(invalid("neighborhood offsets must be nonzero"));
        }
        if self.weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(invalid("neighborhood weights must be finite and nonnegative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitConfig {
    /// `μ_k = mu0 · tau^k`, `k = 0, 1, ...`
    pub mu0: f64,
    /// Growth factor; `2^p` when absent.
    pub tau: Option<f64>,
    pub outer_iters: usize,
    /// Stop once every block moved less than this, averaged over pixels,
    /// and consecutive blocks agree to this tolerance at every pixel.
    pub stop_tol: f64,
    /// Neighbors farther apart than this count as a jump in the reported
    /// Potts energy. Blocks agree only up to `stop_tol`, so pixels merged by
    /// one block differ by a few multiples of it in the others; keep this
    /// well above `stop_tol`.
    pub jump_tol: f64,
    pub solver: SolverConfig,
}

impl Default for SplitConfig {
    fn default() -> Self {
        Self {
            mu0: 1e-2,
            tau: None,
            outer_iters: 40,
            stop_tol: 1e-4,
            jump_tol: 1e-3,
            solver: SolverConfig::default(),
        }
    }
}

impl SplitConfig {
    pub fn growth(&self, p: Exponent) -> f64 {
        self.tau.unwrap_or(match p {
            Exponent::One => 2.0,
            Exponent::Two => 4.0,
        })
    }

    pub fn mu(&self, p: Exponent, k: usize) -> f64 {
        self.mu0 * self.growth(p).powi(k as i32)
    }

    fn validate(&self, p: Exponent) -> Result<()> {
        if !(self.mu0 > 0.0) || !(self.growth(p) > 1.0) || self.outer_iters == 0 || !(self.stop_tol >= 0.0) {
            return Err(invalid("split config needs mu0 > 0, tau > 1, outer_iters >= 1, stop_tol >= 0"));
        }
        Ok(())
    }
}

/// Diagnostics of one outer iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub k: usize,
    pub mu: f64,
    /// Block subproblem energies of `x_s^k` and `x_s^{k+1}` under the
    /// anchor used for the update.
    pub energy_before: Vec<f64>,
    pub energy_after: Vec<f64>,
    /// Largest pixelwise distance between cyclically consecutive blocks.
    pub consensus: f64,
    /// Largest mean pixel distance between `x_s^{k+1}` and `x_s^k` over `s`.
    pub change: f64,
    /// `Σ_pixels d^p(x_1^{k+1}, x_R^k)`
    pub decay: f64,
    #[serde(skip)]
    pub wall_time: f64,
}

#[derive(Debug, Clone)]
pub struct Solution2d<P> {
    pub x: Image<P>,
    /// Image functional at `x`.
    pub energy: f64,
    pub trace: Vec<IterationRecord>,
    pub converged: bool,
    pub inner_not_converged: usize,
    pub may_be_non_unique: bool,
    /// The last block had a higher image energy than `f`, which is returned
    /// instead.
    pub returned_data: bool,
}

/// Maximal chains of pixels `p, p + a, p + 2a, ...` covering the grid.
pub fn lines(rows: usize, cols: usize, a: (isize, isize)) -> Vec<Vec<usize>> {
    let inside = |i: isize, j: isize| i >= 0 && j >= 0 && (i as usize) < rows && (j as usize) < cols;
    let mut out = Vec::new();
    for i in 0..rows as isize {
        for j in 0..cols as isize {
            if inside(i - a.0, j - a.1) {
                continue;
            }
            let mut line = Vec::new();
            let (mut u, mut v) = (i, j);
            while inside(u, v) {
                line.push(u as usize * cols + v as usize);
                u += a.0;
                v += a.1;
            }
            out.push(line);
        }
    }
    out
}

/// The image functional `(1/p) Σ d^p(x, f) + Σ_s ω_s Ψ_{a_s}(x)` with `Ψ`
/// counting jumps (Potts, weight `γ`) or summing truncated couplings
/// `min(α d^q / q, γ)` (Mumford-Shah) over pixel pairs inside the grid.
pub fn image_energy<M: Manifold>(
    m: &M,
    f: &Image<M::Point>,
    x: &Image<M::Point>,
    params: &MsParams,
    nb: &Neighborhood,
    jump_tol: f64,
) -> Result<f64> {
    if f.shape() != x.shape() {
        return Err(invalid("image shapes differ"));
    }
    let p = params.p;
    let mut e = 0.0;
    for (xi, fi) in x.as_slice().iter().zip(f.as_slice()) {
        e += p.pow(m.dist(xi, fi)?);
    }
    e /= p.value();
    let xs = x.as_slice();
    for (a, w) in nb.weighted() {
        let mut psi = 0.0;
        for (s, t) in grid_pairs(x.rows(), x.cols(), a) {
            let d = m.dist(&xs[s], &xs[t])?;
            psi += match params.model {
                Model::Potts => {
                    if d > jump_tol {
                        params.gamma
                    } else {
                        0.0
                    }
                }
                Model::MumfordShah { q, alpha } => (alpha * q.pow(d) / q.value()).min(params.gamma),
            };
        }
        e += w * psi;
    }
    Ok(e)
}

fn gather<P: Clone>(img: &[P], line: &[usize]) -> Vec<P> {
    line.iter().map(|&i| img[i].clone()).collect()
}

struct BlockOutcome<P> {
    image: Vec<P>,
    before: f64,
    after: f64,
    not_converged: usize,
    non_unique: bool,
}

#[allow(clippy::too_many_arguments)]
fn update_block<M: Manifold>(
    m: &M,
    f: &Image<M::Point>,
    current: &Image<M::Point>,
    anchor: &Image<M::Point>,
    mu: f64,
    line_params: &MsParams,
    lines: &[Vec<usize>],
    solver: &SolverConfig,
) -> Result<BlockOutcome<M::Point>> {
    let fs = f.as_slice();
    let cs = current.as_slice();
    let an = anchor.as_slice();
    let solved: Vec<Result<_>> = lines
        .par_iter()
        .map(|line| {
            let fl = gather(fs, line);
            let al = gather(an, line);
            let xl = gather(cs, line);
            let anchor = Anchor::new(&al, mu);
            let before = energy_1d(m, &fl, &xl, line_params, Some(anchor))?;
            let sol = solve_1d_anchored(m, &fl, line_params, Some(anchor), solver)?;
            Ok((before, sol))
        })
        .collect();
    let mut image = cs.to_vec();
    let mut out = BlockOutcome {
        image: Vec::new(),
        before: 0.0,
        after: 0.0,
        not_converged: 0,
        non_unique: false,
    };
    for (line, res) in lines.iter().zip(solved) {
        let (before, sol) = res?;
        out.before += before;
        out.after += sol.energy;
        out.not_converged += sol.flags.inner_not_converged;
        out.non_unique |= sol.flags.may_be_non_unique;
        for (&idx, v) in line.iter().zip(sol.x) {
            image[idx] = v;
        }
    }
    out.image = image;
    Ok(out)
}

fn mean_dist<M: Manifold>(m: &M, a: &[M::Point], b: &[M::Point]) -> Result<f64> {
    let mut s = 0.0;
    for (x, y) in a.iter().zip(b) {
        s += m.dist(x, y)?;
    }
    Ok(s / a.len() as f64)
}

fn max_dist<M: Manifold>(m: &M, a: &[M::Point], b: &[M::Point]) -> Result<f64> {
    let mut s = 0.0f64;
    for (x, y) in a.iter().zip(b) {
        s = s.max(m.dist(x, y)?);
    }
    Ok(s)
}

/// Penalty splitting solver for the image Potts / Mumford-Shah problem.
///
/// Block `s` at outer iteration `k` solves, on every line in direction `a_s`,
/// the univariate problem with data `f`, jump penalty `R ω_s γ` (and
/// smoothing `R ω_s α`), and anchor `x_{s-1}` with weight `μ_k`; block 1
/// anchors to `x_R` of the previous iteration. All blocks start at `f`. The
/// result is `x_R` at termination, or `f` if that has lower image energy.
pub fn solve_2d<M: Manifold>(
    m: &M,
    f: &Image<M::Point>,
    params: &MsParams,
    nb: &Neighborhood,
    cfg: &SplitConfig,
) -> Result<Solution2d<M::Point>> {
    params.validate()?;
    nb.validate()?;
    cfg.validate(params.p)?;
    if f.is_empty() {
        return Err(Error::EmptyInput);
    }
    let (rows, cols) = f.shape();
    let r_blocks = nb.len();
    let families: Vec<Vec<Vec<usize>>> = nb.dirs.iter().map(|&a| lines(rows, cols, a)).collect();
    let mut blocks: Vec<Image<M::Point>> = vec![f.clone(); r_blocks];
    let mut trace = Vec::new();
    let mut converged = false;
    let mut inner_not_converged = 0;
    let mut may_be_non_unique = false;
    for k in 0..cfg.outer_iters {
        let started = Instant::now();
        let mu = cfg.mu(params.p, k);
        let previous = blocks.clone();
        let mut before = Vec::with_capacity(r_blocks);
        let mut after = Vec::with_capacity(r_blocks);
        for s in 0..r_blocks {
            let anchor = if s == 0 { &blocks[r_blocks - 1] } else { &blocks[s - 1] };
            let w = nb.weights[s];
            if w == 0.0 {
                // no coupling: the block minimizes the pixelwise data terms
                let out = blend(m, f, anchor, mu, params.p, &cfg.solver)?;
                before.push(f64::NAN);
                after.push(f64::NAN);
                blocks[s] = out;
                continue;
            }
            let line_params = params.scaled(r_blocks as f64 * w);
            let out = update_block(m, f, &blocks[s], anchor, mu, &line_params, &families[s], &cfg.solver)?;
            before.push(out.before);
            after.push(out.after);
            inner_not_converged += out.not_converged;
            may_be_non_unique |= out.non_unique;
            blocks[s] = Image::new(rows, cols, out.image)?;
        }
        let mut change = 0.0f64;
        for (new, old) in blocks.iter().zip(&previous) {
            change = change.max(mean_dist(m, new.as_slice(), old.as_slice())?);
        }
        let mut consensus = 0.0f64;
        for s in 0..r_blocks {
            let t = (s + 1) % r_blocks;
            consensus = consensus.max(max_dist(m, blocks[s].as_slice(), blocks[t].as_slice())?);
        }
        let mut decay = 0.0;
        for (x, y) in blocks[0].as_slice().iter().zip(previous[r_blocks - 1].as_slice()) {
            decay += params.p.pow(m.dist(x, y)?);
        }
        let wall_time = started.elapsed().as_secs_f64();
        log::debug!(
            "split iteration {k}: mu {mu:.3e}, change {change:.3e}, consensus {consensus:.3e}, {wall_time:.2}s"
        );
        trace.push(IterationRecord {
            k,
            mu,
            energy_before: before,
            energy_after: after,
            consensus,
            change,
            decay,
            wall_time,
        });
        if change < cfg.stop_tol && consensus < cfg.stop_tol {
            converged = true;
            break;
        }
    }
    let mut x = blocks.pop().expect("at least one block");
    let mut energy = image_energy(m, f, &x, params, nb, cfg.jump_tol)?;
    let data_energy = image_energy(m, f, f, params, nb, cfg.jump_tol)?;
    let returned_data = data_energy < energy;
    if returned_data {
        x = f.clone();
        energy = data_energy;
    }
    Ok(Solution2d {
        x,
        energy,
        trace,
        converged,
        inner_not_converged,
        may_be_non_unique,
        returned_data,
    })
}

/// Pixelwise minimizer of `(1/p) d^p(x, f) + (μ/p) d^p(x, a)`.
fn blend<M: Manifold>(
    m: &M,
    f: &Image<M::Point>,
    anchor: &Image<M::Point>,
    mu: f64,
    p: Exponent,
    solver: &SolverConfig,
) -> Result<Image<M::Point>> {
    let data: Vec<M::Point> = f
        .as_slice()
        .iter()
        .zip(anchor.as_slice())
        .map(|(x, a)| {
            let pts = [x.clone(), a.clone()];
            crate::stats::frechet_point(m, &pts, &[1.0, mu], p.value(), &solver.mean, None).map(|r| r.point)
        })
        .collect::<Result<_>>()?;
    Image::new(f.rows(), f.cols(), data)
}

/// Outcome of [`iterate_decay_check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub holds: bool,
    /// Fitted `C` in `d^p(x_1^{k+1}, x_R^k) ≤ C / (μ_k − 1)`.
    pub constant: f64,
    /// Iterations `k` where the bound fails.
    pub violations: Vec<usize>,
    /// Number of iterations checked against the fitted bound.
    pub checked: usize,
}

/// Checks the decay `d^p(x_1^{k+1}, x_R^k) ≤ C / (μ_k − 1)` along a trace.
///
/// Only iterations with `μ_k > 1` carry a bound. `C` is the largest
/// `d^p (μ_k − 1)` over the first four of them (`k ≤ 3` when `μ_0 > 1`); later iterations are checked
/// against it.
pub fn iterate_decay_check(trace: &[IterationRecord]) -> DecayReport {
    if trace.iter().all(|r| r.decay == 0.0) {
        return DecayReport {
            holds: true,
            constant: 0.0,
            violations: Vec::new(),
            checked: trace.len(),
        };
    }
    let eligible: Vec<&IterationRecord> = trace.iter().filter(|r| r.mu > 1.0).collect();
    let fit = eligible.len().min(4);
    let constant = eligible[..fit]
        .iter()
        .map(|r| r.decay * (r.mu - 1.0))
        .fold(0.0, f64::max);
    let mut violations = Vec::new();
    for r in &eligible[fit..] {
        let bound = constant / (r.mu - 1.0);
        if r.decay > bound * (1.0 + 1e-9) + 1e-300 {
            violations.push(r.k);
        }
    }
    let checked = eligible.len() - fit;
    DecayReport {
        holds: violations.is_empty() && checked > 0,
        constant,
        violations,
        checked,
    }
}
