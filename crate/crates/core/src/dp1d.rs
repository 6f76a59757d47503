//! Exact dynamic programming for univariate Potts and Mumford-Shah problems.
//!
//! For a signal `f_1..f_n` both functionals take the form
//! `min over partitions of Σ_segments (γ + ε_{l,r}) − γ`, where `ε_{l,r}` is the
//! best approximation error on the discrete interval `[l, r]`: by a single
//! point for Potts and by an `L^p-V^q` minimizer for Mumford-Shah. The
//! recursion `B_r = min_l B_{l-1} + γ + ε_{l,r}` with `B_0 = −γ` finds the
//! optimum using `O(n^2)` interval errors.
//!
//! All indices are zero-based and intervals inclusive.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::manifold::Manifold;
use crate::prox::{cppa_solve, CppaConfig, VqProblem};
use crate::stats::{interval_error_potts, MeanConfig, MedianStep};
use crate::{Anchor, Exponent};

/// Which functional is minimized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum Model {
    /// `(1/p) Σ d^p(x_i, f_i) + γ #{i : x_i ≠ x_{i+1}}`
    Potts,
    /// `(1/p) Σ d^p(x_i, f_i) + Σ min(α d^q(x_i, x_{i+1}) / q, γ)`
    MumfordShah { q: Exponent, alpha: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MsParams {
    pub model: Model,
    pub p: Exponent,
    pub gamma: f64,
}

impl MsParams {
    pub fn potts(p: Exponent, gamma: f64) -> Self {
        Self {
            model: Model::Potts,
            p,
            gamma,
        }
    }

    pub fn mumford_shah(p: Exponent, q: Exponent, alpha: f64, gamma: f64) -> Self {
        Self {
            model: Model::MumfordShah { q, alpha },
            p,
            gamma,
        }
    }

    /// Mumford-Shah parameters given the jump height `s` instead of `γ`,
    /// using `γ = α s^q / q`.
    pub fn mumford_shah_with_jump(p: Exponent, q: Exponent, alpha: f64, s: f64) -> Self {
        Self::mumford_shah(p, q, alpha, alpha * q.pow(s) / q.value())
    }

    /// Jump height `s = (q γ / α)^{1/q}` of the Mumford-Shah model.
    pub fn jump_height(&self) -> Option<f64> {
        match self.model {
            Model::Potts => None,
            Model::MumfordShah { q, alpha } => {
                let sq = q.value() * self.gamma / alpha;
                Some(match q {
                    Exponent::One => sq,
                    Exponent::Two => sq.sqrt(),
                })
            }
        }
    }

    /// The same model with `γ` (and `α`) multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let model = match self.model {
            Model::Potts => Model::Potts,
            Model::MumfordShah { q, alpha } => Model::MumfordShah {
                q,
                alpha: alpha * factor,
            },
        };
        Self {
            model,
            p: self.p,
            gamma: self.gamma * factor,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0) || !self.gamma.is_finite() {
            return Err(invalid(format!("gamma must be positive and finite, got {}", self.gamma)));
        }
        if let Model::MumfordShah { alpha, .. } = self.model {
            if !(alpha > 0.0) || !alpha.is_finite() {
                return Err(invalid(format!("alpha must be positive and finite, got {alpha}")));
            }
            let s = self.jump_height().unwrap_or(f64::NAN);
            if !s.is_finite() {
                return Err(invalid("jump height is not finite"));
            }
        }
        Ok(())
    }
}

/// Inner solver settings shared by the 1D and 2D solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Potts interval errors.
    pub mean: MeanConfig,
    /// Mumford-Shah interval errors.
    pub cppa: CppaConfig,
    /// Skip and stop candidate evaluations that cannot improve the current
    /// best value.
    pub prune: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            mean: MeanConfig {
                max_iters: 200,
                tol: 1e-9,
                median: MedianStep::Newton,
            },
            cppa: CppaConfig::default(),
            prune: true,
        }
    }
}

/// Approximation errors on discrete intervals.
///
/// `fit(l, r, warm)` returns `ε_{l,r}` and a minimizer. The dynamic program
/// visits `l = r, r-1, ..., 0` for each `r` and passes the fit on `[l+1, r]`
/// as `warm`.
pub trait IntervalSolver {
    type Fit: Clone;

    fn len(&self) -> usize;

    fn fit(&mut self, l: usize, r: usize, warm: Option<&Self::Fit>) -> Result<(f64, Self::Fit)>;

    /// Whether `ε_{l,r}` never decreases as the interval grows. Lets the
    /// dynamic program stop a column scan early.
    fn monotone_errors(&self) -> bool {
        false
    }
}

/// Pruning test: a candidate `l` cannot strictly improve on `best` when
/// `B_{l-1} + γ ≥ best`, because interval errors are nonnegative.
pub fn prune_bound(b_prev: f64, gamma: f64, best: f64) -> bool {
    b_prev + gamma >= best
}

/// A segment `[start, end]` of the optimal partition and its interval error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub start: usize,
    pub end: usize,
    pub error: f64,
}

impl Segment {
    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Partition {
    pub segments: Vec<Segment>,
}

impl Partition {
    /// First index of every segment after the first.
    pub fn jumps(&self) -> Vec<usize> {
        self.segments.iter().skip(1).map(|s| s.start).collect()
    }

    pub fn num_jumps(&self) -> usize {
        self.segments.len().saturating_sub(1)
    }
}

/// Result of the generic dynamic program.
#[derive(Debug, Clone)]
pub struct DpOutcome<F> {
    pub partition: Partition,
    /// Minimizers of the segments, in order.
    pub fits: Vec<F>,
    /// `B_n`, the minimal value of the jump-form functional.
    pub energy: f64,
    /// Number of interval errors evaluated.
    pub evaluations: usize,
}

/// Runs the dynamic program over the intervals of `solver`.
///
/// Ties between candidates are broken towards the largest `l`. With `prune`
/// set, candidates with `B_{l-1} + γ ≥ best` are skipped. For solvers with
/// [`IntervalSolver::monotone_errors`], the scan over `l` also stops once
/// `ε_{l,r} ≥ best`, since `B_{l-1} + γ ≥ 0`.
pub fn dp_solve<S: IntervalSolver>(solver: &mut S, gamma: f64, prune: bool) -> Result<DpOutcome<S::Fit>> {
    let n = solver.len();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    if !(gamma > 0.0) {
        return Err(invalid(format!("gamma must be positive, got {gamma}")));
    }
    let mut b = vec![0.0; n + 1];
    b[0] = -gamma;
    // left end and fit of the last segment of the best partition of [0, r]
    let mut last: Vec<(usize, f64, Option<S::Fit>)> = Vec::with_capacity(n);
    let mut evaluations = 0;
    let stop_early = prune && solver.monotone_errors();
    for r in 0..n {
        let mut best = f64::INFINITY;
        let mut best_l = r;
        let mut best_err = 0.0;
        let mut best_fit: Option<S::Fit> = None;
        let mut warm: Option<S::Fit> = None;
        for l in (0..=r).rev() {
            // b[l] is B for the prefix [0, l-1]
            if prune && prune_bound(b[l], gamma, best) {
                // `warm` keeps the nearest evaluated fit
                continue;
            }
            let (err, fit) = solver.fit(l, r, warm.as_ref())?;
            evaluations += 1;
            let cand = b[l] + gamma + err;
            if cand < best {
                best = cand;
                best_l = l;
                best_err = err;
                best_fit = Some(fit.clone());
            }
            warm = Some(fit);
            if stop_early && err >= best {
                break;
            }
        }
        b[r + 1] = best;
        last.push((best_l, best_err, best_fit));
    }
    let mut segments = Vec::new();
    let mut fits = Vec::new();
    let mut r = n;
    while r > 0 {
        let (l, err, fit) = last[r - 1].clone();
        segments.push(Segment {
            start: l,
            end: r - 1,
            error: err,
        });
        fits.push(fit.expect("every prefix has an evaluated best candidate"));
        r = l;
    }
    segments.reverse();
    fits.reverse();
    Ok(DpOutcome {
        partition: Partition { segments },
        fits,
        energy: b[n],
        evaluations,
    })
}

/// Per-interval Potts errors from Fréchet points.
pub struct PottsIntervals<'a, M: Manifold> {
    m: &'a M,
    data: &'a [M::Point],
    p: Exponent,
    anchor: Option<Anchor<'a, M::Point>>,
    cfg: MeanConfig,
    pub not_converged: usize,
    pub may_be_non_unique: bool,
}

impl<'a, M: Manifold> PottsIntervals<'a, M> {
    pub fn new(
        m: &'a M,
        data: &'a [M::Point],
        p: Exponent,
        anchor: Option<Anchor<'a, M::Point>>,
        cfg: MeanConfig,
    ) -> Self {
        Self {
            m,
            data,
            p,
            anchor,
            cfg,
            not_converged: 0,
            may_be_non_unique: false,
        }
    }
}

impl<M: Manifold> IntervalSolver for PottsIntervals<'_, M> {
    type Fit = M::Point;

    fn len(&self) -> usize {
        self.data.len()
    }

    fn fit(&mut self, l: usize, r: usize, warm: Option<&M::Point>) -> Result<(f64, M::Point)> {
        let out = interval_error_potts(
            self.m,
            self.data,
            l,
            r,
            self.p.value(),
            self.anchor,
            warm,
            &self.cfg,
        )?;
        if !out.converged {
            self.not_converged += 1;
        }
        self.may_be_non_unique |= out.may_be_non_unique;
        Ok((out.cost, out.point))
    }

    fn monotone_errors(&self) -> bool {
        true
    }
}

/// Per-interval Mumford-Shah errors from `L^p-V^q` minimizers.
pub struct MsIntervals<'a, M: Manifold> {
    m: &'a M,
    data: &'a [M::Point],
    p: Exponent,
    q: Exponent,
    alpha: f64,
    anchor: Option<Anchor<'a, M::Point>>,
    cfg: CppaConfig,
    pub not_converged: usize,
}

impl<'a, M: Manifold> MsIntervals<'a, M> {
    pub fn new(
        m: &'a M,
        data: &'a [M::Point],
        p: Exponent,
        q: Exponent,
        alpha: f64,
        anchor: Option<Anchor<'a, M::Point>>,
        cfg: CppaConfig,
    ) -> Self {
        Self {
            m,
            data,
            p,
            q,
            alpha,
            anchor,
            cfg,
            not_converged: 0,
        }
    }
}

impl<M: Manifold> IntervalSolver for MsIntervals<'_, M> {
    type Fit = Vec<M::Point>;

    fn len(&self) -> usize {
        self.data.len()
    }

    fn fit(&mut self, l: usize, r: usize, warm: Option<&Vec<M::Point>>) -> Result<(f64, Vec<M::Point>)> {
        if l > r || r >= self.data.len() {
            return Err(invalid(format!("interval [{l}, {r}] outside signal")));
        }
        let data = &self.data[l..=r];
        let anchor = self.anchor.filter(|a| a.weight > 0.0).map(|a| a.slice(l, r));
        if l == r && anchor.is_none() {
            return Ok((0.0, vec![data[0].clone()]));
        }
        let init: Option<Vec<M::Point>> = warm.filter(|w| w.len() == r - l).map(|w| {
            let mut v = Vec::with_capacity(r - l + 1);
            v.push(data[0].clone());
            v.extend(w.iter().cloned());
            v
        });
        let mut prob = VqProblem::new(data, self.p, self.q, self.alpha);
        if let Some(a) = anchor {
            prob = prob.with_anchor(a);
        }
        let out = cppa_solve(self.m, &prob, init.as_deref(), &self.cfg)?;
        if !out.converged {
            self.not_converged += 1;
        }
        Ok((out.energy, out.signal))
    }
}

/// Diagnostics of a 1D solve.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveFlags {
    /// Interval solves that hit their iteration cap.
    pub inner_not_converged: usize,
    /// Some interval minimizer may not be unique (positively curved
    /// manifolds only).
    pub may_be_non_unique: bool,
    pub evaluations: usize,
}

#[derive(Debug, Clone)]
pub struct Solution1d<P> {
    pub x: Vec<P>,
    pub partition: Partition,
    /// The functional evaluated at `x`.
    pub energy: f64,
    /// Optimal value reported by the dynamic program (jump form).
    pub dp_energy: f64,
    pub flags: SolveFlags,
}

/// Minimizes the Potts or Mumford-Shah functional of `f` exactly (up to the
/// accuracy of the interval solvers).
pub fn solve_1d<M: Manifold>(
    m: &M,
    f: &[M::Point],
    params: &MsParams,
    cfg: &SolverConfig,
) -> Result<Solution1d<M::Point>> {
    solve_1d_anchored(m, f, params, None, cfg)
}

/// As [`solve_1d`], with the extra data term `μ (1/p) Σ d^p(x_i, a_i)`.
pub fn solve_1d_anchored<M: Manifold>(
    m: &M,
    f: &[M::Point],
    params: &MsParams,
    anchor: Option<Anchor<'_, M::Point>>,
    cfg: &SolverConfig,
) -> Result<Solution1d<M::Point>> {
    params.validate()?;
    if f.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(a) = anchor {
        if a.points.len() != f.len() {
            return Err(invalid("anchor length differs from data length"));
        }
        if !(a.weight >= 0.0) || !a.weight.is_finite() {
            return Err(invalid("anchor weight must be finite and nonnegative"));
        }
    }
    let (x, partition, dp_energy, flags) = match params.model {
        Model::Potts => {
            let mut solver = PottsIntervals::new(m, f, params.p, anchor, cfg.mean);
            let out = dp_solve(&mut solver, params.gamma, cfg.prune)?;
            let mut x = Vec::with_capacity(f.len());
            for (seg, point) in out.partition.segments.iter().zip(&out.fits) {
                x.extend(std::iter::repeat(point.clone()).take(seg.len()));
            }
            let flags = SolveFlags {
                inner_not_converged: solver.not_converged,
                may_be_non_unique: solver.may_be_non_unique,
                evaluations: out.evaluations,
            };
            (x, out.partition, out.energy, flags)
        }
        Model::MumfordShah { q, alpha } => {
            let mut solver = MsIntervals::new(m, f, params.p, q, alpha, anchor, cfg.cppa);
            let out = dp_solve(&mut solver, params.gamma, cfg.prune)?;
            let x: Vec<M::Point> = out.fits.iter().flatten().cloned().collect();
            let flags = SolveFlags {
                inner_not_converged: solver.not_converged,
                may_be_non_unique: false,
                evaluations: out.evaluations,
            };
            (x, out.partition, out.energy, flags)
        }
    };
    let energy = energy_1d(m, f, &x, params, anchor)?;
    Ok(Solution1d {
        x,
        partition,
        energy,
        dp_energy,
        flags,
    })
}

/// Evaluates the Potts functional (jumps where consecutive samples differ) or
/// the truncated Mumford-Shah functional at `x`, including the anchor term.
pub fn energy_1d<M: Manifold>(
    m: &M,
    f: &[M::Point],
    x: &[M::Point],
    params: &MsParams,
    anchor: Option<Anchor<'_, M::Point>>,
) -> Result<f64> {
    if f.len() != x.len() {
        return Err(invalid("signal length differs from data length"));
    }
    let p = params.p;
    let mut data = 0.0;
    for (xi, fi) in x.iter().zip(f) {
        data += p.pow(m.dist(xi, fi)?);
    }
    if let Some(a) = anchor.filter(|a| a.weight > 0.0) {
        let mut extra = 0.0;
        for (xi, ai) in x.iter().zip(a.points) {
            extra += p.pow(m.dist(xi, ai)?);
        }
        data += a.weight * extra;
    }
    let mut e = data / p.value();
    for w in x.windows(2) {
        let d = m.dist(&w[0], &w[1])?;
        e += match params.model {
            Model::Potts => {
                if d > 0.0 {
                    params.gamma
                } else {
                    0.0
                }
            }
            Model::MumfordShah { q, alpha } => (alpha * q.pow(d) / q.value()).min(params.gamma),
        };
    }
    Ok(e)
}
