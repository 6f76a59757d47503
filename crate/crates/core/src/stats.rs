//! Intrinsic means, medians and general `p`-Fréchet points.
//!
//! These solve the per-interval problems of the Potts dynamic program:
//! `ε_{l,r} = min_h (1/p) Σ_{i=l}^{r} d^p(h, f_i)`, optionally augmented with a
//! weighted anchor term used by the image solver.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::manifold::Manifold;
use crate::Anchor;

/// Step rule for `p = 1` (intrinsic median).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MedianStep {
    /// Subgradient descent along the unit-length subgradient with step sizes
    /// `a / k` (square summable, not summable). `scale` is `a`; when absent the
    /// weighted mean distance from the initial iterate to the data is used.
    Diminishing { scale: Option<f64> },
    /// Weiszfeld iteration: the same descent direction with the adaptive step
    /// `1 / Σ_i (w_i / d_i)`.
    Weiszfeld,
    /// Newton steps on the flat model `Σ_i w_i ‖v − log_z(z_i)‖` of the cost
    /// at the iterate, falling back to the Weiszfeld step whenever they fail
    /// to decrease the cost.
    Newton,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanConfig {
    pub max_iters: usize,
    /// Stop once the tangent update is shorter than this.
    pub tol: f64,
    pub median: MedianStep,
}

impl Default for MeanConfig {
    fn default() -> Self {
        Self {
            max_iters: 100,
            tol: 1e-9,
            median: MedianStep::Diminishing { scale: None },
        }
    }
}

impl MeanConfig {
    fn validate(&self) -> Result<()> {
        if self.max_iters == 0 || !(self.tol > 0.0) {
            return Err(invalid("mean config needs max_iters >= 1 and tol > 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct FrechetPoint<P> {
    pub point: P,
    /// `Σ_i w_i d(point, z_i)^p / p`
    pub cost: f64,
    pub iters: usize,
    /// False when `max_iters` was exhausted; `point` is then the best iterate.
    pub converged: bool,
    /// Set on manifolds with positive curvature when the data are not contained
    /// in a ball of the uniqueness radius around the result.
    pub may_be_non_unique: bool,
}

/// Weighted Fréchet point `argmin_z Σ_i w_i d(z, z_i)^p / p`.
pub fn frechet_point<M: Manifold>(
    m: &M,
    points: &[M::Point],
    weights: &[f64],
    p: f64,
    cfg: &MeanConfig,
    init: Option<&M::Point>,
) -> Result<FrechetPoint<M::Point>> {
    if points.len() != weights.len() {
        return Err(invalid(format!(
            "{} points but {} weights",
            points.len(),
            weights.len()
        )));
    }
    let pts: Vec<(&M::Point, f64)> = points.iter().zip(weights.iter().copied()).collect();
    weighted_frechet(m, &pts, p, cfg, init)
}

/// Per-interval Potts error over `data[l..=r]` (inclusive, zero-based), plus
/// `anchor.weight · (1/p) Σ d^p(h, anchor_i)` over the same indices.
pub fn interval_error_potts<M: Manifold>(
    m: &M,
    data: &[M::Point],
    l: usize,
    r: usize,
    p: f64,
    extra: Option<Anchor<'_, M::Point>>,
    warm: Option<&M::Point>,
    cfg: &MeanConfig,
) -> Result<FrechetPoint<M::Point>> {
    if l > r || r >= data.len() {
        return Err(invalid(format!(
            "interval [{l}, {r}] outside signal of length {}",
            data.len()
        )));
    }
    let extra = extra.filter(|a| a.weight > 0.0);
    if let Some(a) = extra {
        if a.points.len() != data.len() {
            return Err(invalid("anchor length differs from data length"));
        }
    }
    if l == r && extra.is_none() {
        return Ok(FrechetPoint {
            point: data[l].clone(),
            cost: 0.0,
            iters: 0,
            converged: true,
            may_be_non_unique: false,
        });
    }
    let mut pts: Vec<(&M::Point, f64)> = Vec::with_capacity(2 * (r - l + 1));
    pts.extend(data[l..=r].iter().map(|x| (x, 1.0)));
    if let Some(a) = extra {
        pts.extend(a.points[l..=r].iter().map(|x| (x, a.weight)));
    }
    weighted_frechet(m, &pts, p, cfg, warm)
}

struct Probe<T> {
    cost: f64,
    /// Σ c_i log_z(z_i) with the direction weights of the active rule
    direction: T,
    /// normalizer for the direction (Σ c_i)
    mass: f64,
    /// total weight of data points coinciding with z
    coincident: f64,
    max_dist: f64,
    /// index and distance of the closest point not coinciding with z
    nearest: Option<(usize, f64)>,
}

#[derive(Clone, Copy)]
enum Rule {
    /// c_i = w_i d_i^{p-2}
    Gradient,
    /// c_i = w_i / d_i (unit subgradient directions), skipping coinciding points
    Median,
}

fn probe<M: Manifold>(
    m: &M,
    chart: &M::Chart,
    z: &M::Point,
    pts: &[(&M::Point, f64)],
    p: f64,
    rule: Rule,
) -> Result<Probe<M::Tangent>> {
    let mut direction = m.zero_tangent(z);
    let (mut cost, mut mass, mut coincident, mut max_dist) = (0.0, 0.0, 0.0, 0.0f64);
    let mut nearest: Option<(usize, f64)> = None;
    for (i, &(x, w)) in pts.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let (v, d) = m.chart_log(chart, x)?;
        max_dist = max_dist.max(d);
        if d > COINCIDENT && nearest.map_or(true, |(_, e)| d < e) {
            nearest = Some((i, d));
        }
        cost += w * powp(d, p);
        if d <= COINCIDENT {
            coincident += w;
            if matches!(rule, Rule::Gradient) && p == 2.0 {
                mass += w;
            }
            continue;
        }
        let c = match rule {
            Rule::Gradient if p == 2.0 => w,
            Rule::Gradient => w * d.powf(p - 2.0),
            Rule::Median => w / d,
        };
        m.add_scaled(&mut direction, c, &v);
        mass += c;
    }
    Ok(Probe {
        cost: cost / p,
        direction,
        mass,
        coincident,
        max_dist,
        nearest,
    })
}

/// Points closer than this to the iterate count as coinciding with it, so that
/// logarithm roundoff does not produce huge median weights.
const COINCIDENT: f64 = 1e-12;

fn powp(d: f64, p: f64) -> f64 {
    if p == 1.0 {
        d
    } else if p == 2.0 {
        d * d
    } else {
        d.powf(p)
    }
}

fn weighted_frechet<M: Manifold>(
    m: &M,
    pts: &[(&M::Point, f64)],
    p: f64,
    cfg: &MeanConfig,
    init: Option<&M::Point>,
) -> Result<FrechetPoint<M::Point>> {
    cfg.validate()?;
    if !(p >= 1.0) || !p.is_finite() {
        return Err(invalid(format!("exponent p must be >= 1, got {p}")));
    }
    if pts.is_empty() {
        return Err(Error::EmptyInput);
    }
    if pts.iter().any(|&(_, w)| !(w >= 0.0) || !w.is_finite()) {
        return Err(invalid("weights must be finite and nonnegative"));
    }
    let total: f64 = pts.iter().map(|&(_, w)| w).sum();
    if !(total > 0.0) {
        return Err(invalid("weights are all zero"));
    }

    let active: Vec<(&M::Point, f64)> = pts.iter().copied().filter(|&(_, w)| w > 0.0).collect();
    let mut out = if active.len() == 1 {
        FrechetPoint {
            point: active[0].0.clone(),
            cost: 0.0,
            iters: 0,
            converged: true,
            may_be_non_unique: false,
        }
    } else if active.len() == 2 && (p == 1.0 || p == 2.0) {
        two_point(m, &active, p)?
    } else if p == 1.0 && cfg.median == MedianStep::Newton {
        newton_median(m, &active, cfg, init)?
    } else if p == 1.0 {
        median(m, &active, cfg, init)?
    } else {
        gradient_descent(m, &active, p, cfg, init)?
    };
    if let Some(radius) = m.uniqueness_radius() {
        let chart = m.chart(&out.point)?;
        let pr = probe(m, &chart, &out.point, &active, p, Rule::Gradient)?;
        out.may_be_non_unique = pr.max_dist >= radius;
    }
    Ok(out)
}

/// Closed forms for two weighted points: the geodesic point at fraction
/// `w2/(w1+w2)` for `p = 2`, the heavier point for `p = 1`.
fn two_point<M: Manifold>(
    m: &M,
    pts: &[(&M::Point, f64)],
    p: f64,
) -> Result<FrechetPoint<M::Point>> {
    let ((x, wx), (y, wy)) = (pts[0], pts[1]);
    let d = m.dist(x, y)?;
    let (point, cost) = if p == 2.0 {
        let tau = wy / (wx + wy);
        let pt = m.geodesic_fraction(x, y, tau)?;
        (pt, 0.5 * wx * wy / (wx + wy) * d * d)
    } else if wx >= wy {
        (x.clone(), wy * d)
    } else {
        (y.clone(), wx * d)
    };
    Ok(FrechetPoint {
        point,
        cost,
        iters: 0,
        converged: true,
        may_be_non_unique: false,
    })
}

fn start_point<P: Clone>(pts: &[(&P, f64)], init: Option<&P>) -> P {
    init.cloned().unwrap_or_else(|| pts[0].0.clone())
}

/// Gradient descent `z ← exp_z(Σ c_i log_z z_i / Σ c_i)`; for `p = 2` this is
/// the classical Karcher iteration with unit step. A halving backtrack keeps
/// the cost monotone.
fn gradient_descent<M: Manifold>(
    m: &M,
    pts: &[(&M::Point, f64)],
    p: f64,
    cfg: &MeanConfig,
    init: Option<&M::Point>,
) -> Result<FrechetPoint<M::Point>> {
    let mut z = start_point(pts, init);
    let mut chart = m.chart(&z)?;
    let mut pr = probe(m, &chart, &z, pts, p, Rule::Gradient)?;
    let mut step = 1.0;
    let mut iters = 0;
    let mut converged = false;
    while iters < cfg.max_iters {
        iters += 1;
        if pr.mass == 0.0 {
            converged = true;
            break;
        }
        let mut v = pr.direction.clone();
        m.scale_tangent(&mut v, step / pr.mass);
        if m.chart_norm(&chart, &v) < cfg.tol {
            converged = true;
            break;
        }
        let cand = m.chart_exp(&chart, &v)?;
        let cand_chart = m.chart(&cand)?;
        let cand_pr = probe(m, &cand_chart, &cand, pts, p, Rule::Gradient)?;
        if cand_pr.cost > pr.cost * (1.0 + 1e-12) {
            step *= 0.5;
            continue;
        }
        debug_assert!(cand_pr.cost <= pr.cost * (1.0 + 1e-12));
        z = cand;
        chart = cand_chart;
        pr = cand_pr;
    }
    Ok(FrechetPoint {
        point: z,
        cost: pr.cost,
        iters,
        converged,
        may_be_non_unique: false,
    })
}

fn median<M: Manifold>(
    m: &M,
    pts: &[(&M::Point, f64)],
    cfg: &MeanConfig,
    init: Option<&M::Point>,
) -> Result<FrechetPoint<M::Point>> {
    let mut z = start_point(pts, init);
    let mut chart = m.chart(&z)?;
    let mut pr = probe(m, &chart, &z, pts, 1.0, Rule::Median)?;
    let mut best = (z.clone(), pr.cost);
    let weight_sum: f64 = pts.iter().map(|&(_, w)| w).sum();
    let scale = match cfg.median {
        MedianStep::Diminishing { scale: Some(a) } => a,
        // the cost at z is Σ w_i d_i, so this is the weighted mean distance
        _ => pr.cost / weight_sum,
    };
    let mut tested = vec![false; pts.len()];
    let mut iters = 0;
    let mut converged = false;
    while iters < cfg.max_iters {
        iters += 1;
        let g_norm = m.chart_norm(&chart, &pr.direction);
        // 0 lies in the subdifferential: Σ_{d_i>0} w_i u_i is dominated by the
        // weight sitting exactly at z
        if g_norm <= pr.coincident * (1.0 + 1e-12) || pr.mass == 0.0 {
            converged = true;
            break;
        }
        let mut v = pr.direction.clone();
        let step = match cfg.median {
            MedianStep::Diminishing { .. } => scale / iters as f64 / g_norm,
            MedianStep::Weiszfeld | MedianStep::Newton => 1.0 / pr.mass,
        };
        m.scale_tangent(&mut v, step);
        if m.chart_norm(&chart, &v) < cfg.tol {
            converged = true;
            break;
        }
        z = m.chart_exp(&chart, &v)?;
        chart = m.chart(&z)?;
        pr = probe(m, &chart, &z, pts, 1.0, Rule::Median)?;
        if pr.cost < best.1 {
            best = (z.clone(), pr.cost);
        }
        // Weiszfeld creeps towards a minimizer sitting on a data point, so
        // test each point once for optimality when the iterate closes in
        if let Some((j, d)) = pr.nearest {
            if d < 0.1 * scale && !tested[j] {
                tested[j] = true;
                let vertex = pts[j].0;
                let vertex_chart = m.chart(vertex)?;
                let at = probe(m, &vertex_chart, vertex, pts, 1.0, Rule::Median)?;
                if m.chart_norm(&vertex_chart, &at.direction) <= at.coincident * (1.0 + 1e-12) {
                    if at.cost <= best.1 {
                        best = (vertex.clone(), at.cost);
                    }
                    converged = true;
                    break;
                }
            }
        }
    }
    Ok(FrechetPoint {
        point: best.0,
        cost: best.1,
        iters,
        converged,
        may_be_non_unique: false,
    })
}

/// Unit directions (in orthonormal tangent coordinates), distances, weights
/// and indices of the points seen from a base point, excluding those that
/// coincide with it.
struct Star {
    rays: Vec<(Vec<f64>, f64, f64, usize)>,
    coincident: f64,
    cost: f64,
}

fn star<M: Manifold>(m: &M, chart: &M::Chart, pts: &[(&M::Point, f64)]) -> Result<Star> {
    let mut out = Star {
        rays: Vec::with_capacity(pts.len()),
        coincident: 0.0,
        cost: 0.0,
    };
    for (i, &(x, w)) in pts.iter().enumerate() {
        let (v, d) = m.chart_log(chart, x)?;
        out.cost += w * d;
        if d <= COINCIDENT {
            out.coincident += w;
        } else {
            let u = m.tangent_coords(chart, &v).into_iter().map(|c| c / d).collect();
            out.rays.push((u, d, w, i));
        }
    }
    Ok(out)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(acc: &mut [f64], a: f64, x: &[f64]) {
    for (s, v) in acc.iter_mut().zip(x) {
        *s += a * v;
    }
}

/// Solves `H s = g` for the Hessian `H = Σ_i (w_i / d_i)(I − u_i u_iᵀ)` of the
/// flat model by conjugate gradients. `None` when `H` is singular along the
/// Krylov space, e.g. for collinear data.
fn model_newton_step(st: &Star, g: &[f64], mass: f64) -> Option<Vec<f64>> {
    let apply = |x: &[f64]| {
        let mut out: Vec<f64> = x.iter().map(|v| mass * v).collect();
        for (u, d, w, _) in &st.rays {
            axpy(&mut out, -w / d * dot(u, x), u);
        }
        out
    };
    let g_sq = dot(g, g);
    let mut s = vec![0.0; g.len()];
    let mut r = g.to_vec();
    let mut dir = g.to_vec();
    let mut r_sq = g_sq;
    for _ in 0..=st.rays.len().min(g.len()) {
        let hd = apply(&dir);
        let curv = dot(&dir, &hd);
        if !(curv > 1e-12 * mass * dot(&dir, &dir)) {
            return None;
        }
        let a = r_sq / curv;
        axpy(&mut s, a, &dir);
        axpy(&mut r, -a, &hd);
        let next = dot(&r, &r);
        if next <= 1e-28 * g_sq {
            break;
        }
        for (d, v) in dir.iter_mut().zip(&r) {
            *d = v + next / r_sq * *d;
        }
        r_sq = next;
    }
    Some(s)
}

fn newton_median<M: Manifold>(
    m: &M,
    pts: &[(&M::Point, f64)],
    cfg: &MeanConfig,
    init: Option<&M::Point>,
) -> Result<FrechetPoint<M::Point>> {
    let mut z = start_point(pts, init);
    let mut chart = m.chart(&z)?;
    let mut st = star(m, &chart, pts)?;
    let mut best = (z.clone(), st.cost);
    let mut tested = vec![false; pts.len()];
    let mut iters = 0;
    let mut converged = false;
    while iters < cfg.max_iters {
        iters += 1;
        let Some(dim) = st.rays.first().map(|r| r.0.len()) else {
            converged = true;
            break;
        };
        let mut g = vec![0.0; dim];
        let mut mass = 0.0;
        let mut reach = 0.0f64;
        for (u, d, w, _) in &st.rays {
            axpy(&mut g, *w, u);
            mass += w / d;
            reach = reach.max(*d);
        }
        if dot(&g, &g).sqrt() <= st.coincident * (1.0 + 1e-12) {
            converged = true;
            break;
        }
        let mut next = None;
        if let Some(s) = model_newton_step(&st, &g, mass) {
            let len = dot(&s, &s).sqrt();
            if len < cfg.tol {
                converged = true;
                break;
            }
            if len <= reach {
                let cand = m.chart_exp(&chart, &m.tangent_from_coords(&chart, &s))?;
                let cand_chart = m.chart(&cand)?;
                let cand_st = star(m, &cand_chart, pts)?;
                // ties up to roundoff count, as steps near the minimizer
                // change the cost below working precision
                if cand_st.cost <= st.cost * (1.0 + 4.0 * f64::EPSILON) {
                    next = Some((cand, cand_chart, cand_st));
                }
            }
        }
        let (cand, cand_chart, cand_st) = match next {
            Some(n) => n,
            None => {
                let s: Vec<f64> = g.iter().map(|v| v / mass).collect();
                if dot(&s, &s).sqrt() < cfg.tol {
                    converged = true;
                    break;
                }
                let cand = m.chart_exp(&chart, &m.tangent_from_coords(&chart, &s))?;
                let cand_chart = m.chart(&cand)?;
                let cand_st = star(m, &cand_chart, pts)?;
                (cand, cand_chart, cand_st)
            }
        };
        z = cand;
        chart = cand_chart;
        st = cand_st;
        if st.cost < best.1 {
            best = (z.clone(), st.cost);
        }
        // a minimizer on a data point is only approached, never reached, so
        // test the closest point once when the iterate gets near it
        let closest = st.rays.iter().min_by(|a, b| a.1.total_cmp(&b.1));
        if let Some(&(_, d, _, j)) = closest {
            if d < 0.1 * reach && !tested[j] {
                tested[j] = true;
                let vertex = pts[j].0;
                let at = star(m, &m.chart(vertex)?, pts)?;
                let mut pull = vec![0.0; dim];
                for (u, _, w, _) in &at.rays {
                    axpy(&mut pull, *w, u);
                }
                if dot(&pull, &pull).sqrt() <= at.coincident * (1.0 + 1e-12) {
                    if at.cost <= best.1 {
                        best = (vertex.clone(), at.cost);
                    }
                    converged = true;
                    break;
                }
            }
        }
    }
    Ok(FrechetPoint {
        point: best.0,
        cost: best.1,
        iters,
        converged,
        may_be_non_unique: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::{Euclidean, Spd3, Sphere};
    use nalgebra::{Matrix3, Vector3};

    fn s(v: f64) -> Vec<f64> {
        vec![v]
    }

    #[test]
    fn single_point_is_its_own_mean() {
        let m = Euclidean::scalar();
        let out = frechet_point(&m, &[s(3.5)], &[1.0], 2.0, &MeanConfig::default(), None).unwrap();
        assert_eq!(out.point, s(3.5));
        assert_eq!(out.cost, 0.0);
    }

    #[test]
    fn arithmetic_mean_and_median() {
        let m = Euclidean::scalar();
        let cfg = MeanConfig::default();
        let pts = [s(0.0), s(2.0), s(4.0)];
        let mean = frechet_point(&m, &pts, &[1.0; 3], 2.0, &cfg, None).unwrap();
        assert!((mean.point[0] - 2.0).abs() < 1e-12);
        assert!(mean.converged);

        let pts = [s(0.0), s(1.0), s(10.0)];
        for median_step in [MedianStep::Weiszfeld, MedianStep::Diminishing { scale: None }] {
            let cfg = MeanConfig { median: median_step, max_iters: 2000, ..cfg };
            let med = frechet_point(&m, &pts, &[1.0; 3], 1.0, &cfg, None).unwrap();
            assert!((med.point[0] - 1.0).abs() < 1e-3, "{median_step:?}: {:?}", med.point);
            assert!((med.cost - 10.0).abs() < 1e-3);
        }
    }

    #[test]
    fn spd_two_point_mean_is_geodesic_midpoint() {
        let m = Spd3;
        let d = Matrix3::from_diagonal(&Vector3::new(1.0, 2.0, 3.0));
        let e = Matrix3::new(2.0, 0.3, 0.1, 0.3, 1.0, 0.2, 0.1, 0.2, 0.5);
        let dist = m.dist(&d, &e).unwrap();
        let mid = m.geopoint(&d, &e, dist / 2.0).unwrap();
        // start away from the closed form path by adding a third zero-weight point
        let out = frechet_point(&m, &[d, e, d], &[1.0, 1.0, 0.0], 2.0, &MeanConfig::default(), None)
            .unwrap();
        assert!(m.dist(&out.point, &mid).unwrap() < 1e-9);
    }

    #[test]
    fn interval_error_examples() {
        let m = Euclidean::scalar();
        let data = [s(1.0), s(3.0), s(7.0)];
        let cfg = MeanConfig::default();
        let single = interval_error_potts(&m, &data, 2, 2, 2.0, None, None, &cfg).unwrap();
        assert_eq!(single.cost, 0.0);
        assert_eq!(single.point, s(7.0));
        let pair = interval_error_potts(&m, &data, 0, 1, 2.0, None, None, &cfg).unwrap();
        assert!((pair.cost - 1.0).abs() < 1e-12);
        assert!((pair.point[0] - 2.0).abs() < 1e-12);
        assert!(interval_error_potts(&m, &data, 2, 3, 2.0, None, None, &cfg).is_err());
    }

    #[test]
    fn anchor_pulls_the_mean() {
        let m = Euclidean::scalar();
        let data = [s(0.0), s(0.0)];
        let anchor = [s(3.0), s(3.0)];
        let out = interval_error_potts(
            &m,
            &data,
            0,
            1,
            2.0,
            Some(Anchor::new(&anchor, 2.0)),
            None,
            &MeanConfig::default(),
        )
        .unwrap();
        assert!((out.point[0] - 2.0).abs() < 1e-12);
        // (1/2)(2·4 + 2·2·1) = 6
        assert!((out.cost - 6.0).abs() < 1e-12);
    }

    #[test]
    fn sphere_spread_is_flagged() {
        let m = Sphere::new(3).unwrap();
        let pts = [
            vec![1.0, 0.0, 0.0],
            vec![-1.0 / 2f64.sqrt(), 1.0 / 2f64.sqrt(), 0.0],
            vec![-1.0 / 2f64.sqrt(), -1.0 / 2f64.sqrt(), 0.0],
        ];
        let out = frechet_point(&m, &pts, &[1.0; 3], 2.0, &MeanConfig::default(), None).unwrap();
        assert!(out.may_be_non_unique);
        let close = [vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]];
        let close = [m.project(&close[0]).unwrap(), m.project(&[1.0, 0.1, 0.0]).unwrap(), close[0].clone()];
        let out = frechet_point(&m, &close, &[1.0; 3], 2.0, &MeanConfig::default(), None).unwrap();
        assert!(!out.may_be_non_unique);
    }

    #[test]
    fn rejects_bad_input() {
        let m = Euclidean::scalar();
        let cfg = MeanConfig::default();
        assert!(matches!(
            frechet_point(&m, &[], &[], 2.0, &cfg, None),
            Err(Error::EmptyInput)
        ));
        assert!(frechet_point(&m, &[s(1.0)], &[0.0], 2.0, &cfg, None).is_err());
        assert!(frechet_point(&m, &[s(1.0)], &[1.0, 2.0], 2.0, &cfg, None).is_err());
        assert!(frechet_point(&m, &[s(1.0)], &[1.0], 0.5, &cfg, None).is_err());
    }
}
