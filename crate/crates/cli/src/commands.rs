use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::anyhow;
use log::{info, warn};
use manireg::dp1d::{solve_1d, MsParams, SolverConfig};
use manireg::dti::{self, DwiStack};
use manireg::io::{self, Dataset};
use manireg::prox::{cppa_solve, cppa_solve_image, CppaConfig, VqProblem};
use manireg::qball::{self, OdfGrid};
use manireg::solver2d::{iterate_decay_check, solve_2d, Neighborhood, SplitConfig};
use manireg::{Error, Euclidean, Exponent, Image, Manifold, ManifoldKind, Spd3, Sphere};
use serde_json::{json, Value};

use crate::{ExportArgs, FitArgs, GlyphKind, ModelKind, NoiseArgs, RegularizeArgs, SimKind, SimulateArgs};

/// Exit status 1 for bad input, 2 for failures inside a computation.
#[derive(Debug)]
pub enum Failure {
    User(anyhow::Error),
    Internal(anyhow::Error),
}

fn user(msg: impl std::fmt::Display) -> Failure {
    Failure::User(anyhow!("{msg}"))
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NotSymmetric(_)
            | Error::NotPositiveDefinite
            | Error::AntipodalPoints
            | Error::GeodesicParameterOutOfRange { .. } => Failure::Internal(e.into()),
            _ => Failure::User(e.into()),
        }
    }
}

/// Wraps a library error with the path it concerns.
fn at(path: &Path) -> impl FnOnce(Error) -> Failure + '_ {
    move |e| match Failure::from(e) {
        Failure::User(e) => Failure::User(e.context(path.display().to_string())),
        Failure::Internal(e) => Failure::Internal(e.context(path.display().to_string())),
    }
}

fn sidecar(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn write_json(path: &Path, value: &Value) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::Internal(e.into()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Failure::User(anyhow!("{}: {e}", path.display())))
}

fn labels_json(labels: &Image<usize>) -> Value {
    json!(labels.as_slice())
}

pub fn simulate(a: &SimulateArgs) -> Result<(), Failure> {
    let shape = json!({ "rows": a.rows, "cols": a.cols });
    let manifest = match a.kind {
        SimKind::DtiPwconst | SimKind::DtiSmooth => {
            let ph = if a.kind == SimKind::DtiPwconst {
                dti::pwconst_phantom(a.rows, a.cols, a.seed)?
            } else {
                dti::smooth_phantom(a.rows, a.cols, a.seed)?
            };
            io::save_image(&Spd3, &ph.tensors, &a.out).map_err(at(&a.out))?;
            let mut m = json!({
                "kind": if a.kind == SimKind::DtiPwconst { "dti-pwconst" } else { "dti-smooth" },
                "manifold": "spd3 3",
                "shape": shape,
                "seed": a.seed,
                "b": dti::DEFAULT_B,
                "a0": dti::DEFAULT_A0,
                "jumps": ph.jumps,
                "labels": labels_json(&ph.labels),
            });
            if a.kind == SimKind::DtiPwconst {
                m["segment_eigenvalues"] = if a.rows == 1 {
                    json!(dti::PWCONST_SEGMENTS)
                } else {
                    json!(dti::TWO_REGION)
                };
            }
            m
        }
        SimKind::QballCrossing => {
            let grid = OdfGrid::default_181();
            let ph = qball::crossing_phantom(a.rows, a.cols, &grid, a.sharpness, a.seed)?;
            let m = Sphere::new(grid.len())?;
            io::save_image(&m, &ph.odfs, &a.out).map_err(at(&a.out))?;
            json!({
                "kind": "qball-crossing",
                "manifold": format!("sphere {}", grid.len()),
                "shape": shape,
                "seed": a.seed,
                "sharpness": a.sharpness,
                "angle": ph.angle,
                "labels": labels_json(&ph.labels),
            })
        }
    };
    write_json(&sidecar(&a.out), &manifest)?;
    info!("wrote {}", a.out.display());
    Ok(())
}

fn noise_level(a: &NoiseArgs, a0: f64) -> Result<f64, Failure> {
    let sigma = match (a.sigma, a.kappa) {
        (Some(s), None) => s,
        (None, Some(k)) if k > 0.0 && k.is_finite() => a0 / k,
        (None, Some(k)) => return Err(user(format!("--kappa must be positive, got {k}"))),
        _ => return Err(user("give exactly one of --sigma and --kappa")),
    };
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(user(format!("noise level must be positive, got {sigma}")));
    }
    Ok(sigma)
}

pub fn noise(a: &NoiseArgs) -> Result<(), Failure> {
    let mut manifest = json!({ "input": a.input.display().to_string(), "seed": a.seed });
    if a.input.is_dir() {
        let stack = io::load_dwi(&a.input).map_err(at(&a.input))?;
        let sigma = noise_level(a, stack.a0)?;
        let noisy = dti::add_rician(&stack, sigma, a.seed)?;
        io::save_dwi(&noisy, &a.out).map_err(at(&a.out))?;
        manifest["noise"] = json!("rician");
        manifest["sigma"] = json!(sigma);
    } else {
        let d = io::load(&a.input).map_err(at(&a.input))?;
        match d.kind {
            ManifoldKind::Spd3 => {
                let tensors = d.to_image(&Spd3)?;
                let stack: DwiStack =
                    dti::simulate_dwi(&tensors, &dti::default_directions(), dti::DEFAULT_B, dti::DEFAULT_A0)?;
                let sigma = noise_level(a, stack.a0)?;
                let noisy = dti::add_rician(&stack, sigma, a.seed)?;
                io::save_dwi(&noisy, &a.out).map_err(at(&a.out))?;
                manifest["noise"] = json!("rician");
                manifest["sigma"] = json!(sigma);
                manifest["b"] = json!(stack.b);
                manifest["a0"] = json!(stack.a0);
                manifest["directions"] = json!(stack.directions.len());
            }
            ManifoldKind::Sphere { ambient_dim } => {
                if a.kappa.is_some() {
                    return Err(user("--kappa applies to tensor data only; use --sigma for Q-ball data"));
                }
                let sigma = noise_level(a, 1.0)?;
                let grid = default_grid(ambient_dim)?;
                let m = Sphere::new(ambient_dim)?;
                let odfs = d.to_image(&m)?;
                let noisy = qball::odf_image_noise(&grid, &odfs, sigma, a.seed)?;
                io::save_image(&m, &noisy, &a.out).map_err(at(&a.out))?;
                manifest["noise"] = json!("gaussian-odf");
                manifest["sigma"] = json!(sigma);
            }
            ManifoldKind::Euclidean { .. } => {
                return Err(user("noise needs a tensor dataset, a DWI directory or a Q-ball dataset"));
            }
        }
    }
    write_json(&sidecar(&a.out), &manifest)
}

fn default_grid(ambient_dim: usize) -> Result<OdfGrid, Failure> {
    let grid = OdfGrid::default_181();
    if grid.len() != ambient_dim {
        return Err(user(format!(
            "Q-ball data must be sampled on the {} default directions, found {ambient_dim}",
            grid.len()
        )));
    }
    Ok(grid)
}

pub fn fit(a: &FitArgs) -> Result<(), Failure> {
    if !a.input.is_dir() {
        return Err(user(format!("{} is not a DWI directory", a.input.display())));
    }
    let stack = io::load_dwi(&a.input).map_err(at(&a.input))?;
    let fit = dti::fit_tensors(&stack)?;
    if !fit.clamped.is_empty() {
        warn!("{} pixel(s) needed eigenvalue clamping", fit.clamped.len());
    }
    io::save_image(&Spd3, &fit.tensors, &a.out).map_err(at(&a.out))?;
    let (rows, cols) = stack.shape();
    write_json(
        &sidecar(&a.out),
        &json!({
            "shape": { "rows": rows, "cols": cols },
            "b": stack.b,
            "a0": stack.a0,
            "directions": stack.directions.len(),
            "clamped": fit.clamped,
        }),
    )
}

/// Validated model parameters of `regularize`.
enum Plan {
    Dp(MsParams),
    Vq { p: Exponent, q: Exponent, alpha: f64 },
}

fn plan(a: &RegularizeArgs) -> Result<Plan, Failure> {
    let p = Exponent::from_value(a.p)?;
    let positive = |name: &str, v: Option<f64>| -> Result<f64, Failure> {
        match v {
            Some(x) if x > 0.0 && x.is_finite() => Ok(x),
            Some(x) => Err(user(format!("--{name} must be positive, got {x}"))),
            None => Err(user(format!("--{name} is required for this model"))),
        }
    };
    let q = || -> Result<Exponent, Failure> { Ok(Exponent::from_value(a.q.unwrap_or(a.p))?) };
    let params = match a.model {
        ModelKind::Potts => {
            if a.alpha.is_some() {
                return Err(user("--alpha applies to the ms and lpvq models only"));
            }
            if a.q.is_some_and(|q| q != a.p) {
                return Err(user("potts has no coupling exponent; --q must be omitted or equal --p"));
            }
            Plan::Dp(MsParams::potts(p, positive("gamma", a.gamma)?))
        }
        ModelKind::Ms => Plan::Dp(MsParams::mumford_shah(
            p,
            q()?,
            positive("alpha", a.alpha)?,
            positive("gamma", a.gamma)?,
        )),
        ModelKind::Lpvq => {
            if a.gamma.is_some() {
                return Err(user("--gamma applies to the potts and ms models only"));
            }
            Plan::Vq {
                p,
                q: q()?,
                alpha: positive("alpha", a.alpha)?,
            }
        }
    };
    if let Plan::Dp(ms) = &params {
        ms.validate()?;
    }
    if !(a.mu0 > 0.0) || a.tau.is_some_and(|t| !(t > 1.0)) || a.outer == 0 {
        return Err(user("need --mu0 > 0, --tau > 1 and --outer >= 1"));
    }
    if !(a.lambda0 > 0.0) || a.sweeps == 0 {
        return Err(user("need --lambda0 > 0 and --sweeps >= 1"));
    }
    Ok(params)
}

pub fn regularize(a: &RegularizeArgs) -> Result<(), Failure> {
    let plan = plan(a)?;
    if a.input.is_dir() {
        return Err(user("regularize needs a dataset; run `fit` on DWI directories first"));
    }
    let d = io::load(&a.input).map_err(at(&a.input))?;
    let (out, diag) = match d.kind {
        ManifoldKind::Euclidean { dim } => run(&Euclidean::new(dim)?, &d, &plan, a)?,
        ManifoldKind::Sphere { ambient_dim } => run(&Sphere::new(ambient_dim)?, &d, &plan, a)?,
        ManifoldKind::Spd3 => run(&Spd3, &d, &plan, a)?,
    };
    io::save(&out, &a.out).map_err(at(&a.out))?;
    let trace = a.trace.clone().unwrap_or_else(|| sidecar(&a.out));
    write_json(&trace, &diag)
}

fn run<M: Manifold>(m: &M, d: &Dataset, plan: &Plan, a: &RegularizeArgs) -> Result<(Dataset, Value), Failure> {
    let f = d.to_image(m)?;
    let cppa = CppaConfig {
        lambda0: a.lambda0,
        sweeps: a.sweeps,
        ..CppaConfig::default()
    };
    let solver = SolverConfig {
        cppa,
        ..SolverConfig::default()
    };
    let shape = json!({ "rows": f.rows(), "cols": f.cols() });
    let (x, diag) = match *plan {
        Plan::Dp(params) if f.rows() == 1 => {
            let sol = solve_1d(m, f.as_slice(), &params, &solver)?;
            let diag = json!({
                "method": "dynamic-program",
                "shape": shape,
                "params": params,
                "energy": sol.energy,
                "dp_energy": sol.dp_energy,
                "jumps": sol.partition.jumps(),
                "segments": sol.partition.segments,
                "flags": sol.flags,
            });
            (Image::from_signal(sol.x)?, diag)
        }
        Plan::Dp(params) => {
            let cfg = SplitConfig {
                mu0: a.mu0,
                tau: a.tau,
                outer_iters: a.outer,
                solver,
                ..SplitConfig::default()
            };
            let sol = solve_2d(m, &f, &params, &Neighborhood::default(), &cfg)?;
            if !sol.converged {
                warn!("splitting stopped after {} iterations without converging", sol.trace.len());
            }
            let diag = json!({
                "method": "splitting",
                "shape": shape,
                "params": params,
                "config": cfg,
                "energy": sol.energy,
                "converged": sol.converged,
                "inner_not_converged": sol.inner_not_converged,
                "may_be_non_unique": sol.may_be_non_unique,
                "returned_data": sol.returned_data,
                "decay": iterate_decay_check(&sol.trace),
                "trace": sol.trace,
            });
            (sol.x, diag)
        }
        Plan::Vq { p, q, alpha } if f.rows() == 1 => {
            let prob = VqProblem::new(f.as_slice(), p, q, alpha);
            let res = cppa_solve(m, &prob, None, &cppa)?;
            let diag = json!({
                "method": "cppa",
                "shape": shape,
                "p": p,
                "q": q,
                "alpha": alpha,
                "energy": res.energy,
                "sweeps": res.sweeps,
                "converged": res.converged,
            });
            (Image::from_signal(res.signal)?, diag)
        }
        Plan::Vq { p, q, alpha } => {
            let dirs = Neighborhood::axis().weighted();
            let (x, res) = cppa_solve_image(m, &f, p, q, alpha, &dirs, &cppa)?;
            let diag = json!({
                "method": "cppa",
                "shape": shape,
                "p": p,
                "q": q,
                "alpha": alpha,
                "energy": res.energy,
                "sweeps": res.sweeps,
                "converged": res.converged,
            });
            (x, diag)
        }
    };
    let mut diag = diag;
    if let ManifoldKind::Sphere { .. } = d.kind {
        let bad: usize = x.as_slice().iter().map(|p| qball::nonpositive_components(&m.coords(p))).sum();
        if bad > 0 {
            warn!("{bad} ODF component(s) are not positive");
        }
        diag["nonpositive_components"] = json!(bad);
    }
    Ok((Dataset::from_image(m, &x), diag))
}

pub fn export(a: &ExportArgs) -> Result<(), Failure> {
    let d = io::load(&a.input).map_err(at(&a.input))?;
    let file = fs::File::create(&a.out).map_err(|e| user(format!("{}: {e}", a.out.display())))?;
    let w = BufWriter::new(file);
    match (a.glyphs, d.kind) {
        (GlyphKind::Ellipsoid, ManifoldKind::Spd3) => {
            if !(a.level > 0.0) || !a.level.is_finite() {
                return Err(user(format!("--level must be positive, got {}", a.level)));
            }
            let glyphs = dti::export_glyphs(&d.to_image(&Spd3)?, a.level)?;
            dti::write_glyphs(&glyphs, w).map_err(at(&a.out))?;
        }
        (GlyphKind::Odf, ManifoldKind::Sphere { ambient_dim }) => {
            let grid = default_grid(ambient_dim)?;
            let odfs = d.to_image(&Sphere::new(ambient_dim)?)?;
            let glyphs = qball::export_odf_glyphs(&odfs, &grid)?;
            qball::write_odf_glyphs(&glyphs, &grid, w).map_err(at(&a.out))?;
        }
        (g, k) => {
            return Err(user(format!(
                "{} glyphs need {} data, found `{k}`",
                if g == GlyphKind::Ellipsoid { "ellipsoid" } else { "odf" },
                if g == GlyphKind::Ellipsoid { "spd3" } else { "Q-ball" },
            )));
        }
    }
    Ok(())
}
