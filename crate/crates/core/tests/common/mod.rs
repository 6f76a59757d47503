#![allow(dead_code)]

use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn proptest_cases(cases: u32) -> proptest::test_runner::Config {
    proptest::test_runner::Config {
        cases,
        failure_persistence: None,
        ..Default::default()
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_rotation(rng: &mut ChaCha8Rng) -> Matrix3<f64> {
    let a = Matrix3::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal));
    let q = a.qr().q();
    if q.determinant() < 0.0 {
        -q
    } else {
        q
    }
}

/// SPD matrix with log-eigenvalues uniform in `[-spread, spread]`.
pub fn random_spd(rng: &mut ChaCha8Rng, spread: f64) -> Matrix3<f64> {
    let r = random_rotation(rng);
    let l = Vector3::from_fn(|_, _| rng.gen_range(-spread..=spread).exp());
    let s = r * Matrix3::from_diagonal(&l) * r.transpose();
    (s + s.transpose()) * 0.5
}

pub fn random_sym(rng: &mut ChaCha8Rng, scale: f64) -> Matrix3<f64> {
    let a = Matrix3::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal) * scale);
    (a + a.transpose()) * 0.5
}

pub fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / norm).collect()
}

/// `S^{-1/2}` by the Denman-Beavers iteration.
pub fn inv_sqrt(s: &Matrix3<f64>) -> Matrix3<f64> {
    let (mut y, mut z) = (*s, Matrix3::identity());
    for _ in 0..100 {
        let yi = y.try_inverse().expect("invertible");
        let zi = z.try_inverse().expect("invertible");
        let (ny, nz) = ((y + zi) * 0.5, (z + yi) * 0.5);
        let done = (ny - y).amax() <= 1e-16 * ny.amax();
        y = ny;
        z = nz;
        if done {
            break;
        }
    }
    (z + z.transpose()) * 0.5
}

/// Affine-invariant norm of the tangent `v` at `base`: `‖B^{-1/2} V B^{-1/2}‖_F`.
pub fn spd_metric_norm(base: &Matrix3<f64>, v: &Matrix3<f64>) -> f64 {
    let w = inv_sqrt(base);
    (w * v * w).norm()
}

/// Minimizer of a unimodal `f` on `[a, b]` by golden-section search.
pub fn golden(mut a: f64, mut b: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() < 1e-14 * (1.0 + a.abs() + b.abs()) {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let x = (a + b) / 2.0;
    (x, f(x))
}

/// All partitions of `0..n` into consecutive segments, as lists of `(l, r)`.
pub fn partitions(n: usize) -> Vec<Vec<(usize, usize)>> {
    (0..1u64 << (n - 1))
        .map(|mask| {
            let mut segs = Vec::new();
            let mut l = 0;
            for i in 0..n - 1 {
                if mask >> i & 1 == 1 {
                    segs.push((l, i));
                    l = i + 1;
                }
            }
            segs.push((l, n - 1));
            segs
        })
        .collect()
}

/// CDF of `√((ν + X)² + Y²)` with `X, Y ~ N(0, σ²)`: integrates the
/// conditional normal probability over `y = x sin θ` by Simpson's rule.
pub fn rice_cdf(x: f64, nu: f64, sigma: f64) -> f64 {
    use statrs::function::erf::erf;
    if x <= 0.0 {
        return 0.0;
    }
    let phi = |t: f64| 0.5 * (1.0 + erf(t / std::f64::consts::SQRT_2));
    let integrand = |theta: f64| {
        let (s, c) = theta.sin_cos();
        let (y, half) = (x * s, x * c);
        let density = (-(y * y) / (2.0 * sigma * sigma)).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt());
        (phi((half - nu) / sigma) - phi((-half - nu) / sigma)) * density * x * c
    };
    let n = 400;
    let (a, b) = (-std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2);
    let h = (b - a) / n as f64;
    let mut sum = integrand(a) + integrand(b);
    for k in 1..n {
        sum += integrand(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    sum * h / 3.0
}

/// Kolmogorov-Smirnov statistic of `samples` against `cdf`.
pub fn ks_statistic(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}
