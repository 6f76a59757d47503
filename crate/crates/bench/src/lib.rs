//! Noisy inputs shared by the benchmarks.

use manireg::dti::{add_rician, default_directions, fit_tensors, pwconst_phantom, simulate_dwi, DEFAULT_A0, DEFAULT_B};
use manireg::qball::{crossing_phantom, odf_image_noise, OdfGrid};
use manireg::Image;
use nalgebra::Matrix3;

/// Tensors fitted to a noisy piecewise-constant phantom; `kappa` sets `σ = A0/κ`.
pub fn noisy_tensors(rows: usize, cols: usize, kappa: f64, seed: u64) -> Image<Matrix3<f64>> {
    let phantom = pwconst_phantom(rows, cols, seed).expect("valid phantom shape");
    let dwi = simulate_dwi(&phantom.tensors, &default_directions(), DEFAULT_B, DEFAULT_A0).expect("valid scheme");
    let noisy = add_rician(&dwi, DEFAULT_A0 / kappa, seed + 1).expect("positive noise level");
    fit_tensors(&noisy).expect("full-rank scheme").tensors
}

/// A piecewise-constant scalar signal with deterministic pseudo-noise.
pub fn noisy_steps(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| {
            let level = [0.0, 2.0, -1.0, 1.0][i * 4 / n];
            let wiggle = ((i as f64 * 12.9898).sin() * 43_758.545).fract() - 0.5;
            vec![level + 0.4 * wiggle]
        })
        .collect()
}

/// Noisy crossing ODFs on the default grid.
pub fn noisy_odfs(rows: usize, cols: usize, seed: u64) -> Image<Vec<f64>> {
    let grid = OdfGrid::default_181();
    let phantom = crossing_phantom(rows, cols, &grid, 6.0, seed).expect("valid phantom shape");
    odf_image_noise(&grid, &phantom.odfs, 0.002, seed + 1).expect("positive noise level")
}
