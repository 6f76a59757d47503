mod common;

use common::*;
use manireg::qball::{
    crossing_phantom, export_odf_glyphs, nonpositive_components, odf_from_diffusivity, odf_image_noise, odf_noise,
    synth_crossing, write_odf_glyphs, Geometry, OdfGrid,
};
use manireg::{Image, Manifold, Sphere};
use nalgebra::Vector3;
use proptest::prelude::*;
use rand::Rng;

fn unit_sum(phi: &[f64]) -> f64 {
    phi.iter().map(|x| x * x).sum()
}

fn random_dir(r: &mut rand_chacha::ChaCha8Rng) -> [f64; 3] {
    let v = random_unit(r, 3);
    [v[0], v[1], v[2]]
}

#[test]
fn default_grid_has_181_distinct_directions() {
    let grid = OdfGrid::default_181();
    assert_eq!(grid.len(), 181);
    assert!(OdfGrid::new(grid.samples().to_vec()).is_ok());
}

#[test]
fn diffusivity_examples() {
    let grid = OdfGrid::default_181();
    let n = grid.len();
    let flat = odf_from_diffusivity(&grid, &vec![3.0; n]).unwrap();
    assert!(flat.iter().all(|x| (x - 1.0 / (n as f64).sqrt()).abs() < 1e-15));
    let mut raw = vec![0.0; n];
    raw[17] = 2.5;
    let spike = odf_from_diffusivity(&grid, &raw).unwrap();
    assert!(spike.iter().enumerate().all(|(i, &x)| x == if i == 17 { 1.0 } else { 0.0 }));
    assert_eq!(nonpositive_components(&spike), n - 1);
}

#[test]
fn synthetic_examples() {
    let grid = OdfGrid::default_181();
    let n = grid.len() as f64;
    let flat = synth_crossing(&grid, &Geometry::SinglePeak { dir: [0.0, 0.0, 1.0] }, 0.0).unwrap();
    assert!(flat.iter().all(|x| (x - 1.0 / n.sqrt()).abs() < 1e-15));
    let dir = [0.6, 0.0, 0.8];
    let single = synth_crossing(&grid, &Geometry::SinglePeak { dir }, 8.0).unwrap();
    let doubled = synth_crossing(&grid, &Geometry::TwoPeak { dir1: dir, dir2: dir, ratio: 1.0 }, 8.0).unwrap();
    assert!(single.iter().zip(&doubled).all(|(a, b)| (a - b).abs() < 1e-14));
}

#[test]
fn orthogonal_crossing_is_symmetric_under_swapping_fibers() {
    // a grid closed under the reflection exchanging x and y
    let mut r = rng(60);
    let mut samples = Vec::new();
    while samples.len() < 60 {
        let v = random_unit(&mut r, 3);
        let (a, b) = (Vector3::new(v[0], v[1], v[2]), Vector3::new(v[1], v[0], v[2]));
        if (a - b).norm() > 1e-3 && (a + b).norm() > 1e-3 {
            samples.push(a);
            samples.push(b);
        }
    }
    let grid = OdfGrid::new(samples).unwrap();
    let phi = synth_crossing(&grid, &Geometry::TwoPeak { dir1: [1.0, 0.0, 0.0], dir2: [0.0, 1.0, 0.0], ratio: 1.0 }, 5.0).unwrap();
    for pair in phi.chunks(2) {
        assert!((pair[0] - pair[1]).abs() < 1e-14);
    }
}

#[test]
fn noise_examples() {
    let grid = OdfGrid::default_181();
    let odf = synth_crossing(&grid, &Geometry::SinglePeak { dir: [0.0, 1.0, 0.0] }, 4.0).unwrap();
    let quiet = odf_noise(&grid, &odf, 1e-12, &mut rng(61)).unwrap();
    assert!(odf.iter().zip(&quiet).all(|(a, b)| (a - b).abs() < 1e-6));
    let a = odf_noise(&grid, &odf, 0.01, &mut rng(62)).unwrap();
    let b = odf_noise(&grid, &odf, 0.01, &mut rng(62)).unwrap();
    assert_eq!(a, b);
    let img = Image::from_fn(3, 4, |_, _| odf.clone()).unwrap();
    let x = odf_image_noise(&grid, &img, 0.02, 9).unwrap();
    let y = odf_image_noise(&grid, &img, 0.02, 9).unwrap();
    assert_eq!(x.as_slice(), y.as_slice());
}

#[test]
fn glyph_examples() {
    let grid = OdfGrid::default_181();
    let n = grid.len();
    let flat = odf_from_diffusivity(&grid, &vec![1.0; n]).unwrap();
    let mut raw = vec![0.0; n];
    raw[3] = 1.0;
    let spike = odf_from_diffusivity(&grid, &raw).unwrap();
    let img = Image::new(1, 2, vec![flat, spike]).unwrap();
    let glyphs = export_odf_glyphs(&img, &grid).unwrap();
    assert!(glyphs[0].radii.iter().all(|r| (r - 1.0 / (n as f64).sqrt()).abs() < 1e-15));
    let pts = glyphs[1].points(&grid);
    assert_eq!(pts.iter().filter(|p| p.norm() > 0.0).count(), 1);
    assert!((pts[3].norm() - 1.0).abs() < 1e-15);
    assert_eq!(glyphs.iter().map(|g| g.radii.len()).sum::<usize>(), 2 * n);
    let mut out = Vec::new();
    write_odf_glyphs(&glyphs, &grid, &mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert_eq!(text.lines().count(), 1 + n + 2);
    assert_eq!(text.lines().next(), Some("grid 181"));
}

#[test]
fn crossing_phantom_depends_only_on_the_seed() {
    let grid = OdfGrid::default_181();
    let a = crossing_phantom(6, 8, &grid, 6.0, 4).unwrap();
    let b = crossing_phantom(6, 8, &grid, 6.0, 4).unwrap();
    assert_eq!(a.angle, b.angle);
    assert_eq!(a.odfs.as_slice(), b.odfs.as_slice());
    assert!((0.0..std::f64::consts::FRAC_PI_2).contains(&a.angle));
    assert_ne!(a.angle, crossing_phantom(6, 8, &grid, 6.0, 5).unwrap().angle);
}

proptest! {
    #![proptest_config(proptest_cases(48))]

    #[test]
    fn diffusivity_normalization_and_scale_invariance(seed in any::<u64>(), scale in 1e-3..1e3f64) {
        let grid = OdfGrid::default_181();
        let mut r = rng(seed);
        let raw: Vec<f64> = (0..grid.len()).map(|_| r.gen_range(0.0..5.0)).collect();
        let phi = odf_from_diffusivity(&grid, &raw).unwrap();
        prop_assert!((unit_sum(&phi) - 1.0).abs() <= 1e-12);
        let scaled: Vec<f64> = raw.iter().map(|x| x * scale).collect();
        let psi = odf_from_diffusivity(&grid, &scaled).unwrap();
        prop_assert!(phi.iter().zip(&psi).all(|(a, b)| (a - b).abs() <= 1e-12));
    }

    #[test]
    fn synthetic_odfs_share_a_positive_quadrant(seed in any::<u64>(), k1 in 0.0..20.0f64, k2 in 0.0..20.0f64, ratio in 0.0..2.0f64) {
        let grid = OdfGrid::default_181();
        let mut r = rng(seed);
        let a = synth_crossing(&grid, &Geometry::SinglePeak { dir: random_dir(&mut r) }, k1).unwrap();
        let b = synth_crossing(&grid, &Geometry::TwoPeak { dir1: random_dir(&mut r), dir2: random_dir(&mut r), ratio }, k2).unwrap();
        for phi in [&a, &b] {
            prop_assert!((unit_sum(phi) - 1.0).abs() <= 1e-10);
        }
        let dot: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        prop_assert!(dot > 0.0 && dot <= 1.0 + 1e-12);
        let s = Sphere::new(grid.len()).unwrap();
        prop_assert!(s.dist(&a, &b).unwrap() < std::f64::consts::FRAC_PI_2);
    }

    #[test]
    fn noisy_odfs_stay_valid(seed in any::<u64>(), sigma in 1e-6..0.5f64) {
        let grid = OdfGrid::default_181();
        let mut r = rng(seed);
        let odf = synth_crossing(&grid, &Geometry::SinglePeak { dir: random_dir(&mut r) }, 6.0).unwrap();
        let noisy = odf_noise(&grid, &odf, sigma, &mut r).unwrap();
        prop_assert!((unit_sum(&noisy) - 1.0).abs() <= 1e-10);
        prop_assert_eq!(nonpositive_components(&noisy), 0);
    }
}
