mod common;

use common::*;
use manireg::manifold::Spd3;
use manireg::stats::{interval_error_potts, MedianStep};
use manireg::{frechet_point, Euclidean, Manifold, MeanConfig, Sphere};
use nalgebra::Matrix3;
use proptest::prelude::*;
use rand::Rng;

fn scalars(v: &[f64]) -> Vec<Vec<f64>> {
    v.iter().map(|&x| vec![x]).collect()
}

fn weiszfeld() -> MeanConfig {
    MeanConfig {
        max_iters: 500,
        tol: 1e-12,
        median: MedianStep::Weiszfeld,
    }
}

#[test]
fn single_point_is_its_own_mean() {
    let mut r = rng(10);
    let x = random_spd(&mut r, 1.0);
    let fp = frechet_point(&Spd3, &[x], &[1.0], 2.0, &MeanConfig::default(), None).unwrap();
    assert!((fp.point - x).amax() < 1e-15);
    assert_eq!(fp.cost, 0.0);
}

#[test]
fn euclidean_mean_and_median() {
    let e = Euclidean::scalar();
    let mean = frechet_point(&e, &scalars(&[0.0, 2.0, 4.0]), &[1.0; 3], 2.0, &MeanConfig::default(), None).unwrap();
    assert!((mean.point[0] - 2.0).abs() < 1e-12);
    let med = frechet_point(&e, &scalars(&[0.0, 1.0, 10.0]), &[1.0; 3], 1.0, &weiszfeld(), None).unwrap();
    assert!((med.point[0] - 1.0).abs() < 1e-9, "{:?}", med.point);
    let cfg = MeanConfig {
        max_iters: 5000,
        tol: 1e-12,
        median: MedianStep::Diminishing { scale: None },
    };
    let med = frechet_point(&e, &scalars(&[0.0, 1.0, 10.0]), &[1.0; 3], 1.0, &cfg, None).unwrap();
    assert!((med.point[0] - 1.0).abs() < 1e-2, "{:?}", med.point);
    assert!((med.cost - 10.0).abs() < 1e-2);
}

fn newton() -> MeanConfig {
    MeanConfig {
        max_iters: 200,
        tol: 1e-12,
        median: MedianStep::Newton,
    }
}

#[test]
fn planar_medians_have_known_locations() {
    let e = Euclidean::new(2).unwrap();
    let h = 3f64.sqrt() / 2.0;
    let triangle = vec![vec![1.0, 0.0], vec![-0.5, h], vec![-0.5, -h]];
    let fp = frechet_point(&e, &triangle, &[1.0; 3], 1.0, &newton(), Some(&vec![0.3, 0.2])).unwrap();
    assert!(fp.point.iter().all(|c| c.abs() < 1e-9), "{:?}", fp.point);
    assert!((fp.cost - 3.0).abs() < 1e-9);
    // the angle at the origin exceeds 120°, so the median sits on that vertex
    let obtuse = vec![vec![0.0, 0.0], vec![2.0, 0.3], vec![-2.0, 0.3]];
    let fp = frechet_point(&e, &obtuse, &[1.0; 3], 1.0, &newton(), None).unwrap();
    assert!(fp.point.iter().all(|c| c.abs() < 1e-9), "{:?}", fp.point);
}

#[test]
fn two_point_spd_mean_is_geodesic_midpoint() {
    let mut r = rng(11);
    for _ in 0..10 {
        let (d, e) = (random_spd(&mut r, 1.0), random_spd(&mut r, 1.0));
        let fp = frechet_point(&Spd3, &[d, e], &[1.0, 1.0], 2.0, &MeanConfig::default(), None).unwrap();
        let mid = Spd3.geopoint(&d, &e, Spd3.dist(&d, &e).unwrap() / 2.0).unwrap();
        assert!(Spd3.dist(&fp.point, &mid).unwrap() < 1e-8);
    }
}

#[test]
fn spd_mean_is_stationary() {
    let mut r = rng(12);
    let center = random_spd(&mut r, 1.0);
    let pts: Vec<Matrix3<f64>> = (0..5)
        .map(|_| Spd3.exp(&center, &(random_sym(&mut r, 0.3) * center)).unwrap())
        .collect();
    let fp = frechet_point(&Spd3, &pts, &[1.0; 5], 2.0, &MeanConfig::default(), None).unwrap();
    assert!(fp.converged);
    let grad = pts
        .iter()
        .map(|z| Spd3.log(&fp.point, z).unwrap())
        .fold(Matrix3::zeros(), |a, b| a + b);
    assert!(Spd3.norm(&fp.point, &grad).unwrap() < 1e-7);
}

#[test]
fn interval_error_examples() {
    let e = Euclidean::scalar();
    let data = scalars(&[5.0, 1.0, 3.0]);
    let one = interval_error_potts(&e, &data, 0, 0, 2.0, None, None, &MeanConfig::default()).unwrap();
    assert_eq!((one.cost, one.point.clone()), (0.0, vec![5.0]));
    let two = interval_error_potts(&e, &data, 1, 2, 2.0, None, None, &MeanConfig::default()).unwrap();
    assert!((two.cost - 1.0).abs() < 1e-12);
    assert!((two.point[0] - 2.0).abs() < 1e-12);
}

#[test]
fn two_point_spd_interval_error_matches_golden_section() {
    let mut r = rng(13);
    for p in [1.0, 2.0] {
        for _ in 0..10 {
            let data = vec![random_spd(&mut r, 1.0), random_spd(&mut r, 1.0)];
            let d = Spd3.dist(&data[0], &data[1]).unwrap();
            let objective = |t: f64| {
                let h = Spd3.geopoint(&data[0], &data[1], t.clamp(0.0, d)).unwrap();
                data.iter().map(|z| Spd3.dist(&h, z).unwrap().powf(p)).sum::<f64>() / p
            };
            let (_, best) = golden(0.0, d, objective);
            let got = interval_error_potts(&Spd3, &data, 0, 1, p, None, None, &weiszfeld()).unwrap();
            assert!((got.cost - best).abs() < 1e-6, "p={p}: {} vs {best}", got.cost);
        }
    }
}

#[test]
fn mean_cost_decreases_every_iteration() {
    let mut r = rng(14);
    let pts: Vec<Matrix3<f64>> = (0..6).map(|_| random_spd(&mut r, 1.5)).collect();
    let w: Vec<f64> = (0..6).map(|_| r.gen_range(0.5..2.0)).collect();
    let mut last = f64::INFINITY;
    for iters in 1..=12 {
        let cfg = MeanConfig {
            max_iters: iters,
            tol: 1e-300,
            ..MeanConfig::default()
        };
        let fp = frechet_point(&Spd3, &pts, &w, 2.0, &cfg, Some(&pts[0])).unwrap();
        assert!(fp.cost <= last + 1e-12, "iteration {iters}: {} > {last}", fp.cost);
        last = fp.cost;
    }
}

#[test]
fn sphere_flags_spread_data() {
    let s = Sphere::new(3).unwrap();
    let pts = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0], vec![-0.6, -0.8, 0.0]];
    let fp = frechet_point(&s, &pts, &[1.0; 4], 2.0, &MeanConfig::default(), None).unwrap();
    assert!(fp.may_be_non_unique);
    let close = vec![vec![1.0, 0.0, 0.0], vec![0.995f64.sqrt(), 0.005f64.sqrt(), 0.0]];
    let fp = frechet_point(&s, &close, &[1.0; 2], 2.0, &MeanConfig::default(), None).unwrap();
    assert!(!fp.may_be_non_unique);
}

proptest! {
    #![proptest_config(proptest_cases(48))]

    #[test]
    fn euclidean_weighted_mean(seed in any::<u64>(), n in 1usize..10, dim in 1usize..4) {
        let mut r = rng(seed);
        let e = Euclidean::new(dim).unwrap();
        let pts: Vec<Vec<f64>> = (0..n).map(|_| (0..dim).map(|_| r.gen_range(-5.0..5.0)).collect()).collect();
        let w: Vec<f64> = (0..n).map(|_| r.gen_range(0.1..3.0)).collect();
        let fp = frechet_point(&e, &pts, &w, 2.0, &MeanConfig::default(), None).unwrap();
        let total: f64 = w.iter().sum();
        for c in 0..dim {
            let want = pts.iter().zip(&w).map(|(x, wi)| wi * x[c]).sum::<f64>() / total;
            prop_assert!((fp.point[c] - want).abs() <= 1e-10);
        }
    }

    #[test]
    fn cost_is_permutation_invariant(seed in any::<u64>(), p in prop_oneof![Just(1.0), Just(2.0)]) {
        let mut r = rng(seed);
        let pts: Vec<Matrix3<f64>> = (0..5).map(|_| random_spd(&mut r, 1.0)).collect();
        let w: Vec<f64> = (0..5).map(|_| r.gen_range(0.5..2.0)).collect();
        let order = [3usize, 0, 4, 2, 1];
        let pts2: Vec<_> = order.iter().map(|&i| pts[i]).collect();
        let w2: Vec<_> = order.iter().map(|&i| w[i]).collect();
        // same start point, so both runs follow the same path up to summation order
        let a = frechet_point(&Spd3, &pts, &w, p, &weiszfeld(), Some(&pts[0])).unwrap().cost;
        let b = frechet_point(&Spd3, &pts2, &w2, p, &weiszfeld(), Some(&pts[0])).unwrap();
        prop_assert!((a - b.cost).abs() <= 1e-10 * (1.0 + a));
    }

    #[test]
    fn newton_and_weiszfeld_medians_agree(seed in any::<u64>(), n in 2usize..9) {
        let mut r = rng(seed);
        let pts: Vec<Matrix3<f64>> = (0..n).map(|_| random_spd(&mut r, 1.0)).collect();
        let w: Vec<f64> = (0..n).map(|_| r.gen_range(0.5..2.0)).collect();
        let long = MeanConfig { max_iters: 5000, ..weiszfeld() };
        let a = frechet_point(&Spd3, &pts, &w, 1.0, &newton(), None).unwrap();
        let b = frechet_point(&Spd3, &pts, &w, 1.0, &long, None).unwrap();
        prop_assert!(a.cost <= b.cost + 1e-9 * (1.0 + b.cost), "{} vs {}", a.cost, b.cost);
        prop_assert!(b.cost <= a.cost + 1e-6 * (1.0 + a.cost), "{} vs {}", a.cost, b.cost);
    }

    #[test]
    fn warm_start_reaches_the_same_cost(seed in any::<u64>(), p in prop_oneof![Just(1.0), Just(2.0)]) {
        let mut r = rng(seed);
        let pts: Vec<Matrix3<f64>> = (0..6).map(|_| random_spd(&mut r, 1.0)).collect();
        let cold = frechet_point(&Spd3, &pts, &[1.0; 6], p, &weiszfeld(), None).unwrap();
        let start = random_spd(&mut r, 1.0);
        let warm = frechet_point(&Spd3, &pts, &[1.0; 6], p, &weiszfeld(), Some(&start)).unwrap();
        prop_assert!((cold.cost - warm.cost).abs() <= 1e-7, "{} vs {}", cold.cost, warm.cost);

        let e = Euclidean::scalar();
        let xs: Vec<Vec<f64>> = (0..7).map(|_| vec![r.gen_range(-3.0..3.0)]).collect();
        let cold = frechet_point(&e, &xs, &[1.0; 7], p, &weiszfeld(), None).unwrap();
        let warm = frechet_point(&e, &xs, &[1.0; 7], p, &weiszfeld(), Some(&vec![10.0])).unwrap();
        prop_assert!((cold.cost - warm.cost).abs() <= 1e-7);
    }
}
