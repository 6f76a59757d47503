mod common;

use std::fs;

use common::*;
use manireg::dti::{add_rician, default_directions, simulate_dwi, DEFAULT_A0, DEFAULT_B};
use manireg::io::{load, load_dwi, load_image, read_dataset, save, save_dwi, save_image, write_dataset, Dataset};
use manireg::manifold::Spd3;
use manireg::{Error, Euclidean, Image, ManifoldKind, Sphere};
use nalgebra::Matrix3;
use proptest::prelude::*;

fn spd_image(seed: u64, rows: usize, cols: usize) -> Image<Matrix3<f64>> {
    let mut r = rng(seed);
    Image::from_fn(rows, cols, |_, _| random_spd(&mut r, 1.5)).unwrap()
}

fn bits<P: AsRef<[f64]>>(v: P) -> Vec<u64> {
    v.as_ref().iter().map(|x| x.to_bits()).collect()
}

#[test]
fn header_precedes_the_payload() {
    let img = spd_image(70, 16, 16);
    let mut buf = Vec::new();
    write_dataset(&Dataset::from_image(&Spd3, &img), &mut buf).unwrap();
    let header = b"MANIREG v1 spd3 3 16 16\n";
    assert!(buf.starts_with(header));
    assert_eq!(buf.len() - header.len(), 16 * 16 * 9 * 8);
}

#[test]
fn spd_roundtrip_is_bitwise() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.mrg");
    let img = spd_image(71, 5, 7);
    save_image(&Spd3, &img, &path).unwrap();
    let back = load_image(&Spd3, &path).unwrap();
    assert_eq!(back.shape(), (5, 7));
    for (a, b) in img.as_slice().iter().zip(back.as_slice()) {
        assert_eq!(bits(a.as_slice()), bits(b.as_slice()));
    }
    let bytes = fs::read(&path).unwrap();
    save(&load(&path).unwrap(), &path).unwrap();
    assert_eq!(fs::read(&path).unwrap(), bytes);
}

#[test]
fn sphere_and_euclidean_roundtrips() {
    let dir = tempfile::tempdir().unwrap();
    let mut r = rng(72);
    let s = Sphere::new(5).unwrap();
    let img = Image::from_fn(3, 2, |_, _| random_unit(&mut r, 5)).unwrap();
    save_image(&s, &img, dir.path().join("s.mrg")).unwrap();
    assert_eq!(load_image(&s, dir.path().join("s.mrg")).unwrap().as_slice(), img.as_slice());
    let e = Euclidean::new(2).unwrap();
    let img = Image::from_fn(2, 2, |i, j| vec![i as f64 - 0.5, j as f64 * 1e300]).unwrap();
    save_image(&e, &img, dir.path().join("e.mrg")).unwrap();
    let d = load(dir.path().join("e.mrg")).unwrap();
    assert_eq!(d.kind, ManifoldKind::Euclidean { dim: 2 });
    assert_eq!(d.to_image(&e).unwrap().as_slice(), img.as_slice());
    assert!(matches!(d.to_image(&Spd3), Err(Error::Format(_))));
}

#[test]
fn truncated_payload_reports_byte_counts() {
    let mut buf = Vec::new();
    write_dataset(&Dataset::from_image(&Spd3, &spd_image(73, 2, 2)), &mut buf).unwrap();
    buf.truncate(buf.len() - 5);
    match read_dataset(buf.as_slice()) {
        Err(Error::TruncatedPayload { expected, actual }) => assert_eq!((expected, actual), (288, 283)),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn invalid_cells_are_located() {
    let mut d = Dataset::from_image(&Spd3, &spd_image(74, 2, 3));
    d.coords[4 * 9 + 1] += 1.0;
    let mut buf = Vec::new();
    write_dataset(&d, &mut buf).unwrap();
    assert!(matches!(read_dataset(buf.as_slice()), Err(Error::InvalidCell { cell: 4, .. })));
    let mut d = Dataset::from_image(&Sphere::new(3).unwrap(), &Image::from_fn(1, 2, |_, _| vec![0.0, 0.0, 1.0]).unwrap());
    d.coords[3] = 2.0;
    let mut buf = Vec::new();
    write_dataset(&d, &mut buf).unwrap();
    assert!(matches!(read_dataset(buf.as_slice()), Err(Error::InvalidCell { cell: 1, .. })));
}

#[test]
fn header_errors() {
    let payload = [0u8; 8];
    let with = |h: &str| {
        let mut v = h.as_bytes().to_vec();
        v.extend_from_slice(&payload);
        v
    };
    assert!(matches!(read_dataset(with("MANIREG v2 euclidean 1 1 1\n").as_slice()), Err(Error::VersionMismatch { .. })));
    assert!(matches!(read_dataset(with("NOTMINE v1 euclidean 1 1 1\n").as_slice()), Err(Error::Format(_))));
    assert!(matches!(read_dataset(with("MANIREG v1 euclidean 1 1\n").as_slice()), Err(Error::Format(_))));
    assert!(read_dataset(with("MANIREG v1 euclidean 1 1 1\n").as_slice()).is_ok());
}

#[test]
fn dwi_roundtrip_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let tensors = spd_image(75, 3, 4).map(|s| s * 1e-3);
    let stack = add_rician(&simulate_dwi(&tensors, &default_directions(), DEFAULT_B, DEFAULT_A0).unwrap(), 20.0, 1).unwrap();
    save_dwi(&stack, dir.path()).unwrap();
    let back = load_dwi(dir.path()).unwrap();
    assert_eq!(back.directions.len(), 15);
    assert_eq!((back.b, back.a0), (stack.b, stack.a0));
    assert_eq!(back.directions, stack.directions);
    for (a, b) in stack.images.iter().zip(&back.images) {
        assert_eq!(bits(a.as_slice()), bits(b.as_slice()));
    }
    fs::remove_file(dir.path().join("dwi_014.mrg")).unwrap();
    assert!(load_dwi(dir.path()).is_err());
    fs::remove_file(dir.path().join("directions.txt")).unwrap();
    let err = load_dwi(dir.path()).unwrap_err();
    assert!(err.to_string().contains("directions.txt"), "{err}");
}

proptest! {
    #![proptest_config(proptest_cases(32))]

    #[test]
    fn load_save_is_the_identity(seed in any::<u64>(), rows in 1usize..6, cols in 1usize..6) {
        let img = spd_image(seed, rows, cols);
        let mut first = Vec::new();
        write_dataset(&Dataset::from_image(&Spd3, &img), &mut first).unwrap();
        let d = read_dataset(first.as_slice()).unwrap();
        let mut second = Vec::new();
        write_dataset(&d, &mut second).unwrap();
        prop_assert_eq!(first, second);
    }
}
