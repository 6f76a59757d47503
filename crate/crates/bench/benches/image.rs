use criterion::{black_box, criterion_group, criterion_main, Criterion};
use manireg::prox::cppa_solve_image;
use manireg::{solve_2d, CppaConfig, Exponent, MsParams, Neighborhood, Spd3, Sphere, SplitConfig};
use manireg_bench::{noisy_odfs, noisy_tensors};

fn tensor_image(c: &mut Criterion) {
    let img = noisy_tensors(12, 12, 75.0, 5);
    let params = MsParams::potts(Exponent::One, 3.75);
    let mut group = c.benchmark_group("splitting");
    group.sample_size(10);
    group.bench_function("potts_p1_spd_12x12", |b| {
        b.iter(|| solve_2d(&Spd3, black_box(&img), &params, &Neighborhood::default(), &SplitConfig::default()).unwrap())
    });
    group.finish();
}

fn odf_image(c: &mut Criterion) {
    let img = noisy_odfs(4, 4, 6);
    let sphere = Sphere::new(181).unwrap();
    let params = MsParams::mumford_shah(Exponent::Two, Exponent::Two, 32.0, 0.03);
    let cfg = SplitConfig {
        outer_iters: 8,
        ..SplitConfig::default()
    };
    let mut group = c.benchmark_group("odf");
    group.sample_size(10);
    group.bench_function("mumford_shah_p2_sphere_4x4", |b| {
        b.iter(|| solve_2d(&sphere, black_box(&img), &params, &Neighborhood::default(), &cfg).unwrap())
    });
    let weighted = Neighborhood::default().weighted();
    group.bench_function("lpvq_p1_sphere_4x4", |b| {
        b.iter(|| {
            cppa_solve_image(&sphere, black_box(&img), Exponent::One, Exponent::One, 0.2, &weighted, &CppaConfig::default())
                .unwrap()
        })
    });
    group.finish();
}

criterion_group!(benches, tensor_image, odf_image);
criterion_main!(benches);
