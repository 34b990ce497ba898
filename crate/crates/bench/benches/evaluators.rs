use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use drb_bench::{constants, z_sqrt_m2};
use drb_core::cocycle::{phi, phi_n0};
use drb_core::dedekind::d_sum;
use drb_core::eisenstein::lattice_point_f64;
use drb_core::{Level, Mat2, Point3};

fn e1(c: &mut Criterion) {
    let mut g = c.benchmark_group("e1");
    for prec in [128u32, 256] {
        let lc = constants(prec);
        let x = lattice_point_f64(lc.lattice(), 0.31, 0.17);
        g.bench_with_input(BenchmarkId::from_parameter(prec), &x, |b, x| b.iter(|| lc.e1(black_box(x))));
    }
    g.finish();
}

fn dedekind(c: &mut Criterion) {
    let lc = constants(128);
    let o = z_sqrt_m2();
    let mut g = c.benchmark_group("d_sum");
    g.sample_size(10);
    for (x, y) in [(3, 1), (7, 3), (11, 6)] {
        let cc = o.elem(x, y);
        let a = o.elem(1, 1);
        g.bench_with_input(BenchmarkId::from_parameter(cc.norm()), &cc, |b, cc| {
            b.iter(|| d_sum(black_box(&a), cc, &lc).unwrap())
        });
    }
    g.finish();
}

fn cocycle(c: &mut Criterion) {
    let lc = constants(128);
    let o = z_sqrt_m2();
    let m = Mat2::new(o.one(), o.zero(), o.elem(3, 1), o.one());
    let lev = Level::new(o.sqrt_neg_d()).unwrap();
    let mn = Mat2::new(o.one(), o.zero(), o.elem(0, 3), o.one());
    let mut g = c.benchmark_group("cocycle");
    g.sample_size(10);
    g.bench_function("phi", |b| b.iter(|| phi(black_box(&m), &lc).unwrap()));
    g.bench_function("phi_n", |b| b.iter(|| phi_n0(black_box(&mn), &lev, &lc).unwrap()));
    g.finish();
}

fn h_series(c: &mut Criterion) {
    let lc = constants(128);
    let params = lc.params().with_target(1e-20);
    let u = Point3::from_f64(lc.working_prec(), 0.1, 0.2, 0.9).unwrap();
    // warm the divisor table outside the timed loop
    lc.h_value(&u, &params).unwrap();
    let mut g = c.benchmark_group("h");
    g.sample_size(10);
    g.bench_function("h_value", |b| b.iter(|| lc.h_value(black_box(&u), &params).unwrap()));
    g.finish();
}

criterion_group!(benches, e1, dedekind, cocycle, h_series);
criterion_main!(benches);
