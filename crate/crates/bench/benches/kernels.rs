use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use packlab::fourier::incidence_via_fourier;
use packlab::groups::enumerate_sl2;
use packlab::h1_incidence::{count_incidences_h1, count_nprime};
use packlab::packing::image_set;
use packlab::sl2_incidence::{count_incidences, energy1, energy2};
use packlab::FieldCtx;
use packlab_bench::{h1_inputs, sl2_inputs};

fn enumerate(c: &mut Criterion) {
    let mut g = c.benchmark_group("enumerate_sl2");
    for p in [31u64, 61, 101] {
        let ctx = FieldCtx::new(p).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(p), &ctx, |bch, ctx| {
            bch.iter(|| enumerate_sl2(ctx, 128).unwrap().len())
        });
    }
    g.finish();
}

fn incidences(c: &mut Criterion) {
    let mut g = c.benchmark_group("count_incidences");
    for (p, n, m) in [(31u64, 200, 200), (101, 2000, 500)] {
        let inp = sl2_inputs(p, n, m, 1);
        g.bench_function(BenchmarkId::new("sl2", format!("p{p}")), |bch| {
            bch.iter(|| count_incidences(&inp.ctx, &inp.a, &inp.b, &inp.s).unwrap())
        });
    }
    let inp = h1_inputs(23, 1000, 400, 2);
    g.bench_function("h1/p23", |bch| {
        bch.iter(|| count_incidences_h1(&inp.ctx, &inp.a, &inp.b, &inp.x).unwrap())
    });
    g.finish();
}

fn energies(c: &mut Criterion) {
    let inp = sl2_inputs(31, 300, 300, 3);
    c.bench_function("energy1/p31", |bch| {
        bch.iter(|| energy1(&inp.ctx, &inp.a, &inp.b))
    });
    c.bench_function("energy2/p31", |bch| bch.iter(|| energy2(&inp.ctx, &inp.s)));
}

fn images(c: &mut Criterion) {
    let inp = sl2_inputs(101, 1000, 1000, 4);
    c.bench_function("image_set/p101", |bch| {
        bch.iter(|| image_set(&inp.ctx, &inp.s, &inp.a).unwrap().len())
    });
}

fn nprime(c: &mut Criterion) {
    let inp = h1_inputs(31, 2000, 1, 5);
    c.bench_function("count_nprime/p31", |bch| {
        bch.iter(|| count_nprime(&inp.ctx, black_box(&inp.a), &inp.b))
    });
}

fn fourier(c: &mut Criterion) {
    let inp = sl2_inputs(13, 60, 100, 6);
    c.bench_function("fourier_incidence/p13", |bch| {
        bch.iter(|| incidence_via_fourier(&inp.ctx, &inp.a, &inp.b, &inp.s).unwrap())
    });
}

criterion_group!(benches, enumerate, incidences, energies, images, nprime, fourier);
criterion_main!(benches);
