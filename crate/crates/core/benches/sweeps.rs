//! Rayon vs sequential on the two embarrassingly parallel workloads:
//! a potential sweep over a log grid and a scan of the shooting function.
//! With `--no-default-features` both arms run sequentially.

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use gcalabi::matching;
use gcalabi::par;
use gcalabi::potential::{self, ModelParams};

fn nama_sweep(c: &mut Criterion) {
    let params = ModelParams::new(3, 1, 2).unwrap();
    let sol = matching::matched_solution(3, 1e-3, 1e-9).unwrap();
    let mut group = c.benchmark_group("nama_sweep");
    for size in [32, 128] {
        let pts = potential::log_grid(&params, (10.0, 1e4), (0.05, 20.0), size);
        let eval = |&(x1, x2): &(f64, f64)| {
            let s = potential::sample_potential(&params, &sol, x1, x2).unwrap();
            potential::nama_relative_residual(&s, &params)
        };
        group.bench_with_input(BenchmarkId::new("par", size * size), &pts, |b, pts| {
            b.iter(|| black_box(par::map(pts, eval)))
        });
        group.bench_with_input(BenchmarkId::new("seq", size * size), &pts, |b, pts| {
            b.iter(|| black_box(par::map_seq(pts, eval)))
        });
    }
    group.finish();
}

fn phi_scan(c: &mut Criterion) {
    let w0s: Vec<f64> = (0..32).map(|k| 0.2 * 25f64.powf(k as f64 / 31.0)).collect();
    let phi = |&w0: &f64| matching::shooting_function(4, w0, 1e-10).ok();
    let mut group = c.benchmark_group("phi_scan");
    group.sample_size(20);
    group.bench_function("par", |b| b.iter(|| black_box(par::map(&w0s, phi))));
    group.bench_function("seq", |b| b.iter(|| black_box(par::map_seq(&w0s, phi))));
    group.finish();
}

criterion_group!(benches, nama_sweep, phi_scan);
criterion_main!(benches);
