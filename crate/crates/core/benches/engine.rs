use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tvg_twins::compare::{batch_compare, BatchSpec};
use tvg_twins::oracle::all_windows_with;
use tvg_twins::sketch::{build_sketch, estimate_intersection, SketchParams};
use tvg_twins::tvg::generate_random;
use tvg_twins::{run, Execution, NodeId, ProblemParams, RunConfig};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn protocol_run(c: &mut Criterion) {
    let mut group = c.benchmark_group("run");
    for (n, p) in [(40, 8), (120, 6)] {
        let g = generate_random(n, p, 0.2, None, 7).unwrap();
        let params = ProblemParams::new(3, 2, p).unwrap();
        let sp = SketchParams::calibrated(0.2, 0.1, 7).unwrap();
        for (mode, exec) in MODES {
            let exact = RunConfig::exact(params).with_execution(exec);
            group.bench_with_input(BenchmarkId::new(format!("exact/{mode}"), n), &g, |b, g| {
                b.iter(|| run(black_box(g), &exact).unwrap())
            });
            let sketch = RunConfig::sketch(params, sp).with_execution(exec);
            group.bench_with_input(BenchmarkId::new(format!("sketch/{mode}"), n), &g, |b, g| {
                b.iter(|| run(black_box(g), &sketch).unwrap())
            });
        }
    }
    group.finish();
}

fn oracle_windows(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle");
    for n in [40, 120] {
        let g = generate_random(n, 8, 0.2, None, 11).unwrap();
        let params = ProblemParams::new(4, 2, 8).unwrap();
        for (mode, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(mode, n), &g, |b, g| {
                b.iter(|| all_windows_with(black_box(g), &params, exec))
            });
        }
    }
    group.finish();
}

fn batch(c: &mut Criterion) {
    let mut group = c.benchmark_group("batch_compare");
    group.sample_size(10);
    let spec = BatchSpec {
        n: 20,
        p: 6,
        edge_prob: 0.3,
        trials: 32,
    };
    let params = ProblemParams::new(3, 1, 6).unwrap();
    for (mode, exec) in MODES {
        let cfg = RunConfig::exact(params).with_execution(exec);
        group.bench_function(mode, |b| b.iter(|| batch_compare(black_box(&spec), &cfg).unwrap()));
    }
    group.finish();
}

fn sketch_trials(c: &mut Criterion) {
    let mut group = c.benchmark_group("sketch_monte_carlo");
    group.sample_size(10);
    let trial = |i: usize| {
        let mut rng = ChaCha8Rng::seed_from_u64(i as u64);
        let ids: Vec<NodeId> = sample(&mut rng, 1 << 20, 700)
            .into_iter()
            .map(|x| NodeId(x as u32))
            .collect();
        let sp = SketchParams::calibrated(0.2, 0.1, i as u64).unwrap();
        let a = build_sketch(ids[..400].iter().copied(), &sp);
        let b = build_sketch(ids[200..].iter().copied(), &sp);
        estimate_intersection(&a, &b).unwrap()
    };
    for (mode, exec) in MODES {
        group.bench_function(mode, |b| b.iter(|| exec.map_range(0..1000, trial)));
    }
    group.finish();
}

criterion_group!(benches, protocol_run, oracle_windows, batch, sketch_trials);
criterion_main!(benches);
