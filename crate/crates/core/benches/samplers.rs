use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ferl::ising::TfimParameters;
use ferl::par::with_jobs;
use ferl::sampler::{sa_sample, sqa_sample, AnnealSchedule};
use ferl::topology::NetworkTopology;

// Parallel runs use every available core; without the `parallel` feature
// both variants take the sequential path.
fn job_counts() -> [(&'static str, usize); 2] {
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    [("sequential", 1), ("parallel", cores)]
}

fn samplers(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let net = NetworkTopology::chimera_two_cell().init_weights(&mut rng, 0.5).unwrap();
    let model = net.clamp_indices(3, 1).unwrap();
    let (ising, _) = model.binary_as_ising();
    let sa_schedule = AnnealSchedule::linear(100, 0.1, 2.0).unwrap();
    let params = TfimParameters::new(0.5, 2.0, 8).unwrap();
    let sqa_schedule = AnnealSchedule::linear(50, 8.0, 0.5).unwrap();

    let mut group = c.benchmark_group("sa_100_reads");
    for (name, jobs) in job_counts() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &jobs, |b, &jobs| {
            b.iter(|| {
                with_jobs(jobs, || {
                    let mut rng = ChaCha8Rng::seed_from_u64(1);
                    black_box(sa_sample(&ising, &sa_schedule, 100, &mut rng).unwrap())
                })
            })
        });
    }
    group.finish();

    let mut group = c.benchmark_group("sqa_32_reads");
    for (name, jobs) in job_counts() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &jobs, |b, &jobs| {
            b.iter(|| {
                with_jobs(jobs, || {
                    let mut rng = ChaCha8Rng::seed_from_u64(1);
                    black_box(sqa_sample(&model, &params, &sqa_schedule, 32, &mut rng).unwrap())
                })
            })
        });
    }
    group.finish();
}

criterion_group!(benches, samplers);
criterion_main!(benches);
