//! Sequential against rayon execution of the two data-parallel hot paths.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dacqo::counterdiabatic::Schedule;
use dacqo::problem::{brute_force_ground_state, brute_force_ground_state_with, random_spin_glass, InstanceClass, IsingProblem};
use dacqo::simulator::{NoiseModel, Simulator};
use dacqo::synthesis::synthesize_homogeneous;
use dacqo::Execution;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn trajectories(c: &mut Criterion) {
    let p = IsingProblem::homogeneous(8, -1.0, 0.5).unwrap();
    let circuit = synthesize_homogeneous(&p, &Schedule::standard(1.0, 4).unwrap(), 4).unwrap();
    let truth = brute_force_ground_state(&p).unwrap();
    let noise = NoiseModel::new(0.05, 0.001, 1).unwrap();
    let mut group = c.benchmark_group("trajectories_n8_x64");
    group.sample_size(10);
    for (name, exec) in MODES {
        let sim = Simulator::new(noise, 64).execution(exec);
        group.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| black_box(sim.run(&circuit, &truth).unwrap())));
    }
    group.finish();
}

fn brute_force(c: &mut Criterion) {
    let p = random_spin_glass(18, 3, InstanceClass::FullyNonuniform).unwrap();
    let mut group = c.benchmark_group("brute_force_n18");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| black_box(brute_force_ground_state_with(&p, exec).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, trajectories, brute_force);
criterion_main!(benches);
