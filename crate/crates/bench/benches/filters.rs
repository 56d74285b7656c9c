use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use sparse_afe::signal::{generate_input_sequence, trial_rng};
use sparse_afe::{table_presets, FilterState};

fn filter_steps(c: &mut Criterion) {
    let samples = 4096;
    let mut rng = trial_rng(1, 0);
    let x = generate_input_sequence(samples, &mut rng).unwrap();
    let d = generate_input_sequence(samples, &mut rng).unwrap();

    let mut group = c.benchmark_group("step");
    group.throughput(Throughput::Elements(samples as u64));
    for taps in [16, 64] {
        for entry in table_presets(4).unwrap() {
            group.bench_with_input(BenchmarkId::new(entry.label.clone(), taps), &taps, |b, &taps| {
                b.iter(|| {
                    let mut state = FilterState::new(taps, &entry.spec);
                    for (x, d) in x.iter().zip(&d) {
                        state = state.step(*x, *d * 1e-3, &entry.spec).unwrap().0;
                    }
                    black_box(state)
                })
            });
        }
    }
    group.finish();
}

criterion_group!(benches, filter_steps);
criterion_main!(benches);
