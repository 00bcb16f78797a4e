//! End-to-end timings for the four pipeline stages.
//!
//! Run with `cargo bench -p rbsim-bench`.  Each benchmark isolates one stage
//! and feeds it the same inputs the command-line pipeline would: the
//! standard 544-sequence plan, full-scale shot counts, and the record set
//! the execution stage emits.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use rbsim_bench::{representative_model, standard_records};
use rbsim_core::estimator::{bootstrap_epg, fit_records};
use rbsim_core::protocol::{generate_plan, run_sequence};
use rbsim_core::BenchmarkPlan;

/// Assembling the standard plan: 544 randomized sequences with their
/// closing pulses and expected outcomes.
fn plan_generation(c: &mut Criterion) {
    let plan = BenchmarkPlan::standard(11);
    c.bench_function("generate_standard_plan", |b| {
        b.iter(|| generate_plan(black_box(&plan)).expect("plan generates"));
    });
}

/// Executing one longest-length sequence at full shot count — the unit of
/// work the run stage parallelizes over.
fn sequence_execution(c: &mut Criterion) {
    let plan = BenchmarkPlan {
        lengths: vec![96],
        n_gate_sequences: 1,
        n_randomizations: 1,
        ..BenchmarkPlan::standard(7)
    };
    let spec = generate_plan(&plan).expect("plan generates").remove(0);
    let model = representative_model();
    c.bench_function("run_longest_sequence_8160_shots", |b| {
        b.iter(|| {
            run_sequence(
                black_box(&spec),
                black_box(&model),
                plan.shots,
                plan.batches,
                plan.seed,
            )
            .expect("execution succeeds")
        });
    });
}

/// Aggregating and fitting the decay curve from a full record set.
fn decay_fit(c: &mut Criterion) {
    let records = standard_records(5);
    c.bench_function("fit_full_record_set", |b| {
        b.iter(|| fit_records(black_box(&records)).expect("fit converges"));
    });
}

/// Bootstrap resampling of the error per gate (100 resamples, each a full
/// re-aggregate and refit).
fn bootstrap(c: &mut Criterion) {
    let records = standard_records(5);
    c.bench_function("bootstrap_100_resamples", |b| {
        b.iter(|| {
            bootstrap_epg(black_box(&records), 100, 5)
                .expect("bootstrap succeeds")
        });
    });
}

criterion_group!(
    pipeline,
    plan_generation,
    sequence_execution,
    decay_fit,
    bootstrap
);
criterion_main!(pipeline);
