//! Shared fixtures for the pipeline benchmarks.
//!
//! The benchmarks time the four stages that dominate real use — sequence
//! generation, noisy execution, decay fitting, and bootstrap resampling —
//! so the fixtures here build the same artifacts the stages exchange: a
//! standard benchmark plan and a fully executed record set.

use rbsim_core::protocol::{generate_plan, run_sequence};
use rbsim_core::{BenchmarkPlan, ExperimentRecord, NoiseModel};

/// A representative noise model: depolarization at roughly the strength the
/// full-scale round trip injects, plus a readout flip for a non-zero
/// length-independent offset.
pub fn representative_model() -> NoiseModel {
    let mut model = NoiseModel::default();
    model.depol_per_gate = 0.00964;
    model.meas_flip = 0.005;
    model
}

/// Executes the full standard plan serially and returns its records, sorted
/// the way the command-line pipeline writes them.
pub fn standard_records(seed: u64) -> Vec<ExperimentRecord> {
    let plan = BenchmarkPlan::standard(seed);
    let model = representative_model();
    let mut records: Vec<ExperimentRecord> = generate_plan(&plan)
        .expect("standard plan generates")
        .iter()
        .map(|spec| {
            run_sequence(spec, &model, plan.shots, plan.batches, plan.seed)
                .expect("execution succeeds")
        })
        .collect();
    records.sort_by_key(|r| (r.j, r.l_k, r.m));
    records
}
