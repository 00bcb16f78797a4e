//! The benchmarking protocol: plans, sequence assembly, and noisy execution.
//!
//! A benchmark run is organized as a grid over `(j, l_k, m)`: `j` indexes an
//! independent random computational-gate sequence, `l_k` a truncation length,
//! and `m` a Pauli randomization of that truncation.  Every random choice is
//! drawn from a stream derived from the plan's master seed and the indices it
//! belongs to, so plans and runs are reproducible and independent of execution
//! order.
//!
//! One convention is load-bearing enough to state here: the decay fit's length
//! variable counts *randomized computational gates including the closing
//! pulse*, i.e. a sequence truncated at `l_k` contributes the regressor
//! `l = l_k + 1`.  Preparation, the initial Pauli pulse, and measurement are
//! absorbed by the fit's offset parameter instead.

pub mod label;
pub mod plan;
pub mod run;
pub mod sequence;
pub mod two_qubit;

pub use label::{
    all_pulse_labels, sample_computational_gates, sample_pauli_pulses, PulseClass, PulseLabel,
};
pub use plan::{generate_plan, BenchmarkPlan};
pub use run::{run_sequence, wrong_probability};
pub use sequence::{assemble_sequence, closing_gate, SequenceSpec};
pub use two_qubit::{
    generate_two_qubit_plan, run_two_qubit_sequence, LayerKind, TwoQubitLayer,
    TwoQubitSequenceSpec,
};
