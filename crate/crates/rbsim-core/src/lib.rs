//! Simulation and estimation toolkit for randomized benchmarking of quantum gates.
//!
//! The crate covers the full loop of a randomized benchmarking experiment:
//!
//! * [`sim`] — exact one/two-qubit states and Pauli-transfer-matrix channels,
//!   with composition, twirling, and positivity diagnostics;
//! * [`stabilizer`] — integer-exact Pauli-frame and stabilizer-tableau tracking
//!   used for sequence bookkeeping and closing-gate selection;
//! * [`noise`] — a parametric error model (depolarization, coherent control
//!   errors, dephasing, quasi-static drifts, spontaneous emission, SPAM) that
//!   compiles pulse labels into channels;
//! * [`protocol`] — benchmark plan generation, sequence assembly, and noisy
//!   execution with shot sampling;
//! * [`estimator`] — aggregation, weighted decay fitting, bootstrap errors, and
//!   scatter diagnostics that turn records into an error-per-gate number;
//! * [`calibration`] — the supporting characterization experiments (Ramsey
//!   with and without refocusing, spontaneous-emission ratio, Rabi flopping).
//!
//! All functions are deterministic given a master seed; random streams are
//! derived per purpose and index in [`rng`], so results do not depend on
//! execution order or thread count.

pub mod calibration;
pub mod error;
pub mod estimator;
pub mod noise;
pub mod protocol;
pub mod rng;
pub mod sim;
pub mod stabilizer;

pub use calibration::{CharacterizationReport, ExperimentKind, RabiPlan, RamseyPlan};
pub use error::{Error, Result};
pub use estimator::{
    Aggregates, Bootstrap, DampedCosineFit, DecayFit, DecayOrder, ExperimentRecord,
    ExponentialFit, LengthSummary, ScatterClass, ScatterReport,
};
pub use noise::{ExperimentContext, NoiseModel, Waveform};
pub use protocol::{
    BenchmarkPlan, PulseClass, PulseLabel, SequenceSpec, TwoQubitSequenceSpec,
};
pub use sim::{Axis, BlochState, Channel, DensityMatrix, Rotation, Sign};
