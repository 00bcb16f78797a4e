//! Direct error-characterization experiments that cross-check the benchmark.
//!
//! A randomized-benchmarking fit compresses everything into one error per
//! gate; these experiments measure the individual ingredients and express
//! each as a contribution per randomized step so the numbers can be compared
//! side by side:
//!
//! * [`ramsey_refocused`] — a spin-echo Ramsey scan; slow frequency drift
//!   cancels, so the decay isolates irreversible dephasing;
//! * [`ramsey_unrefocused`] — the same scan without the echo, exposing the
//!   drift the echo hides;
//! * [`spont_ratio`] — the ratio of a beams-on echo scan to a reference scan,
//!   isolating depolarization from scattered drive light;
//! * [`rabi_flop`] — continuous driving, whose envelope decay and pulse-time
//!   miscalibration bound the control-error budget.
//!
//! Every report converts a fitted decay rate γ into a per-step error
//! probability as `(1 − e^{−γ·τ_step})/2`, where `τ_step` is the mean
//! duration of one randomized gate under the noise model's pulse durations.
//! The conversion is a convention (a step is "one average gate's worth of
//! time"), so each report records it in its notes.
//!
//! [`ramsey_refocused`]: ramsey::ramsey_refocused
//! [`ramsey_unrefocused`]: ramsey::ramsey_unrefocused
//! [`spont_ratio`]: spont::spont_ratio
//! [`rabi_flop`]: rabi::rabi_flop

use crate::error::{Error, Result};

pub mod rabi;
pub mod ramsey;
pub mod spont;

pub use rabi::{rabi_flop, RabiPlan};
pub use ramsey::{ramsey_curve, ramsey_refocused, ramsey_unrefocused, RamseyPlan};
pub use spont::spont_ratio;

/// Which characterization experiment a report came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExperimentKind {
    RamseyRefocused,
    RamseyUnrefocused,
    SpontRatio,
    RabiFlop,
}

impl std::fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ExperimentKind::RamseyRefocused => "ramsey-refocused",
            ExperimentKind::RamseyUnrefocused => "ramsey-unrefocused",
            ExperimentKind::SpontRatio => "spont-ratio",
            ExperimentKind::RabiFlop => "rabi-flop",
        })
    }
}

/// The distilled result of one characterization experiment.
#[derive(Clone, Debug)]
pub struct CharacterizationReport {
    pub kind: ExperimentKind,
    /// Named fitted parameters (rates in 1/μs, times in μs).
    pub parameters: Vec<(String, f64)>,
    /// Inferred error probability per randomized benchmark step.
    pub per_step_contribution: f64,
    /// Time window (μs) the fit was restricted to.
    pub window: (f64, f64),
    /// Mean randomized-gate duration (μs) used for the rate conversion.
    pub tau_step: f64,
    /// Free-form remarks: the conversion convention, excluded points, and
    /// degenerate-fit flags.
    pub notes: Vec<String>,
}

impl CharacterizationReport {
    /// Builds a report, rejecting contributions outside `[0, 1]` — a fitted
    /// decay cannot remove more than all of the signal.
    pub fn new(
        kind: ExperimentKind,
        parameters: Vec<(String, f64)>,
        per_step_contribution: f64,
        window: (f64, f64),
        tau_step: f64,
        mut notes: Vec<String>,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&per_step_contribution) {
            return Err(Error::FitFailed(format!(
                "per-step contribution {per_step_contribution} outside [0, 1]"
            )));
        }
        notes.push(format!(
            "conversion: per-step contribution = (1 - exp(-rate*tau_step))/2 \
             with tau_step = {tau_step} us (mean randomized-gate duration)"
        ));
        Ok(CharacterizationReport {
            kind,
            parameters,
            per_step_contribution,
            window,
            tau_step,
            notes,
        })
    }

    /// Looks up a fitted parameter by name.
    pub fn parameter(&self, name: &str) -> Option<f64> {
        self.parameters.iter().find(|(n, _)| n == name).map(|&(_, v)| v)
    }
}
