//! Run configuration: a sectioned key/value file, strict about typos.
//!
//! The format is TOML with three always-relevant sections — `[plan]`,
//! `[noise]`, `[output]` — plus `[fit]` and `[calibration]` for the analysis
//! and characterization commands.  Unknown keys anywhere are hard errors so
//! a misspelled noise parameter cannot silently run as zero noise.  The seed
//! is mandatory: every run must be reproducible from its config file alone.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use rbsim_core::calibration::{RabiPlan, RamseyPlan};
use rbsim_core::noise::QuasiStaticDetuning;
use rbsim_core::{BenchmarkPlan, NoiseModel, Waveform};

use crate::{CliError, CliResult};

/// The 17 truncation lengths of the standard single-qubit run.
pub const STANDARD_LENGTHS: [usize; 17] =
    [2, 3, 4, 5, 6, 8, 10, 12, 16, 20, 24, 32, 40, 48, 64, 80, 96];

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub plan: PlanSection,
    #[serde(default)]
    pub noise: NoiseSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub fit: FitSection,
    #[serde(default)]
    pub calibration: CalibrationSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanSection {
    /// Master seed of every random stream; no default on purpose.
    pub seed: u64,
    #[serde(default = "default_lengths")]
    pub lengths: Vec<usize>,
    #[serde(default = "default_gate_sequences")]
    pub gate_sequences: usize,
    #[serde(default = "default_randomizations")]
    pub randomizations: usize,
    #[serde(default = "default_shots")]
    pub shots: usize,
    #[serde(default = "default_batches")]
    pub batches: usize,
    #[serde(default = "default_qubits")]
    pub qubits: usize,
}

fn default_lengths() -> Vec<usize> {
    STANDARD_LENGTHS.to_vec()
}
fn default_gate_sequences() -> usize {
    4
}
fn default_randomizations() -> usize {
    8
}
fn default_shots() -> usize {
    8160
}
fn default_batches() -> usize {
    4
}
fn default_qubits() -> usize {
    1
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    #[serde(default)]
    pub depol_per_gate: f64,
    #[serde(default)]
    pub depol_per_pauli: f64,
    #[serde(default)]
    pub depol_per_step_2q: f64,
    #[serde(default)]
    pub overrotation: f64,
    #[serde(default)]
    pub axis_tilt: f64,
    #[serde(default)]
    pub dephasing_rate: f64,
    #[serde(default)]
    pub detuning_amplitude: f64,
    /// `"constant"` or `"sinusoidal"`.
    #[serde(default)]
    pub detuning_waveform: Option<String>,
    #[serde(default)]
    pub amplitude_fluctuation: f64,
    #[serde(default)]
    pub spont_rate: f64,
    #[serde(default)]
    pub prep_flip: f64,
    #[serde(default)]
    pub meas_flip: f64,
    pub t_pi2: Option<f64>,
    pub t_pi: Option<f64>,
    pub t_z: Option<f64>,
    pub t_identity: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_directory")]
    pub directory: PathBuf,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { directory: default_directory() }
    }
}

fn default_directory() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSection {
    #[serde(default = "default_resamples")]
    pub bootstrap_resamples: usize,
}

impl Default for FitSection {
    fn default() -> Self {
        FitSection { bootstrap_resamples: default_resamples() }
    }
}

fn default_resamples() -> usize {
    1000
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationSection {
    /// Which characterization experiment `calibrate` runs:
    /// ramsey-refocused | ramsey-unrefocused | spont-ratio | rabi.
    #[serde(default)]
    pub experiment: Option<String>,
    pub shots: Option<usize>,
    pub batches: Option<usize>,
    /// Delay grid override for the Ramsey experiments, μs.
    pub delays: Option<Vec<f64>>,
    /// Duration grid override for the Rabi experiment, μs.
    pub durations: Option<Vec<f64>>,
    /// Fit window override, μs.
    pub window: Option<[f64; 2]>,
    pub pulse_time_offset: Option<f64>,
    pub rabi_frequency: Option<f64>,
}

impl RunConfig {
    /// Parses and validates a config file; `seed` and `out` override the
    /// file's values (the command line wins).
    pub fn load(
        path: &Path,
        seed_override: Option<u64>,
        out_override: Option<PathBuf>,
    ) -> CliResult<(RunConfig, String)> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Usage(format!("cannot read config {}: {e}", path.display()))
        })?;
        let hash = config_hash(&text);
        let mut config: RunConfig = toml::from_str(&text).map_err(|e| {
            CliError::Usage(format!("invalid config {}: {e}", path.display()))
        })?;
        if let Some(seed) = seed_override {
            config.plan.seed = seed;
        }
        if let Some(out) = out_override {
            config.output.directory = out;
        }
        config.validate()?;
        Ok((config, hash))
    }

    fn validate(&self) -> CliResult<()> {
        self.benchmark_plan()
            .validate()
            .map_err(|e| CliError::Usage(format!("invalid [plan]: {e}")))?;
        let model = self.noise_model()?;
        let issues = model.validate();
        if !issues.is_empty() {
            return Err(CliError::Usage(format!(
                "invalid [noise]: {}",
                issues.join("; ")
            )));
        }
        if self.fit.bootstrap_resamples < 100 {
            return Err(CliError::Usage(
                "invalid [fit]: bootstrap_resamples must be ≥ 100".into(),
            ));
        }
        Ok(())
    }

    pub fn benchmark_plan(&self) -> BenchmarkPlan {
        BenchmarkPlan {
            lengths: self.plan.lengths.clone(),
            n_gate_sequences: self.plan.gate_sequences,
            n_randomizations: self.plan.randomizations,
            shots: self.plan.shots,
            batches: self.plan.batches,
            qubits: self.plan.qubits,
            seed: self.plan.seed,
        }
    }

    pub fn noise_model(&self) -> CliResult<NoiseModel> {
        let n = &self.noise;
        let defaults = NoiseModel::default();
        let waveform = match n.detuning_waveform.as_deref() {
            None => Waveform::Constant,
            Some(s) => s
                .parse()
                .map_err(|e| CliError::Usage(format!("invalid [noise]: {e}")))?,
        };
        Ok(NoiseModel {
            depol_per_gate: n.depol_per_gate,
            depol_per_pauli: n.depol_per_pauli,
            depol_per_step_2q: n.depol_per_step_2q,
            overrotation: n.overrotation,
            axis_tilt: n.axis_tilt,
            dephasing_rate: n.dephasing_rate,
            detuning: QuasiStaticDetuning {
                amplitude: n.detuning_amplitude,
                waveform,
            },
            amplitude_fluctuation: n.amplitude_fluctuation,
            spont_rate: n.spont_rate,
            prep_flip: n.prep_flip,
            meas_flip: n.meas_flip,
            t_pi2: n.t_pi2.unwrap_or(defaults.t_pi2),
            t_pi: n.t_pi.unwrap_or(defaults.t_pi),
            t_z: n.t_z.unwrap_or(defaults.t_z),
            t_identity: n.t_identity.unwrap_or(defaults.t_identity),
        })
    }

    /// The Ramsey plan for the configured model, with `[calibration]`
    /// overrides applied.
    pub fn ramsey_plan(&self, refocused: bool, beams: bool) -> CliResult<RamseyPlan> {
        let model = self.noise_model()?;
        let mut plan = if refocused {
            RamseyPlan::standard_refocused(model, self.plan.seed)
        } else {
            RamseyPlan::standard_unrefocused(model, self.plan.seed)
        };
        plan.beams = beams;
        let c = &self.calibration;
        if let Some(delays) = &c.delays {
            plan.delays = delays.clone();
        }
        if let Some(shots) = c.shots {
            plan.shots = shots;
        }
        if let Some(batches) = c.batches {
            plan.batches = batches;
        }
        if let Some(window) = c.window {
            plan.window = (window[0], window[1]);
        }
        Ok(plan)
    }

    /// The Rabi plan for the configured model, with `[calibration]`
    /// overrides applied.
    pub fn rabi_plan(&self) -> CliResult<RabiPlan> {
        let model = self.noise_model()?;
        let mut plan = RabiPlan::standard(model, self.plan.seed);
        let c = &self.calibration;
        if let Some(durations) = &c.durations {
            plan.durations = durations.clone();
        }
        if let Some(shots) = c.shots {
            plan.shots = shots;
        }
        if let Some(batches) = c.batches {
            plan.batches = batches;
        }
        if let Some(window) = c.window {
            plan.window = (window[0], window[1]);
        }
        if let Some(offset) = c.pulse_time_offset {
            plan.pulse_time_offset = offset;
        }
        if let Some(frequency) = c.rabi_frequency {
            plan.rabi_frequency = frequency;
        }
        Ok(plan)
    }
}

/// First 16 hex digits of the SHA-256 of the config file text; embedded in
/// every output file so artifacts can be traced back to their exact
/// configuration.
pub fn config_hash(text: &str) -> String {
    use sha2::{Digest, Sha256};
    let digest = Sha256::digest(text.as_bytes());
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}
