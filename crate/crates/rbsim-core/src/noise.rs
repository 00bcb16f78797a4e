//! Parametric error model compiled per pulse label into channels.
//!
//! The model distinguishes three kinds of mechanism:
//!
//! * **per-slot depolarization** — [`NoiseModel::depol_per_gate`] is charged on
//!   every π/2 slot (computational and closing) and
//!   [`NoiseModel::depol_per_pauli`] on every Pauli slot, *including* identity
//!   and z-axis labels.  Charging uniformly per slot keeps the sequence-level
//!   decay exactly product-form, so the two-parameter decay model and
//!   [`NoiseModel::effective_dif`] are exact rather than label-averaged;
//! * **coherent control errors** — overrotation, axis tilt, and amplitude
//!   fluctuation apply only to physically driven x/y pulses.  z-axis pulses and
//!   the identity slot are frame changes or delays: they get no drive error
//!   and no beam exposure;
//! * **duration-proportional noise** — dephasing and quasi-static detuning act
//!   for each pulse's duration (and during explicit delays).  They are applied
//!   symmetrically, half before and half after the rotation, so that a
//!   constant detuning is refocused *exactly* by a spin-echo sequence
//!   regardless of pulse durations.
//!
//! Quasi-static parameters (detuning, amplitude factor) are sampled once per
//! shot batch into an [`ExperimentContext`] and held fixed within the batch:
//! stationary within a batch, intentionally not memoryless across batches.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::protocol::{PulseClass, PulseLabel};
use crate::sim::{Axis, Channel};
use std::f64::consts::TAU;

/// How the quasi-static detuning is drawn for each batch.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Waveform {
    /// A constant offset per batch, Gaussian with standard deviation
    /// `amplitude`.
    Constant,
    /// A slow, unsynchronized sinusoid: each batch samples `amplitude·sin(φ)`
    /// with φ uniform — the arcsine law over `[-amplitude, amplitude]`.
    Sinusoidal,
}

impl std::fmt::Display for Waveform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Waveform::Constant => "constant",
            Waveform::Sinusoidal => "sinusoidal",
        })
    }
}

impl std::str::FromStr for Waveform {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "constant" => Ok(Waveform::Constant),
            "sinusoidal" => Ok(Waveform::Sinusoidal),
            _ => Err(Error::InvalidParameter(format!(
                "unknown detuning waveform {s:?} (expected constant|sinusoidal)"
            ))),
        }
    }
}

/// Distribution of the slowly drifting frequency offset.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuasiStaticDetuning {
    /// Scale in rad/μs: standard deviation for [`Waveform::Constant`], peak
    /// value for [`Waveform::Sinusoidal`].
    pub amplitude: f64,
    pub waveform: Waveform,
}

impl QuasiStaticDetuning {
    pub fn none() -> Self {
        QuasiStaticDetuning { amplitude: 0.0, waveform: Waveform::Constant }
    }
}

/// Quasi-static parameters held fixed for one batch of repetitions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExperimentContext {
    /// Frequency offset in rad/μs, entering as a z rotation over durations.
    pub detuning: f64,
    /// Multiplier on every driven pulse's rotation angle (1.0 = calibrated).
    pub amp_factor: f64,
}

impl ExperimentContext {
    /// The noise-free context.
    pub fn ideal() -> Self {
        ExperimentContext { detuning: 0.0, amp_factor: 1.0 }
    }

    /// Draws a batch context.  The detuning is drawn first, then the amplitude
    /// factor, so streams replay identically.
    pub fn sample<R: Rng>(model: &NoiseModel, rng: &mut R) -> Self {
        let detuning = match model.detuning.waveform {
            _ if model.detuning.amplitude == 0.0 => 0.0,
            Waveform::Constant => {
                let gauss = Normal::new(0.0, model.detuning.amplitude)
                    .expect("validated amplitude");
                gauss.sample(rng)
            }
            Waveform::Sinusoidal => {
                model.detuning.amplitude * rng.random_range(0.0..TAU).sin()
            }
        };
        let amp_factor = if model.amplitude_fluctuation == 0.0 {
            1.0
        } else {
            let gauss = Normal::new(1.0, model.amplitude_fluctuation)
                .expect("validated fluctuation");
            gauss.sample(rng)
        };
        ExperimentContext { detuning, amp_factor }
    }
}

/// Error-model parameters.  All fields default to zero noise; durations
/// default to 1 μs for π/2 pulses, 2 μs for π pulses, 1 μs for z-pulse delays,
/// and 0 for the identity slot.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseModel {
    /// Depolarization probability charged on each π/2 slot.
    pub depol_per_gate: f64,
    /// Depolarization probability charged on each Pauli slot.
    pub depol_per_pauli: f64,
    /// Two-qubit depolarization charged once per computational or closing
    /// layer of a two-qubit sequence.
    pub depol_per_step_2q: f64,
    /// Radians added to every driven pulse's rotation angle.
    pub overrotation: f64,
    /// Rotation of the driven x/y axes about z, in radians.
    pub axis_tilt: f64,
    /// Markovian dephasing rate in 1/μs, acting over pulse and delay durations.
    pub dephasing_rate: f64,
    /// Slow frequency drift, constant within a batch.
    pub detuning: QuasiStaticDetuning,
    /// Relative standard deviation of the Rabi frequency, constant per batch.
    pub amplitude_fluctuation: f64,
    /// Depolarizing rate in 1/μs while the drive beams are on.
    pub spont_rate: f64,
    /// Probability that preparation yields |1⟩ instead of |0⟩.
    pub prep_flip: f64,
    /// Probability that the measured bit is flipped.
    pub meas_flip: f64,
    /// Duration of a driven π/2 pulse, μs.
    pub t_pi2: f64,
    /// Duration of a driven π pulse, μs.
    pub t_pi: f64,
    /// Delay standing in for a z-axis pulse, μs.
    pub t_z: f64,
    /// Duration of the identity Pauli slot, μs (0: the slot is skipped).
    pub t_identity: f64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel {
            depol_per_gate: 0.0,
            depol_per_pauli: 0.0,
            depol_per_step_2q: 0.0,
            overrotation: 0.0,
            axis_tilt: 0.0,
            dephasing_rate: 0.0,
            detuning: QuasiStaticDetuning::none(),
            amplitude_fluctuation: 0.0,
            spont_rate: 0.0,
            prep_flip: 0.0,
            meas_flip: 0.0,
            t_pi2: 1.0,
            t_pi: 2.0,
            t_z: 1.0,
            t_identity: 0.0,
        }
    }
}

impl NoiseModel {
    /// Wall-clock duration of a pulse.
    pub fn duration_of(&self, label: &PulseLabel) -> f64 {
        match label.axis() {
            None => self.t_identity,
            Some(Axis::Z) => self.t_z,
            Some(_) => match label.class() {
                PulseClass::Pauli => self.t_pi,
                _ => self.t_pi2,
            },
        }
    }

    /// Mean duration of one randomized computational gate: the average Pauli
    /// slot (uniform over the four axes) plus the π/2 slot.
    pub fn mean_step_duration(&self) -> f64 {
        (self.t_identity + 2.0 * self.t_pi + self.t_z) / 4.0 + self.t_pi2
    }

    /// Converts a decay rate in 1/μs into an error probability per randomized
    /// gate: `(1 − e^{−rate·τ_step})/2` with `τ_step` the mean step duration.
    pub fn per_step_contribution(&self, rate: f64) -> f64 {
        (1.0 - (-rate * self.mean_step_duration()).exp()) / 2.0
    }

    /// Dephasing and detuning accumulated over `duration` μs (no drive).
    pub fn delay_channel(&self, duration: f64, ctx: &ExperimentContext) -> Result<Channel> {
        if duration == 0.0 || (self.dephasing_rate == 0.0 && ctx.detuning == 0.0) {
            return Ok(Channel::identity(1));
        }
        Channel::z_rotation(ctx.detuning * duration)
            .then(&Channel::dephasing(self.dephasing_rate * duration)?)
    }

    /// Depolarization from spontaneous scattering over `beam_time` μs of beam
    /// exposure.
    pub fn spont_depolarization(&self, beam_time: f64) -> Result<Channel> {
        Channel::depolarizing(1, 1.0 - (-self.spont_rate * beam_time).exp())
    }

    /// Compiles one pulse into its noisy channel under a batch context.
    ///
    /// Duration noise is split symmetrically around the rotation; per-slot
    /// depolarization and beam-time depolarization follow.  Driven pulses get
    /// the coherent control errors; z-axis pulses and the identity slot apply
    /// their ideal action (if any) with duration noise only.
    pub fn channel_for(&self, label: &PulseLabel, ctx: &ExperimentContext) -> Result<Channel> {
        let duration = self.duration_of(label);
        let half = self.delay_channel(duration / 2.0, ctx)?;
        let mut ch = half.clone();
        match label.rotation() {
            Some(rot) if label.is_driven() => {
                let u = rot.axis.unit();
                let (s, c) = self.axis_tilt.sin_cos();
                let axis = [u[0] * c - u[1] * s, u[0] * s + u[1] * c, u[2]];
                let magnitude = rot.angle * ctx.amp_factor + self.overrotation;
                let signed = rot.sign.factor() * magnitude;
                ch = ch.then(&Channel::rotation_about(axis, signed)?)?;
            }
            Some(rot) => {
                ch = ch.then(&Channel::rotation(rot))?;
            }
            None => {}
        }
        ch = ch.then(&half)?;
        let depol = match label.class() {
            PulseClass::Pauli => self.depol_per_pauli,
            PulseClass::Computational | PulseClass::Closing => self.depol_per_gate,
        };
        if depol != 0.0 {
            ch = ch.then(&Channel::depolarizing(1, depol)?)?;
        }
        if self.spont_rate != 0.0 && label.is_driven() && duration > 0.0 {
            ch = ch.then(&self.spont_depolarization(duration)?)?;
        }
        Ok(ch)
    }

    /// Preparation and measurement error channels: a bit flip with probability
    /// `prep_flip` after ideal |0⟩ preparation, and a bit flip with
    /// probability `meas_flip` before ideal σ_z measurement.
    pub fn spam_channels(&self) -> Result<(Channel, Channel)> {
        Ok((Channel::bit_flip(self.prep_flip)?, Channel::bit_flip(self.meas_flip)?))
    }

    fn require_depolarizing_only(&self) -> Result<()> {
        let coherent = self.overrotation != 0.0
            || self.axis_tilt != 0.0
            || self.dephasing_rate != 0.0
            || self.detuning.amplitude != 0.0
            || self.amplitude_fluctuation != 0.0
            || self.spont_rate != 0.0;
        if coherent {
            return Err(Error::InvalidParameter(
                "closed-form decay parameters exist only for depolarizing/SPAM models"
                    .into(),
            ));
        }
        Ok(())
    }

    /// Analytic offset parameter of the decay model for a depolarizing/SPAM
    /// model: combines preparation, the initial Pauli slot, and measurement,
    /// `1 − (1−2·prep_flip)(1−depol_per_pauli)(1−2·meas_flip)`.
    pub fn effective_dif(&self) -> Result<f64> {
        self.require_depolarizing_only()?;
        Ok(1.0
            - (1.0 - 2.0 * self.prep_flip)
                * (1.0 - self.depol_per_pauli)
                * (1.0 - 2.0 * self.meas_flip))
    }

    /// Analytic per-gate decay parameter for a depolarizing/SPAM model: one
    /// π/2 slot and one Pauli slot per randomized gate,
    /// `1 − (1−depol_per_gate)(1−depol_per_pauli)`.
    pub fn effective_decay(&self) -> Result<f64> {
        self.require_depolarizing_only()?;
        Ok(1.0 - (1.0 - self.depol_per_gate) * (1.0 - self.depol_per_pauli))
    }

    /// Checks parameter ranges and the complete positivity of every compiled
    /// channel.  Returns human-readable violations; empty means valid.
    pub fn validate(&self) -> Vec<String> {
        let mut violations = Vec::new();
        let probs = [
            ("depol_per_gate", self.depol_per_gate),
            ("depol_per_pauli", self.depol_per_pauli),
            ("depol_per_step_2q", self.depol_per_step_2q),
            ("prep_flip", self.prep_flip),
            ("meas_flip", self.meas_flip),
        ];
        for (name, p) in probs {
            if !(0.0..=1.0).contains(&p) || !p.is_finite() {
                violations.push(format!("{name} = {p} outside [0, 1]"));
            }
        }
        let nonneg = [
            ("dephasing_rate", self.dephasing_rate),
            ("spont_rate", self.spont_rate),
            ("detuning amplitude", self.detuning.amplitude),
            ("amplitude_fluctuation", self.amplitude_fluctuation),
            ("t_pi2", self.t_pi2),
            ("t_pi", self.t_pi),
            ("t_z", self.t_z),
            ("t_identity", self.t_identity),
        ];
        for (name, v) in nonneg {
            if v < 0.0 || !v.is_finite() {
                violations.push(format!("{name} = {v} must be ≥ 0 and finite"));
            }
        }
        for (name, v) in [("overrotation", self.overrotation), ("axis_tilt", self.axis_tilt)]
        {
            if !v.is_finite() {
                violations.push(format!("{name} = {v} must be finite"));
            }
        }
        if !violations.is_empty() {
            return violations;
        }

        // Ranges are fine; now compile every pulse channel under the ideal and
        // a one-sigma-perturbed context and verify complete positivity.
        let contexts = [
            ExperimentContext::ideal(),
            ExperimentContext {
                detuning: self.detuning.amplitude,
                amp_factor: 1.0 + self.amplitude_fluctuation,
            },
        ];
        for ctx in &contexts {
            for label in crate::protocol::label::all_pulse_labels() {
                match self.channel_for(&label, ctx) {
                    Ok(ch) => {
                        if !ch.is_completely_positive(1e-10) {
                            violations.push(format!(
                                "channel for {label} is not completely positive"
                            ));
                        }
                    }
                    Err(e) => violations.push(format!("channel for {label}: {e}")),
                }
            }
        }
        match self.spam_channels() {
            Ok((prep, meas)) => {
                for (name, ch) in [("preparation", prep), ("measurement", meas)] {
                    if !ch.is_completely_positive(1e-10) {
                        violations
                            .push(format!("{name} channel is not completely positive"));
                    }
                }
            }
            Err(e) => violations.push(format!("SPAM channels: {e}")),
        }
        if self.depol_per_step_2q > 0.0 {
            match Channel::depolarizing(2, self.depol_per_step_2q) {
                Ok(ch) => {
                    if !ch.is_completely_positive(1e-10) {
                        violations.push(
                            "two-qubit step depolarization is not completely positive"
                                .into(),
                        );
                    }
                }
                Err(e) => violations.push(format!("two-qubit step depolarization: {e}")),
            }
        }
        violations
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::label::all_pulse_labels;
    use crate::rng;
    use crate::sim::{BlochState, Rotation, Sign};
    use std::f64::consts::{FRAC_PI_2, PI};

    fn x_half() -> PulseLabel {
        PulseLabel::Computational { axis: Axis::X, sign: Sign::Plus }
    }

    /// Rodrigues rotation of a Bloch vector — the independent oracle for the
    /// driven-pulse unitary.
    fn rodrigues(v: [f64; 3], n: [f64; 3], theta: f64) -> [f64; 3] {
        let (s, c) = theta.sin_cos();
        let cross = [
            n[1] * v[2] - n[2] * v[1],
            n[2] * v[0] - n[0] * v[2],
            n[0] * v[1] - n[1] * v[0],
        ];
        let dot = n[0] * v[0] + n[1] * v[1] + n[2] * v[2];
        [
            v[0] * c + cross[0] * s + n[0] * dot * (1.0 - c),
            v[1] * c + cross[1] * s + n[1] * dot * (1.0 - c),
            v[2] * c + cross[2] * s + n[2] * dot * (1.0 - c),
        ]
    }

    #[test]
    fn zero_noise_compiles_to_the_ideal_rotation() {
        let model = NoiseModel::default();
        let ctx = ExperimentContext::ideal();
        for label in all_pulse_labels() {
            let ch = model.channel_for(&label, &ctx).unwrap();
            let ideal = match label.rotation() {
                Some(rot) => Channel::rotation(rot),
                None => Channel::identity(1),
            };
            assert_eq!(ch.ptm(), ideal.ptm(), "label {label}");
        }
    }

    #[test]
    fn depolarization_composes_after_the_ideal_rotation() {
        let model = NoiseModel { depol_per_gate: 0.02, ..NoiseModel::default() };
        let ctx = ExperimentContext::ideal();
        let label = x_half();
        let ch = model.channel_for(&label, &ctx).unwrap();
        let want = Channel::rotation(label.rotation().unwrap())
            .then(&Channel::depolarizing(1, 0.02).unwrap())
            .unwrap();
        let diff = (ch.ptm() - want.ptm()).abs().max();
        assert!(diff < 1e-12);
    }

    #[test]
    fn overrotation_lengthens_the_rotation_angle() {
        let model = NoiseModel { overrotation: 0.1, ..NoiseModel::default() };
        let ch = model.channel_for(&x_half(), &ExperimentContext::ideal()).unwrap();
        for v in [[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.6, 0.0, 0.8]] {
            let got = ch.apply(&BlochState { x: v[0], y: v[1], z: v[2] });
            let want = rodrigues(v, [1.0, 0.0, 0.0], FRAC_PI_2 + 0.1);
            assert!((got.x - want[0]).abs() < 1e-12);
            assert!((got.y - want[1]).abs() < 1e-12);
            assert!((got.z - want[2]).abs() < 1e-12);
        }
        // A minus-sign pulse overshoots in its own direction.
        let minus = PulseLabel::Computational { axis: Axis::X, sign: Sign::Minus };
        let ch = model.channel_for(&minus, &ExperimentContext::ideal()).unwrap();
        let got = ch.apply(&BlochState::KET_ZERO);
        let want = rodrigues([0.0, 0.0, 1.0], [1.0, 0.0, 0.0], -(FRAC_PI_2 + 0.1));
        assert!((got.y - want[1]).abs() < 1e-12 && (got.z - want[2]).abs() < 1e-12);
    }

    #[test]
    fn axis_tilt_rotates_the_drive_axis_about_z() {
        let tilt = 0.3;
        let model = NoiseModel { axis_tilt: tilt, ..NoiseModel::default() };
        let ch = model.channel_for(&x_half(), &ExperimentContext::ideal()).unwrap();
        let got = ch.apply(&BlochState::KET_ZERO);
        let want =
            rodrigues([0.0, 0.0, 1.0], [tilt.cos(), tilt.sin(), 0.0], FRAC_PI_2);
        assert!((got.x - want[0]).abs() < 1e-12);
        assert!((got.y - want[1]).abs() < 1e-12);
        assert!((got.z - want[2]).abs() < 1e-12);
    }

    #[test]
    fn amplitude_factor_scales_the_angle_of_driven_pulses() {
        let model = NoiseModel::default();
        let ctx = ExperimentContext { detuning: 0.0, amp_factor: 1.1 };
        let label = PulseLabel::Pauli { axis: Some(Axis::Y), sign: Sign::Plus };
        let ch = model.channel_for(&label, &ctx).unwrap();
        let got = ch.apply(&BlochState::KET_ZERO);
        let want = rodrigues([0.0, 0.0, 1.0], [0.0, 1.0, 0.0], 1.1 * PI);
        assert!((got.x - want[0]).abs() < 1e-12);
        assert!((got.z - want[2]).abs() < 1e-12);
    }

    #[test]
    fn z_pulses_get_no_drive_errors_but_do_accrue_detuning() {
        let model = NoiseModel {
            overrotation: 0.5,
            axis_tilt: 0.4,
            amplitude_fluctuation: 0.2,
            ..NoiseModel::default()
        };
        // Drive errors absent: with an ideal context the z Pauli is exact.
        let label = PulseLabel::Pauli { axis: Some(Axis::Z), sign: Sign::Plus };
        let ch = model.channel_for(&label, &ExperimentContext::ideal()).unwrap();
        let ideal = Channel::rotation(Rotation::new(Axis::Z, PI, Sign::Plus));
        assert_eq!(ch.ptm(), ideal.ptm());
        // The amplitude factor must not touch the z rotation either.
        let ctx = ExperimentContext { detuning: 0.3, amp_factor: 1.7 };
        let ch = model.channel_for(&label, &ctx).unwrap();
        let want = ideal.then(&Channel::z_rotation(0.3 * model.t_z)).unwrap();
        let diff = (ch.ptm() - want.ptm()).abs().max();
        assert!(diff < 1e-12, "z rotations commute, so the split order cannot matter");
    }

    #[test]
    fn identity_slot_is_exactly_trivial_at_zero_duration() {
        let model = NoiseModel {
            dephasing_rate: 0.3,
            overrotation: 0.2,
            ..NoiseModel::default()
        };
        let ctx = ExperimentContext { detuning: 0.5, amp_factor: 1.2 };
        let label = PulseLabel::Pauli { axis: None, sign: Sign::Plus };
        let ch = model.channel_for(&label, &ctx).unwrap();
        assert_eq!(ch.ptm(), Channel::identity(1).ptm());

        // With a nonzero slot duration it becomes a pure delay.
        let model = NoiseModel { t_identity: 1.5, ..model };
        let ch = model.channel_for(&label, &ctx).unwrap();
        let want = model.delay_channel(1.5, &ctx).unwrap();
        let diff = (ch.ptm() - want.ptm()).abs().max();
        assert!(diff < 1e-12);
    }

    #[test]
    fn spontaneous_emission_depolarizes_only_driven_pulses() {
        let model = NoiseModel { spont_rate: 0.01, ..NoiseModel::default() };
        let ctx = ExperimentContext::ideal();
        // Driven π pulse: depolarization 1 − e^{−rate·t_pi} on top of the flip.
        let label = PulseLabel::Pauli { axis: Some(Axis::X), sign: Sign::Plus };
        let ch = model.channel_for(&label, &ctx).unwrap();
        let shrink = (-0.01f64 * 2.0).exp();
        let got = ch.apply(&BlochState::KET_ZERO);
        assert!((got.z + shrink).abs() < 1e-12, "pole flipped and shrunk by beam time");
        // z pulse: no beam, no shrink.
        let label = PulseLabel::Pauli { axis: Some(Axis::Z), sign: Sign::Plus };
        let ch = model.channel_for(&label, &ctx).unwrap();
        let got = ch.apply(&BlochState::KET_ZERO);
        assert!((got.z - 1.0).abs() < 1e-15);
    }

    #[test]
    fn incoherent_models_compile_to_pauli_error_channels() {
        // Factor out the ideal rotation; what remains must be diagonal.
        let model = NoiseModel {
            depol_per_gate: 0.01,
            depol_per_pauli: 0.004,
            dephasing_rate: 0.05,
            spont_rate: 0.002,
            ..NoiseModel::default()
        };
        let ctx = ExperimentContext::ideal();
        for label in all_pulse_labels() {
            let ch = model.channel_for(&label, &ctx).unwrap();
            let ideal = match label.rotation() {
                Some(rot) => Channel::rotation(rot),
                None => Channel::identity(1),
            };
            let error = ch.ptm() * ideal.ptm().transpose();
            for r in 0..4 {
                for c in 0..4 {
                    if r != c {
                        assert!(
                            error[(r, c)].abs() < 1e-12,
                            "off-diagonal error term for {label}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn spam_channels_are_bit_flips() {
        let model =
            NoiseModel { prep_flip: 0.01, meas_flip: 0.02, ..NoiseModel::default() };
        let (prep, meas) = model.spam_channels().unwrap();
        assert_eq!(prep.ptm(), Channel::bit_flip(0.01).unwrap().ptm());
        assert_eq!(meas.ptm(), Channel::bit_flip(0.02).unwrap().ptm());
        let s = prep.apply(&BlochState::KET_ZERO);
        assert!((s.z - 0.98).abs() < 1e-15);
    }

    #[test]
    fn closed_form_parameters_match_their_definitions() {
        let model = NoiseModel::default();
        assert_eq!(model.effective_dif().unwrap(), 0.0);
        assert_eq!(model.effective_decay().unwrap(), 0.0);

        let model = NoiseModel { depol_per_pauli: 0.004, ..NoiseModel::default() };
        assert!((model.effective_dif().unwrap() - 0.004).abs() < 1e-15);

        let model = NoiseModel {
            depol_per_gate: 0.01,
            depol_per_pauli: 0.004,
            prep_flip: 0.005,
            meas_flip: 0.005,
            ..NoiseModel::default()
        };
        let dif = 1.0 - 0.99f64 * 0.996 * 0.99;
        let d = 1.0 - 0.99f64 * 0.996;
        assert!((model.effective_dif().unwrap() - dif).abs() < 1e-15);
        assert!((model.effective_decay().unwrap() - d).abs() < 1e-15);

        let coherent = NoiseModel { overrotation: 0.1, ..NoiseModel::default() };
        assert!(coherent.effective_dif().is_err());
        assert!(coherent.effective_decay().is_err());
    }

    #[test]
    fn mean_step_duration_averages_the_pauli_slot() {
        let model = NoiseModel::default();
        // (0 + 2 + 2 + 1)/4 + 1 with the default durations.
        assert!((model.mean_step_duration() - 2.25).abs() < 1e-15);
        let p = model.per_step_contribution(0.1);
        assert!((p - (1.0 - (-0.225f64).exp()) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn validate_reports_range_violations() {
        assert!(NoiseModel::default().validate().is_empty());

        let model = NoiseModel { depol_per_gate: 1.5, ..NoiseModel::default() };
        let violations = model.validate();
        assert!(violations.iter().any(|v| v.contains("depol_per_gate")));

        let model = NoiseModel { dephasing_rate: -1.0, ..NoiseModel::default() };
        let violations = model.validate();
        assert!(violations.iter().any(|v| v.contains("dephasing_rate")));
    }

    #[test]
    fn random_valid_models_compile_to_cptp_channels() {
        let mut stream = rng::stream(11, "noise-cptp", &[]);
        for trial in 0..40 {
            let model = NoiseModel {
                depol_per_gate: stream.random_range(0.0..0.3),
                depol_per_pauli: stream.random_range(0.0..0.3),
                depol_per_step_2q: stream.random_range(0.0..0.3),
                overrotation: stream.random_range(-0.5..0.5),
                axis_tilt: stream.random_range(-0.5..0.5),
                dephasing_rate: stream.random_range(0.0..0.5),
                detuning: QuasiStaticDetuning {
                    amplitude: stream.random_range(0.0..0.5),
                    waveform: if stream.random_bool(0.5) {
                        Waveform::Constant
                    } else {
                        Waveform::Sinusoidal
                    },
                },
                amplitude_fluctuation: stream.random_range(0.0..0.2),
                spont_rate: stream.random_range(0.0..0.1),
                prep_flip: stream.random_range(0.0..0.2),
                meas_flip: stream.random_range(0.0..0.2),
                t_pi2: stream.random_range(0.0..2.0),
                t_pi: stream.random_range(0.0..4.0),
                t_z: stream.random_range(0.0..2.0),
                t_identity: stream.random_range(0.0..1.0),
            };
            let violations = model.validate();
            assert!(violations.is_empty(), "trial {trial}: {violations:?}");
        }
    }

    #[test]
    fn context_sampling_is_deterministic_and_respects_the_waveform() {
        let model = NoiseModel {
            detuning: QuasiStaticDetuning {
                amplitude: 0.25,
                waveform: Waveform::Sinusoidal,
            },
            amplitude_fluctuation: 0.05,
            ..NoiseModel::default()
        };
        let a = ExperimentContext::sample(&model, &mut rng::stream(5, "ctx", &[0]));
        let b = ExperimentContext::sample(&model, &mut rng::stream(5, "ctx", &[0]));
        assert_eq!(a, b);
        // Sinusoidal draws stay within the peak amplitude.
        for i in 0..200u64 {
            let c = ExperimentContext::sample(&model, &mut rng::stream(5, "ctx", &[i]));
            assert!(c.detuning.abs() <= 0.25 + 1e-12);
        }
        // The zero-noise model always yields the ideal context.
        let quiet = NoiseModel::default();
        let c = ExperimentContext::sample(&quiet, &mut rng::stream(5, "ctx", &[9]));
        assert_eq!(c, ExperimentContext::ideal());
    }
}
