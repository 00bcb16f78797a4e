//! Ramsey delay scans, with and without a refocusing echo.
//!
//! Both variants open with a π/2 pulse at phase 0 and close with a π/2 pulse
//! at phase π.  The refocused scan splits the delay around a π pulse at
//! phase π, so a frequency offset that is constant over one batch winds the
//! phase forward in one arm and back in the other and cancels exactly; the
//! noiseless endpoint is |1⟩.  The unrefocused scan takes the whole delay in
//! one arm, so the same offset survives as an oscillation; the noiseless
//! endpoint is |0⟩.  Comparing the two separates irreversible dephasing from
//! slow drift.
//!
//! A sinusoidally drifting offset makes the unrefocused curve a Bessel-type
//! oscillation; the damped-cosine fit used here is a deliberate short-window
//! approximation of it, and both descriptions degrade at long delays.

use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::estimator::record::binomial_stderr;
use crate::estimator::{fit_damped_cosine, fit_exponential, DecayOrder};
use crate::noise::{ExperimentContext, NoiseModel};
use crate::protocol::PulseLabel;
use crate::rng;
use crate::sim::{Axis, BlochState, Sign};

use super::{CharacterizationReport, ExperimentKind};

/// Configuration of one Ramsey delay scan.
#[derive(Clone, Debug)]
pub struct RamseyPlan {
    /// Free-evolution delays T in μs, strictly increasing, each ≥ 0.
    pub delays: Vec<f64>,
    /// Insert the echo pulse and split the delay into two arms.
    pub refocused: bool,
    /// Repetitions per delay point.
    pub shots: usize,
    /// Batches per point; each batch samples a fresh quasi-static context.
    pub batches: usize,
    /// Keep the drive beams on for half of each free-evolution arm, so
    /// spontaneous scattering acts without any drive rotation.
    pub beams: bool,
    /// Time window (μs) the decay fit is restricted to.
    pub window: (f64, f64),
    pub model: NoiseModel,
    /// Master seed; batch contexts come from the stream `("ramsey", i, b)`.
    pub seed: u64,
}

impl RamseyPlan {
    /// Refocused scan over 0–240 μs in 4 μs steps, fitted on 1–200 μs.
    pub fn standard_refocused(model: NoiseModel, seed: u64) -> Self {
        RamseyPlan {
            delays: (0..=60).map(|i| 4.0 * i as f64).collect(),
            refocused: true,
            shots: 500,
            batches: 50,
            beams: false,
            window: (1.0, 200.0),
            model,
            seed,
        }
    }

    /// Unrefocused scan over 0–260 μs in 2 μs steps, fitted below 220 μs.
    pub fn standard_unrefocused(model: NoiseModel, seed: u64) -> Self {
        RamseyPlan {
            delays: (0..=130).map(|i| 2.0 * i as f64).collect(),
            refocused: false,
            shots: 500,
            batches: 50,
            beams: false,
            window: (0.0, 219.0),
            model,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.delays.is_empty() {
            return Err(Error::InvalidParameter("delay grid is empty".into()));
        }
        if !self.delays.iter().all(|t| t.is_finite() && *t >= 0.0) {
            return Err(Error::InvalidParameter("delays must be finite and ≥ 0".into()));
        }
        if !self.delays.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidParameter(
                "delays must be strictly increasing".into(),
            ));
        }
        if self.shots < 1 {
            return Err(Error::InvalidParameter("shots must be ≥ 1".into()));
        }
        if self.batches < 1 || self.batches > self.shots {
            return Err(Error::InvalidParameter(format!(
                "batch count {} must lie in 1..={}",
                self.batches, self.shots
            )));
        }
        if !(self.window.0 <= self.window.1) {
            return Err(Error::InvalidParameter("fit window is inverted".into()));
        }
        let issues = self.model.validate();
        if !issues.is_empty() {
            return Err(Error::InvalidParameter(issues.join("; ")));
        }
        Ok(())
    }
}

/// Exact probability of ending in |1⟩ for one delay under a fixed context.
fn excited_probability(
    plan: &RamseyPlan,
    delay: f64,
    ctx: &ExperimentContext,
) -> Result<f64> {
    let model = &plan.model;
    let opening = PulseLabel::Computational { axis: Axis::X, sign: Sign::Plus };
    let closing = PulseLabel::Computational { axis: Axis::X, sign: Sign::Minus };
    let echo = PulseLabel::Pauli { axis: Some(Axis::X), sign: Sign::Minus };

    let free_evolution = |state: &BlochState, duration: f64| -> Result<BlochState> {
        let mut next = model.delay_channel(duration, ctx)?.apply(state);
        if plan.beams {
            next = model.spont_depolarization(duration / 2.0)?.apply(&next);
        }
        Ok(next)
    };

    let (prep, meas) = model.spam_channels()?;
    let mut state = prep.apply(&BlochState::KET_ZERO);
    state = model.channel_for(&opening, ctx)?.apply(&state);
    if plan.refocused {
        state = free_evolution(&state, delay / 2.0)?;
        state = model.channel_for(&echo, ctx)?.apply(&state);
        state = free_evolution(&state, delay / 2.0)?;
    } else {
        state = free_evolution(&state, delay)?;
    }
    state = model.channel_for(&closing, ctx)?.apply(&state);
    state = meas.apply(&state);
    Ok(state.excited_prob().clamp(0.0, 1.0))
}

/// Simulates the scan and returns `(delay, p̂(|1⟩), stderr)` per point.
///
/// Each batch draws its context from the stream `("ramsey", point, batch)`
/// and its outcome count binomially from the exact probability, so curves
/// are reproducible point by point regardless of evaluation order.
pub fn ramsey_curve(plan: &RamseyPlan) -> Result<Vec<(f64, f64, f64)>> {
    plan.validate()?;
    let base = plan.shots / plan.batches;
    let remainder = plan.shots % plan.batches;
    let mut curve = Vec::with_capacity(plan.delays.len());
    for (i, &delay) in plan.delays.iter().enumerate() {
        let mut excited_total = 0u64;
        for b in 0..plan.batches {
            let batch_shots = base + usize::from(b < remainder);
            let mut stream = rng::stream(plan.seed, "ramsey", &[i as u64, b as u64]);
            let ctx = ExperimentContext::sample(&plan.model, &mut stream);
            let p = excited_probability(plan, delay, &ctx)?;
            excited_total += match p {
                0.0 => 0,
                1.0 => batch_shots as u64,
                _ => Binomial::new(batch_shots as u64, p)
                    .expect("probability clamped to [0, 1]")
                    .sample(&mut stream),
            };
        }
        let p_hat = excited_total as f64 / plan.shots as f64;
        curve.push((delay, p_hat, binomial_stderr(p_hat, plan.shots as u64)));
    }
    Ok(curve)
}

/// Runs a refocused scan and fits `a·e^(−rate·T) + offset` on the window.
///
/// The fitted rate is the irreversible dephasing rate: batch-constant
/// detuning cancels in the echo, and decay during the fixed pulse durations
/// only scales the amplitude.  The rate converts to a per-step error
/// contribution over the mean randomized-gate duration.
pub fn ramsey_refocused(
    plan: &RamseyPlan,
) -> Result<(Vec<(f64, f64, f64)>, CharacterizationReport)> {
    if !plan.refocused {
        return Err(Error::InvalidParameter(
            "plan has refocused = false; use ramsey_unrefocused".into(),
        ));
    }
    let curve = ramsey_curve(plan)?;
    let fit = fit_exponential(&curve, plan.window)?;
    let tau_step = plan.model.mean_step_duration();
    let contribution = plan.model.per_step_contribution(fit.rate);
    // d(contribution)/d(rate) = (τ/2)·e^(−rate·τ).
    let contribution_stderr =
        fit.rate_stderr * (tau_step / 2.0) * (-fit.rate * tau_step).exp();
    let mut notes = Vec::new();
    if fit.degenerate {
        notes.push(
            "windowed curve shows no resolvable decay; rate pinned to 0"
                .to_string(),
        );
    }
    let report = CharacterizationReport::new(
        ExperimentKind::RamseyRefocused,
        vec![
            ("amplitude".into(), fit.amplitude),
            ("rate".into(), fit.rate),
            ("rate_stderr".into(), fit.rate_stderr),
            ("offset".into(), fit.offset),
            ("contribution_stderr".into(), contribution_stderr),
            ("chi_squared".into(), fit.chi_squared),
            ("points_used".into(), fit.points_used as f64),
        ],
        contribution,
        plan.window,
        tau_step,
        notes,
    )?;
    Ok((curve, report))
}

/// Runs an unrefocused scan and fits an exponentially damped cosine.
///
/// Slow drift survives without the echo, so the curve oscillates; the
/// short-time envelope of the fit absorbs both drift averaging and
/// irreversible dephasing, and its loss over one mean gate duration is the
/// per-step contribution.  A curve with no spread inside the window (nothing
/// drifts and nothing dephases) is reported directly as zero contribution,
/// since there is no oscillation to fit.
pub fn ramsey_unrefocused(
    plan: &RamseyPlan,
) -> Result<(Vec<(f64, f64, f64)>, CharacterizationReport)> {
    if plan.refocused {
        return Err(Error::InvalidParameter(
            "plan has refocused = true; use ramsey_refocused".into(),
        ));
    }
    let curve = ramsey_curve(plan)?;
    let tau_step = plan.model.mean_step_duration();

    let windowed: Vec<f64> = curve
        .iter()
        .filter(|p| p.0 >= plan.window.0 && p.0 <= plan.window.1)
        .map(|p| p.1)
        .collect();
    let spread = windowed.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |acc, &y| {
        (acc.0.min(y), acc.1.max(y))
    });
    if !windowed.is_empty() && spread.1 - spread.0 < 1e-12 {
        let level = windowed.iter().sum::<f64>() / windowed.len() as f64;
        let report = CharacterizationReport::new(
            ExperimentKind::RamseyUnrefocused,
            vec![("offset".into(), level), ("decay_linear".into(), 0.0)],
            0.0,
            plan.window,
            tau_step,
            vec!["windowed curve has no spread; nothing to fit".to_string()],
        )?;
        return Ok((curve, report));
    }

    let fit = fit_damped_cosine(&curve, plan.window, DecayOrder::Exponential)?;
    let contribution = fit.per_step_contribution(tau_step);
    let contribution_stderr =
        fit.decay_stderr[0] * (tau_step / 2.0) * (-fit.decay[0] * tau_step).exp();
    let report = CharacterizationReport::new(
        ExperimentKind::RamseyUnrefocused,
        vec![
            ("offset".into(), fit.offset),
            ("amplitude".into(), fit.amplitude),
            ("frequency".into(), fit.frequency),
            ("frequency_stderr".into(), fit.frequency_stderr),
            ("phase".into(), fit.phase),
            ("decay_linear".into(), fit.decay[0]),
            ("decay_linear_stderr".into(), fit.decay_stderr[0]),
            ("contribution_stderr".into(), contribution_stderr),
            ("chi_squared".into(), fit.chi_squared),
            ("points_used".into(), fit.points_used as f64),
        ],
        contribution,
        plan.window,
        tau_step,
        Vec::new(),
    )?;
    Ok((curve, report))
}
