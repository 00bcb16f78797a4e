//! Noisy execution of assembled single-qubit sequences.

use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::estimator::ExperimentRecord;
use crate::noise::{ExperimentContext, NoiseModel};
use crate::rng;
use crate::sim::BlochState;

use super::sequence::SequenceSpec;

/// The probability that one run of the sequence yields the wrong σ_z outcome
/// under a fixed quasi-static context.
///
/// The state is propagated through preparation error, every compiled pulse
/// channel, and measurement error; the result is exact (no sampling), so
/// zero-noise sequences give exactly 0.
pub fn wrong_probability(
    spec: &SequenceSpec,
    model: &NoiseModel,
    ctx: &ExperimentContext,
) -> Result<f64> {
    let (prep, meas) = model.spam_channels()?;
    let mut state = prep.apply(&BlochState::KET_ZERO);
    for pulse in &spec.pulses {
        state = model.channel_for(pulse, ctx)?.apply(&state);
    }
    state = meas.apply(&state);
    let p_excited = state.excited_prob();
    let p_wrong =
        if spec.expected_excited { 1.0 - p_excited } else { p_excited };
    Ok(p_wrong.clamp(0.0, 1.0))
}

/// Runs one sequence for `shots` repetitions split into `batches` groups.
///
/// Each batch samples a fresh quasi-static context from the stream
/// `("run", j, l_k, m, batch)` of `seed` and draws its wrong-outcome count
/// binomially from the analytic probability.  Records are therefore
/// reproducible and independent of the order sequences are run in.
pub fn run_sequence(
    spec: &SequenceSpec,
    model: &NoiseModel,
    shots: usize,
    batches: usize,
    seed: u64,
) -> Result<ExperimentRecord> {
    if shots == 0 {
        return Err(Error::InvalidParameter("shots must be ≥ 1".into()));
    }
    if batches == 0 || batches > shots {
        return Err(Error::InvalidParameter(format!(
            "batch count {batches} must lie in 1..={shots}"
        )));
    }
    let base = shots / batches;
    let remainder = shots % batches;
    let mut wrong_total = 0u64;
    let mut contexts = Vec::with_capacity(batches);
    for b in 0..batches {
        let batch_shots = base + usize::from(b < remainder);
        let mut stream = rng::stream(
            seed,
            "run",
            &[spec.j as u64, spec.l_k as u64, spec.m as u64, b as u64],
        );
        let ctx = ExperimentContext::sample(model, &mut stream);
        let p = wrong_probability(spec, model, &ctx)?;
        wrong_total += match p {
            0.0 => 0,
            1.0 => batch_shots as u64,
            _ => Binomial::new(batch_shots as u64, p)
                .expect("probability clamped to [0, 1]")
                .sample(&mut stream),
        };
        contexts.push(ctx);
    }
    ExperimentRecord::new(spec.j, spec.l_k, spec.m, wrong_total, shots as u64, contexts)
}
