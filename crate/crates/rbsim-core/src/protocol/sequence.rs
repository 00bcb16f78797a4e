//! Closing-gate selection and sequence assembly for the single-qubit protocol.

use rand::Rng;

use crate::error::{Error, Result};
use crate::sim::Axis;
use crate::stabilizer::PauliFrame1Q;

use super::label::{PulseClass, PulseLabel};

/// One fully assembled, ready-to-run sequence of the benchmark grid.
///
/// The pulse list alternates Pauli and π/2 pulses, beginning and ending with a
/// Pauli pulse: `P₁ G₁ P₂ … G_l P_{l+1} R P_{l+2}` for truncation length
/// `l = l_k`, so it holds `l_k + 2` Pauli pulses and `l_k + 1` π/2 pulses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequenceSpec {
    /// Index of the base computational-gate sequence.
    pub j: usize,
    /// Truncation length: how many computational gates the sequence keeps.
    pub l_k: usize,
    /// Index of the Pauli randomization.
    pub m: usize,
    pub pulses: Vec<PulseLabel>,
    /// The σ_z eigenstate a noiseless run ends in: `true` for |1⟩.
    pub expected_excited: bool,
}

impl SequenceSpec {
    /// The decay fit's length variable: randomized computational gates
    /// including the closing pulse, `l_k + 1`.
    pub fn fit_length(&self) -> usize {
        self.l_k + 1
    }
}

/// The closing π/2 pulses that map `frame` onto a σ_z eigenstate, with the
/// eigenstate each one reaches (`true` = |1⟩).
///
/// Of the six candidate pulses (axes x, y, z, both signs) exactly two qualify
/// for any frame: the two pulses about the frame's axis when it already points
/// along ±z, and the two signs of the single perpendicular rotation axis
/// otherwise.
pub fn closing_candidates(frame: PauliFrame1Q) -> Result<Vec<(PulseLabel, bool)>> {
    let mut candidates = Vec::with_capacity(2);
    for axis in Axis::ALL {
        for sign in crate::sim::Sign::ALL {
            let label = PulseLabel::Closing { axis, sign };
            let next = label.apply_to_frame(frame)?;
            if let Some(excited) = next.z_eigenstate() {
                candidates.push((label, excited));
            }
        }
    }
    if candidates.len() != 2 {
        return Err(Error::InvalidParameter(format!(
            "closing-gate invariant breached: {} candidates for frame {frame:?}",
            candidates.len()
        )));
    }
    Ok(candidates)
}

/// Chooses the closing gate uniformly between the two valid candidates and
/// records the eigenstate it reaches (before any trailing Pauli pulse).
pub fn closing_gate<R: Rng>(
    frame: PauliFrame1Q,
    rng: &mut R,
) -> Result<(PulseLabel, bool)> {
    let candidates = closing_candidates(frame)?;
    Ok(candidates[rng.random_range(0..2)])
}

/// Interleaves gates and Pauli pulses into a runnable sequence and derives its
/// deterministic outcome by frame tracking through the complete pulse list.
///
/// `gates` may be longer than `l_k`; only the prefix is used, so one base
/// sequence serves every truncation.
pub fn assemble_sequence(
    j: usize,
    m: usize,
    gates: &[PulseLabel],
    l_k: usize,
    pauli_pulses: &[PulseLabel],
    closing: PulseLabel,
) -> Result<SequenceSpec> {
    if gates.len() < l_k {
        return Err(Error::DimensionMismatch(format!(
            "sequence needs {l_k} computational gates, got {}",
            gates.len()
        )));
    }
    if pauli_pulses.len() != l_k + 2 {
        return Err(Error::DimensionMismatch(format!(
            "sequence of length {l_k} needs {} Pauli pulses, got {}",
            l_k + 2,
            pauli_pulses.len()
        )));
    }
    let class_ok = gates[..l_k].iter().all(|g| g.class() == PulseClass::Computational)
        && pauli_pulses.iter().all(|p| p.class() == PulseClass::Pauli)
        && closing.class() == PulseClass::Closing;
    if !class_ok {
        return Err(Error::InvalidParameter(
            "pulse classes do not match their sequence positions".into(),
        ));
    }

    let mut pulses = Vec::with_capacity(2 * l_k + 3);
    for i in 0..l_k {
        pulses.push(pauli_pulses[i]);
        pulses.push(gates[i]);
    }
    pulses.push(pauli_pulses[l_k]);
    pulses.push(closing);
    pulses.push(pauli_pulses[l_k + 1]);

    let mut frame = PauliFrame1Q::initial();
    for pulse in &pulses {
        frame = pulse.apply_to_frame(frame)?;
    }
    let expected_excited = frame.z_eigenstate().ok_or_else(|| {
        Error::InvalidParameter(
            "assembled sequence does not end on a σ_z eigenstate".into(),
        )
    })?;

    Ok(SequenceSpec { j, l_k, m, pulses, expected_excited })
}
