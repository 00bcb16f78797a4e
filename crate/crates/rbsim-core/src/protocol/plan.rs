//! Benchmark plans and deterministic plan expansion.

use crate::error::{Error, Result};
use crate::rng;
use crate::stabilizer::PauliFrame1Q;

use super::label::sample_computational_gates;
use super::label::sample_pauli_pulses;
use super::sequence::{assemble_sequence, closing_gate, SequenceSpec};

/// The full description of a benchmark run's randomization grid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchmarkPlan {
    /// Truncation lengths, strictly increasing, each ≥ 1.
    pub lengths: Vec<usize>,
    /// Number of independent base gate sequences (the `j` axis).
    pub n_gate_sequences: usize,
    /// Pauli randomizations per truncation (the `m` axis).
    pub n_randomizations: usize,
    /// Repetitions per sequence.
    pub shots: usize,
    /// Shot batches per sequence; each batch samples a fresh quasi-static
    /// context.
    pub batches: usize,
    /// Qubit count: 1 or 2.
    pub qubits: usize,
    /// Master seed every random stream of the run is derived from.
    pub seed: u64,
}

impl BenchmarkPlan {
    /// The standard single-qubit configuration: 17 lengths from 2 to 96, four
    /// base sequences, eight randomizations, 8160 shots in four batches.
    pub fn standard(seed: u64) -> Self {
        BenchmarkPlan {
            lengths: vec![2, 3, 4, 5, 6, 8, 10, 12, 16, 20, 24, 32, 40, 48, 64, 80, 96],
            n_gate_sequences: 4,
            n_randomizations: 8,
            shots: 8160,
            batches: 4,
            qubits: 1,
            seed,
        }
    }

    /// Total number of sequences the plan expands to.
    pub fn sequence_count(&self) -> usize {
        self.n_gate_sequences * self.lengths.len() * self.n_randomizations
    }

    pub fn validate(&self) -> Result<()> {
        if self.lengths.is_empty() {
            return Err(Error::InvalidParameter("plan needs at least one length".into()));
        }
        if self.lengths[0] < 1 {
            return Err(Error::InvalidParameter("lengths must be ≥ 1".into()));
        }
        if !self.lengths.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidParameter(
                "lengths must be strictly increasing".into(),
            ));
        }
        if self.n_gate_sequences < 1 || self.n_randomizations < 1 || self.shots < 1 {
            return Err(Error::InvalidParameter(
                "sequence, randomization, and shot counts must be ≥ 1".into(),
            ));
        }
        if self.batches < 1 || self.batches > self.shots {
            return Err(Error::InvalidParameter(format!(
                "batch count {} must lie in 1..={}",
                self.batches, self.shots
            )));
        }
        if self.qubits != 1 && self.qubits != 2 {
            return Err(Error::InvalidParameter(
                "only one- and two-qubit plans are supported".into(),
            ));
        }
        Ok(())
    }
}

/// Expands a single-qubit plan into its `N_G · N_l · N_P` sequences.
///
/// Streams are derived per purpose: base gates from `("gates", j)`, the
/// closing choice from `("closing", j, l_k)`, and Pauli randomizations from
/// `("pauli", j, l_k, m)`.  The result is therefore identical however the
/// loop is ordered or parallelized, and every truncation of a base sequence
/// shares its gate prefix.
///
/// The closing gate is chosen once per `(j, l_k)`: Pauli pulses never move
/// the frame's axis, only its sign, so the same two closing candidates are
/// valid for every randomization `m`.
pub fn generate_plan(plan: &BenchmarkPlan) -> Result<Vec<SequenceSpec>> {
    plan.validate()?;
    if plan.qubits != 1 {
        return Err(Error::InvalidParameter(
            "generate_plan expands single-qubit plans; see the two-qubit variant".into(),
        ));
    }
    let l_max = *plan.lengths.last().expect("validated non-empty");
    let mut specs = Vec::with_capacity(plan.sequence_count());
    for j in 0..plan.n_gate_sequences {
        let gates = sample_computational_gates(
            l_max,
            &mut rng::stream(plan.seed, "gates", &[j as u64]),
        );
        for &l_k in &plan.lengths {
            let mut frame = PauliFrame1Q::initial();
            for g in &gates[..l_k] {
                frame = g.apply_to_frame(frame)?;
            }
            let (closing, _) = closing_gate(
                frame,
                &mut rng::stream(plan.seed, "closing", &[j as u64, l_k as u64]),
            )?;
            for m in 0..plan.n_randomizations {
                let paulis = sample_pauli_pulses(
                    l_k + 2,
                    &mut rng::stream(
                        plan.seed,
                        "pauli",
                        &[j as u64, l_k as u64, m as u64],
                    ),
                );
                specs.push(assemble_sequence(j, m, &gates, l_k, &paulis, closing)?);
            }
        }
    }
    Ok(specs)
}
