//! The two-qubit extension: layered sequences, stabilizer closing, parity
//! readout.
//!
//! Each randomized computational step applies an independent uniform π/2 pulse
//! to every qubit followed by a controlled-NOT of random orientation; Pauli
//! randomization layers act per qubit as in the one-qubit protocol.  No single
//! closing gate can make both measurement outcomes deterministic, so the
//! closing layer instead localizes a randomly chosen stabilizer element of the
//! final state to a product of σ_z operators, and the recorded observable is
//! the parity of the measured bits on that product's support.

use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::estimator::ExperimentRecord;
use crate::noise::{ExperimentContext, NoiseModel};
use crate::rng;
use crate::sim::{Channel, DensityMatrix, Sign};
use crate::stabilizer::{localize_to_z, parity, PauliLetter, Tableau};

use super::label::{sample_computational_gates, sample_pauli_pulses, PulseLabel};
use super::plan::BenchmarkPlan;

/// What a layer contributes to the sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LayerKind {
    /// Per-qubit random Pauli pulses.
    Pauli,
    /// Per-qubit computational π/2 pulses followed by a controlled-NOT.
    Computational,
    /// Per-qubit localization pulses mapping the chosen stabilizer to z.
    Closing,
}

/// One layer of simultaneous per-qubit pulses, optionally followed by a
/// controlled-NOT.  Slot `pulses[q]` is `None` when qubit `q` idles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoQubitLayer {
    pub kind: LayerKind,
    pub pulses: [Option<PulseLabel>; 2],
    /// `(control, target)` of the step's controlled-NOT, if any.
    pub cnot: Option<(usize, usize)>,
}

/// A fully assembled two-qubit sequence with its parity observable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoQubitSequenceSpec {
    pub j: usize,
    pub l_k: usize,
    pub m: usize,
    pub layers: Vec<TwoQubitLayer>,
    /// Qubits whose measured bits enter the parity.
    pub support: Vec<usize>,
    /// Whether a noiseless run gives odd parity on the support.
    pub expected_odd: bool,
}

impl TwoQubitSequenceSpec {
    /// The decay fit's length variable: computational steps plus the closing
    /// layer, `l_k + 1`.
    pub fn fit_length(&self) -> usize {
        self.l_k + 1
    }
}

fn apply_layer_to_tableau(tab: &mut Tableau, layer: &TwoQubitLayer) -> Result<()> {
    for (q, pulse) in layer.pulses.iter().enumerate() {
        if let Some(rot) = pulse.as_ref().and_then(|p| p.rotation()) {
            tab.apply_rotation(q, &rot)?;
        }
    }
    if let Some((c, t)) = layer.cnot {
        tab.apply_cnot(c, t)?;
    }
    Ok(())
}

/// Expands a two-qubit plan into its sequences.
///
/// Stream layout mirrors the one-qubit expander: computational steps come
/// from `("gates", j)`, the stabilizer choice and localization signs from
/// `("closing", j, l_k)`, and Pauli layers from `("pauli", j, l_k, m)`.  The
/// stabilizer element is chosen once per truncation as a generator mask;
/// Pauli layers change only the signs of the tableau's generators, so the
/// mask and the localization pulses stay valid for every randomization and
/// only the expected parity differs.
pub fn generate_two_qubit_plan(plan: &BenchmarkPlan) -> Result<Vec<TwoQubitSequenceSpec>> {
    plan.validate()?;
    if plan.qubits != 2 {
        return Err(Error::InvalidParameter(
            "generate_two_qubit_plan expands two-qubit plans only".into(),
        ));
    }
    let l_max = *plan.lengths.last().expect("validated non-empty");
    let mut specs = Vec::with_capacity(plan.sequence_count());
    for j in 0..plan.n_gate_sequences {
        // Base computational steps: two pulses and a CNOT orientation each.
        let mut gate_stream = rng::stream(plan.seed, "gates", &[j as u64]);
        let steps: Vec<([PulseLabel; 2], (usize, usize))> = (0..l_max)
            .map(|_| {
                let pair = sample_computational_gates(2, &mut gate_stream);
                let orientation =
                    if gate_stream.random_bool(0.5) { (0, 1) } else { (1, 0) };
                ([pair[0], pair[1]], orientation)
            })
            .collect();

        for &l_k in &plan.lengths {
            // Pauli-free tableau after the truncated steps: letters of every
            // stabilizer element are randomization-independent.
            let mut tab = Tableau::initial(2);
            for (pulses, (c, t)) in &steps[..l_k] {
                for (q, pulse) in pulses.iter().enumerate() {
                    tab.apply_rotation(q, &pulse.rotation().expect("π/2 pulses rotate"))?;
                }
                tab.apply_cnot(*c, *t)?;
            }
            let mut closing_stream =
                rng::stream(plan.seed, "closing", &[j as u64, l_k as u64]);
            let (mask, element) = tab.sample_nonidentity_with_mask(&mut closing_stream);
            let (rotations, _) = localize_to_z(&element, &mut closing_stream)?;
            let closing_pulses: Vec<Option<PulseLabel>> = rotations
                .iter()
                .map(|r| {
                    r.map(|rot| PulseLabel::Closing { axis: rot.axis, sign: rot.sign })
                })
                .collect();

            for m in 0..plan.n_randomizations {
                let mut pauli_stream = rng::stream(
                    plan.seed,
                    "pauli",
                    &[j as u64, l_k as u64, m as u64],
                );
                let mut layers = Vec::with_capacity(2 * l_k + 3);
                for i in 0..=l_k {
                    let pair = sample_pauli_pulses(2, &mut pauli_stream);
                    layers.push(TwoQubitLayer {
                        kind: LayerKind::Pauli,
                        pulses: [Some(pair[0]), Some(pair[1])],
                        cnot: None,
                    });
                    if i < l_k {
                        let (pulses, (c, t)) = steps[i];
                        layers.push(TwoQubitLayer {
                            kind: LayerKind::Computational,
                            pulses: [Some(pulses[0]), Some(pulses[1])],
                            cnot: Some((c, t)),
                        });
                    }
                }
                layers.push(TwoQubitLayer {
                    kind: LayerKind::Closing,
                    pulses: [closing_pulses[0], closing_pulses[1]],
                    cnot: None,
                });
                let pair = sample_pauli_pulses(2, &mut pauli_stream);
                layers.push(TwoQubitLayer {
                    kind: LayerKind::Pauli,
                    pulses: [Some(pair[0]), Some(pair[1])],
                    cnot: None,
                });

                // Push the chosen element through the complete sequence: the
                // conjugated element must be a signed product of Z letters.
                let mut full = Tableau::initial(2);
                for layer in &layers {
                    apply_layer_to_tableau(&mut full, layer)?;
                }
                let closed = full.element(mask);
                let mut support = Vec::new();
                for q in 0..2 {
                    match closed.letter(q) {
                        PauliLetter::Z => support.push(q),
                        PauliLetter::I => {}
                        other => {
                            return Err(Error::InvalidParameter(format!(
                                "localization left letter {other} on qubit {q}"
                            )))
                        }
                    }
                }
                let expected_odd = closed.sign()? == Sign::Minus;
                specs.push(TwoQubitSequenceSpec {
                    j,
                    l_k,
                    m,
                    layers,
                    support,
                    expected_odd,
                });
            }
        }
    }
    Ok(specs)
}

/// The probability of reading the wrong parity under a fixed context.
///
/// Per-qubit pulses compile through the one-qubit noise model and act on
/// their tensor slot; computational and closing layers are each followed by
/// the two-qubit step depolarization.  The calculation is exact.
pub fn two_qubit_wrong_probability(
    spec: &TwoQubitSequenceSpec,
    model: &NoiseModel,
    ctx: &ExperimentContext,
) -> Result<f64> {
    let (prep, meas) = model.spam_channels()?;
    let mut coherence = DensityMatrix::basis_state(2, 0).pauli_vec();
    let apply = |ch: &Channel, c: &mut nalgebra::DVector<f64>| {
        *c = ch.ptm() * &*c;
    };
    for q in 0..2 {
        apply(&prep.lift(q, 2)?, &mut coherence);
    }
    for layer in &spec.layers {
        for (q, pulse) in layer.pulses.iter().enumerate() {
            if let Some(label) = pulse {
                apply(&model.channel_for(label, ctx)?.lift(q, 2)?, &mut coherence);
            }
        }
        if let Some((c, t)) = layer.cnot {
            apply(&Channel::cnot(c, t)?, &mut coherence);
        }
        if layer.kind != LayerKind::Pauli && model.depol_per_step_2q != 0.0 {
            apply(&Channel::depolarizing(2, model.depol_per_step_2q)?, &mut coherence);
        }
    }
    for q in 0..2 {
        apply(&meas.lift(q, 2)?, &mut coherence);
    }
    let probs = DensityMatrix::from_pauli_vec(&coherence, 2)?.measure_z();
    let mut wrong = 0.0;
    for (index, p) in probs.iter().enumerate() {
        let bits = [(index >> 1) & 1 == 1, index & 1 == 1];
        if parity(&bits, &spec.support) != spec.expected_odd {
            wrong += p;
        }
    }
    Ok(wrong.clamp(0.0, 1.0))
}

/// Runs one two-qubit sequence; batching and streams mirror the one-qubit
/// runner with domain `("run2", j, l_k, m, batch)`.
pub fn run_two_qubit_sequence(
    spec: &TwoQubitSequenceSpec,
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
            "run2",
            &[spec.j as u64, spec.l_k as u64, spec.m as u64, b as u64],
        );
        let ctx = ExperimentContext::sample(model, &mut stream);
        let p = two_qubit_wrong_probability(spec, model, &ctx)?;
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

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn small_plan(seed: u64) -> BenchmarkPlan {
        BenchmarkPlan {
            lengths: vec![1, 2, 4, 7],
            n_gate_sequences: 2,
            n_randomizations: 3,
            shots: 300,
            batches: 3,
            qubits: 2,
            seed,
        }
    }

    #[test]
    fn layer_counts_follow_the_one_qubit_shape() {
        let specs = generate_two_qubit_plan(&small_plan(31)).unwrap();
        assert_eq!(specs.len(), 2 * 4 * 3);
        for spec in &specs {
            assert_eq!(spec.layers.len(), 2 * spec.l_k + 3);
            let paulis =
                spec.layers.iter().filter(|l| l.kind == LayerKind::Pauli).count();
            let comps = spec
                .layers
                .iter()
                .filter(|l| l.kind == LayerKind::Computational)
                .count();
            assert_eq!(paulis, spec.l_k + 2);
            assert_eq!(comps, spec.l_k);
            assert!(!spec.support.is_empty(), "a stabilizer element has support");
        }
    }

    #[test]
    fn noiseless_parity_is_deterministic_by_dense_simulation() {
        let specs = generate_two_qubit_plan(&small_plan(32)).unwrap();
        let model = NoiseModel::default();
        let ctx = ExperimentContext::ideal();
        for spec in &specs {
            // The analytic path reports zero error...
            let p = two_qubit_wrong_probability(spec, &model, &ctx).unwrap();
            assert_eq!(p, 0.0, "sequence ({}, {}, {})", spec.j, spec.l_k, spec.m);

            // ...and an independent dense unitary simulation agrees with the
            // recorded support and parity.
            let mut rho = DensityMatrix::basis_state(2, 0);
            for layer in &spec.layers {
                for (q, pulse) in layer.pulses.iter().enumerate() {
                    if let Some(rot) = pulse.as_ref().and_then(|p| p.rotation()) {
                        rho = Channel::rotation(rot)
                            .lift(q, 2)
                            .unwrap()
                            .apply_density(&rho)
                            .unwrap();
                    }
                }
                if let Some((c, t)) = layer.cnot {
                    rho = Channel::cnot(c, t).unwrap().apply_density(&rho).unwrap();
                }
            }
            let probs = rho.measure_z();
            let mut good = 0.0;
            for (index, p) in probs.iter().enumerate() {
                let bits = [(index >> 1) & 1 == 1, index & 1 == 1];
                if parity(&bits, &spec.support) == spec.expected_odd {
                    good += p;
                }
            }
            assert!((good - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn step_depolarization_gives_the_closed_form_decay() {
        let specs = generate_two_qubit_plan(&small_plan(33)).unwrap();
        let d = 0.03;
        let model = NoiseModel { depol_per_step_2q: d, ..NoiseModel::default() };
        let ctx = ExperimentContext::ideal();
        for spec in &specs {
            let p = two_qubit_wrong_probability(spec, &model, &ctx).unwrap();
            let l = spec.fit_length() as i32;
            let want = (1.0 - (1.0 - d).powi(l)) / 2.0;
            assert!(
                (p - want).abs() < 1e-12,
                "sequence ({}, {}, {}): {p} vs {want}",
                spec.j,
                spec.l_k,
                spec.m
            );
        }
    }

    #[test]
    fn full_depolarization_pins_the_error_at_one_half() {
        let specs = generate_two_qubit_plan(&small_plan(34)).unwrap();
        let model = NoiseModel { depol_per_step_2q: 1.0, ..NoiseModel::default() };
        let ctx = ExperimentContext::ideal();
        let p = two_qubit_wrong_probability(&specs[0], &model, &ctx).unwrap();
        assert!((p - 0.5).abs() < 1e-12);
    }

    #[test]
    fn one_qubit_noise_enters_through_the_per_qubit_channels() {
        // A pure z-detuning dephases both qubits; the wrong-parity probability
        // must be strictly positive but below the depolarized ceiling.
        let specs = generate_two_qubit_plan(&small_plan(35)).unwrap();
        let model = NoiseModel { dephasing_rate: 0.02, ..NoiseModel::default() };
        let ctx = ExperimentContext::ideal();
        let spec = specs.iter().find(|s| s.l_k == 4).unwrap();
        let p = two_qubit_wrong_probability(spec, &model, &ctx).unwrap();
        assert!(p > 1e-4, "dephasing must leak into the parity, got {p}");
        assert!(p < 0.5);
    }

    #[test]
    fn runs_are_reproducible() {
        let specs = generate_two_qubit_plan(&small_plan(36)).unwrap();
        let model = NoiseModel { depol_per_step_2q: 0.05, ..NoiseModel::default() };
        let a = run_two_qubit_sequence(&specs[7], &model, 301, 3, 5).unwrap();
        let b = run_two_qubit_sequence(&specs[7], &model, 301, 3, 5).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.shots, 301);
    }

    #[test]
    fn plan_expansion_rejects_wrong_qubit_counts() {
        let mut plan = small_plan(37);
        plan.qubits = 1;
        assert!(generate_two_qubit_plan(&plan).is_err());
    }

    #[test]
    fn kronecker_order_sanity_for_measurement_bits() {
        // |01⟩ has qubit 0 in |0⟩ and qubit 1 in |1⟩; the measured index is 1.
        let rho = DensityMatrix::basis_state(2, 1);
        let probs = rho.measure_z();
        assert!((probs[1] - 1.0).abs() < 1e-15);
        assert_eq!(rho.matrix()[(1, 1)], Complex64::new(1.0, 0.0));
    }
}
