//! Stabilizer-generator tracking for Clifford circuits on a few qubits.
//!
//! The tableau holds one signed Pauli generator per qubit and pushes each
//! through rotations and controlled-NOTs by exact conjugation, so expectation
//! values of stabilizer elements stay ±1 with no floating-point drift.

use rand::Rng;

use crate::error::{Error, Result};
use crate::sim::{Axis, Rotation, Sign};
use std::f64::consts::FRAC_PI_2;

use super::pauli::{PauliLetter, PauliProduct};

/// Stabilizer generators of a state reached from |0…0⟩ by Clifford gates.
#[derive(Clone, Debug)]
pub struct Tableau {
    n: usize,
    gens: Vec<PauliProduct>,
}

impl Tableau {
    /// The tableau of |0…0⟩: one +Z generator per qubit.
    pub fn initial(n: usize) -> Self {
        assert!(n >= 1, "tableau needs at least one qubit");
        let gens = (0..n)
            .map(|q| PauliProduct::single(n, q, PauliLetter::Z, Sign::Plus))
            .collect();
        Tableau { n, gens }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[PauliProduct] {
        &self.gens
    }

    /// Pushes a Clifford rotation on qubit `q` through every generator.
    pub fn apply_rotation(&mut self, q: usize, rot: &Rotation) -> Result<()> {
        for g in &mut self.gens {
            *g = g.conjugate_rotation(q, rot)?;
        }
        Ok(())
    }

    /// Pushes a controlled-NOT through every generator.
    pub fn apply_cnot(&mut self, control: usize, target: usize) -> Result<()> {
        for g in &mut self.gens {
            *g = g.conjugate_cnot(control, target)?;
        }
        Ok(())
    }

    /// The group element selected by a generator mask: the product of the
    /// generators whose bit is set.  Masks identify the same abstract element
    /// across differently conjugated copies of one tableau, which is how a
    /// stabilizer choice made once per truncation is replayed under every
    /// Pauli randomization.
    pub fn element(&self, mask: u64) -> PauliProduct {
        let mut p = PauliProduct::identity(self.n);
        for (q, g) in self.gens.iter().enumerate() {
            if mask & (1 << q) != 0 {
                p = p.mul(g).expect("generators share the register");
            }
        }
        p
    }

    /// Draws a uniformly random non-identity element of the stabilizer group.
    pub fn sample_nonidentity<R: Rng>(&self, rng: &mut R) -> PauliProduct {
        self.sample_nonidentity_with_mask(rng).1
    }

    /// As [`Tableau::sample_nonidentity`], also returning the generator mask
    /// that selects the element.
    pub fn sample_nonidentity_with_mask<R: Rng>(
        &self,
        rng: &mut R,
    ) -> (u64, PauliProduct) {
        assert!(self.n < 63, "mask sampling limited to small registers");
        let mask = rng.random_range(1..(1u64 << self.n));
        (mask, self.element(mask))
    }
}

/// Single-qubit rotations that turn a stabilizer element into a product of Z
/// letters, plus the sign the rotated element carries.
///
/// Each X letter is mapped to Z by a quarter turn about y and each Y letter by
/// a quarter turn about x; the turn direction is drawn at random, since either
/// direction lands on the z axis and only the tracked sign differs.  Qubits
/// whose letter is already I or Z need no pulse.
pub fn localize_to_z<R: Rng>(
    p: &PauliProduct,
    rng: &mut R,
) -> Result<(Vec<Option<Rotation>>, Sign)> {
    let mut rotations = Vec::with_capacity(p.n());
    let mut localized = p.clone();
    for q in 0..p.n() {
        let rot = match p.letter(q) {
            PauliLetter::I | PauliLetter::Z => None,
            PauliLetter::X => Some(Rotation::new(
                Axis::Y,
                FRAC_PI_2,
                if rng.random_bool(0.5) { Sign::Plus } else { Sign::Minus },
            )),
            PauliLetter::Y => Some(Rotation::new(
                Axis::X,
                FRAC_PI_2,
                if rng.random_bool(0.5) { Sign::Plus } else { Sign::Minus },
            )),
        };
        if let Some(r) = &rot {
            localized = localized.conjugate_rotation(q, r)?;
        }
        rotations.push(rot);
    }
    for q in 0..localized.n() {
        if !matches!(localized.letter(q), PauliLetter::I | PauliLetter::Z) {
            return Err(Error::InvalidParameter(
                "localization left a non-Z letter behind".into(),
            ));
        }
    }
    Ok((rotations, localized.sign()?))
}

/// XOR of the measured bits on a support; `true` means odd parity.
pub fn parity(bits: &[bool], support: &[usize]) -> bool {
    support.iter().fold(false, |acc, &q| acc ^ bits[q])
}
