//! One-qubit Pauli-frame tracking.

use super::{quarter_turns, rotate_int_vector};
use crate::error::Result;
use crate::sim::{Axis, Rotation, Sign};

/// The signed Pauli axis stabilizing the current ideal one-qubit state.
///
/// A sequence of Clifford pulses applied to |0⟩ keeps the state at ±x̂, ±ŷ, or
/// ±ẑ on the Bloch sphere; this type follows it with integer arithmetic.  The
/// convention: `(axis, sign)` means the state is the `+1` eigenstate of
/// `sign·σ_axis`, i.e. the Bloch vector is `sign·ê_axis`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PauliFrame1Q {
    axis: Axis,
    sign: Sign,
}

impl PauliFrame1Q {
    /// The frame of the initial state |0⟩: +σ_z.
    pub fn initial() -> Self {
        PauliFrame1Q { axis: Axis::Z, sign: Sign::Plus }
    }

    pub fn new(axis: Axis, sign: Sign) -> Self {
        PauliFrame1Q { axis, sign }
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    /// The Bloch vector `sign·ê_axis` as an integer triple.
    pub fn vector(&self) -> [i64; 3] {
        let mut v = [0i64; 3];
        v[self.axis.index()] = if self.sign == Sign::Plus { 1 } else { -1 };
        v
    }

    fn from_vector(v: [i64; 3]) -> Self {
        debug_assert_eq!(v.iter().map(|c| c * c).sum::<i64>(), 1, "frame vector must be a signed unit vector");
        for axis in Axis::ALL {
            match v[axis.index()] {
                1 => return PauliFrame1Q { axis, sign: Sign::Plus },
                -1 => return PauliFrame1Q { axis, sign: Sign::Minus },
                _ => {}
            }
        }
        unreachable!("frame vector had no non-zero component")
    }

    /// Advances the frame through a Clifford rotation.
    ///
    /// Errors if the rotation angle is not a multiple of π/2.
    pub fn apply(&self, rot: &Rotation) -> Result<Self> {
        let turns = quarter_turns(rot)?;
        Ok(Self::from_vector(rotate_int_vector(rot.axis, turns, self.vector())))
    }

    /// If the frame sits on the z axis, the computational state it pins down:
    /// `Some(false)` for |0⟩, `Some(true)` for |1⟩, `None` off-axis.
    pub fn z_eigenstate(&self) -> Option<bool> {
        if self.axis == Axis::Z {
            Some(self.sign == Sign::Minus)
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{BlochState, Channel};
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn half_turns_flip_perpendicular_frames_only() {
        let frame = PauliFrame1Q::initial();
        let about_x = Rotation::new(Axis::X, PI, Sign::Plus);
        let flipped = frame.apply(&about_x).unwrap();
        assert_eq!(flipped, PauliFrame1Q::new(Axis::Z, Sign::Minus));
        let about_z = Rotation::new(Axis::Z, PI, Sign::Minus);
        assert_eq!(frame.apply(&about_z).unwrap(), frame, "parallel half turn is a no-op");
    }

    #[test]
    fn quarter_turn_moves_pole_to_equator_and_back() {
        let frame = PauliFrame1Q::initial();
        let up = frame.apply(&Rotation::new(Axis::Y, FRAC_PI_2, Sign::Plus)).unwrap();
        assert_eq!(up, PauliFrame1Q::new(Axis::X, Sign::Plus));
        let back = up.apply(&Rotation::new(Axis::Y, FRAC_PI_2, Sign::Minus)).unwrap();
        assert_eq!(back, frame);
    }

    #[test]
    fn non_clifford_angles_are_rejected() {
        let frame = PauliFrame1Q::initial();
        assert!(frame.apply(&Rotation::new(Axis::X, 0.7, Sign::Plus)).is_err());
    }

    #[test]
    fn frame_tracking_agrees_with_dense_simulation_over_random_circuits() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..50 {
            let mut frame = PauliFrame1Q::initial();
            let mut state = BlochState::KET_ZERO;
            for _ in 0..40 {
                let axis = Axis::ALL[rng.random_range(0..3)];
                let angle = if rng.random_bool(0.5) { FRAC_PI_2 } else { PI };
                let sign = if rng.random_bool(0.5) { Sign::Plus } else { Sign::Minus };
                let rot = Rotation::new(axis, angle, sign);
                frame = frame.apply(&rot).unwrap();
                state = Channel::rotation(rot).apply(&state);
            }
            let v = frame.vector();
            // Ideal pulses have snapped transfer matrices, so agreement is exact.
            assert_eq!(
                (state.x, state.y, state.z),
                (v[0] as f64, v[1] as f64, v[2] as f64),
                "frame and dense Bloch evolution disagree"
            );
        }
    }

    #[test]
    fn z_eigenstate_reads_off_the_measurement_outcome() {
        assert_eq!(PauliFrame1Q::initial().z_eigenstate(), Some(false));
        assert_eq!(PauliFrame1Q::new(Axis::Z, Sign::Minus).z_eigenstate(), Some(true));
        assert_eq!(PauliFrame1Q::new(Axis::X, Sign::Plus).z_eigenstate(), None);
    }
}
