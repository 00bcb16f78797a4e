//! Integer-exact stabilizer bookkeeping.
//!
//! Benchmarking sequences are built from Clifford pulses, so the ideal state is
//! always a stabilizer state.  This module tracks it without floating point:
//! a signed Pauli axis for one qubit ([`PauliFrame1Q`]), and signed Pauli
//! products with a generator tableau ([`Tableau`]) for more qubits.  The dense
//! simulator in [`crate::sim`] serves as the oracle these structures are tested
//! against.

pub mod frame;
pub mod pauli;
pub mod tableau;

pub use frame::PauliFrame1Q;
pub use pauli::{PauliLetter, PauliProduct};
pub use tableau::{localize_to_z, parity, Tableau};

use crate::error::{Error, Result};
use crate::sim::{Axis, Rotation};

/// Converts a rotation into its number of right-handed quarter turns.
///
/// Errors unless the signed angle is an integer multiple of π/2 (within 1e-9):
/// only those rotations are Clifford and representable exactly.
pub(crate) fn quarter_turns(rot: &Rotation) -> Result<i32> {
    let halfpi = std::f64::consts::FRAC_PI_2;
    let signed = rot.signed_angle();
    let k = (signed / halfpi).round();
    if (signed - k * halfpi).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "rotation by {signed} rad is not a multiple of π/2; frame tracking is exact only for Clifford pulses"
        )));
    }
    Ok((k as i32).rem_euclid(4))
}

/// Rotates an integer vector right-handedly about `axis` by `quarter_turns`
/// quarter turns (already reduced to 0..4).
pub(crate) fn rotate_int_vector(axis: Axis, turns: i32, v: [i64; 3]) -> [i64; 3] {
    let a = axis.index();
    let (b, c) = ((a + 1) % 3, (a + 2) % 3);
    let mut out = v;
    for _ in 0..turns {
        // One right-handed quarter turn maps ê_b → ê_c → -ê_b, fixing ê_a.
        let (vb, vc) = (out[b], out[c]);
        out[b] = -vc;
        out[c] = vb;
    }
    out
}
