//! Pulse labels: the vocabulary the protocol draws its sequences from.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::sim::{Axis, Rotation, Sign};
use crate::stabilizer::PauliFrame1Q;
use std::f64::consts::{FRAC_PI_2, PI};

/// What role a pulse plays in a sequence.
///
/// The class determines the pulse's nominal angle (π for Pauli pulses, π/2
/// otherwise) and which noise terms the error model attaches to it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PulseClass {
    /// One of the randomized computational π/2 pulses (axes x, y).
    Computational,
    /// A randomizing Pauli π pulse (axes x, y, z, or the identity slot).
    Pauli,
    /// The final π/2 pulse that maps the frame onto a σ_z eigenstate
    /// (axes x, y, z).
    Closing,
}

/// A single pulse in a benchmarking sequence.
///
/// `axis` is `None` only for the identity slot of a Pauli pulse, which applies
/// no rotation.  z-axis pulses are realized as frame changes accompanied by a
/// delay rather than as driven pulses, which matters to the noise model but
/// not to the ideal action.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PulseLabel {
    Computational { axis: Axis, sign: Sign },
    Pauli { axis: Option<Axis>, sign: Sign },
    Closing { axis: Axis, sign: Sign },
}

impl PulseLabel {
    /// A computational π/2 pulse; only x and y axes are driven.
    pub fn computational(axis: Axis, sign: Sign) -> Result<Self> {
        if axis == Axis::Z {
            return Err(Error::InvalidParameter(
                "computational pulses rotate about x or y only".into(),
            ));
        }
        Ok(PulseLabel::Computational { axis, sign })
    }

    pub fn class(&self) -> PulseClass {
        match self {
            PulseLabel::Computational { .. } => PulseClass::Computational,
            PulseLabel::Pauli { .. } => PulseClass::Pauli,
            PulseLabel::Closing { .. } => PulseClass::Closing,
        }
    }

    /// The ideal rotation; `None` for the identity slot.
    pub fn rotation(&self) -> Option<Rotation> {
        match self {
            PulseLabel::Computational { axis, sign } => {
                Some(Rotation::new(*axis, FRAC_PI_2, *sign))
            }
            PulseLabel::Pauli { axis: Some(axis), sign } => {
                Some(Rotation::new(*axis, PI, *sign))
            }
            PulseLabel::Pauli { axis: None, .. } => None,
            PulseLabel::Closing { axis, sign } => Some(Rotation::new(*axis, FRAC_PI_2, *sign)),
        }
    }

    /// The axis, `None` for the identity slot.
    pub fn axis(&self) -> Option<Axis> {
        match self {
            PulseLabel::Computational { axis, .. } | PulseLabel::Closing { axis, .. } => {
                Some(*axis)
            }
            PulseLabel::Pauli { axis, .. } => *axis,
        }
    }

    /// Whether the pulse is physically driven (x/y axes).  z-axis pulses and
    /// the identity slot are frame changes or delays: no beam, no amplitude or
    /// axis error.
    pub fn is_driven(&self) -> bool {
        matches!(self.axis(), Some(Axis::X) | Some(Axis::Y))
    }

    /// Advances an ideal Pauli frame through this pulse.
    pub fn apply_to_frame(&self, frame: PauliFrame1Q) -> Result<PauliFrame1Q> {
        match self.rotation() {
            Some(rot) => frame.apply(&rot),
            None => Ok(frame),
        }
    }
}

impl fmt::Display for PulseLabel {
    /// Compact token form used in plan files: class letter, sign, axis, e.g.
    /// `G+x`, `P-z`, `P+0` (identity slot), `R-y`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (class, axis, sign) = match self {
            PulseLabel::Computational { axis, sign } => ('G', Some(*axis), sign),
            PulseLabel::Pauli { axis, sign } => ('P', *axis, sign),
            PulseLabel::Closing { axis, sign } => ('R', Some(*axis), sign),
        };
        let sign = match sign {
            Sign::Plus => '+',
            Sign::Minus => '-',
        };
        let axis = match axis {
            None => '0',
            Some(Axis::X) => 'x',
            Some(Axis::Y) => 'y',
            Some(Axis::Z) => 'z',
        };
        write!(f, "{class}{sign}{axis}")
    }
}

impl FromStr for PulseLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("unrecognized pulse token {s:?}"));
        let mut chars = s.chars();
        let (class, sign, axis) =
            match (chars.next(), chars.next(), chars.next(), chars.next()) {
                (Some(c), Some(sg), Some(ax), None) => (c, sg, ax),
                _ => return Err(bad()),
            };
        let sign = match sign {
            '+' => Sign::Plus,
            '-' => Sign::Minus,
            _ => return Err(bad()),
        };
        let axis = match axis {
            '0' => None,
            'x' => Some(Axis::X),
            'y' => Some(Axis::Y),
            'z' => Some(Axis::Z),
            _ => return Err(bad()),
        };
        match (class, axis) {
            ('G', Some(axis)) => PulseLabel::computational(axis, sign),
            ('P', axis) => Ok(PulseLabel::Pauli { axis, sign }),
            ('R', Some(axis)) => Ok(PulseLabel::Closing { axis, sign }),
            _ => Err(bad()),
        }
    }
}

/// Every pulse label the protocol can emit: 4 computational, 8 Pauli, and 6
/// closing labels.
pub fn all_pulse_labels() -> Vec<PulseLabel> {
    let mut labels = Vec::with_capacity(18);
    for sign in Sign::ALL {
        for axis in [Axis::X, Axis::Y] {
            labels.push(PulseLabel::Computational { axis, sign });
        }
    }
    for sign in Sign::ALL {
        for axis in [None, Some(Axis::X), Some(Axis::Y), Some(Axis::Z)] {
            labels.push(PulseLabel::Pauli { axis, sign });
        }
    }
    for sign in Sign::ALL {
        for axis in Axis::ALL {
            labels.push(PulseLabel::Closing { axis, sign });
        }
    }
    labels
}

/// Draws `count` i.i.d. computational gates, uniform over {x, y} × {+, −}.
pub fn sample_computational_gates<R: Rng>(count: usize, rng: &mut R) -> Vec<PulseLabel> {
    (0..count)
        .map(|_| {
            let idx = rng.random_range(0..4u8);
            let axis = if idx % 2 == 0 { Axis::X } else { Axis::Y };
            let sign = if idx < 2 { Sign::Plus } else { Sign::Minus };
            PulseLabel::Computational { axis, sign }
        })
        .collect()
}

/// Draws `count` i.i.d. Pauli pulses, uniform over the 8 labels
/// {identity, x, y, z} × {+, −}.
pub fn sample_pauli_pulses<R: Rng>(count: usize, rng: &mut R) -> Vec<PulseLabel> {
    (0..count)
        .map(|_| {
            let idx = rng.random_range(0..8u8);
            let axis = match idx % 4 {
                0 => None,
                1 => Some(Axis::X),
                2 => Some(Axis::Y),
                _ => Some(Axis::Z),
            };
            let sign = if idx < 4 { Sign::Plus } else { Sign::Minus };
            PulseLabel::Pauli { axis, sign }
        })
        .collect()
}
