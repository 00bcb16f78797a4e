//! Exact few-qubit simulation primitives.
//!
//! States are carried either as Bloch vectors (one qubit) or as dense density
//! matrices (used as the two-qubit reference path).  Operations are
//! Pauli-transfer-matrix channels, which make composition, tensor products,
//! twirling, and positivity checks plain linear algebra over the reals.

pub mod bloch;
pub mod channel;
pub mod density;
pub(crate) mod linalg;

pub use bloch::BlochState;
pub use channel::{clifford_channels_1q, compose, pauli_channels_1q, Channel};
pub use density::DensityMatrix;

/// A major axis of the Bloch sphere.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    /// All axes in a fixed order.
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    /// Index into `(x, y, z)` coordinate triples.
    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    /// Unit vector along the axis.
    pub fn unit(self) -> [f64; 3] {
        let mut v = [0.0; 3];
        v[self.index()] = 1.0;
        v
    }
}

impl std::fmt::Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        })
    }
}

/// Rotation direction label.
///
/// `Plus` is the right-handed Bloch-sphere rotation by the stated angle; `Minus`
/// rotates the other way.  In unitary terms `Plus` is e^{-i·angle·σ/2}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    /// Both signs in a fixed order.
    pub const ALL: [Sign; 2] = [Sign::Plus, Sign::Minus];

    /// `+1.0` or `-1.0`.
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    /// The opposite sign.
    pub fn flipped(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl std::fmt::Display for Sign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// A single-qubit rotation about a major axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rotation {
    pub axis: Axis,
    /// Rotation magnitude in radians (π/2 for computational pulses, π for Pauli
    /// pulses); noise models may perturb it.
    pub angle: f64,
    pub sign: Sign,
}

impl Rotation {
    pub fn new(axis: Axis, angle: f64, sign: Sign) -> Self {
        Rotation { axis, angle, sign }
    }

    /// The signed right-handed rotation angle.
    pub fn signed_angle(&self) -> f64 {
        self.sign.factor() * self.angle
    }
}
