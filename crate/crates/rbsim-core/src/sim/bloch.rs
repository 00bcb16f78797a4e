//! Bloch-vector representation of a one-qubit state.

/// A one-qubit state as the real vector (x, y, z) with ρ = (I + xX + yY + zZ)/2.
///
/// Pure states have unit norm; channels may shrink the vector but never grow it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochState {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochState {
    /// The computational ground state |0⟩ = (0, 0, 1).
    pub const KET_ZERO: BlochState = BlochState { x: 0.0, y: 0.0, z: 1.0 };

    /// The excited state |1⟩ = (0, 0, -1).
    pub const KET_ONE: BlochState = BlochState { x: 0.0, y: 0.0, z: -1.0 };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        BlochState { x, y, z }
    }

    /// Euclidean norm of the Bloch vector (1 for pure states).
    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// Whether the vector is inside the Bloch ball (within `tol`).
    pub fn is_physical(&self, tol: f64) -> bool {
        self.norm() <= 1.0 + tol
    }

    /// Distribution over σ_z measurement outcomes: `[P(0), P(1)]`.
    pub fn measure_z(&self) -> [f64; 2] {
        [(1.0 + self.z) / 2.0, (1.0 - self.z) / 2.0]
    }

    /// Probability of the |1⟩ outcome.
    pub fn excited_prob(&self) -> f64 {
        (1.0 - self.z) / 2.0
    }
}
