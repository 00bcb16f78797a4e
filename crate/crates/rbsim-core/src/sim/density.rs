//! Dense density-matrix states.
//!
//! This is the reference representation: exact, basis-explicit, and used as the
//! oracle for the cheaper Bloch-vector and stabilizer paths as well as for
//! two-qubit execution.  Basis index b = 2·b₀ + b₁ (qubit 0 is the leftmost
//! tensor factor), matching the channel transfer-matrix ordering.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::linalg::{hermitian_eigenvalues, is_unitary, pauli_products};
use super::BlochState;
use crate::error::{Error, Result};

/// A density matrix on 1 or 2 qubits.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    m: DMatrix<Complex64>,
    qubits: usize,
}

impl DensityMatrix {
    /// The computational basis state |index⟩⟨index|.
    pub fn basis_state(qubits: usize, index: usize) -> DensityMatrix {
        let dim = 1usize << qubits;
        assert!(index < dim, "basis index {index} out of range for {qubits} qubit(s)");
        let mut m = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
        m[(index, index)] = Complex64::new(1.0, 0.0);
        DensityMatrix { m, qubits }
    }

    /// Builds the one-qubit matrix (I + xX + yY + zZ)/2.
    pub fn from_bloch(state: &BlochState) -> DensityMatrix {
        let half = 0.5;
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(half * (1.0 + state.z), 0.0),
                Complex64::new(half * state.x, -half * state.y),
                Complex64::new(half * state.x, half * state.y),
                Complex64::new(half * (1.0 - state.z), 0.0),
            ],
        );
        DensityMatrix { m, qubits: 1 }
    }

    /// Extracts the Bloch vector of a one-qubit state.
    pub fn to_bloch(&self) -> Result<BlochState> {
        if self.qubits != 1 {
            return Err(Error::DimensionMismatch(
                "Bloch extraction is defined for one qubit".into(),
            ));
        }
        let v = self.pauli_vec();
        Ok(BlochState::new(v[1], v[2], v[3]))
    }

    /// Wraps an existing matrix after shape validation.
    pub fn from_matrix(m: DMatrix<Complex64>, qubits: usize) -> Result<DensityMatrix> {
        let dim = 1usize << qubits;
        if m.nrows() != dim || m.ncols() != dim {
            return Err(Error::DimensionMismatch(format!(
                "expected a {dim}x{dim} matrix for {qubits} qubit(s)"
            )));
        }
        Ok(DensityMatrix { m, qubits })
    }

    /// Read-only view of the underlying matrix.
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    /// Pauli coherence vector c_i = Tr[ρ P_i]; c₀ is the trace.
    pub fn pauli_vec(&self) -> DVector<f64> {
        let paulis = pauli_products(self.qubits);
        DVector::from_iterator(
            paulis.len(),
            paulis.iter().map(|p| {
                let tr: Complex64 = (p * &self.m).diagonal().iter().sum();
                tr.re
            }),
        )
    }

    /// Rebuilds ρ = Σ c_i P_i / 2^n from a coherence vector.
    pub fn from_pauli_vec(v: &DVector<f64>, qubits: usize) -> Result<DensityMatrix> {
        let paulis = pauli_products(qubits);
        if v.len() != paulis.len() {
            return Err(Error::DimensionMismatch(format!(
                "coherence vector of length {} does not match {} qubit(s)",
                v.len(),
                qubits
            )));
        }
        let dim = 1usize << qubits;
        let mut m = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
        let scale = 1.0 / dim as f64;
        for (c, p) in v.iter().zip(paulis.iter()) {
            m += p * Complex64::new(c * scale, 0.0);
        }
        Ok(DensityMatrix { m, qubits })
    }

    /// Conjugates by a unitary: ρ → UρU†.
    pub fn apply_unitary(&self, u: &DMatrix<Complex64>) -> Result<DensityMatrix> {
        if u.nrows() != self.m.nrows() {
            return Err(Error::DimensionMismatch("unitary dimension mismatch".into()));
        }
        if !is_unitary(u, 1e-10) {
            return Err(Error::InvalidParameter("matrix is not unitary".into()));
        }
        Ok(DensityMatrix { m: u * &self.m * u.adjoint(), qubits: self.qubits })
    }

    /// Real part of the trace (1 for normalized states).
    pub fn trace(&self) -> f64 {
        let tr: Complex64 = self.m.diagonal().iter().sum();
        tr.re
    }

    /// Whether ρ = ρ† within `tol`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        (&self.m - self.m.adjoint()).iter().all(|v| v.norm() <= tol)
    }

    /// Smallest eigenvalue (≥ 0 for physical states).
    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues(&self.m)
            .into_iter()
            .fold(f64::INFINITY, f64::min)
    }

    /// Positive semidefiniteness within `tol`.
    pub fn is_positive_semidefinite(&self, tol: f64) -> bool {
        self.min_eigenvalue() >= -tol
    }

    /// Distribution over computational-basis σ_z outcomes (the diagonal).
    pub fn measure_z(&self) -> Vec<f64> {
        self.m.diagonal().iter().map(|v| v.re).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bloch_round_trip_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let s = BlochState::new(
                rng.random_range(-0.5..0.5),
                rng.random_range(-0.5..0.5),
                rng.random_range(-0.5..0.5),
            );
            let back = DensityMatrix::from_bloch(&s).to_bloch().unwrap();
            assert_abs_diff_eq!(back.x, s.x, epsilon = 1e-14);
            assert_abs_diff_eq!(back.y, s.y, epsilon = 1e-14);
            assert_abs_diff_eq!(back.z, s.z, epsilon = 1e-14);
        }
    }

    #[test]
    fn basis_states_measure_deterministically() {
        for index in 0..4 {
            let rho = DensityMatrix::basis_state(2, index);
            let probs = rho.measure_z();
            for (b, p) in probs.iter().enumerate() {
                assert_eq!(*p, if b == index { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn coherence_vector_round_trips_a_random_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        // Random PSD matrix with unit trace: A·A† normalized.
        let a = DMatrix::from_fn(4, 4, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let mut m = &a * a.adjoint();
        let tr: Complex64 = m.diagonal().iter().sum();
        m /= tr;
        let rho = DensityMatrix::from_matrix(m, 2).unwrap();
        assert!(rho.is_hermitian(1e-12));
        assert!(rho.is_positive_semidefinite(1e-12));
        assert_abs_diff_eq!(rho.trace(), 1.0, epsilon = 1e-12);

        let rebuilt = DensityMatrix::from_pauli_vec(&rho.pauli_vec(), 2).unwrap();
        for (a, b) in rebuilt.matrix().iter().zip(rho.matrix().iter()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn two_qubit_state_has_no_bloch_vector() {
        assert!(DensityMatrix::basis_state(2, 0).to_bloch().is_err());
    }

    #[test]
    fn negativity_is_detected() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(1.2, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(-0.2, 0.0),
            ],
        );
        let rho = DensityMatrix::from_matrix(m, 1).unwrap();
        assert!(rho.is_hermitian(1e-12));
        assert!(!rho.is_positive_semidefinite(1e-10));
        assert_abs_diff_eq!(rho.min_eigenvalue(), -0.2, epsilon = 1e-12);
    }
}
