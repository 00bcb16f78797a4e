//! Small complex-matrix helpers shared by the channel and density types.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

/// The four one-qubit Pauli matrices I, X, Y, Z in that order.
pub(crate) fn pauli_matrices_1q() -> Vec<DMatrix<Complex64>> {
    let o = Complex64::new(0.0, 0.0);
    let l = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    vec![
        DMatrix::from_row_slice(2, 2, &[l, o, o, l]),
        DMatrix::from_row_slice(2, 2, &[o, l, l, o]),
        DMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
        DMatrix::from_row_slice(2, 2, &[l, o, o, -l]),
    ]
}

/// All 4^n n-qubit Pauli products, qubit 0 as the leftmost tensor factor.
///
/// Index i encodes base-4 digits (most significant digit = qubit 0), matching
/// the channel PTM basis ordering.
pub(crate) fn pauli_products(qubits: usize) -> Vec<DMatrix<Complex64>> {
    let singles = pauli_matrices_1q();
    let mut out = singles.clone();
    for _ in 1..qubits {
        let mut next = Vec::with_capacity(out.len() * 4);
        for left in &out {
            for right in &singles {
                next.push(left.kronecker(right));
            }
        }
        out = next;
    }
    out
}

/// Eigenvalues of a Hermitian complex matrix, via the real symmetric embedding
/// [[Re, -Im], [Im, Re]] whose spectrum is the Hermitian spectrum doubled.
pub(crate) fn hermitian_eigenvalues(h: &DMatrix<Complex64>) -> Vec<f64> {
    let n = h.nrows();
    let mut m = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for r in 0..n {
        for c in 0..n {
            let v = h[(r, c)];
            m[(r, c)] = v.re;
            m[(r + n, c + n)] = v.re;
            m[(r, c + n)] = -v.im;
            m[(r + n, c)] = v.im;
        }
    }
    let eig = SymmetricEigen::new(m);
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // Each Hermitian eigenvalue appears twice in the embedding; keep one copy.
    vals.into_iter().step_by(2).collect()
}

/// Whether U is unitary within `tol` (largest deviation of U·U† from I).
pub(crate) fn is_unitary(u: &DMatrix<Complex64>, tol: f64) -> bool {
    if u.nrows() != u.ncols() {
        return false;
    }
    let prod = u * u.adjoint();
    let eye = DMatrix::<Complex64>::identity(u.nrows(), u.ncols());
    (prod - eye).iter().all(|v| v.norm() <= tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_products_are_traceless_except_identity() {
        for (i, p) in pauli_products(2).iter().enumerate() {
            let tr: Complex64 = p.diagonal().iter().sum();
            if i == 0 {
                assert!((tr.re - 4.0).abs() < 1e-15);
            } else {
                assert!(tr.norm() < 1e-15, "product {i} should be traceless");
            }
        }
    }

    #[test]
    fn hermitian_eigenvalues_recover_known_spectrum() {
        // σ_y has eigenvalues ±1 and is genuinely complex.
        let y = &pauli_matrices_1q()[2];
        let vals = hermitian_eigenvalues(y);
        assert!((vals[0] + 1.0).abs() < 1e-12);
        assert!((vals[1] - 1.0).abs() < 1e-12);
    }
}
