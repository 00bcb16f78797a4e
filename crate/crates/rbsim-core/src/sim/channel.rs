//! Quantum channels as real Pauli-transfer matrices.
//!
//! A channel on n qubits is stored as the (4^n)×(4^n) real matrix R with
//! R[i][j] = Tr[P_i E(P_j)] / 2^n over the Pauli-product basis.  Unitaries,
//! depolarization, dephasing, and bit flips are all linear in this picture, so
//! sequences compose by matrix products and states evolve by matrix-vector
//! products.  Trace preservation shows up as a fixed top row (1, 0, …, 0) and
//! complete positivity as positivity of the reconstructed process matrix.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::linalg::{hermitian_eigenvalues, is_unitary, pauli_products};
use super::{Axis, BlochState, DensityMatrix, Rotation};
use crate::error::{Error, Result};

/// Matrix entries this close to -1, 0, or +1 are snapped exactly.
///
/// Protocol pulses are quarter- and half-turns whose ideal transfer matrices
/// are signed permutations; snapping keeps noiseless pipelines bit-exact
/// instead of accumulating 1e-16 debris from cos(π/2).
const SNAP_TOL: f64 = 1e-14;

fn snap(v: f64) -> f64 {
    let r = v.round();
    if r.abs() <= 1.0 && (v - r).abs() < SNAP_TOL {
        r
    } else {
        v
    }
}

/// A completely-positive trace-preserving (or candidate) map on 1 or 2 qubits.
#[derive(Clone, Debug)]
pub struct Channel {
    ptm: DMatrix<f64>,
    qubits: usize,
    /// The generating unitary, when the channel is a pure unitary conjugation.
    unitary: Option<DMatrix<Complex64>>,
}

impl Channel {
    // ---------------------------------------------------------------- basics

    /// The identity channel on `qubits` qubits.
    pub fn identity(qubits: usize) -> Channel {
        let dim = 4usize.pow(qubits as u32);
        Channel {
            ptm: DMatrix::identity(dim, dim),
            qubits,
            unitary: Some(DMatrix::identity(1 << qubits, 1 << qubits)),
        }
    }

    /// Wraps a raw transfer matrix, checking shape and the trace-preserving row.
    pub fn from_ptm(ptm: DMatrix<f64>, qubits: usize) -> Result<Channel> {
        let dim = 4usize.pow(qubits as u32);
        if ptm.nrows() != dim || ptm.ncols() != dim {
            return Err(Error::DimensionMismatch(format!(
                "transfer matrix must be {dim}x{dim} for {qubits} qubit(s), got {}x{}",
                ptm.nrows(),
                ptm.ncols()
            )));
        }
        let mut top_ok = (ptm[(0, 0)] - 1.0).abs() <= 1e-12;
        for c in 1..dim {
            top_ok &= ptm[(0, c)].abs() <= 1e-12;
        }
        if !top_ok {
            return Err(Error::InvalidParameter(
                "transfer matrix is not trace preserving (top row must be (1, 0, …, 0))".into(),
            ));
        }
        Ok(Channel { ptm, qubits, unitary: None })
    }

    /// Builds the channel of a unitary matrix by conjugation.
    pub fn from_unitary(u: DMatrix<Complex64>) -> Result<Channel> {
        let d = u.nrows();
        let qubits = match d {
            2 => 1,
            4 => 2,
            _ => {
                return Err(Error::DimensionMismatch(format!(
                    "unitary must act on 1 or 2 qubits, got dimension {d}"
                )))
            }
        };
        if !is_unitary(&u, 1e-10) {
            return Err(Error::InvalidParameter("matrix is not unitary".into()));
        }
        let paulis = pauli_products(qubits);
        let dim = paulis.len();
        let mut ptm = DMatrix::zeros(dim, dim);
        let ud = u.adjoint();
        for j in 0..dim {
            let conj = &u * &paulis[j] * &ud;
            for i in 0..dim {
                let tr: Complex64 = (&paulis[i] * &conj).diagonal().iter().sum();
                ptm[(i, j)] = snap(tr.re / d as f64);
            }
        }
        Ok(Channel { ptm, qubits, unitary: Some(u) })
    }

    /// Read-only view of the transfer matrix.
    pub fn ptm(&self) -> &DMatrix<f64> {
        &self.ptm
    }

    /// Number of qubits the channel acts on.
    pub fn qubits(&self) -> usize {
        self.qubits
    }

    /// The generating unitary, if this channel is a known unitary conjugation.
    pub fn unitary(&self) -> Option<&DMatrix<Complex64>> {
        self.unitary.as_ref()
    }

    // ----------------------------------------------------------- constructors

    /// The channel of a major-axis rotation, e^{-i·signed_angle·σ_axis/2}.
    ///
    /// `Sign::Plus` rotates the Bloch sphere right-handedly about the axis by
    /// `angle`; quarter- and half-turn entries come out exactly ±1/0.
    pub fn rotation(rot: Rotation) -> Channel {
        Self::rotation_about(rot.axis.unit(), rot.signed_angle())
            .expect("major axis is a unit vector")
    }

    /// The channel of a rotation about an arbitrary (non-zero) axis.
    pub fn rotation_about(axis: [f64; 3], angle: f64) -> Result<Channel> {
        let norm = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        if norm < 1e-12 {
            return Err(Error::InvalidParameter("rotation axis must be non-zero".into()));
        }
        let n = [axis[0] / norm, axis[1] / norm, axis[2] / norm];
        let (s, c) = angle.sin_cos();
        // Rodrigues form: R = cI + s[n]_x + (1-c) nnᵀ.
        let mut block = [[0.0f64; 3]; 3];
        let cross = [
            [0.0, -n[2], n[1]],
            [n[2], 0.0, -n[0]],
            [-n[1], n[0], 0.0],
        ];
        for r in 0..3 {
            for col in 0..3 {
                let eye = if r == col { 1.0 } else { 0.0 };
                block[r][col] = snap(c * eye + s * cross[r][col] + (1.0 - c) * n[r] * n[col]);
            }
        }
        let mut ptm = DMatrix::zeros(4, 4);
        ptm[(0, 0)] = 1.0;
        for r in 0..3 {
            for col in 0..3 {
                ptm[(r + 1, col + 1)] = block[r][col];
            }
        }
        // U = cos(θ/2) I - i sin(θ/2) n·σ.
        let (hs, hc) = (angle / 2.0).sin_cos();
        let i = Complex64::new(0.0, 1.0);
        let u = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(hc, 0.0) - i * hs * Complex64::new(n[2], 0.0),
                -i * hs * Complex64::new(n[0], -n[1]),
                -i * hs * Complex64::new(n[0], n[1]),
                Complex64::new(hc, 0.0) + i * hs * Complex64::new(n[2], 0.0),
            ],
        );
        Ok(Channel { ptm, qubits: 1, unitary: Some(u) })
    }

    /// A rotation about the z axis by `theta` (right-handed).
    pub fn z_rotation(theta: f64) -> Channel {
        Self::rotation_about(Axis::Z.unit(), theta).expect("z is a unit axis")
    }

    /// Uniform depolarization: with probability `d` replace the state by I/2^n.
    pub fn depolarizing(qubits: usize, d: f64) -> Result<Channel> {
        if !(0.0..=1.0).contains(&d) {
            return Err(Error::InvalidParameter(format!(
                "depolarization probability must be in [0, 1], got {d}"
            )));
        }
        let dim = 4usize.pow(qubits as u32);
        let mut ptm = DMatrix::identity(dim, dim);
        for k in 1..dim {
            ptm[(k, k)] = 1.0 - d;
        }
        Ok(Channel { ptm, qubits, unitary: None })
    }

    /// Phase damping that multiplies transverse components by e^{-gamma_t}.
    ///
    /// `gamma_t` is the accumulated rate×time exponent, so 0 is the identity.
    pub fn dephasing(gamma_t: f64) -> Result<Channel> {
        if !gamma_t.is_finite() || gamma_t < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "dephasing exponent must be finite and ≥ 0, got {gamma_t}"
            )));
        }
        let f = (-gamma_t).exp();
        let mut ptm = DMatrix::identity(4, 4);
        ptm[(1, 1)] = f;
        ptm[(2, 2)] = f;
        Ok(Channel { ptm, qubits: 1, unitary: None })
    }

    /// Classical bit flip in the σ_z basis with probability `p`.
    pub fn bit_flip(p: f64) -> Result<Channel> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!(
                "flip probability must be in [0, 1], got {p}"
            )));
        }
        let mut ptm = DMatrix::identity(4, 4);
        ptm[(2, 2)] = 1.0 - 2.0 * p;
        ptm[(3, 3)] = 1.0 - 2.0 * p;
        Ok(Channel { ptm, qubits: 1, unitary: None })
    }

    /// The two-qubit controlled-NOT with the given control and target (0 or 1).
    pub fn cnot(control: usize, target: usize) -> Result<Channel> {
        if control > 1 || target > 1 || control == target {
            return Err(Error::InvalidParameter(format!(
                "controlled-NOT needs distinct qubits from {{0, 1}}, got ({control}, {target})"
            )));
        }
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        // Basis index b = 2·b0 + b1 (qubit 0 leftmost).
        let mut u = DMatrix::from_element(4, 4, o);
        for b in 0..4usize {
            let bits = [(b >> 1) & 1, b & 1];
            let mut out = bits;
            if bits[control] == 1 {
                out[target] ^= 1;
            }
            u[(2 * out[0] + out[1], b)] = l;
        }
        Self::from_unitary(u)
    }

    // ------------------------------------------------------------ combinators

    /// Tensor product; `self` acts on the leftmost (lower-index) qubits.
    pub fn tensor(&self, other: &Channel) -> Channel {
        let unitary = match (&self.unitary, &other.unitary) {
            (Some(a), Some(b)) => Some(a.kronecker(b)),
            _ => None,
        };
        Channel {
            ptm: self.ptm.kronecker(&other.ptm),
            qubits: self.qubits + other.qubits,
            unitary,
        }
    }

    /// Embeds a one-qubit channel on qubit `q` of an `n`-qubit register.
    pub fn lift(&self, q: usize, n: usize) -> Result<Channel> {
        if self.qubits != 1 {
            return Err(Error::DimensionMismatch("lift takes a one-qubit channel".into()));
        }
        if q >= n {
            return Err(Error::InvalidParameter(format!("qubit {q} out of range for n={n}")));
        }
        let mut out = if q == 0 { self.clone() } else { Channel::identity(1) };
        for k in 1..n {
            let factor = if k == q { self.clone() } else { Channel::identity(1) };
            out = out.tensor(&factor);
        }
        Ok(out)
    }

    /// Applies `self` first, then `next`.
    pub fn then(&self, next: &Channel) -> Result<Channel> {
        compose(self, next)
    }

    // ------------------------------------------------------------- application

    /// Evolves a Bloch state through the channel.
    ///
    /// Panics if the channel is not single-qubit; that is a programming error,
    /// not a data error.
    pub fn apply(&self, state: &BlochState) -> BlochState {
        assert_eq!(self.qubits, 1, "Bloch states are single-qubit");
        let v = DVector::from_row_slice(&[1.0, state.x, state.y, state.z]);
        let w = &self.ptm * v;
        BlochState::new(w[1], w[2], w[3])
    }

    /// Evolves a density matrix (any supported qubit count) through the channel.
    pub fn apply_density(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.qubits() != self.qubits {
            return Err(Error::DimensionMismatch(format!(
                "channel on {} qubit(s) applied to state on {}",
                self.qubits,
                rho.qubits()
            )));
        }
        let v = rho.pauli_vec();
        let w = &self.ptm * v;
        DensityMatrix::from_pauli_vec(&w, self.qubits)
    }

    // -------------------------------------------------------------- diagnostics

    /// Whether the top row is (1, 0, …, 0) within `tol`.
    pub fn is_trace_preserving(&self, tol: f64) -> bool {
        let dim = self.ptm.nrows();
        if (self.ptm[(0, 0)] - 1.0).abs() > tol {
            return false;
        }
        (1..dim).all(|c| self.ptm[(0, c)].abs() <= tol)
    }

    /// The process (Choi) matrix J = Σ_ij R_ij · P_i ⊗ P_jᵀ / 4^n.
    pub fn choi(&self) -> DMatrix<Complex64> {
        let paulis = pauli_products(self.qubits);
        let dim = paulis.len();
        let hilbert = 1usize << self.qubits;
        let mut j = DMatrix::from_element(hilbert * hilbert, hilbert * hilbert, Complex64::new(0.0, 0.0));
        for a in 0..dim {
            for b in 0..dim {
                let w = self.ptm[(a, b)];
                if w == 0.0 {
                    continue;
                }
                let term = paulis[a].kronecker(&paulis[b].transpose());
                j += term * Complex64::new(w / dim as f64, 0.0);
            }
        }
        j
    }

    /// Smallest eigenvalue of the process matrix (≥ 0 for CP maps).
    pub fn choi_min_eigenvalue(&self) -> f64 {
        let vals = hermitian_eigenvalues(&self.choi());
        vals.into_iter().fold(f64::INFINITY, f64::min)
    }

    /// Complete positivity: the process matrix has no eigenvalue below `-tol`.
    pub fn is_completely_positive(&self, tol: f64) -> bool {
        self.choi_min_eigenvalue() >= -tol
    }

    /// Averages U†∘self∘U over a finite set of unitary channels.
    ///
    /// Errors on an empty set or on set members that are not unitary channels
    /// (their transfer matrices must be orthogonal).
    pub fn twirl(&self, unitary_set: &[Channel]) -> Result<Channel> {
        if unitary_set.is_empty() {
            return Err(Error::InvalidParameter("twirl set must be non-empty".into()));
        }
        let dim = self.ptm.nrows();
        let mut acc = DMatrix::<f64>::zeros(dim, dim);
        for u in unitary_set {
            if u.qubits != self.qubits {
                return Err(Error::DimensionMismatch(
                    "twirl set member acts on a different qubit count".into(),
                ));
            }
            let orth = &u.ptm * u.ptm.transpose();
            if !orth.is_identity(1e-10) {
                return Err(Error::InvalidParameter(
                    "twirl set member is not a unitary channel".into(),
                ));
            }
            acc += u.ptm.transpose() * &self.ptm * &u.ptm;
        }
        acc /= unitary_set.len() as f64;
        Ok(Channel { ptm: acc, qubits: self.qubits, unitary: None })
    }
}

/// Applies `first`, then `second` (so the transfer matrix is R₂·R₁).
pub fn compose(first: &Channel, second: &Channel) -> Result<Channel> {
    if first.qubits != second.qubits {
        return Err(Error::DimensionMismatch(format!(
            "cannot compose channels on {} and {} qubit(s)",
            first.qubits, second.qubits
        )));
    }
    let unitary = match (&first.unitary, &second.unitary) {
        (Some(a), Some(b)) => Some(b * a),
        _ => None,
    };
    Ok(Channel {
        ptm: &second.ptm * &first.ptm,
        qubits: first.qubits,
        unitary,
    })
}

/// The four Pauli conjugation channels I, X, Y, Z.
pub fn pauli_channels_1q() -> Vec<Channel> {
    use super::Sign;
    let mut out = vec![Channel::identity(1)];
    for axis in Axis::ALL {
        out.push(Channel::rotation(Rotation::new(axis, std::f64::consts::PI, Sign::Plus)));
    }
    out
}

/// The 24-element one-qubit Clifford group as rotation channels.
///
/// On the Bloch sphere these are exactly the signed axis permutations with
/// determinant +1 (the rotation group of the octahedron).
pub fn clifford_channels_1q() -> Vec<Channel> {
    let perms = [
        [0usize, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let mut out = Vec::with_capacity(24);
    for perm in perms {
        for signs in 0..8u8 {
            let sgn = [
                if signs & 1 == 0 { 1.0 } else { -1.0 },
                if signs & 2 == 0 { 1.0 } else { -1.0 },
                if signs & 4 == 0 { 1.0 } else { -1.0 },
            ];
            let mut block = [[0.0f64; 3]; 3];
            for (row, &col) in perm.iter().enumerate() {
                block[row][col] = sgn[row];
            }
            let det = block[0][0] * (block[1][1] * block[2][2] - block[1][2] * block[2][1])
                - block[0][1] * (block[1][0] * block[2][2] - block[1][2] * block[2][0])
                + block[0][2] * (block[1][0] * block[2][1] - block[1][1] * block[2][0]);
            if det < 0.0 {
                continue;
            }
            let mut ptm = DMatrix::zeros(4, 4);
            ptm[(0, 0)] = 1.0;
            for r in 0..3 {
                for c in 0..3 {
                    ptm[(r + 1, c + 1)] = block[r][c];
                }
            }
            out.push(Channel { ptm, qubits: 1, unitary: None });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::Sign;
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, PI};

    /// Dense oracle: Bloch image of a state under U·ρ·U† computed with raw
    /// complex 2×2 arithmetic, independent of the transfer-matrix code path.
    fn dense_rotation_image(axis: [f64; 3], angle: f64, r: [f64; 3]) -> [f64; 3] {
        let paulis = pauli_products(1);
        let (hs, hc) = (angle / 2.0).sin_cos();
        let i = Complex64::new(0.0, 1.0);
        let nsigma = &paulis[1] * Complex64::new(axis[0], 0.0)
            + &paulis[2] * Complex64::new(axis[1], 0.0)
            + &paulis[3] * Complex64::new(axis[2], 0.0);
        let u = &paulis[0] * Complex64::new(hc, 0.0) - nsigma * (i * hs);
        let mut rho = paulis[0].clone() * Complex64::new(0.5, 0.0);
        for (k, comp) in r.iter().enumerate() {
            rho += &paulis[k + 1] * Complex64::new(0.5 * comp, 0.0);
        }
        let evolved = &u * rho * u.adjoint();
        let mut out = [0.0; 3];
        for k in 0..3 {
            let tr: Complex64 = (&paulis[k + 1] * &evolved).diagonal().iter().sum();
            out[k] = tr.re;
        }
        out
    }

    #[test]
    fn rotation_matches_dense_conjugation_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for axis in Axis::ALL {
            for angle in [FRAC_PI_2, PI, 0.3, -1.2, 2.9] {
                for sign in Sign::ALL {
                    let ch = Channel::rotation(Rotation::new(axis, angle, sign));
                    for _ in 0..4 {
                        let r = [
                            rng.random_range(-0.6..0.6),
                            rng.random_range(-0.6..0.6),
                            rng.random_range(-0.6..0.6),
                        ];
                        let got = ch.apply(&BlochState::new(r[0], r[1], r[2]));
                        let want =
                            dense_rotation_image(axis.unit(), sign.factor() * angle, r);
                        assert_abs_diff_eq!(got.x, want[0], epsilon = 1e-12);
                        assert_abs_diff_eq!(got.y, want[1], epsilon = 1e-12);
                        assert_abs_diff_eq!(got.z, want[2], epsilon = 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn quarter_turn_about_y_maps_pole_onto_x() {
        let plus = Channel::rotation(Rotation::new(Axis::Y, FRAC_PI_2, Sign::Plus));
        let got = plus.apply(&BlochState::KET_ZERO);
        // Entries are snapped, so the image is exact.
        assert_eq!((got.x, got.y, got.z), (1.0, 0.0, 0.0));
        let minus = Channel::rotation(Rotation::new(Axis::Y, FRAC_PI_2, Sign::Minus));
        let got = minus.apply(&BlochState::KET_ZERO);
        assert_eq!((got.x, got.y, got.z), (-1.0, 0.0, 0.0));
    }

    #[test]
    fn depolarizing_shrinks_the_pole_by_one_minus_d() {
        let ch = Channel::depolarizing(1, 0.2).unwrap();
        let got = ch.apply(&BlochState::KET_ZERO);
        assert_eq!((got.x, got.y, got.z), (0.0, 0.0, 0.8));
    }

    #[test]
    fn sequential_depolarizations_combine_multiplicatively() {
        let d1 = 0.0137;
        let d2 = 0.0462;
        let lhs = compose(
            &Channel::depolarizing(1, d1).unwrap(),
            &Channel::depolarizing(1, d2).unwrap(),
        )
        .unwrap();
        let rhs = Channel::depolarizing(1, 1.0 - (1.0 - d1) * (1.0 - d2)).unwrap();
        assert!((lhs.ptm() - rhs.ptm()).abs().max() < 1e-15);
    }

    #[test]
    fn compose_applies_left_operand_first() {
        // Quarter turn about y then quarter turn about z: |0⟩ → +x → +y.
        let ry = Channel::rotation(Rotation::new(Axis::Y, FRAC_PI_2, Sign::Plus));
        let rz = Channel::rotation(Rotation::new(Axis::Z, FRAC_PI_2, Sign::Plus));
        let seq = compose(&ry, &rz).unwrap();
        let got = seq.apply(&BlochState::KET_ZERO);
        assert_eq!((got.x, got.y, got.z), (0.0, 1.0, 0.0));
    }

    #[test]
    fn composing_two_quarter_turns_gives_the_half_turn_unitary() {
        let q = Channel::rotation(Rotation::new(Axis::X, FRAC_PI_2, Sign::Plus));
        let h = Channel::rotation(Rotation::new(Axis::X, PI, Sign::Plus));
        let composed = q.then(&q).unwrap();
        let (got, want) = (composed.unitary().unwrap(), h.unitary().unwrap());
        assert!((got - want).iter().all(|v| v.norm() < 1e-12));
        assert!((composed.ptm() - h.ptm()).abs().max() < 1e-12);
    }

    #[test]
    fn constructors_preserve_trace_row() {
        let channels = [
            Channel::rotation(Rotation::new(Axis::X, 0.7, Sign::Minus)),
            Channel::depolarizing(1, 0.3).unwrap(),
            Channel::dephasing(0.25).unwrap(),
            Channel::bit_flip(0.1).unwrap(),
            Channel::cnot(0, 1).unwrap(),
        ];
        for ch in channels {
            assert!(ch.is_trace_preserving(1e-12));
        }
    }

    #[test]
    fn depolarizing_channel_is_completely_positive() {
        let ch = Channel::depolarizing(1, 0.1).unwrap();
        assert!(ch.is_completely_positive(1e-10));
        assert!(ch.choi_min_eigenvalue() > -1e-15);
    }

    #[test]
    fn transverse_amplification_fails_positivity() {
        // Scaling the x component by 1.5 is trace preserving but not a physical
        // map; its process matrix picks up the eigenvalue (1 - 1.5)/4 = -0.125.
        let mut ptm = DMatrix::identity(4, 4);
        ptm[(1, 1)] = 1.5;
        let ch = Channel::from_ptm(ptm, 1).unwrap();
        let min = ch.choi_min_eigenvalue();
        assert!(min < -1e-10, "expected a negative process eigenvalue, got {min}");
        assert_abs_diff_eq!(min, -0.125, epsilon = 1e-9);
        assert!(!ch.is_completely_positive(1e-10));
    }

    /// A generic CPTP channel with coherent, depolarizing, dephasing, flip, and
    /// non-unital (amplitude-damping) pieces — nothing special left to twirl away.
    fn random_messy_channel(rng: &mut ChaCha8Rng) -> Channel {
        let rot = Channel::rotation_about(
            [
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0f64).max(0.2),
            ],
            rng.random_range(0.1..2.0),
        )
        .unwrap();
        let gamma: f64 = rng.random_range(0.0..0.4);
        let root = (1.0 - gamma).sqrt();
        let mut ad = DMatrix::identity(4, 4);
        ad[(1, 1)] = root;
        ad[(2, 2)] = root;
        ad[(3, 3)] = 1.0 - gamma;
        ad[(3, 0)] = gamma;
        let damping = Channel::from_ptm(ad, 1).unwrap();
        let chain = [
            rot,
            Channel::depolarizing(1, rng.random_range(0.0..0.2)).unwrap(),
            Channel::dephasing(rng.random_range(0.0..0.5)).unwrap(),
            Channel::bit_flip(rng.random_range(0.0..0.1)).unwrap(),
            damping,
        ];
        chain
            .into_iter()
            .reduce(|acc, next| acc.then(&next).unwrap())
            .unwrap()
    }

    #[test]
    fn pauli_twirl_diagonalizes_any_channel() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let set = pauli_channels_1q();
        for _ in 0..8 {
            let twirled = random_messy_channel(&mut rng).twirl(&set).unwrap();
            for r in 0..4 {
                for c in 0..4 {
                    if r != c {
                        assert!(
                            twirled.ptm()[(r, c)].abs() < 1e-12,
                            "off-diagonal entry ({r},{c}) survived the Pauli twirl"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn clifford_twirl_yields_uniform_depolarization() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let set = clifford_channels_1q();
        assert_eq!(set.len(), 24);
        for _ in 0..5 {
            let ch = random_messy_channel(&mut rng);
            let block_trace = ch.ptm()[(1, 1)] + ch.ptm()[(2, 2)] + ch.ptm()[(3, 3)];
            let f = block_trace / 3.0;
            let twirled = ch.twirl(&set).unwrap();
            for r in 0..4 {
                for c in 0..4 {
                    let want = match (r, c) {
                        (0, 0) => 1.0,
                        _ if r == c => f,
                        _ => 0.0,
                    };
                    assert_abs_diff_eq!(twirled.ptm()[(r, c)], want, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn twirl_rejects_bad_sets() {
        let ch = Channel::depolarizing(1, 0.1).unwrap();
        assert!(ch.twirl(&[]).is_err(), "empty set must be rejected");
        let not_unitary = vec![Channel::depolarizing(1, 0.5).unwrap()];
        assert!(ch.twirl(&not_unitary).is_err(), "non-unitary member must be rejected");
    }

    #[test]
    fn cnot_transfer_matrix_is_the_expected_signed_permutation() {
        let ch = Channel::cnot(0, 1).unwrap();
        // Conjugation table spot checks; index = 4·(qubit-0 Pauli) + qubit-1 Pauli.
        let expectations = [
            (4usize, 5usize, 1.0),  // X⊗I → X⊗X
            (3, 15, 1.0),           // I⊗Z → Z⊗Z
            (12, 12, 1.0),          // Z⊗I → Z⊗I
            (1, 1, 1.0),            // I⊗X → I⊗X
            (6, 11, 1.0),           // X⊗Y → Y⊗Z
        ];
        for (input, output, sign) in expectations {
            for row in 0..16 {
                let want = if row == output { sign } else { 0.0 };
                assert_abs_diff_eq!(ch.ptm()[(row, input)], want, epsilon = 1e-13);
            }
        }
        // Every column of a Clifford conjugation is a signed unit vector.
        for c in 0..16 {
            let nonzero: Vec<f64> = (0..16)
                .map(|r| ch.ptm()[(r, c)])
                .filter(|v| v.abs() > 1e-13)
                .collect();
            assert_eq!(nonzero.len(), 1, "column {c} is not a signed unit vector");
            assert!((nonzero[0].abs() - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn lift_places_the_channel_on_the_requested_qubit() {
        let flip = Channel::rotation(Rotation::new(Axis::X, PI, Sign::Plus));
        let on_q1 = flip.lift(1, 2).unwrap();
        let rho = DensityMatrix::basis_state(2, 0b00);
        let evolved = on_q1.apply_density(&rho).unwrap();
        let probs = evolved.measure_z();
        // |00⟩ with qubit 1 flipped is |01⟩, index 1 in the b = 2·b0 + b1 order.
        assert_abs_diff_eq!(probs[1], 1.0, epsilon = 1e-12);
    }
}
