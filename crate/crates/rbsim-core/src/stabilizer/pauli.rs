//! Signed multi-qubit Pauli products with exact phase bookkeeping.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{quarter_turns, rotate_int_vector};
use crate::error::{Error, Result};
use crate::sim::{Axis, Rotation, Sign};

/// A single-qubit Pauli letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PauliLetter {
    I,
    X,
    Y,
    Z,
}

impl PauliLetter {
    /// The letter along a Bloch axis.
    pub fn from_axis(axis: Axis) -> Self {
        match axis {
            Axis::X => PauliLetter::X,
            Axis::Y => PauliLetter::Y,
            Axis::Z => PauliLetter::Z,
        }
    }

    /// The Bloch axis of a non-identity letter.
    pub fn axis(self) -> Option<Axis> {
        match self {
            PauliLetter::I => None,
            PauliLetter::X => Some(Axis::X),
            PauliLetter::Y => Some(Axis::Y),
            PauliLetter::Z => Some(Axis::Z),
        }
    }

    fn vector(self) -> Option<[i64; 3]> {
        self.axis().map(Axis::unit).map(|u| [u[0] as i64, u[1] as i64, u[2] as i64])
    }

    /// Letter product a·b = i^phase · c; returns (c, phase power of i).
    fn mul(self, other: PauliLetter) -> (PauliLetter, u8) {
        use PauliLetter::*;
        match (self, other) {
            (I, b) => (b, 0),
            (a, I) => (a, 0),
            (a, b) if a == b => (I, 0),
            // Cyclic pairs pick up +i, anticyclic -i (power 3).
            (X, Y) => (Z, 1),
            (Y, Z) => (X, 1),
            (Z, X) => (Y, 1),
            (Y, X) => (Z, 3),
            (Z, Y) => (X, 3),
            (X, Z) => (Y, 3),
            _ => unreachable!(),
        }
    }
}

impl std::fmt::Display for PauliLetter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PauliLetter::I => "I",
            PauliLetter::X => "X",
            PauliLetter::Y => "Y",
            PauliLetter::Z => "Z",
        })
    }
}

/// i^phase_pow · (letter ⊗ letter ⊗ …); observables keep phase_pow even.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PauliProduct {
    letters: Vec<PauliLetter>,
    phase_pow: u8,
}

impl PauliProduct {
    /// The identity on `n` qubits.
    pub fn identity(n: usize) -> Self {
        PauliProduct { letters: vec![PauliLetter::I; n], phase_pow: 0 }
    }

    /// A single signed letter on qubit `q` of an `n`-qubit register.
    pub fn single(n: usize, q: usize, letter: PauliLetter, sign: Sign) -> Self {
        assert!(q < n, "qubit {q} out of range for n={n}");
        let mut letters = vec![PauliLetter::I; n];
        letters[q] = letter;
        PauliProduct { letters, phase_pow: if sign == Sign::Plus { 0 } else { 2 } }
    }

    pub fn n(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[PauliLetter] {
        &self.letters
    }

    pub fn letter(&self, q: usize) -> PauliLetter {
        self.letters[q]
    }

    /// Qubits carrying a non-identity letter.
    pub fn support(&self) -> Vec<usize> {
        self.letters
            .iter()
            .enumerate()
            .filter(|(_, l)| **l != PauliLetter::I)
            .map(|(q, _)| q)
            .collect()
    }

    /// True when every letter is the identity (regardless of phase).
    pub fn is_identity(&self) -> bool {
        self.letters.iter().all(|l| *l == PauliLetter::I)
    }

    /// The ±1 sign of a Hermitian product.
    ///
    /// Errors if the accumulated phase is ±i, which cannot happen for products
    /// and conjugations of commuting stabilizer elements.
    pub fn sign(&self) -> Result<Sign> {
        match self.phase_pow % 4 {
            0 => Ok(Sign::Plus),
            2 => Ok(Sign::Minus),
            _ => Err(Error::InvalidParameter(
                "Pauli product carries an imaginary phase and is not an observable".into(),
            )),
        }
    }

    /// Group product; phases add.
    pub fn mul(&self, other: &PauliProduct) -> Result<PauliProduct> {
        if self.n() != other.n() {
            return Err(Error::DimensionMismatch(
                "cannot multiply Pauli products on different registers".into(),
            ));
        }
        let mut phase = (self.phase_pow + other.phase_pow) % 4;
        let letters = self
            .letters
            .iter()
            .zip(other.letters.iter())
            .map(|(a, b)| {
                let (c, extra) = a.mul(*b);
                phase = (phase + extra) % 4;
                c
            })
            .collect();
        Ok(PauliProduct { letters, phase_pow: phase })
    }

    /// Whether the two products commute.
    pub fn commutes_with(&self, other: &PauliProduct) -> bool {
        let anticommuting = self
            .letters
            .iter()
            .zip(other.letters.iter())
            .filter(|(a, b)| {
                **a != PauliLetter::I && **b != PauliLetter::I && a != b
            })
            .count();
        anticommuting % 2 == 0
    }

    /// Conjugates by a Clifford rotation on qubit `q`: P → U P U†.
    pub fn conjugate_rotation(&self, q: usize, rot: &Rotation) -> Result<PauliProduct> {
        if q >= self.n() {
            return Err(Error::InvalidParameter(format!("qubit {q} out of range")));
        }
        let turns = quarter_turns(rot)?;
        let mut out = self.clone();
        if let Some(v) = self.letters[q].vector() {
            let w = rotate_int_vector(rot.axis, turns, v);
            for axis in Axis::ALL {
                match w[axis.index()] {
                    1 => out.letters[q] = PauliLetter::from_axis(axis),
                    -1 => {
                        out.letters[q] = PauliLetter::from_axis(axis);
                        out.phase_pow = (out.phase_pow + 2) % 4;
                    }
                    _ => {}
                }
            }
        }
        Ok(out)
    }

    /// Conjugates by a controlled-NOT: P → CNOT·P·CNOT.
    pub fn conjugate_cnot(&self, control: usize, target: usize) -> Result<PauliProduct> {
        let n = self.n();
        if control >= n || target >= n || control == target {
            return Err(Error::InvalidParameter(format!(
                "controlled-NOT needs distinct qubits in range, got ({control}, {target})"
            )));
        }
        use PauliLetter::*;
        // Conjugates of single letters on the control / target side; all carry
        // a plus sign, and composite letters follow by multiplying factors.
        let control_image = |l: PauliLetter| -> (PauliLetter, PauliLetter) {
            match l {
                I => (I, I),
                X => (X, X),
                Y => (Y, X),
                Z => (Z, I),
            }
        };
        let target_image = |l: PauliLetter| -> (PauliLetter, PauliLetter) {
            match l {
                I => (I, I),
                X => (I, X),
                Y => (Z, Y),
                Z => (Z, Z),
            }
        };
        let (c_on_c, c_on_t) = control_image(self.letters[control]);
        let (t_on_c, t_on_t) = target_image(self.letters[target]);
        let mut phase = self.phase_pow;
        let (cl, p1) = c_on_c.mul(t_on_c);
        let (tl, p2) = c_on_t.mul(t_on_t);
        phase = (phase + p1 + p2) % 4;
        let mut letters = self.letters.clone();
        letters[control] = cl;
        letters[target] = tl;
        Ok(PauliProduct { letters, phase_pow: phase })
    }

    /// Dense matrix i^phase · ⊗ letters, qubit 0 leftmost.
    pub fn matrix(&self) -> DMatrix<Complex64> {
        let paulis = crate::sim::linalg::pauli_matrices_1q();
        let mut m = DMatrix::identity(1, 1);
        for l in &self.letters {
            let idx = match l {
                PauliLetter::I => 0,
                PauliLetter::X => 1,
                PauliLetter::Y => 2,
                PauliLetter::Z => 3,
            };
            m = m.kronecker(&paulis[idx]);
        }
        let phase = match self.phase_pow % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        m * phase
    }
}

impl std::fmt::Display for PauliProduct {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.phase_pow % 4 {
            0 => write!(f, "+")?,
            1 => write!(f, "+i")?,
            2 => write!(f, "-")?,
            _ => write!(f, "-i")?,
        }
        for l in &self.letters {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}
