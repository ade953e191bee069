//! Pauli algebra, operator embedding and the qubit Bloch representation.
//!
//! Qubit 1 is the leftmost tensor factor and the most significant bit of a
//! computational-basis label, so `|01>` has qubit 1 in `|0>` and qubit 2 in
//! `|1>`. `|0>` is the `+1` eigenstate of `sigma_z`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, kron_all, qubits_for_dim, r, ComplexMatrix, ONE, ZERO};

/// Hermiticity and unit-trace tolerance for density matrices.
pub const STATE_TOL: f64 = 1e-12;
/// Most negative eigenvalue still accepted as positive semidefinite.
pub const PSD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    Identity,
    X,
    Y,
    Z,
}

pub fn pauli(axis: Axis) -> ComplexMatrix {
    let entries = match axis {
        Axis::Identity => [ONE, ZERO, ZERO, ONE],
        Axis::X => [ZERO, ONE, ONE, ZERO],
        Axis::Y => [ZERO, c(0.0, -1.0), c(0.0, 1.0), ZERO],
        Axis::Z => [ONE, ZERO, ZERO, r(-1.0)],
    };
    ComplexMatrix::from_row_major(2, 2, &entries).expect("2x2 literal")
}

/// `I (x) ... (x) op (x) ... (x) I` with `op` on qubit `site` (1-based).
pub fn embed(op: &ComplexMatrix, site: usize, n: usize) -> Result<ComplexMatrix> {
    if op.rows() != 2 || op.cols() != 2 {
        return Err(Error::BadDims(format!(
            "embed expects a 2x2 operator, got {}x{}",
            op.rows(),
            op.cols()
        )));
    }
    if site == 0 || site > n {
        return Err(Error::BadSite { site, qubits: n });
    }
    let id = ComplexMatrix::identity(2);
    Ok(kron_all((1..=n).map(|q| if q == site { op } else { &id })))
}

/// Embedded single-qubit Pauli; panics on an invalid site.
pub(crate) fn pauli_at(axis: Axis, site: usize, n: usize) -> ComplexMatrix {
    embed(&pauli(axis), site, n).expect("valid site")
}

/// Returns `(sigma_+, sigma_-) = (sigma_x + i sigma_y, sigma_x - i sigma_y)`.
///
/// There is no factor of one half: `sigma_+ = 2|0><1|`.
pub fn sigma_plus_minus() -> (ComplexMatrix, ComplexMatrix) {
    let x = pauli(Axis::X);
    let y = pauli(Axis::Y).scale(linalg::I);
    (&x + &y, &x - &y)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

/// Outcome of checking the three physicality conditions on a matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StateCheck {
    pub hermiticity_residual: f64,
    pub trace_residual: f64,
    pub min_eigenvalue: f64,
}

impl StateCheck {
    pub fn of(m: &ComplexMatrix) -> Result<Self> {
        let hermiticity_residual = m.hermiticity_residual();
        let trace = m.trace();
        let trace_residual = (trace - ONE).norm();
        // Eigenvalues of the Hermitian part; a non-Hermitian input fails anyway.
        let herm = (m + &m.adjoint()).scale_real(0.5);
        let min_eigenvalue = linalg::eig_hermitian(&herm)?.min();
        Ok(Self {
            hermiticity_residual,
            trace_residual,
            min_eigenvalue,
        })
    }

    pub fn passes(&self, herm_tol: f64, trace_tol: f64, psd_tol: f64) -> bool {
        self.hermiticity_residual <= herm_tol
            && self.trace_residual <= trace_tol
            && self.min_eigenvalue >= -psd_tol
    }
}

/// A validated density matrix on one or more qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    qubit_count: usize,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, STATE_TOL, PSD_TOL)
    }

    pub fn with_tolerance(matrix: ComplexMatrix, tol: f64, psd_tol: f64) -> Result<Self> {
        let qubit_count = Self::qubits_of(&matrix)?;
        let check = StateCheck::of(&matrix)?;
        if check.hermiticity_residual > tol {
            return Err(Error::InvalidState(format!(
                "not Hermitian (residual {:e})",
                check.hermiticity_residual
            )));
        }
        if check.trace_residual > tol {
            return Err(Error::InvalidState(format!(
                "trace differs from 1 by {:e}",
                check.trace_residual
            )));
        }
        if check.min_eigenvalue < -psd_tol {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {:e}",
                check.min_eigenvalue
            )));
        }
        Ok(Self { matrix, qubit_count })
    }

    /// Pure state `|psi><psi|` from a normalized amplitude vector.
    pub fn from_pure(amplitudes: &[linalg::Complex64]) -> Result<Self> {
        Self::new(ComplexMatrix::outer(amplitudes, amplitudes))
    }

    /// Computational basis state from a bit string such as `"0111"`.
    pub fn basis(bits: &str) -> Result<Self> {
        if bits.is_empty() || !bits.chars().all(|ch| ch == '0' || ch == '1') {
            return Err(Error::InvalidSpec(format!("bad bit string {bits:?}")));
        }
        let index = usize::from_str_radix(bits, 2).expect("binary digits");
        let mut amps = vec![ZERO; 1 << bits.len()];
        amps[index] = ONE;
        Self::from_pure(&amps)
    }

    /// Wraps a matrix without checks. Callers guarantee physicality.
    pub(crate) fn from_trusted(matrix: ComplexMatrix) -> Self {
        let qubit_count = qubits_for_dim(matrix.rows()).expect("power-of-two dimension");
        Self { matrix, qubit_count }
    }

    fn qubits_of(matrix: &ComplexMatrix) -> Result<usize> {
        match qubits_for_dim(matrix.rows()) {
            Some(n) if matrix.is_square() && n >= 1 => Ok(n),
            _ => Err(Error::BadDims(format!(
                "{}x{} is not a qubit density matrix",
                matrix.rows(),
                matrix.cols()
            ))),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    pub fn check(&self) -> StateCheck {
        StateCheck::of(&self.matrix).expect("square by construction")
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self::from_trusted(linalg::kron(&self.matrix, &other.matrix))
    }
}

/// `a_i = Tr(sigma_i rho)` for a single-qubit state.
pub fn bloch_of(rho: &DensityMatrix) -> Result<BlochVector> {
    if rho.qubit_count() != 1 {
        return Err(Error::BadDims(format!(
            "Bloch vector needs a single-qubit state, got {} qubits",
            rho.qubit_count()
        )));
    }
    let comp = |axis| (&pauli(axis) * rho.matrix()).trace().re;
    Ok(BlochVector::new(comp(Axis::X), comp(Axis::Y), comp(Axis::Z)))
}

/// Bloch components of an arbitrary 2x2 matrix (no validation).
pub(crate) fn bloch_components(m: &ComplexMatrix) -> BlochVector {
    let comp = |axis| (&pauli(axis) * m).trace().re;
    BlochVector::new(comp(Axis::X), comp(Axis::Y), comp(Axis::Z))
}

/// `(I + a.sigma) / 2` without the norm check.
pub(crate) fn bloch_matrix(a: &BlochVector) -> ComplexMatrix {
    ComplexMatrix::from_row_major(
        2,
        2,
        &[
            r(0.5 * (1.0 + a.z)),
            c(0.5 * a.x, -0.5 * a.y),
            c(0.5 * a.x, 0.5 * a.y),
            r(0.5 * (1.0 - a.z)),
        ],
    )
    .expect("finite Bloch components")
}

/// `rho = (I + a.sigma) / 2`.
pub fn state_of_bloch(a: &BlochVector) -> Result<DensityMatrix> {
    let norm = a.norm();
    if !norm.is_finite() || norm > 1.0 + STATE_TOL {
        return Err(Error::BlochNormExceeded(norm));
    }
    Ok(DensityMatrix::from_trusted(bloch_matrix(a)))
}
