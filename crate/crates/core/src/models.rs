//! Hamiltonians of the single-mode impurity model and its zz-coupled baths,
//! plus the control sequence that turns the drift into the hopping gate.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::linalg::{c, kron, ComplexMatrix, ONE, ZERO};
use crate::spin::{pauli, pauli_at, Axis};

/// Physical constants of the model. `j_zz` only matters for bath topologies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    /// Impurity level.
    pub epsilon: f64,
    /// Energy of the coupled band mode.
    pub varepsilon_k0: f64,
    /// Hopping amplitude.
    pub v: f64,
    /// System-bath zz coupling.
    #[serde(default)]
    pub j_zz: f64,
}

impl ModelParams {
    pub const fn new(epsilon: f64, varepsilon_k0: f64, v: f64) -> Self {
        Self {
            epsilon,
            varepsilon_k0,
            v,
            j_zz: 0.0,
        }
    }

    pub const fn with_j_zz(self, j_zz: f64) -> Self {
        Self { j_zz, ..self }
    }

    pub fn is_finite(&self) -> bool {
        [self.epsilon, self.varepsilon_k0, self.v, self.j_zz]
            .iter()
            .all(|x| x.is_finite())
    }

    /// Half the Rabi splitting, `sqrt(((eps - eps_k)/2)^2 + V^2)`.
    pub fn half_splitting(&self) -> f64 {
        let d = 0.5 * (self.epsilon - self.varepsilon_k0);
        (d * d + self.v * self.v).sqrt()
    }
}

/// How the environment qubits are wired to the two system qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Topology {
    /// Impurity and mode qubits only.
    Closed,
    /// Two bath qubits (3, 4) zz-coupled to qubit 2 and to each other.
    BathTwoOnQubit2,
    /// One bath qubit (3) zz-coupled equally to qubits 1 and 2.
    BathOneOnBoth,
}

impl Topology {
    pub const ALL: [Topology; 3] = [Topology::Closed, Topology::BathTwoOnQubit2, Topology::BathOneOnBoth];

    pub const fn total_qubits(self) -> usize {
        match self {
            Topology::Closed => 2,
            Topology::BathTwoOnQubit2 => 4,
            Topology::BathOneOnBoth => 3,
        }
    }

    pub const fn bath_qubits(self) -> usize {
        self.total_qubits() - 2
    }

    pub const fn name(self) -> &'static str {
        match self {
            Topology::Closed => "closed",
            Topology::BathTwoOnQubit2 => "bath-two-on-qubit2",
            Topology::BathOneOnBoth => "bath-one-on-both",
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Topology {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Topology::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| format!("unknown topology {s:?} (expected closed, bath-two-on-qubit2 or bath-one-on-both)"))
    }
}

fn zz(a: usize, b: usize, n: usize) -> ComplexMatrix {
    &pauli_at(Axis::Z, a, n) * &pauli_at(Axis::Z, b, n)
}

/// `sigma_x^1 sigma_x^2 + sigma_y^1 sigma_y^2` on two qubits.
pub fn exchange_operator() -> ComplexMatrix {
    let xx = kron(&pauli(Axis::X), &pauli(Axis::X));
    let yy = kron(&pauli(Axis::Y), &pauli(Axis::Y));
    &xx + &yy
}

/// Spin form of the single-mode model:
/// `eps/2 Z1 + eps_k/2 Z2 + V/2 (X1 X2 + Y1 Y2)`.
pub fn h_effective(p: &ModelParams) -> ComplexMatrix {
    let z1 = pauli_at(Axis::Z, 1, 2).scale_real(0.5 * p.epsilon);
    let z2 = pauli_at(Axis::Z, 2, 2).scale_real(0.5 * p.varepsilon_k0);
    let hop = exchange_operator().scale_real(0.5 * p.v);
    &(&z1 + &z2) + &hop
}

/// The two always-on z terms of the simulator.
///
/// Coefficients are `((eps + eps_k)/2 -+ R) / 2` with `R` the half splitting,
/// so the drift has the same spectrum as [`h_effective`].
pub fn h_drift(p: &ModelParams) -> ComplexMatrix {
    let (c1, c2) = drift_coefficients(p);
    &pauli_at(Axis::Z, 1, 2).scale_real(c1) + &pauli_at(Axis::Z, 2, 2).scale_real(c2)
}

pub fn drift_coefficients(p: &ModelParams) -> (f64, f64) {
    let mean = 0.5 * (p.epsilon + p.varepsilon_k0);
    let split = p.half_splitting();
    (0.5 * (mean - split), 0.5 * (mean + split))
}

/// System Hamiltonian plus the bath zz terms for the chosen wiring.
pub fn h_total(p: &ModelParams, topo: Topology) -> ComplexMatrix {
    let sys = h_effective(p);
    let quarter = 0.25 * p.j_zz;
    match topo {
        Topology::Closed => sys,
        Topology::BathTwoOnQubit2 => {
            let n = 4;
            let lifted = kron(&sys, &ComplexMatrix::identity(4));
            let bath = &(&zz(2, 3, n) + &zz(2, 4, n)) + &zz(3, 4, n);
            &lifted + &bath.scale_real(quarter)
        }
        Topology::BathOneOnBoth => {
            let n = 3;
            let lifted = kron(&sys, &ComplexMatrix::identity(2));
            let bath = &zz(1, 3, n) + &zz(2, 3, n);
            &lifted + &bath.scale_real(quarter)
        }
    }
}

/// `exp(i a P)` for an involutory `P` (`P^2 = I`).
fn pauli_exponential(a: f64, p: &ComplexMatrix) -> ComplexMatrix {
    let id = ComplexMatrix::identity(p.rows());
    &id.scale_real(a.cos()) + &p.scale(c(0.0, a.sin()))
}

/// Ordered product of the ten pulse/free-evolution exponentials that
/// implement the hopping gate from the z-only drift (qubits 1, 2).
pub fn compile_sequence(theta: f64) -> ComplexMatrix {
    use std::f64::consts::FRAC_PI_4 as Q;
    let x1 = pauli_at(Axis::X, 1, 2);
    let x2 = pauli_at(Axis::X, 2, 2);
    let y1 = pauli_at(Axis::Y, 1, 2);
    let y2 = pauli_at(Axis::Y, 2, 2);
    let z1z2 = zz(1, 2, 2);
    let half = 0.5 * theta;
    let factors = [
        (Q, &x2),
        (-Q, &y1),
        (-half, &z1z2),
        (Q, &y1),
        (Q, &x1),
        (-Q, &x2),
        (-Q, &y2),
        (half, &z1z2),
        (-Q, &x1),
        (Q, &y2),
    ];
    factors
        .iter()
        .fold(ComplexMatrix::identity(4), |acc, (a, p)| &acc * &pauli_exponential(*a, p))
}

/// Second-quantized single-mode Hamiltonian on the Fock basis
/// `|n_b n_c>` = `{|00>, |01>, |10>, |11>}` (impurity `b` first):
/// `eps b^dag b + eps_k c^dag c + V (c^dag b + b^dag c)`.
pub fn fermion_hamiltonian(p: &ModelParams) -> ComplexMatrix {
    // Creation operators with the impurity ordered first; the mode picks up
    // the parity string of the impurity.
    let create = ComplexMatrix::from_row_major(2, 2, &[ZERO, ZERO, ONE, ZERO]).expect("2x2");
    let parity = ComplexMatrix::from_diagonal(&[ONE, -ONE]);
    let id = ComplexMatrix::identity(2);
    let b_dag = kron(&create, &id);
    let c_dag = kron(&parity, &create);
    let b = b_dag.adjoint();
    let c_op = c_dag.adjoint();

    let n_b = &b_dag * &b;
    let n_c = &c_dag * &c_op;
    let hop = &(&c_dag * &b) + &(&b_dag * &c_op);
    &(&n_b.scale_real(p.epsilon) + &n_c.scale_real(p.varepsilon_k0)) + &hop.scale_real(p.v)
}
