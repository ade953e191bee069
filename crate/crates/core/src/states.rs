//! Initial-state families for the impurity (qubit 1), the band mode
//! (qubit 2) and any bath qubits, which always start in `|1>`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{kron, ComplexMatrix, ONE, ZERO};
use crate::models::Topology;
use crate::spin::{bloch_matrix, BlochVector, DensityMatrix};

/// Partner state of qubit 2 in a tilted product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TiltPartner {
    /// `(I + a1 sigma_x - a3 sigma_z) / 2`.
    #[default]
    Mirrored,
    /// `(I - sigma_z) / 2 = |1><1|`.
    Down,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum StateFamily {
    /// Computational basis state of the two system qubits, e.g. `"01"`.
    Pure { bits: String },
    /// `alpha0 |01> + alpha1 |10>` with real amplitudes.
    Entangled { alpha0: f64, alpha1: f64 },
    /// `(1 - p) rho_1^I (x) rho_2^I + p rho_1^II (x) rho_2^II`, single-qubit
    /// factors given by Bloch vectors.
    Mixture {
        p: f64,
        #[serde(default = "default_state_i")]
        state_i: [BlochVector; 2],
        #[serde(default = "default_state_ii")]
        state_ii: [BlochVector; 2],
    },
    /// `rho_1 (x) rho_2` with `rho_1 = (I + a1 sigma_x + a3 sigma_z) / 2`.
    Tilted {
        a1: f64,
        a3: f64,
        #[serde(default)]
        partner: TiltPartner,
    },
}

/// Impurity occupied (down), mode empty (up).
fn default_state_i() -> [BlochVector; 2] {
    [BlochVector::new(0.0, 0.0, -1.0), BlochVector::new(0.0, 0.0, 1.0)]
}

/// Impurity empty (up), mode empty (up).
fn default_state_ii() -> [BlochVector; 2] {
    [BlochVector::new(0.0, 0.0, 1.0), BlochVector::new(0.0, 0.0, 1.0)]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialStateSpec {
    pub family: StateFamily,
    /// Number of bath qubits appended in `|1>`.
    #[serde(default)]
    pub bath_suffix: usize,
}

impl InitialStateSpec {
    pub fn new(family: StateFamily) -> Self {
        Self { family, bath_suffix: 0 }
    }

    pub fn with_bath(mut self, bath_suffix: usize) -> Self {
        self.bath_suffix = bath_suffix;
        self
    }

    pub fn pure(bits: &str) -> Self {
        Self::new(StateFamily::Pure { bits: bits.to_owned() })
    }

    pub fn entangled(alpha0: f64, alpha1: f64) -> Self {
        Self::new(StateFamily::Entangled { alpha0, alpha1 })
    }

    pub fn mixture(p: f64) -> Self {
        Self::new(StateFamily::Mixture {
            p,
            state_i: default_state_i(),
            state_ii: default_state_ii(),
        })
    }

    pub fn tilted(a1: f64, a3: f64, partner: TiltPartner) -> Self {
        Self::new(StateFamily::Tilted { a1, a3, partner })
    }

    /// Initial Bloch vector of qubit 1 implied by the family.
    pub fn impurity_bloch(&self) -> BlochVector {
        match &self.family {
            StateFamily::Pure { bits } => {
                let z = if bits.starts_with('0') { 1.0 } else { -1.0 };
                BlochVector::new(0.0, 0.0, z)
            }
            StateFamily::Entangled { alpha0, alpha1 } => {
                BlochVector::new(0.0, 0.0, alpha0 * alpha0 - alpha1 * alpha1)
            }
            StateFamily::Mixture { p, state_i, state_ii } => BlochVector::new(
                (1.0 - p) * state_i[0].x + p * state_ii[0].x,
                (1.0 - p) * state_i[0].y + p * state_ii[0].y,
                (1.0 - p) * state_i[0].z + p * state_ii[0].z,
            ),
            StateFamily::Tilted { a1, a3, .. } => BlochVector::new(*a1, 0.0, *a3),
        }
    }

    fn validate(&self) -> Result<()> {
        const TOL: f64 = 1e-12;
        match &self.family {
            StateFamily::Pure { bits } => {
                if bits.len() != 2 || !bits.chars().all(|ch| ch == '0' || ch == '1') {
                    return Err(Error::InvalidSpec(format!(
                        "pure state needs two system bits, got {bits:?}"
                    )));
                }
            }
            StateFamily::Entangled { alpha0, alpha1 } => {
                let norm = alpha0 * alpha0 + alpha1 * alpha1;
                if !norm.is_finite() || (norm - 1.0).abs() > TOL {
                    return Err(Error::InvalidSpec(format!(
                        "alpha0^2 + alpha1^2 = {norm}, expected 1"
                    )));
                }
            }
            StateFamily::Mixture { p, state_i, state_ii } => {
                if !(0.0..=1.0).contains(p) {
                    return Err(Error::InvalidSpec(format!("mixture weight p = {p} outside [0, 1]")));
                }
                for a in state_i.iter().chain(state_ii) {
                    if a.norm().is_nan() || a.norm() > 1.0 + TOL {
                        return Err(Error::InvalidSpec(format!(
                            "mixture component Bloch norm {} exceeds 1",
                            a.norm()
                        )));
                    }
                }
            }
            StateFamily::Tilted { a1, a3, .. } => {
                let norm2 = a1 * a1 + a3 * a3;
                if norm2.is_nan() || norm2 > 1.0 + TOL {
                    return Err(Error::InvalidSpec(format!(
                        "a1^2 + a3^2 = {norm2} exceeds 1"
                    )));
                }
            }
        }
        Ok(())
    }

    fn system_matrix(&self) -> ComplexMatrix {
        match &self.family {
            StateFamily::Pure { bits } => {
                let idx = usize::from_str_radix(bits, 2).expect("validated bits");
                let mut amps = [ZERO; 4];
                amps[idx] = ONE;
                ComplexMatrix::outer(&amps, &amps)
            }
            StateFamily::Entangled { alpha0, alpha1 } => {
                let amps = [ZERO, ONE.scale(*alpha0), ONE.scale(*alpha1), ZERO];
                ComplexMatrix::outer(&amps, &amps)
            }
            StateFamily::Mixture { p, state_i, state_ii } => {
                let first = kron(&bloch_matrix(&state_i[0]), &bloch_matrix(&state_i[1]));
                let second = kron(&bloch_matrix(&state_ii[0]), &bloch_matrix(&state_ii[1]));
                &first.scale_real(1.0 - p) + &second.scale_real(*p)
            }
            StateFamily::Tilted { a1, a3, partner } => {
                let rho1 = bloch_matrix(&BlochVector::new(*a1, 0.0, *a3));
                let rho2 = match partner {
                    TiltPartner::Mirrored => bloch_matrix(&BlochVector::new(*a1, 0.0, -*a3)),
                    TiltPartner::Down => bloch_matrix(&BlochVector::new(0.0, 0.0, -1.0)),
                };
                kron(&rho1, &rho2)
            }
        }
    }
}

pub(crate) fn bath_down(count: usize) -> ComplexMatrix {
    let one = ComplexMatrix::from_diagonal(&[ZERO, ONE]);
    (0..count).fold(ComplexMatrix::identity(1), |acc, _| kron(&acc, &one))
}

/// Builds and validates the full initial state for `topo`.
pub fn build_initial(spec: &InitialStateSpec, topo: Topology) -> Result<DensityMatrix> {
    if spec.bath_suffix != topo.bath_qubits() {
        return Err(Error::BathMismatch {
            topology: topo.name(),
            expected: topo.bath_qubits(),
            found: spec.bath_suffix,
        });
    }
    spec.validate()?;
    let full = kron(&spec.system_matrix(), &bath_down(spec.bath_suffix));
    DensityMatrix::new(full)
}

/// A named initial state preset.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedState {
    pub name: &'static str,
    pub label: String,
    pub spec: InitialStateSpec,
}

impl NamedState {
    /// Topology whose bath size matches this preset (closed, or the default
    /// wiring for the given bath size).
    pub fn natural_topology(&self) -> Topology {
        match self.spec.bath_suffix {
            0 => Topology::Closed,
            1 => Topology::BathOneOnBoth,
            _ => Topology::BathTwoOnQubit2,
        }
    }
}

fn ket_label(bits: &str, bath: usize) -> String {
    format!("|{bits}{}>", "1".repeat(bath))
}

/// Every initial state used by the figure presets.
pub fn catalogue() -> Vec<NamedState> {
    let bell = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::new();
    let mut push = |name: &'static str, label: String, spec: InitialStateSpec| {
        out.push(NamedState { name, label, spec });
    };

    for (name, bits) in [("A1-00", "00"), ("A1-01", "01"), ("A1-10", "10"), ("A1-11", "11")] {
        push(name, ket_label(bits, 0), InitialStateSpec::pure(bits));
    }
    push("A2-bell", "(|01>+|10>)/sqrt2".into(), InitialStateSpec::entangled(bell, bell));
    push("A3-mixture", "mixture p=0.5".into(), InitialStateSpec::mixture(0.5));
    push("tilted", "rho1(0.2,0.97) x rho2(0.2,-0.97)".into(), InitialStateSpec::tilted(0.2, 0.97, TiltPartner::Mirrored));
    push("fig4-text", "rho1(0.2,0.97) x rho2(0.2,-0.97)".into(), InitialStateSpec::tilted(0.2, 0.97, TiltPartner::Mirrored));
    push("fig4-caption", "rho1(0.2,0.97) x |1>".into(), InitialStateSpec::tilted(0.2, 0.97, TiltPartner::Down));

    for (name, bits) in [("A4-0011", "00"), ("A4-0111", "01"), ("A4-1011", "10"), ("A4-1111", "11")] {
        push(name, ket_label(bits, 2), InitialStateSpec::pure(bits).with_bath(2));
    }
    push("A5-entangled-bath", "(|0111>+|1011>)/sqrt2".into(), InitialStateSpec::entangled(bell, bell).with_bath(2));
    push("A6-mixture-bath", "mixture p=0.5 x |11>".into(), InitialStateSpec::mixture(0.5).with_bath(2));

    for (name, bits) in [("A4-001", "00"), ("A4-011", "01"), ("A4-101", "10"), ("A4-111", "11")] {
        push(name, ket_label(bits, 1), InitialStateSpec::pure(bits).with_bath(1));
    }
    push("A5-entangled-bath1", "(|011>+|101>)/sqrt2".into(), InitialStateSpec::entangled(bell, bell).with_bath(1));
    push("A6-mixture-bath1", "mixture p=0.5 x |1>".into(), InitialStateSpec::mixture(0.5).with_bath(1));

    push("fig1", ket_label("01", 0), InitialStateSpec::pure("01"));
    push("fig2", ket_label("01", 2), InitialStateSpec::pure("01").with_bath(2));
    push("fig3", ket_label("01", 1), InitialStateSpec::pure("01").with_bath(1));
    push("fig4", "rho1(0.2,0.97) x |1>".into(), InitialStateSpec::tilted(0.2, 0.97, TiltPartner::Down));
    push("fig5", "rho1(0.2,0.97) x |1> x |11>".into(), InitialStateSpec::tilted(0.2, 0.97, TiltPartner::Down).with_bath(2));
    push("fig6", "rho1(0.2,0.97) x |1> x |1>".into(), InitialStateSpec::tilted(0.2, 0.97, TiltPartner::Down).with_bath(1));
    out
}

pub fn lookup(name: &str) -> Option<NamedState> {
    catalogue().into_iter().find(|s| s.name == name)
}
