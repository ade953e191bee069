//! Dynamical maps of the reduced qubit-1 dynamics.
//!
//! Index conventions for a qubit (`N = 2`):
//!
//! * `SuperMatrixA` acts on row-major vectorized states:
//!   `rho'_{r's'} = sum_{rs} A[(2r' + s', 2r + s)] rho_{rs}`.
//! * The reshuffled (Choi) matrix is `B[(2r + r', 2s + s')] = A[(2r + s, 2r' + s')]`,
//!   so in `B` the first index of each pair is the output index.
//!
//! A map is completely positive iff `B` is positive semidefinite, and trace
//! preserving iff `Tr B = 2` together with the partial-trace condition.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::dynamics::{evolve, reduced, Trajectory};
use crate::error::{Error, Result};
use crate::linalg::{c, eig_hermitian, kron, r, Complex64, ComplexMatrix, ZERO};
use crate::models::{h_effective, ModelParams, Topology};
use crate::spin::{bloch_components, bloch_matrix, state_of_bloch, BlochVector, DensityMatrix, StateCheck, PSD_TOL};
use crate::states::bath_down;

/// Choi eigenvalues at or above `-CP_TOL` count as nonnegative.
pub const CP_TOL: f64 = 1e-10;
/// Hermiticity and trace tolerance for map matrices.
pub const MAP_TOL: f64 = 1e-10;
/// `|a1|` below this selects the z-only template.
pub const A1_MIN: f64 = 1e-9;
/// Random pure states probed when a map is not completely positive.
pub const DEFAULT_SAMPLES: usize = 1000;
pub const DEFAULT_SEED: u64 = 0x5EED_0FC0_FFEE;

#[inline]
fn idx(a: usize, b: usize) -> usize {
    2 * a + b
}

/// The index permutation between the action form and the Choi form. It is an
/// involution on 4x4 matrices.
pub fn reshuffle_matrix(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if m.rows() != 4 || m.cols() != 4 {
        return Err(Error::BadDims(format!(
            "reshuffle expects a 4x4 matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let mut out = ComplexMatrix::zeros(4, 4);
    for r0 in 0..2 {
        for r1 in 0..2 {
            for s0 in 0..2 {
                for s1 in 0..2 {
                    out[(idx(r0, r1), idx(s0, s1))] = m[(idx(r0, s0), idx(r1, s1))];
                }
            }
        }
    }
    Ok(out)
}

/// The `N^2 x N^2` supermatrix acting on vectorized single-qubit states.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperMatrixA {
    entries: ComplexMatrix,
}

impl SuperMatrixA {
    pub fn new(entries: ComplexMatrix) -> Result<Self> {
        if entries.rows() != 4 || entries.cols() != 4 || !entries.is_finite() {
            return Err(Error::BadDims(format!(
                "supermatrix must be a finite 4x4 matrix, got {}x{}",
                entries.rows(),
                entries.cols()
            )));
        }
        Ok(Self { entries })
    }

    pub fn identity() -> Self {
        Self {
            entries: ComplexMatrix::identity(4),
        }
    }

    /// `rho -> sum_k K rho K^dagger` as `sum_k K (x) conj(K)`.
    pub fn from_kraus(ops: &[ComplexMatrix]) -> Result<Self> {
        let mut acc = ComplexMatrix::zeros(4, 4);
        for k in ops {
            if k.rows() != 2 || k.cols() != 2 {
                return Err(Error::BadDims("Kraus operators must be 2x2".into()));
            }
            let conj = k.adjoint().transpose();
            acc = &acc + &kron(k, &conj);
        }
        Ok(Self { entries: acc })
    }

    pub fn entries(&self) -> &ComplexMatrix {
        &self.entries
    }
}

/// The reshuffled map matrix together with its spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix {
    entries: ComplexMatrix,
    eigenvalues: Vec<f64>,
}

impl ChoiMatrix {
    /// Accepts a 4x4 matrix Hermitian to [`MAP_TOL`].
    pub fn new(entries: ComplexMatrix) -> Result<Self> {
        if entries.rows() != 4 || entries.cols() != 4 {
            return Err(Error::BadDims(format!(
                "Choi matrix must be 4x4, got {}x{}",
                entries.rows(),
                entries.cols()
            )));
        }
        let residual = entries.hermiticity_residual();
        if residual > MAP_TOL {
            return Err(Error::NotHermitian { residual });
        }
        let herm = (&entries + &entries.adjoint()).scale_real(0.5);
        let eigenvalues = eig_hermitian(&herm)?.eigenvalues;
        Ok(Self { entries, eigenvalues })
    }

    pub fn entries(&self) -> &ComplexMatrix {
        &self.entries
    }

    /// Eigenvalues sorted descending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[3]
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    pub fn is_completely_positive(&self) -> bool {
        self.min_eigenvalue() >= -CP_TOL
    }

    pub fn to_supermatrix(&self) -> SuperMatrixA {
        SuperMatrixA {
            entries: reshuffle_matrix(&self.entries).expect("4x4"),
        }
    }

    /// Applies the map to a 2x2 operator.
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        apply_matrix(&self.to_supermatrix(), rho)
    }
}

pub fn reshuffle(a: &SuperMatrixA) -> Result<ChoiMatrix> {
    ChoiMatrix::new(reshuffle_matrix(&a.entries)?)
}

/// Inverse of [`reshuffle`].
pub fn unreshuffle(b: &ChoiMatrix) -> SuperMatrixA {
    b.to_supermatrix()
}

fn apply_matrix(a: &SuperMatrixA, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    if rho.rows() != 2 || rho.cols() != 2 {
        return Err(Error::BadDims(format!(
            "map acts on 2x2 operators, got {}x{}",
            rho.rows(),
            rho.cols()
        )));
    }
    let mut out = ComplexMatrix::zeros(2, 2);
    for r1 in 0..2 {
        for s1 in 0..2 {
            let mut acc = ZERO;
            for r0 in 0..2 {
                for s0 in 0..2 {
                    acc += a.entries[(idx(r1, s1), idx(r0, s0))] * rho[(r0, s0)];
                }
            }
            out[(r1, s1)] = acc;
        }
    }
    Ok(out)
}

/// `rho' = A rho`. The output is Hermitian with unit trace for a valid map but
/// need not be positive.
pub fn apply_supermatrix(a: &SuperMatrixA, rho: &DensityMatrix) -> Result<ComplexMatrix> {
    apply_matrix(a, rho.matrix())
}

/// Replacement-map template for z-only inputs: `diag((1+b3)/2, (1+b3)/2, (1-b3)/2, (1-b3)/2)`.
pub fn template_z(b3: f64) -> ChoiMatrix {
    let hi = r(0.5 * (1.0 + b3));
    let lo = r(0.5 * (1.0 - b3));
    ChoiMatrix::new(ComplexMatrix::from_diagonal(&[hi, hi, lo, lo])).expect("real diagonal")
}

/// Template for inputs tilted into the x-z plane: the z template plus
/// `b1/a1` on the inner off-diagonal and `-+ i b2/a1` on the corners.
pub fn template_tilted(a1: f64, b1: f64, b2: f64, b3: f64) -> Result<ChoiMatrix> {
    if a1.is_nan() || a1.abs() < A1_MIN {
        return Err(Error::DegenerateA1(a1.abs()));
    }
    let mut m = template_z(b3).entries;
    let inner = r(b1 / a1);
    let corner = c(0.0, b2 / a1);
    m[(1, 2)] = inner;
    m[(2, 1)] = inner;
    m[(0, 3)] = -corner;
    m[(3, 0)] = corner;
    ChoiMatrix::new(m)
}

/// Transverse components of qubit 1 after evolving
/// `rho_1(a1, a3) (x) |1><1|` under the closed model, from their closed forms,
/// and `b3` from direct evolution of the same state.
pub fn closed_form_coeffs(p: &ModelParams, a1: f64, a3: f64, t: f64) -> Result<(f64, f64, f64)> {
    let (b1, b2) = closed_form_transverse(p, a1, t);
    let b3 = evolved_b3(p, a1, a3, t)?;
    Ok((b1, b2, b3))
}

/// `(b1, b2)` from the analytic expressions.
pub fn closed_form_transverse(p: &ModelParams, a1: f64, t: f64) -> (f64, f64) {
    let diff = p.epsilon - p.varepsilon_k0;
    let w = (4.0 * p.v * p.v + diff * diff).sqrt();
    let phase = 0.5 * t * (p.epsilon + p.varepsilon_k0);
    let rabi = 0.5 * t * w;
    // (diff / w) sin(rabi); w = 0 only when V = 0 and diff = 0, where the term vanishes.
    let skew = if w > 0.0 { diff * rabi.sin() / w } else { 0.0 };
    let b1 = (phase.cos() * rabi.cos() - phase.sin() * skew) * a1;
    let b2 = (-phase.sin() * rabi.cos() - phase.cos() * skew) * a1;
    (b1, b2)
}

fn evolved_b3(p: &ModelParams, a1: f64, a3: f64, t: f64) -> Result<f64> {
    let rho1 = state_of_bloch(&BlochVector::new(a1, 0.0, a3))?;
    let rho0 = DensityMatrix::new(kron(rho1.matrix(), &bath_down(1)))?;
    let out = evolve(&rho0, &h_effective(p), t)?;
    Ok(bloch_components(reduced(&out, Topology::Closed)?.matrix()).z)
}

/// The `b3` expression exactly as transcribed alongside `b1` and `b2`.
///
/// It does not reduce to `a3` at `t = 0` unless `a3 = -1`, so it is kept for
/// comparison only; [`closed_form_coeffs`] does not use it.
pub fn b3_transcribed(p: &ModelParams, a3: f64, t: f64) -> f64 {
    let diff = p.epsilon - p.varepsilon_k0;
    let v2 = p.v * p.v;
    let w2 = 4.0 * v2 + diff * diff;
    (2.0 * (-1.0 + a3) * v2 + a3 * diff * diff + (1.0 + a3) * v2 * (0.5 * t * w2.sqrt()).cos()) / w2
}

/// Closed-form spectrum `[lambda1, lambda2, lambda3, lambda4]` of
/// [`template_tilted`]. For `|a1| < A1_MIN` returns the z-template values
/// `(1 -+ b3)/2`, each twice.
pub fn closed_form_eigs(a1: f64, b1: f64, b2: f64, b3: f64) -> [f64; 4] {
    if a1.abs() < A1_MIN {
        let lo = 0.5 * (1.0 - b3);
        let hi = 0.5 * (1.0 + b3);
        return [lo, hi, lo, hi];
    }
    let s1 = (4.0 * b1 * b1 + a1 * a1 * b3 * b3).sqrt();
    let s2 = (4.0 * b2 * b2 + a1 * a1 * b3 * b3).sqrt();
    let d = 2.0 * a1;
    [(a1 - s1) / d, (a1 + s1) / d, (a1 - s2) / d, (a1 + s2) / d]
}

/// Populates the map template from a trajectory sample.
///
/// The initial Bloch vector must lie in the x-z plane. With `a1 = 0` the
/// z template is used, which requires the sample to have no transverse part.
pub fn extract_map(traj: &Trajectory, initial_bloch: &BlochVector, t: f64) -> Result<ChoiMatrix> {
    if initial_bloch.y.abs() > 1e-12 {
        return Err(Error::UnsupportedFamily(format!(
            "initial Bloch vector has a_y = {}",
            initial_bloch.y
        )));
    }
    let sample = traj
        .sample_at(t)
        .ok_or_else(|| Error::InvalidSpec(format!("trajectory has no sample at t = {t}")))?;
    let b = sample.bloch;
    if initial_bloch.x.abs() < A1_MIN {
        if b.x.abs() > MAP_TOL || b.y.abs() > MAP_TOL {
            return Err(Error::UnsupportedFamily(format!(
                "a1 = 0 but the sample has transverse components ({}, {})",
                b.x, b.y
            )));
        }
        Ok(template_z(b.z))
    } else {
        template_tilted(initial_bloch.x, b.x, b.y, b.z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MapTag {
    CompletelyPositive,
    PositiveOnDomain,
    NotPositiveOnDomain,
}

impl MapTag {
    pub fn as_str(self) -> &'static str {
        match self {
            MapTag::CompletelyPositive => "completely-positive",
            MapTag::PositiveOnDomain => "positive-on-domain",
            MapTag::NotPositiveOnDomain => "not-positive-on-domain",
        }
    }
}

/// A state whose image under the map is not positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Witness {
    pub input: BlochVector,
    pub output_min_eigenvalue: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MapClass {
    pub tag: MapTag,
    pub min_eigenvalue: f64,
    /// First domain state mapped outside the state space.
    pub domain_violation: Option<Witness>,
    /// Random pure states probed (zero for completely positive maps).
    pub sampled_states: usize,
    /// How many probes were mapped to a non-positive operator.
    pub sampled_violations: usize,
    pub sampled_witness: Option<Witness>,
}

fn output_min_eigenvalue(b: &ChoiMatrix, rho: &ComplexMatrix) -> Result<f64> {
    Ok(StateCheck::of(&b.apply(rho)?)?.min_eigenvalue)
}

/// Haar-random pure qubit states from a seeded generator.
pub fn sample_pure_states(count: usize, seed: u64) -> Vec<BlochVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut g = [0.0f64; 4];
            for x in &mut g {
                *x = StandardNormal.sample(&mut rng);
            }
            let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
            let a = Complex64::new(g[0], g[1]) / norm;
            let b = Complex64::new(g[2], g[3]) / norm;
            // <sigma> for |psi> = a|0> + b|1>
            let off = a.conj() * b;
            BlochVector::new(2.0 * off.re, 2.0 * off.im, a.norm_sqr() - b.norm_sqr())
        })
        .collect()
}

/// Classifies a map as completely positive, positive on the given domain, or
/// not positive on it.
pub fn classify(b: &ChoiMatrix, domain_states: &[DensityMatrix], samples: usize, seed: u64) -> Result<MapClass> {
    if domain_states.is_empty() {
        return Err(Error::InvalidSpec("classification needs at least one domain state".into()));
    }
    if let Some(bad) = domain_states.iter().find(|s| s.qubit_count() != 1) {
        return Err(Error::BadDims(format!(
            "domain states must be single-qubit, got {} qubits",
            bad.qubit_count()
        )));
    }
    let min_eigenvalue = b.min_eigenvalue();
    if b.is_completely_positive() {
        return Ok(MapClass {
            tag: MapTag::CompletelyPositive,
            min_eigenvalue,
            domain_violation: None,
            sampled_states: 0,
            sampled_violations: 0,
            sampled_witness: None,
        });
    }

    let mut domain_violation = None;
    for state in domain_states {
        let lowest = output_min_eigenvalue(b, state.matrix())?;
        if lowest < -PSD_TOL {
            domain_violation = Some(Witness {
                input: bloch_components(state.matrix()),
                output_min_eigenvalue: lowest,
            });
            break;
        }
    }

    let mut sampled_violations = 0;
    let mut sampled_witness = None;
    for a in sample_pure_states(samples, seed) {
        let lowest = output_min_eigenvalue(b, &bloch_matrix(&a))?;
        if lowest < -PSD_TOL {
            sampled_violations += 1;
            sampled_witness.get_or_insert(Witness {
                input: a,
                output_min_eigenvalue: lowest,
            });
        }
    }

    let tag = if domain_violation.is_some() {
        MapTag::NotPositiveOnDomain
    } else {
        MapTag::PositiveOnDomain
    };
    Ok(MapClass {
        tag,
        min_eigenvalue,
        domain_violation,
        sampled_states: samples,
        sampled_violations,
        sampled_witness,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct KrausOperator {
    /// Sign of the Choi eigenvalue this operator came from.
    pub sign: i8,
    pub operator: ComplexMatrix,
}

/// Operator-sum form `rho -> sum_k sign_k C_k rho C_k^dagger`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    pub operators: Vec<KrausOperator>,
}

impl KrausSet {
    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        self.operators.iter().fold(ComplexMatrix::zeros(2, 2), |acc, k| {
            let term = &(&k.operator * rho) * &k.operator.adjoint();
            &acc + &term.scale_real(f64::from(k.sign))
        })
    }

    pub fn has_negative(&self) -> bool {
        self.operators.iter().any(|k| k.sign < 0)
    }
}

/// Eigenvalues with magnitude at or below this are dropped from the
/// operator-sum form.
const KRAUS_CUTOFF: f64 = 1e-12;

/// `C_k = sqrt(|lambda_k|) zeta_k` with `zeta_k` reshaped row-major to 2x2.
pub fn kraus_from_choi(b: &ChoiMatrix) -> KrausSet {
    let herm = (&b.entries + &b.entries.adjoint()).scale_real(0.5);
    let spec = eig_hermitian(&herm).expect("Hermitian Choi matrix");
    let mut operators = Vec::new();
    for (k, &lambda) in spec.eigenvalues.iter().enumerate() {
        if lambda.abs() <= KRAUS_CUTOFF {
            continue;
        }
        let mut v = spec.eigenvectors.column(k);
        // Fix the phase: largest entry real and positive.
        let pivot = v
            .iter()
            .copied()
            .max_by(|x, y| x.norm().total_cmp(&y.norm()))
            .expect("nonempty");
        let phase = pivot.conj() / pivot.norm();
        for z in &mut v {
            *z *= phase * lambda.abs().sqrt();
        }
        let operator = ComplexMatrix::from_row_major(2, 2, &v).expect("finite eigenvector");
        operators.push(KrausOperator {
            sign: if lambda > 0.0 { 1 } else { -1 },
            operator,
        });
    }
    KrausSet { operators }
}

/// Residuals of the physicality conditions on a supermatrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupermatrixReport {
    pub hermiticity_residual: f64,
    pub hermiticity_preserving: bool,
    pub trace_residual: f64,
    pub trace_preserving: bool,
    pub choi_hermiticity_residual: f64,
    pub choi_min_eigenvalue: f64,
    pub choi_positive: bool,
}

impl SupermatrixReport {
    pub fn all_pass(&self) -> bool {
        self.hermiticity_preserving && self.trace_preserving && self.choi_positive
    }
}

pub fn validate_supermatrix(a: &SuperMatrixA) -> SupermatrixReport {
    let e = &a.entries;
    let mut herm = 0.0f64;
    for r1 in 0..2 {
        for s1 in 0..2 {
            for r0 in 0..2 {
                for s0 in 0..2 {
                    let lhs = e[(idx(r1, s1), idx(r0, s0))];
                    let rhs = e[(idx(s1, r1), idx(s0, r0))].conj();
                    herm = herm.max((lhs - rhs).norm());
                }
            }
        }
    }
    let mut tp = 0.0f64;
    for r1 in 0..2 {
        for s1 in 0..2 {
            let sum: Complex64 = (0..2).map(|k| e[(idx(k, k), idx(r1, s1))]).sum();
            let want = if r1 == s1 { 1.0 } else { 0.0 };
            tp = tp.max((sum - r(want)).norm());
        }
    }
    let choi = reshuffle_matrix(e).expect("4x4");
    let choi_herm = choi.hermiticity_residual();
    let sym = (&choi + &choi.adjoint()).scale_real(0.5);
    let choi_min = eig_hermitian(&sym).expect("symmetrized").min();
    SupermatrixReport {
        hermiticity_residual: herm,
        hermiticity_preserving: herm <= MAP_TOL,
        trace_residual: tp,
        trace_preserving: tp <= MAP_TOL,
        choi_hermiticity_residual: choi_herm,
        choi_min_eigenvalue: choi_min,
        choi_positive: choi_min >= -CP_TOL,
    }
}
