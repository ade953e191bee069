//! Quantum discord, the overlap `|G|^2 = Tr(rho_S(t) rho_S(0))` and the
//! ladder-operator correlation function.

use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{trajectory, TimeGrid, Trajectory};
use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, kron, partial_trace, unitary_from_hamiltonian, ComplexMatrix};
use crate::models::{h_effective, ModelParams, Topology};
use crate::spin::{bloch_matrix, sigma_plus_minus, BlochVector, DensityMatrix};
use crate::states::{InitialStateSpec, TiltPartner};

/// Which qubit of a two-qubit state is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Measured {
    /// Qubit 1.
    System,
    /// Qubit 2.
    #[default]
    Environment,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscordResult {
    /// Discord in bits.
    pub value: f64,
    /// Axes of the two optimal projectors, `n` and `-n`.
    pub optimal_measurement: [BlochVector; 2],
    /// Objective evaluations performed.
    pub iterations: usize,
}

const THETA_POINTS: usize = 64;
const PHI_POINTS: usize = 32;
const REFINE_ROUNDS: usize = 20;
const NEGATIVE_SLACK: f64 = 1e-9;

fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

/// Von Neumann entropy in bits.
pub fn entropy(m: &ComplexMatrix) -> Result<f64> {
    let sym = (m + &m.adjoint()).scale_real(0.5);
    Ok(-eig_hermitian(&sym)?.eigenvalues.into_iter().map(xlog2x).sum::<f64>())
}

fn axis(theta: f64, phi: f64) -> BlochVector {
    BlochVector::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos())
}

/// `sum_k p_k S(rho_unmeasured | k)` for projectors along `n` and `-n`.
fn conditional_entropy(rho: &ComplexMatrix, measured: Measured, n: &BlochVector) -> Result<f64> {
    let mut total = 0.0;
    for sign in [1.0, -1.0] {
        // (I + s n.sigma)/2
        let proj = bloch_matrix(&BlochVector::new(sign * n.x, sign * n.y, sign * n.z));
        let id = ComplexMatrix::identity(2);
        let (op, keep) = match measured {
            Measured::Environment => (kron(&id, &proj), 1),
            Measured::System => (kron(&proj, &id), 2),
        };
        let post = &(&op * rho) * &op;
        let cond = partial_trace(&post, 2, &[keep])?;
        let p = cond.trace().re;
        if p > 1e-15 {
            total += p * entropy(&cond.scale_real(1.0 / p))?;
        }
    }
    Ok(total)
}

/// Discord `I(S:E) - max_Pi J(S|Pi_E)` over rank-1 projective measurements.
///
/// The measurement axis is optimized on a 64x32 `(theta, phi)` grid and then
/// by coordinate descent with a halving step.
pub fn discord(rho_se: &DensityMatrix, measured: Measured) -> Result<DiscordResult> {
    if rho_se.qubit_count() != 2 {
        return Err(Error::BadDims(format!(
            "discord needs a two-qubit state, got {} qubits",
            rho_se.qubit_count()
        )));
    }
    let rho = rho_se.matrix();
    let measured_site = match measured {
        Measured::Environment => 2,
        Measured::System => 1,
    };
    let s_measured = entropy(&partial_trace(rho, 2, &[measured_site])?)?;
    let s_joint = entropy(rho)?;

    let objective = |theta: f64, phi: f64| conditional_entropy(rho, measured, &axis(theta, phi));

    let dtheta = std::f64::consts::PI / (THETA_POINTS - 1) as f64;
    let dphi = 2.0 * std::f64::consts::PI / PHI_POINTS as f64;
    let grid: Vec<(f64, f64)> = (0..THETA_POINTS)
        .flat_map(|i| (0..PHI_POINTS).map(move |j| (i as f64 * dtheta, j as f64 * dphi)))
        .collect();
    let values = grid
        .par_iter()
        .map(|&(th, ph)| objective(th, ph))
        .collect::<Result<Vec<f64>>>()?;
    let mut evaluations = values.len();
    let (best_idx, mut best) = values
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("nonempty grid");
    let (mut theta, mut phi) = grid[best_idx];

    let mut step = (dtheta, dphi);
    for _ in 0..REFINE_ROUNDS {
        for (dt, dp) in [(step.0, 0.0), (-step.0, 0.0), (0.0, step.1), (0.0, -step.1)] {
            let v = objective(theta + dt, phi + dp)?;
            evaluations += 1;
            if v < best {
                best = v;
                theta += dt;
                phi += dp;
            }
        }
        step = (0.5 * step.0, 0.5 * step.1);
    }

    let mut value = s_measured - s_joint + best;
    if (-NEGATIVE_SLACK..0.0).contains(&value) {
        value = 0.0;
    }
    let n = axis(theta, phi);
    Ok(DiscordResult {
        value,
        optimal_measurement: [n, BlochVector::new(-n.x, -n.y, -n.z)],
        iterations: evaluations,
    })
}

/// Qubits 1 and 2 of a register, the rest traced out.
pub fn two_qubit_cut(rho: &DensityMatrix) -> Result<DensityMatrix> {
    if rho.qubit_count() < 2 {
        return Err(Error::BadDims("need at least two qubits".into()));
    }
    if rho.qubit_count() == 2 {
        return Ok(rho.clone());
    }
    DensityMatrix::new(partial_trace(rho.matrix(), rho.qubit_count(), &[1, 2])?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationSeries {
    /// `(t, g2)` pairs.
    pub samples: Vec<(f64, f64)>,
}

impl CorrelationSeries {
    pub fn max_abs_difference(&self, other: &Self) -> f64 {
        self.samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| (a.1 - b.1).abs())
            .fold(0.0, f64::max)
    }
}

/// `g2(t) = Tr(rho_S(t) rho_S(0))` for the reduced qubit-1 state.
pub fn g2_series(spec: &InitialStateSpec, p: &ModelParams, topo: Topology, grid: &TimeGrid) -> Result<CorrelationSeries> {
    g2_of_trajectory(&trajectory(spec, p, topo, grid)?)
}

/// [`g2_series`] for an already computed trajectory.
pub fn g2_of_trajectory(traj: &Trajectory) -> Result<CorrelationSeries> {
    let rho0 = traj.initial_reduced();
    let samples = traj
        .samples
        .iter()
        .map(|s| {
            let g2 = (s.reduced_state.matrix() * rho0.matrix()).trace().re;
            if !(-1e-10..=1.0 + 1e-10).contains(&g2) {
                return Err(Error::InvalidState(format!("g2 = {g2} at t = {} out of [0, 1]", s.t)));
            }
            Ok((s.t, g2))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CorrelationSeries { samples })
}

/// `C(t) = e^{i H t} sigma_-^1 e^{-i H t} sigma_+^1` with `H` the closed two-qubit model.
pub fn correlation_operator(p: &ModelParams, t: f64) -> ComplexMatrix {
    let h = h_effective(p);
    let fwd = unitary_from_hamiltonian(&h, -t).expect("Hermitian model");
    let (plus, minus) = sigma_plus_minus();
    let id = ComplexMatrix::identity(2);
    let minus1 = kron(&minus, &id);
    let plus1 = kron(&plus, &id);
    &(&(&fwd * &minus1) * &fwd.adjoint()) * &plus1
}

/// `sum_t |g2_{a1}(t) - g2_0(t)| dt` for tilted closed-model inputs, against
/// the `a1 = 0, a3 = 1` baseline. Output is sorted by `a1`.
pub fn a1_shift_metric(p: &ModelParams, a1_values: &[f64], a3_values: &[f64], grid: &TimeGrid) -> Result<Vec<(f64, f64)>> {
    if a1_values.len() != a3_values.len() {
        return Err(Error::InvalidSpec(format!(
            "{} a1 values but {} a3 values",
            a1_values.len(),
            a3_values.len()
        )));
    }
    let partner = TiltPartner::Down;
    let baseline = g2_series(&InitialStateSpec::tilted(0.0, 1.0, partner), p, Topology::Closed, grid)?;
    let dt = grid.spacing();
    let mut out = a1_values
        .par_iter()
        .zip(a3_values)
        .map(|(&a1, &a3)| {
            let series = g2_series(&InitialStateSpec::tilted(a1, a3, partner), p, Topology::Closed, grid)?;
            let dev: f64 = series
                .samples
                .iter()
                .zip(&baseline.samples)
                .map(|(a, b)| (a.1 - b.1).abs() * dt)
                .sum();
            Ok((a1, dev))
        })
        .collect::<Result<Vec<_>>>()?;
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(out)
}
