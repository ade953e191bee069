//! Unitary evolution of the full register and reduction to qubit 1.
//!
//! States are propagated with `U(t) = exp(+i H t)`, `rho(t) = U rho U^dagger`.
//! This is the sign under which the closed-form transverse coefficients in
//! [`crate::maps::closed_form_coeffs`] hold; the opposite sign only flips the
//! `y` Bloch component of qubit 1 (see the tests in `maps`).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::models::{h_total, ModelParams, Topology};
use crate::spin::{bloch_of, BlochVector, DensityMatrix};
use crate::states::{build_initial, InitialStateSpec};

/// Uniformly spaced sample times, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub start: f64,
    pub end: f64,
    pub steps: usize,
}

impl Default for TimeGrid {
    fn default() -> Self {
        Self {
            start: 0.1,
            end: 0.9,
            steps: 33,
        }
    }
}

impl TimeGrid {
    pub fn new(start: f64, end: f64, steps: usize) -> Result<Self> {
        let grid = Self { start, end, steps };
        grid.validate()?;
        Ok(grid)
    }

    /// 81 samples, used for Bloch-vector animations.
    pub fn dense(start: f64, end: f64) -> Self {
        Self { start, end, steps: 81 }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.start.is_finite() || !self.end.is_finite() {
            return Err(Error::InvalidSpec("time grid bounds must be finite".into()));
        }
        if self.start > self.end {
            return Err(Error::InvalidSpec(format!(
                "time grid start {} exceeds end {}",
                self.start, self.end
            )));
        }
        if self.steps == 0 {
            return Err(Error::InvalidSpec("time grid needs at least one step".into()));
        }
        Ok(())
    }

    /// Spacing between consecutive samples (zero for a single sample).
    pub fn spacing(&self) -> f64 {
        if self.steps > 1 {
            (self.end - self.start) / (self.steps - 1) as f64
        } else {
            0.0
        }
    }

    pub fn times(&self) -> Vec<f64> {
        let dt = self.spacing();
        (0..self.steps).map(|i| self.start + dt * i as f64).collect()
    }
}

/// One time sample of the reduced impurity dynamics.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub reduced_state: DensityMatrix,
    pub bloch: BlochVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub initial_state: DensityMatrix,
    pub initial_bloch: BlochVector,
    pub samples: Vec<Sample>,
}

impl Trajectory {
    pub fn sample_at(&self, t: f64) -> Option<&Sample> {
        self.samples.iter().find(|s| (s.t - t).abs() <= 1e-12)
    }

    /// Reduced qubit-1 state at `t = 0`.
    pub fn initial_reduced(&self) -> DensityMatrix {
        reduce_to_impurity(&self.initial_state).expect("validated initial state")
    }
}

/// `exp(+i h t)`.
pub fn propagator(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    linalg::unitary_from_hamiltonian(h, -t)
}

/// `rho(t) = U rho0 U^dagger` with `U = exp(+i h t)`.
pub fn evolve(rho0: &DensityMatrix, h: &ComplexMatrix, t: f64) -> Result<DensityMatrix> {
    if h.rows() != rho0.matrix().rows() || !h.is_square() {
        return Err(Error::BadDims(format!(
            "Hamiltonian is {}x{} but state is {}x{}",
            h.rows(),
            h.cols(),
            rho0.matrix().rows(),
            rho0.matrix().cols()
        )));
    }
    if t == 0.0 {
        return Ok(rho0.clone());
    }
    let u = propagator(h, t)?;
    let out = &(&u * rho0.matrix()) * &u.adjoint();
    Ok(DensityMatrix::from_trusted(out))
}

fn reduce_to_impurity(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let red = linalg::partial_trace(rho.matrix(), rho.qubit_count(), &[1])?;
    DensityMatrix::new(red)
}

/// Traces out everything except qubit 1.
pub fn reduced(rho: &DensityMatrix, topo: Topology) -> Result<DensityMatrix> {
    if rho.qubit_count() != topo.total_qubits() {
        return Err(Error::BadDims(format!(
            "state has {} qubits, topology {} has {}",
            rho.qubit_count(),
            topo,
            topo.total_qubits()
        )));
    }
    reduce_to_impurity(rho)
}

/// Reduced impurity dynamics on every grid time, in ascending order.
pub fn trajectory(
    spec: &InitialStateSpec,
    p: &ModelParams,
    topo: Topology,
    grid: &TimeGrid,
) -> Result<Trajectory> {
    grid.validate()?;
    let rho0 = build_initial(spec, topo)?;
    let h = h_total(p, topo);
    let initial_bloch = bloch_of(&reduced(&rho0, topo)?)?;
    let samples = grid
        .times()
        .into_par_iter()
        .map(|t| {
            let reduced_state = reduced(&evolve(&rho0, &h, t)?, topo)?;
            let bloch = bloch_of(&reduced_state)?;
            Ok(Sample { t, reduced_state, bloch })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory {
        initial_state: rho0,
        initial_bloch,
        samples,
    })
}
