use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |m - m^dagger| = {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("bad dimensions: {0}")]
    BadDims(String),

    #[error("qubit site {site} out of range for {qubits} qubit(s)")]
    BadSite { site: usize, qubits: usize },

    #[error("Bloch vector norm {0} exceeds 1")]
    BlochNormExceeded(f64),

    #[error("initial state carries {found} bath qubit(s) but topology {topology} needs {expected}")]
    BathMismatch {
        topology: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("invalid initial state: {0}")]
    InvalidSpec(String),

    #[error("|a1| = {0:e} is too small for the tilted template; use the z template")]
    DegenerateA1(f64),

    #[error("unsupported input family: {0}")]
    UnsupportedFamily(String),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),
}

pub type Result<T> = std::result::Result<T, Error>;
