//! Dense complex linear algebra for small (at most 16x16) matrices.
//!
//! Storage and products go through `nalgebra`; the Hermitian eigensolver is
//! nalgebra's tridiagonal QR (`SymmetricEigen`), which handles complex
//! Hermitian input. Everything else here is spelled out directly.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
pub use num_complex::Complex64;

use crate::error::{Error, Result};

/// Absolute max-norm tolerance on `m - m^dagger` accepted as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub fn r(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// A dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    inner: DMatrix<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            inner: DMatrix::zeros(rows, cols),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            inner: DMatrix::identity(n, n),
        }
    }

    /// Builds a matrix from row-major entries.
    pub fn from_row_major(rows: usize, cols: usize, entries: &[Complex64]) -> Result<Self> {
        if rows * cols != entries.len() {
            return Err(Error::BadDims(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::BadDims("matrix entries must be finite".into()));
        }
        Ok(Self {
            inner: DMatrix::from_row_slice(rows, cols, entries),
        })
    }

    /// Row-major literal helper for real matrices; panics on ragged input.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        let m = rows.first().map_or(0, |row| row.len());
        let entries: Vec<Complex64> = rows
            .iter()
            .flat_map(|row| {
                assert_eq!(row.len(), m, "ragged matrix literal");
                row.iter().map(|&x| r(x))
            })
            .collect();
        Self::from_row_major(n, m, &entries).expect("finite literal")
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let mut out = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            out[(i, i)] = d;
        }
        out
    }

    /// Outer product `|u><v|`.
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Self {
        let mut out = Self::zeros(u.len(), v.len());
        for (i, &ui) in u.iter().enumerate() {
            for (j, &vj) in v.iter().enumerate() {
                out[(i, j)] = ui * vj.conj();
            }
        }
        out
    }

    pub fn rows(&self) -> usize {
        self.inner.nrows()
    }

    pub fn cols(&self) -> usize {
        self.inner.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    /// Entries in row-major order.
    pub fn to_row_major(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.inner[(i, j)]);
            }
        }
        out
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        self.inner.column(j).iter().copied().collect()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            inner: self.inner.adjoint(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self {
            inner: self.inner.transpose(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.inner.diagonal().iter().sum()
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Self {
            inner: &self.inner * k,
        }
    }

    pub fn scale_real(&self, k: f64) -> Self {
        self.scale(r(k))
    }

    /// Max-norm `max |a_ij - b_ij|`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(
            (self.rows(), self.cols()),
            (other.rows(), other.cols()),
            "shape mismatch in max_abs_diff"
        );
        self.inner
            .iter()
            .zip(other.inner.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.inner.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |m - m^dagger|`; infinite for non-square input.
    pub fn hermiticity_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_finite(&self) -> bool {
        self.inner.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn as_nalgebra(&self) -> &DMatrix<Complex64> {
        &self.inner
    }

    pub fn from_nalgebra(inner: DMatrix<Complex64>) -> Self {
        Self { inner }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, idx: (usize, usize)) -> &Complex64 {
        &self.inner[idx]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, idx: (usize, usize)) -> &mut Complex64 {
        &mut self.inner[idx]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix {
            inner: &self.inner * &rhs.inner,
        }
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix {
            inner: &self.inner + &rhs.inner,
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix {
            inner: &self.inner - &rhs.inner,
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows(), self.cols())?;
        for i in 0..self.rows() {
            write!(f, "  ")?;
            for j in 0..self.cols() {
                let z = self.inner[(i, j)];
                write!(f, "{:>9.5}{:+.5}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Eigenvalues (descending) and matching orthonormal eigenvectors (columns).
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl Spectrum {
    pub fn min(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(f64::NAN)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(f64::NAN)
    }

    /// `V diag(f(lambda)) V^dagger`.
    pub fn map_eigenvalues(&self, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        let diag: Vec<Complex64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let v = &self.eigenvectors;
        &(v * &ComplexMatrix::from_diagonal(&diag)) * &v.adjoint()
    }
}

/// Kronecker product `a (x) b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix {
        inner: a.inner.kronecker(&b.inner),
    }
}

/// Kronecker product of a sequence of factors, leftmost first.
pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> ComplexMatrix {
    factors
        .into_iter()
        .fold(ComplexMatrix::identity(1), |acc, f| kron(&acc, f))
}

/// Hermitian eigendecomposition with eigenvalues sorted descending.
pub fn eig_hermitian(m: &ComplexMatrix) -> Result<Spectrum> {
    if !m.is_square() {
        return Err(Error::BadDims(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let residual = m.hermiticity_residual();
    if residual > HERMITIAN_TOL {
        return Err(Error::NotHermitian { residual });
    }
    let n = m.rows();
    let sym = (&m.inner + &m.inner.adjoint()) * r(0.5);
    let eig = sym.symmetric_eigen();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));

    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vecs.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(Spectrum {
        eigenvalues,
        eigenvectors: ComplexMatrix { inner: vecs },
    })
}

/// `U = exp(-i h t)` through the eigendecomposition of `h`.
pub fn unitary_from_hamiltonian(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    let spec = eig_hermitian(h)?;
    Ok(spec.map_eigenvalues(|l| Complex64::from_polar(1.0, -l * t)))
}

/// Number of qubits `n` with `2^n == dim`, if any.
pub fn qubits_for_dim(dim: usize) -> Option<usize> {
    (dim.is_power_of_two() && dim > 0).then(|| dim.trailing_zeros() as usize)
}

/// Partial trace over every qubit not listed in `keep` (1-based, qubit 1 is
/// the leftmost tensor factor). Kept qubits appear in ascending order.
pub fn partial_trace(rho: &ComplexMatrix, qubit_count: usize, keep: &[usize]) -> Result<ComplexMatrix> {
    if !rho.is_square() || qubits_for_dim(rho.rows()) != Some(qubit_count) {
        return Err(Error::BadDims(format!(
            "{}x{} matrix is not a {qubit_count}-qubit operator",
            rho.rows(),
            rho.cols()
        )));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.is_empty() {
        return Err(Error::BadDims("partial trace must keep at least one qubit".into()));
    }
    if let Some(&bad) = kept.iter().find(|&&q| q == 0 || q > qubit_count) {
        return Err(Error::BadDims(format!(
            "qubit {bad} out of range 1..={qubit_count}"
        )));
    }
    let traced: Vec<usize> = (1..=qubit_count).filter(|q| !kept.contains(q)).collect();
    let bit = |q: usize| qubit_count - q;

    // Scatter the bits of a sub-index over the given qubit positions.
    let spread = |value: usize, qubits: &[usize]| -> usize {
        qubits
            .iter()
            .enumerate()
            .map(|(k, &q)| ((value >> (qubits.len() - 1 - k)) & 1) << bit(q))
            .sum()
    };

    let dk = 1usize << kept.len();
    let dt = 1usize << traced.len();
    let mut out = ComplexMatrix::zeros(dk, dk);
    for i in 0..dk {
        let row_base = spread(i, &kept);
        for j in 0..dk {
            let col_base = spread(j, &kept);
            let mut acc = ZERO;
            for e in 0..dt {
                let off = spread(e, &traced);
                acc += rho[(row_base | off, col_base | off)];
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}
