//! Dense density operators on small Hilbert spaces.
//!
//! The trace norm used throughout the crate is the *un-halved* Schatten
//! 1-norm: for two orthogonal pure states `‖ρ − σ‖₁ = 2`. Every bound in
//! [`crate::qcc`] and [`crate::ftcalc`] is written against this convention.

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

pub type CMatrix = DMatrix<Complex64>;

/// Absolute tolerance for every validation check in this module.
pub const TOL: f64 = 1e-9;

/// Eigenvalues smaller than this in magnitude count as zero in [`trace_norm`].
pub const EIGEN_ZERO: f64 = 1e-12;

/// Largest supported dimension (8 qubits).
pub const MAX_DIM: usize = 256;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix is {rows}x{cols}, expected a non-empty square matrix")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension {dim} exceeds the supported maximum of {MAX_DIM}")]
    TooLarge { dim: usize },
    #[error("matrix is not Hermitian: worst |A - A^dagger| entry is {deviation:e}")]
    NotHermitian { deviation: f64 },
    #[error("trace is {trace}, expected 1 (deviation {deviation:e})")]
    NotUnitTrace { trace: f64, deviation: f64 },
    #[error("matrix is not positive semidefinite: smallest eigenvalue {min_eigenvalue:e}")]
    NotPositive { min_eigenvalue: f64 },
    #[error("matrix is not unitary: worst |U^dagger U - I| entry is {deviation:e}")]
    NotUnitary { deviation: f64 },
    #[error("operator is not an effect: eigenvalue {eigenvalue} lies outside [0, 1]")]
    NotAnEffect { eigenvalue: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

fn check_square(m: &CMatrix) -> Result<usize, LinalgError> {
    let (rows, cols) = m.shape();
    if rows != cols || rows == 0 {
        return Err(LinalgError::NotSquare { rows, cols });
    }
    if rows > MAX_DIM {
        return Err(LinalgError::TooLarge { dim: rows });
    }
    Ok(rows)
}

/// Largest entrywise deviation from Hermiticity.
pub fn hermiticity_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Largest entrywise deviation of `U†U` from the identity.
pub fn unitarity_deviation(u: &CMatrix) -> f64 {
    let n = u.nrows();
    let gram = u.adjoint() * u;
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((gram[(i, j)] - target).norm());
        }
    }
    worst
}

pub fn check_unitary(u: &CMatrix) -> Result<usize, LinalgError> {
    let dim = check_square(u)?;
    let deviation = unitarity_deviation(u);
    if deviation > TOL {
        return Err(LinalgError::NotUnitary { deviation });
    }
    Ok(dim)
}

/// Real eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut eig: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(f64::total_cmp);
    eig
}

fn trace_of(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// Kronecker product, first factor most significant.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// A Hermitian operator with no trace or positivity constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    m: CMatrix,
}

impl HermitianOperator {
    pub fn new(m: CMatrix) -> Result<Self, LinalgError> {
        check_square(&m)?;
        let deviation = hermiticity_deviation(&m);
        if deviation > TOL {
            return Err(LinalgError::NotHermitian { deviation });
        }
        Ok(Self { m })
    }

    pub fn identity(dim: usize) -> Self {
        Self { m: CMatrix::identity(dim, dim) }
    }

    /// Projector onto the computational basis state `index`.
    pub fn basis_projector(dim: usize, index: usize) -> Self {
        let mut m = CMatrix::zeros(dim, dim);
        m[(index, index)] = ONE;
        Self { m }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn scale(&self, c: f64) -> Self {
        Self { m: self.m.map(|z| z * c) }
    }

    pub fn add(&self, other: &Self) -> Result<Self, LinalgError> {
        same_dim(self.dim(), other.dim())?;
        Ok(Self { m: &self.m + &other.m })
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.m)
    }

    /// Checks `0 ≤ E ≤ I` within tolerance.
    pub fn check_effect(&self) -> Result<(), LinalgError> {
        for eigenvalue in self.eigenvalues() {
            if !(-TOL..=1.0 + TOL).contains(&eigenvalue) {
                return Err(LinalgError::NotAnEffect { eigenvalue });
            }
        }
        Ok(())
    }
}

fn same_dim(expected: usize, found: usize) -> Result<(), LinalgError> {
    if expected != found {
        return Err(LinalgError::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// A Hermitian, unit-trace, positive-semidefinite operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: CMatrix,
}

impl DensityMatrix {
    /// Validates `entries` as a state. Nothing is repaired: a matrix that
    /// misses any invariant by more than [`TOL`] is rejected.
    pub fn new(entries: CMatrix) -> Result<Self, LinalgError> {
        check_square(&entries)?;
        let deviation = hermiticity_deviation(&entries);
        if deviation > TOL {
            return Err(LinalgError::NotHermitian { deviation });
        }
        let trace = trace_of(&entries).re;
        if (trace - 1.0).abs() > TOL {
            return Err(LinalgError::NotUnitTrace { trace, deviation: (trace - 1.0).abs() });
        }
        let min_eigenvalue = hermitian_eigenvalues(&entries)[0];
        if min_eigenvalue < -TOL {
            return Err(LinalgError::NotPositive { min_eigenvalue });
        }
        Ok(Self { m: entries })
    }

    /// Wraps the output of a CPTP map without re-running the eigenvalue check.
    pub(crate) fn from_cptp_output(m: CMatrix) -> Self {
        Self { m }
    }

    /// `|ψ⟩⟨ψ|` for a normalised vector.
    pub fn pure(amplitudes: &[Complex64]) -> Result<Self, LinalgError> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>();
        if (norm - 1.0).abs() > TOL {
            return Err(LinalgError::NotUnitTrace { trace: norm, deviation: (norm - 1.0).abs() });
        }
        let v = nalgebra::DVector::from_column_slice(amplitudes);
        let m = &v * v.adjoint();
        check_square(&m)?;
        Ok(Self { m })
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut m = CMatrix::zeros(dim, dim);
        m[(index, index)] = ONE;
        Self { m }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self { m: CMatrix::identity(dim, dim).map(|z| z / dim as f64) }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn trace(&self) -> f64 {
        trace_of(&self.m).re
    }

    /// `self − other` as a Hermitian operator.
    pub fn minus(&self, other: &Self) -> Result<HermitianOperator, LinalgError> {
        same_dim(self.dim(), other.dim())?;
        Ok(HermitianOperator { m: &self.m - &other.m })
    }

    /// Runs the full invariant check again; used by tests on map outputs.
    pub fn revalidate(&self) -> Result<(), LinalgError> {
        Self::new(self.m.clone()).map(|_| ())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (&self.m - &other.m).iter().fold(0.0, |acc, z| acc.max(z.norm()))
    }
}

/// `U ρ U†`.
pub fn apply_unitary(rho: &DensityMatrix, u: &CMatrix) -> Result<DensityMatrix, LinalgError> {
    let dim = check_unitary(u)?;
    same_dim(rho.dim(), dim)?;
    Ok(DensityMatrix { m: u * &rho.m * u.adjoint() })
}

/// Sum of absolute eigenvalues (un-halved Schatten 1-norm).
pub fn trace_norm(a: &HermitianOperator) -> f64 {
    a.eigenvalues()
        .into_iter()
        .map(f64::abs)
        .filter(|v| *v >= EIGEN_ZERO)
        .fold(0.0, |acc, v| acc + v)
}

/// `‖ρ − σ‖₁` for two states of equal dimension.
pub fn state_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64, LinalgError> {
    Ok(trace_norm(&rho.minus(sigma)?))
}

pub fn tensor(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<DensityMatrix, LinalgError> {
    let dim = rho.dim() * sigma.dim();
    if dim > MAX_DIM {
        return Err(LinalgError::TooLarge { dim });
    }
    Ok(DensityMatrix { m: kron(&rho.m, &sigma.m) })
}

/// Traces out the trailing tensor factor of dimension `drop_dims`.
pub fn partial_trace(
    rho: &DensityMatrix,
    keep_dims: usize,
    drop_dims: usize,
) -> Result<DensityMatrix, LinalgError> {
    same_dim(keep_dims * drop_dims, rho.dim())?;
    let m = CMatrix::from_fn(keep_dims, keep_dims, |i, j| {
        (0..drop_dims).map(|k| rho.m[(i * drop_dims + k, j * drop_dims + k)]).sum()
    });
    Ok(DensityMatrix { m })
}

/// `tr(Eρ)` clamped to `[0, 1]`; equal to `tr(√E ρ √E)` by cyclicity.
pub fn effect_probability(rho: &DensityMatrix, effect: &HermitianOperator) -> Result<f64, LinalgError> {
    same_dim(rho.dim(), effect.dim())?;
    effect.check_effect()?;
    Ok(expectation(rho, effect))
}

/// `tr(Eρ)` clamped to `[0, 1]` for an effect already known to be valid.
pub(crate) fn expectation(rho: &DensityMatrix, effect: &HermitianOperator) -> f64 {
    let n = rho.dim();
    let mut acc = ZERO;
    for i in 0..n {
        for j in 0..n {
            acc += effect.m[(i, j)] * rho.m[(j, i)];
        }
    }
    acc.re.clamp(0.0, 1.0)
}
