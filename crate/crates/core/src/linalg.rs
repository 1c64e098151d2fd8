//! Dense complex linear algebra shared by the rest of the crate.
//!
//! Operators on a composite space `H_A ⊗ H_B` use the row-major product
//! index `a * n + b`, where `a < m` indexes the fixed basis of `H_A` and
//! `b < n` that of `H_B`. Transposes are always taken in that basis.

use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Entrywise tolerance for accepting a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Smallest eigenvalue allowed for a density matrix.
pub const PSD_TOL: f64 = 1e-9;
/// Allowed deviation of a density matrix trace from one.
pub const TRACE_TOL: f64 = 1e-9;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dimensions `(m, n)` of the input system A and the output system B.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dims {
    pub m: usize,
    pub n: usize,
}

impl Dims {
    pub fn new(m: usize, n: usize) -> Self {
        Self { m, n }
    }

    pub fn square(m: usize) -> Self {
        Self { m, n: m }
    }

    /// Dimension of the composite space.
    pub fn total(&self) -> usize {
        self.m * self.n
    }
}

/// The subsystem that a partial trace removes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// A square complex matrix equal to its conjugate transpose.
#[derive(Debug, Clone, PartialEq)]
pub struct Hermitian(CMatrix);

impl Hermitian {
    /// Validates `matrix` without symmetrizing it.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        let deviation = hermitian_deviation(&matrix);
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self(matrix))
    }

    /// Averages `matrix` with its adjoint. Used for results of computations
    /// that are Hermitian up to rounding.
    pub fn symmetrized(matrix: CMatrix) -> Self {
        assert!(matrix.is_square(), "symmetrized: matrix must be square");
        let adjoint = matrix.adjoint();
        Self((matrix + adjoint).scale(0.5))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(CMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self(CMatrix::identity(dim, dim))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d = diag.len();
        Self(CMatrix::from_fn(d, d, |i, j| {
            if i == j {
                Complex64::new(diag[i], 0.0)
            } else {
                ZERO
            }
        }))
    }

    /// Builds a Hermitian matrix from real entries given row by row.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let d = rows.len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::DimensionMismatch("rows of unequal length".into()));
        }
        Self::new(CMatrix::from_fn(d, d, |i, j| Complex64::new(rows[i][j], 0.0)))
    }

    /// `|v⟩⟨v|`.
    pub fn projector(v: &CVector) -> Self {
        Self(v * v.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self(self.0.scale(factor))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    /// `⟨v|X|v⟩`.
    pub fn expectation(&self, v: &CVector) -> f64 {
        v.dotc(&(&self.0 * v)).re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        eig_hermitian(self).values
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }
}

impl Add for Hermitian {
    type Output = Hermitian;
    fn add(self, rhs: Hermitian) -> Hermitian {
        assert_eq!(self.dim(), rhs.dim(), "Hermitian addition: dimension mismatch");
        Hermitian(self.0 + rhs.0)
    }
}

impl Sub for Hermitian {
    type Output = Hermitian;
    fn sub(self, rhs: Hermitian) -> Hermitian {
        assert_eq!(self.dim(), rhs.dim(), "Hermitian subtraction: dimension mismatch");
        Hermitian(self.0 - rhs.0)
    }
}

impl Mul<Hermitian> for f64 {
    type Output = Hermitian;
    fn mul(self, rhs: Hermitian) -> Hermitian {
        rhs.scale(self)
    }
}

/// A positive semidefinite Hermitian matrix of unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(Hermitian);

impl DensityMatrix {
    pub fn new(op: Hermitian) -> Result<Self> {
        let trace = op.trace();
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::BadTrace { trace });
        }
        let min_eigenvalue = op.min_eigenvalue();
        if min_eigenvalue < -PSD_TOL {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        Ok(Self(op))
    }

    pub fn from_matrix(matrix: CMatrix) -> Result<Self> {
        Self::new(Hermitian::new(matrix)?)
    }

    /// Skips validation; for outputs that are states by construction.
    pub(crate) fn new_unchecked(op: Hermitian) -> Self {
        Self(op)
    }

    /// The pure state `|v⟩⟨v|`; `v` must be a unit vector.
    pub fn pure(v: &CVector) -> Result<Self> {
        check_unit(v)?;
        Ok(Self(Hermitian::projector(v)))
    }

    /// `|i⟩⟨i|` in a space of dimension `dim`.
    pub fn basis_state(dim: usize, i: usize) -> Self {
        let mut diag = vec![0.0; dim];
        diag[i] = 1.0;
        Self(Hermitian::from_real_diagonal(&diag))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(Hermitian::identity(dim).scale(1.0 / dim as f64))
    }

    pub fn op(&self) -> &Hermitian {
        &self.0
    }

    pub fn matrix(&self) -> &CMatrix {
        self.0.matrix()
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn into_op(self) -> Hermitian {
        self.0
    }
}

/// Spectral decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: CMatrix,
}

impl EigenDecomposition {
    pub fn vector(&self, i: usize) -> CVector {
        self.vectors.column(i).into_owned()
    }

    /// `V diag(λ) V†`.
    pub fn reconstruct(&self) -> CMatrix {
        let d = self.vectors.nrows();
        let mut out = CMatrix::zeros(d, d);
        for (i, &lambda) in self.values.iter().enumerate() {
            let v = self.vectors.column(i);
            out += (v * v.adjoint()).scale(lambda);
        }
        out
    }
}

/// Largest entrywise deviation `|x_ij - conj(x_ji)|`.
pub fn hermitian_deviation(x: &CMatrix) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..x.nrows() {
        for j in i..x.ncols() {
            worst = worst.max((x[(i, j)] - x[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn kron_vec(a: &CVector, b: &CVector) -> CVector {
    a.kronecker(b)
}

fn check_composite(x: &CMatrix, dims: Dims) -> Result<()> {
    if x.nrows() != dims.total() || x.ncols() != dims.total() {
        return Err(Error::DimensionMismatch(format!(
            "operator is {}x{}, expected {}x{} for dims ({}, {})",
            x.nrows(),
            x.ncols(),
            dims.total(),
            dims.total(),
            dims.m,
            dims.n
        )));
    }
    Ok(())
}

/// Partial trace of an arbitrary operator on `H_A ⊗ H_B`.
pub fn partial_trace_matrix(x: &CMatrix, dims: Dims, traced: Subsystem) -> Result<CMatrix> {
    check_composite(x, dims)?;
    let Dims { m, n } = dims;
    Ok(match traced {
        Subsystem::B => CMatrix::from_fn(m, m, |a, a2| {
            (0..n).map(|b| x[(a * n + b, a2 * n + b)]).sum()
        }),
        Subsystem::A => CMatrix::from_fn(n, n, |b, b2| {
            (0..m).map(|a| x[(a * n + b, a * n + b2)]).sum()
        }),
    })
}

/// Traces out `traced`; `Tr_B` leaves an `m×m` operator and `Tr_A` an `n×n` one.
pub fn partial_trace(x: &Hermitian, dims: Dims, traced: Subsystem) -> Result<Hermitian> {
    partial_trace_matrix(x.matrix(), dims, traced).map(Hermitian::symmetrized)
}

pub fn partial_transpose_a_matrix(x: &CMatrix, dims: Dims) -> Result<CMatrix> {
    check_composite(x, dims)?;
    let n = dims.n;
    Ok(CMatrix::from_fn(dims.total(), dims.total(), |r, c| {
        let (a, b) = (r / n, r % n);
        let (a2, b2) = (c / n, c % n);
        x[(a2 * n + b, a * n + b2)]
    }))
}

/// Transposes the A factor in the fixed basis; swaps block `(i, j)` with block `(j, i)`.
pub fn partial_transpose_a(x: &Hermitian, dims: Dims) -> Result<Hermitian> {
    partial_transpose_a_matrix(x.matrix(), dims).map(Hermitian)
}

/// Ascending eigenvalues with orthonormal eigenvectors.
///
/// Each eigenvector's phase is fixed so that its first component of maximal
/// modulus is real and positive. Within a degenerate eigenspace the basis is
/// whatever the backend returns, which is deterministic but not canonical.
pub fn eig_hermitian(x: &Hermitian) -> EigenDecomposition {
    let d = x.dim();
    if d == 0 {
        return EigenDecomposition {
            values: Vec::new(),
            vectors: CMatrix::zeros(0, 0),
        };
    }
    let eig = SymmetricEigen::new(x.matrix().clone());
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]).then(i.cmp(&j)));

    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(d, d);
    for (col, &src) in order.iter().enumerate() {
        let mut v = eig.eigenvectors.column(src).into_owned();
        fix_phase(&mut v);
        vectors.set_column(col, &v);
    }
    EigenDecomposition { values, vectors }
}

pub(crate) fn fix_phase(v: &mut CVector) {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let pivot = v.iter().position(|z| z.norm() >= max * (1.0 - 1e-9)).unwrap_or(0);
    let phase = v[pivot] / v[pivot].norm();
    v.apply(|z| *z *= phase.conj());
}

/// Nearest positive semidefinite matrix in Frobenius norm.
pub fn psd_project(x: &Hermitian) -> Hermitian {
    let eig = eig_hermitian(x);
    psd_from_eig(&eig)
}

pub(crate) fn psd_from_eig(eig: &EigenDecomposition) -> Hermitian {
    let d = eig.vectors.nrows();
    let mut out = CMatrix::zeros(d, d);
    for (i, &lambda) in eig.values.iter().enumerate() {
        if lambda > 0.0 {
            let v = eig.vectors.column(i);
            out += (v * v.adjoint()).scale(lambda);
        }
    }
    Hermitian::symmetrized(out)
}

/// `Tr(ab)` for arbitrary square matrices of equal size.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> Result<Complex64> {
    if a.shape() != b.shape() || !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "trace product of {:?} and {:?}",
            a.shape(),
            b.shape()
        )));
    }
    let d = a.nrows();
    let mut acc = ZERO;
    for i in 0..d {
        for j in 0..d {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    Ok(acc)
}

/// `Tr(ab)`, real for Hermitian arguments.
pub fn frobenius_inner(a: &Hermitian, b: &Hermitian) -> Result<f64> {
    trace_product(a.matrix(), b.matrix()).map(|z| z.re)
}

pub fn check_unit(v: &CVector) -> Result<()> {
    let norm = v.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized { norm });
    }
    Ok(())
}

/// Pauli matrices σ₁, σ₂, σ₃.
pub mod pauli {
    use super::*;

    pub fn x() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
    }

    pub fn y() -> CMatrix {
        let i = Complex64::new(0.0, 1.0);
        CMatrix::from_row_slice(2, 2, &[ZERO, -i, i, ZERO])
    }

    pub fn z() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
    }

    /// σ_j for `j` in 1..=3.
    pub fn sigma(j: usize) -> CMatrix {
        match j {
            1 => x(),
            2 => y(),
            3 => z(),
            _ => panic!("Pauli index must be 1, 2 or 3, got {j}"),
        }
    }
}

/// `|i⟩` in a space of dimension `dim`.
pub fn basis_vector(dim: usize, i: usize) -> CVector {
    let mut v = CVector::zeros(dim);
    v[i] = ONE;
    v
}

/// Builds a complex vector from real entries.
pub fn real_vector(entries: &[f64]) -> CVector {
    CVector::from_iterator(entries.len(), entries.iter().map(|&x| Complex64::new(x, 0.0)))
}

/// Promotes a real matrix given row by row.
pub fn real_matrix(rows: usize, cols: usize, entries: &[f64]) -> CMatrix {
    assert_eq!(entries.len(), rows * cols);
    CMatrix::from_row_slice(
        rows,
        cols,
        &entries.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>(),
    )
}

/// Real dense matrix wrapper used by the solver.
pub type RMatrix = DMatrix<f64>;
pub type RVector = DVector<f64>;
