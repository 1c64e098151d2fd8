use crate::choi::apply_dual_map;
use crate::linalg::{partial_trace_matrix, CMatrix, Dims, RMatrix, RVector, Subsystem};

use super::vectorize::{devectorize_matrix, vectorize_matrix, write_vectorized};
use super::TransportProblem;

/// Singular values below this fraction of the largest are treated as zero.
const PINV_RCOND: f64 = 1e-10;

/// The linear constraints `A·vec(κ) = b` in vectorized Hermitian coordinates.
///
/// The first `m²` rows encode `Tr_B κ = I/m`; each constraint pair then
/// contributes `n²` rows encoding `m·Tr_A[(ρᵀ ⊗ I) κ] = σ`. Rows are
/// redundant (every pair repeats the trace condition) and are kept as is.
#[derive(Debug, Clone)]
pub struct AffineSystem {
    pub matrix: RMatrix,
    pub rhs: RVector,
    pub dims: Dims,
}

impl AffineSystem {
    pub fn rows(&self) -> usize {
        self.matrix.nrows()
    }

    /// `A x − b`.
    pub fn residual(&self, x: &RVector) -> RVector {
        &self.matrix * x - &self.rhs
    }

    /// Row range of constraint pair `j`.
    pub fn constraint_rows(&self, j: usize) -> std::ops::Range<usize> {
        let start = self.dims.m * self.dims.m + j * self.dims.n * self.dims.n;
        start..start + self.dims.n * self.dims.n
    }
}

pub fn build_affine_system(p: &TransportProblem) -> AffineSystem {
    let dims = p.dims;
    let d = dims.total();
    let cols = d * d;
    let reduction_rows = dims.m * dims.m;
    let pair_rows = dims.n * dims.n;
    let rows = reduction_rows + pair_rows * p.constraints.len();

    let mut matrix = RMatrix::zeros(rows, cols);
    let mut unit = RVector::zeros(cols);
    let mut column = vec![0.0; rows];
    for k in 0..cols {
        unit[k] = 1.0;
        let basis = devectorize_matrix(&unit);
        unit[k] = 0.0;

        let reduced = partial_trace_matrix(&basis, dims, Subsystem::B).expect("basis matches dims");
        write_vectorized(&reduced, &mut column[..reduction_rows]);
        for (j, pair) in p.constraints.iter().enumerate() {
            let out = apply_dual_map(dims, &basis, pair.input.matrix()).expect("pair matches dims");
            let start = reduction_rows + j * pair_rows;
            write_vectorized(&out, &mut column[start..start + pair_rows]);
        }
        matrix.column_mut(k).copy_from_slice(&column);
    }

    let mut rhs = RVector::zeros(rows);
    let target = CMatrix::identity(dims.m, dims.m).scale(1.0 / dims.m as f64);
    rhs.rows_mut(0, reduction_rows).copy_from(&vectorize_matrix(&target));
    for (j, pair) in p.constraints.iter().enumerate() {
        let start = reduction_rows + j * pair_rows;
        rhs.rows_mut(start, pair_rows).copy_from(&vectorize_matrix(pair.output.matrix()));
    }

    AffineSystem { matrix, rhs, dims }
}

/// Minimum-norm projection onto `{x : A x = b}` (onto the least-squares set
/// when the system is inconsistent), from a cached pseudoinverse.
#[derive(Debug, Clone)]
pub(crate) struct AffineProjector {
    a: RMatrix,
    b: RVector,
    pinv: RMatrix,
}

impl AffineProjector {
    pub(crate) fn new(system: &AffineSystem) -> Self {
        let a = system.matrix.clone();
        let svd = a.clone().svd(true, true);
        let u = svd.u.expect("requested U");
        let v_t = svd.v_t.expect("requested V^T");
        let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
        let cutoff = smax * PINV_RCOND;
        let mut pinv = RMatrix::zeros(a.ncols(), a.nrows());
        for (i, &s) in svd.singular_values.iter().enumerate() {
            if s > cutoff {
                pinv += v_t.row(i).transpose() * u.column(i).transpose() / s;
            }
        }
        Self {
            a,
            b: system.rhs.clone(),
            pinv,
        }
    }

    pub(crate) fn project(&self, x: &RVector) -> RVector {
        let r = &self.a * x - &self.b;
        x - &self.pinv * r
    }

    /// Component of `c` orthogonal to the row space of `A`.
    pub(crate) fn null_component(&self, c: &RVector) -> RVector {
        c - &self.pinv * (&self.a * c)
    }

    pub(crate) fn residual_norm(&self, x: &RVector) -> f64 {
        (&self.a * x - &self.b).norm()
    }
}
