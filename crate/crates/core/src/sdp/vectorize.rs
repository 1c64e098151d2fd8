//! Isometry between `d×d` Hermitian matrices and `R^{d²}`.
//!
//! Coordinates are the `d` diagonal entries followed by `√2·Re x_ij`,
//! `√2·Im x_ij` for each `i < j` in row-major order, so that the Euclidean
//! dot product of images equals `Tr(ab)`.

use num_complex::Complex64;

use crate::linalg::{CMatrix, Hermitian, RVector};

pub fn vectorize_hermitian(x: &Hermitian) -> RVector {
    vectorize_matrix(x.matrix())
}

pub fn devectorize_hermitian(v: &RVector) -> Hermitian {
    Hermitian::symmetrized(devectorize_matrix(v))
}

/// Side length `d` of the matrix behind a vector of length `d²`.
pub fn side_length(len: usize) -> usize {
    let d = (len as f64).sqrt().round() as usize;
    assert_eq!(d * d, len, "vector length {len} is not a perfect square");
    d
}

/// Reads only the diagonal and upper triangle of `x`.
pub(crate) fn vectorize_matrix(x: &CMatrix) -> RVector {
    let d = x.nrows();
    let mut out = RVector::zeros(d * d);
    write_vectorized(x, out.as_mut_slice());
    out
}

pub(crate) fn write_vectorized(x: &CMatrix, out: &mut [f64]) {
    let d = x.nrows();
    let s = std::f64::consts::SQRT_2;
    for i in 0..d {
        out[i] = x[(i, i)].re;
    }
    let mut k = d;
    for i in 0..d {
        for j in (i + 1)..d {
            out[k] = s * x[(i, j)].re;
            out[k + 1] = s * x[(i, j)].im;
            k += 2;
        }
    }
}

pub(crate) fn devectorize_matrix(v: &RVector) -> CMatrix {
    let d = side_length(v.len());
    let mut x = CMatrix::zeros(d, d);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..d {
        x[(i, i)] = Complex64::new(v[i], 0.0);
    }
    let mut k = d;
    for i in 0..d {
        for j in (i + 1)..d {
            let z = Complex64::new(h * v[k], h * v[k + 1]);
            x[(i, j)] = z;
            x[(j, i)] = z.conj();
            k += 2;
        }
    }
    x
}
