//! One step of facial reduction.
//!
//! If `σ_j |ψ⟩ = 0` then `⟨ψ|E(ρ_j)|ψ⟩ = m·Tr[(ρ_jᵀ ⊗ |ψ⟩⟨ψ|) κ] = 0`, and
//! with both factors positive this forces `κ (φ ⊗ ψ) = 0` for every `φ` in
//! the range of `ρ_jᵀ`. Every feasible `κ` therefore lives on the face
//! `κ = W K W†`, where the columns of `W` span the orthogonal complement of
//! all such `φ ⊗ ψ`. Solving for `K ⪰ 0` restores a strictly feasible
//! interior when the constraints prescribe rank-deficient outputs.

use num_complex::Complex64;

use crate::linalg::{eig_hermitian, kron_vec, CMatrix, Hermitian, RMatrix, RVector};

use super::affine::{build_affine_system, AffineProjector};
use super::vectorize::{devectorize_matrix, vectorize_matrix};
use super::TransportProblem;

/// Eigenvalues at or below this count as kernel (outputs) or are ignored
/// (inputs) when detecting the face.
const FACE_TOL: f64 = 1e-10;

/// The problem restated on its minimal detected face.
#[derive(Debug, Clone)]
pub(crate) struct ReducedProblem {
    /// Isometry `W` (`d × r`) onto the face.
    pub frame: CMatrix,
    /// Affine projection in reduced coordinates `vec(K)`.
    pub projector: AffineProjector,
    /// `vec(W† C W)`.
    pub cost: RVector,
}

impl ReducedProblem {
    pub(crate) fn new(p: &TransportProblem) -> Self {
        let frame = face_frame(p);
        let r = frame.ncols();
        let full = build_affine_system(p);

        // A_reduced = A_full ∘ lift, assembled one basis matrix at a time.
        let mut lift = RMatrix::zeros(full.matrix.ncols(), r * r);
        let mut unit = RVector::zeros(r * r);
        for k in 0..r * r {
            unit[k] = 1.0;
            let small = devectorize_matrix(&unit);
            unit[k] = 0.0;
            let big = &frame * small * frame.adjoint();
            lift.column_mut(k).copy_from(&vectorize_matrix(&big));
        }
        let reduced = super::affine::AffineSystem {
            matrix: &full.matrix * &lift,
            rhs: full.rhs.clone(),
            dims: full.dims,
        };
        let cost_small = frame.adjoint() * p.cost.matrix() * &frame;
        Self {
            projector: AffineProjector::new(&reduced),
            cost: vectorize_matrix(&cost_small),
            frame,
        }
    }

    pub(crate) fn rank(&self) -> usize {
        self.frame.ncols()
    }

    /// `W K W†`.
    pub(crate) fn lift(&self, k: &RVector) -> Hermitian {
        Hermitian::symmetrized(&self.frame * devectorize_matrix(k) * self.frame.adjoint())
    }

    /// `W† κ W` in reduced coordinates.
    pub(crate) fn restrict(&self, kappa: &Hermitian) -> RVector {
        vectorize_matrix(&(self.frame.adjoint() * kappa.matrix() * &self.frame))
    }
}

/// Orthonormal basis of the complement of `span{φ ⊗ ψ}`.
pub(crate) fn face_frame(p: &TransportProblem) -> CMatrix {
    let d = p.dims.total();
    let mut excluded = CMatrix::zeros(d, d);
    for pair in &p.constraints {
        let input_t = pair.input.op().transpose();
        let in_eig = eig_hermitian(&input_t);
        let out_eig = eig_hermitian(pair.output.op());
        for (i, &li) in in_eig.values.iter().enumerate() {
            if li <= FACE_TOL {
                continue;
            }
            let phi = in_eig.vector(i);
            for (o, &lo) in out_eig.values.iter().enumerate() {
                if lo > FACE_TOL {
                    continue;
                }
                let v = kron_vec(&phi, &out_eig.vector(o));
                excluded += &v * v.adjoint();
            }
        }
    }
    if excluded.norm() == 0.0 {
        return CMatrix::identity(d, d);
    }
    let eig = eig_hermitian(&Hermitian::symmetrized(excluded));
    let keep: Vec<usize> = (0..d).filter(|&i| eig.values[i] <= FACE_TOL).collect();
    let mut frame = CMatrix::from_element(d, keep.len(), Complex64::new(0.0, 0.0));
    for (col, &i) in keep.iter().enumerate() {
        frame.set_column(col, &eig.vectors.column(i));
    }
    frame
}
