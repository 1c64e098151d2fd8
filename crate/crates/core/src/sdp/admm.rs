//! ADMM operator splitting between the affine set and the PSD cone.
//!
//! With `f(x) = ⟨c, x⟩ + 1_{Ax=b}(x)` and `g(z) = 1_{z ⪰ 0}(z)` the
//! iteration is
//!
//! ```text
//! x⁺ = Π_aff(z − u − c/ρ)
//! x̂  = α x⁺ + (1 − α) z
//! z⁺ = Π_psd(x̂ + u)
//! u⁺ = u + x̂ − z⁺
//! ```
//!
//! The iteration runs on the face detected by [`super::face`], in the
//! coordinates of `K` where `κ = W K W†`. The objective is reduced to its
//! component in the null space of `A` and normalized, so the iteration is
//! invariant under `C ↦ αC + βI`.

use nalgebra::SymmetricEigen;

use crate::choi::ChoiState;
use crate::linalg::{Hermitian, RVector};

use super::face::ReducedProblem;
use super::vectorize::{devectorize_matrix, vectorize_matrix};
use super::verify::verify_kappa;
use super::{Solution, Status, TransportProblem};

/// Consecutive iterations without progress before declaring infeasibility.
const STALL_WINDOW: usize = 1000;
/// Relative decrease of the affine residual that counts as progress.
const STALL_PROGRESS: f64 = 0.99;
/// Iterations between penalty rebalancing checks.
const REBALANCE_EVERY: usize = 25;
const REBALANCE_RATIO: f64 = 10.0;
const PENALTY_MIN: f64 = 1e-6;
const PENALTY_MAX: f64 = 1e6;
/// Residuals are driven below `tol` by this factor so the objective is
/// accurate to about `tol` as well.
const TARGET_MARGIN: f64 = 0.1;

/// Solves from the maximally mixed starting point `I/(mn)`.
pub fn solve(p: &TransportProblem) -> Solution {
    solve_warm(p, None)
}

/// Solves from `start` when given, with zero initial dual.
pub fn solve_warm(p: &TransportProblem, start: Option<&Hermitian>) -> Solution {
    let opts = p.options;
    let d = p.dims.total();
    let reduced = ReducedProblem::new(p);
    let r_dim = reduced.rank();
    let projector = &reduced.projector;

    let c = &reduced.cost;
    let c_null = projector.null_component(c);
    let c_norm = c_null.norm();
    let direction = if c_norm > 1e-12 * c.norm() && c_norm > 0.0 {
        c_null / c_norm
    } else {
        RVector::zeros(r_dim * r_dim)
    };

    let mut z = match start {
        Some(k) if k.dim() == d => reduced.restrict(k),
        _ => reduced.restrict(&Hermitian::identity(d).scale(1.0 / d as f64)),
    };
    let mut u = RVector::zeros(r_dim * r_dim);
    let mut rho = opts.penalty;
    let alpha = opts.over_relaxation;
    let target = opts.tol * TARGET_MARGIN;
    let stall_level = opts.tol.sqrt();

    let mut best = (f64::INFINITY, z.clone(), 0.0);
    let mut checkpoint = f64::INFINITY;
    let mut stalled = 0usize;
    let mut status = Status::MaxIters;
    let mut iterations = opts.max_iters;
    let mut dual = f64::INFINITY;
    if r_dim == 0 {
        status = Status::Infeasible;
        iterations = 0;
    }
    let budget = if r_dim == 0 { 0 } else { opts.max_iters };

    for it in 1..=budget {
        let x = projector.project(&(&z - &u - &direction / rho));
        let relaxed = &x * alpha + &z * (1.0 - alpha);
        let z_next = project_psd(&(&relaxed + &u));
        u += &relaxed - &z_next;

        let r = (&x - &z_next).norm();
        let s = rho * (&z_next - &z).norm();
        z = z_next;
        dual = s;
        let affine = projector.residual_norm(&z);

        if affine < best.0 || (affine <= target && s <= best.2) {
            best = (affine, z.clone(), s);
        }
        if affine <= target && r <= target && s <= target {
            status = Status::Converged;
            iterations = it;
            best = (affine, z.clone(), s);
            break;
        }

        if affine > stall_level {
            if affine < STALL_PROGRESS * checkpoint {
                checkpoint = affine;
                stalled = 0;
            } else {
                stalled += 1;
                if stalled >= STALL_WINDOW {
                    status = Status::Infeasible;
                    iterations = it;
                    break;
                }
            }
        } else {
            checkpoint = affine;
            stalled = 0;
        }

        if it % REBALANCE_EVERY == 0 {
            if r > REBALANCE_RATIO * s && rho < PENALTY_MAX {
                rho *= 2.0;
                u /= 2.0;
            } else if s > REBALANCE_RATIO * r && rho > PENALTY_MIN {
                rho /= 2.0;
                u *= 2.0;
            }
        }
    }

    let (primal_residual, z_best, s_best) = best;
    let kappa = reduced.lift(&z_best);
    let check = verify_kappa(p, &kappa);
    Solution {
        kappa_star: ChoiState::new_unchecked(p.dims, kappa),
        cost_value: check.cost,
        primal_residual,
        dual_residual: if status == Status::Converged { s_best } else { dual },
        constraint_residuals: check.constraint_residuals,
        iterations,
        status,
    }
}

/// Projection onto the PSD cone in vectorized coordinates.
pub(crate) fn project_psd(v: &RVector) -> RVector {
    let x = devectorize_matrix(v);
    let eig = SymmetricEigen::new(x);
    let d = eig.eigenvalues.len();
    let mut out = crate::linalg::CMatrix::zeros(d, d);
    for i in 0..d {
        let lambda = eig.eigenvalues[i];
        if lambda > 0.0 {
            let col = eig.eigenvectors.column(i);
            out += (col * col.adjoint()).scale(lambda);
        }
    }
    vectorize_matrix(&out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pauli;
    use crate::sdp::vectorize::vectorize_hermitian;

    #[test]
    fn psd_projection_matches_matrix_version() {
        let x = Hermitian::new(pauli::z().scale(2.0) + pauli::y()).unwrap();
        let via_vec = project_psd(&vectorize_hermitian(&x));
        let direct = vectorize_hermitian(&crate::linalg::psd_project(&x));
        assert!((via_vec - direct).norm() < 1e-14);
    }
}
