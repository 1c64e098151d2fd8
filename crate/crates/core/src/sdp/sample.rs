//! Feasible points by alternating projections, with no optimality claim.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::choi::ChoiState;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, Hermitian};

use super::admm::project_psd;
use super::face::ReducedProblem;
use super::TransportProblem;

const STALL_WINDOW: usize = 1000;
const STALL_PROGRESS: f64 = 0.99;

/// Alternates affine and PSD projections from a seeded random density
/// matrix until the PSD iterate satisfies the affine rows within
/// `p.options.tol`, using `p.options.max_iters` as the budget.
pub fn feasible_sample(p: &TransportProblem, seed: u64) -> Result<ChoiState> {
    feasible_sample_with_budget(p, seed, p.options.tol, p.options.max_iters)
}

pub fn feasible_sample_with_budget(
    p: &TransportProblem,
    seed: u64,
    tol: f64,
    max_iters: usize,
) -> Result<ChoiState> {
    let reduced = ReducedProblem::new(p);
    let projector = &reduced.projector;
    if reduced.rank() == 0 {
        return Err(Error::Infeasible {
            residual: projector.residual_norm(&reduced.restrict(&Hermitian::zeros(p.dims.total()))),
        });
    }
    let mut z = reduced.restrict(&Hermitian::symmetrized(random_density(p.dims.total(), seed)));
    let stall_level = tol.sqrt();
    let mut checkpoint = f64::INFINITY;
    let mut stalled = 0usize;
    let mut affine = projector.residual_norm(&z);

    for _ in 0..max_iters {
        if affine < tol {
            return Ok(ChoiState::new_unchecked(p.dims, reduced.lift(&z)));
        }
        z = project_psd(&projector.project(&z));
        affine = projector.residual_norm(&z);

        if affine > stall_level {
            if affine < STALL_PROGRESS * checkpoint {
                checkpoint = affine;
                stalled = 0;
            } else {
                stalled += 1;
                if stalled >= STALL_WINDOW {
                    return Err(Error::Infeasible { residual: affine });
                }
            }
        } else {
            checkpoint = affine;
            stalled = 0;
        }
    }
    if affine < tol {
        return Ok(ChoiState::new_unchecked(p.dims, reduced.lift(&z)));
    }
    Err(Error::IterationLimit {
        iterations: max_iters,
        residual: affine,
    })
}

/// `GG†/Tr(GG†)` for a complex Gaussian `G`.
fn random_density(d: usize, seed: u64) -> CMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = CMatrix::from_fn(d, d, |_, _| {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        Complex64::new(re, im)
    });
    let rho = &g * g.adjoint();
    let tr = rho.trace().re;
    rho / Complex64::new(tr, 0.0)
}
