//! The optimal-channel problem as a small dense semidefinite program:
//!
//! ```text
//! minimize    Tr(C κ)
//! subject to  κ ⪰ 0,
//!             Tr_B κ = I_m / m,
//!             m·Tr_A[(ρ_jᵀ ⊗ I) κ] = σ_j   for every constraint pair (ρ_j, σ_j).
//! ```

mod admm;
mod affine;
mod face;
mod sample;
mod vectorize;
mod verify;

use std::fmt;

use crate::choi::ChoiState;
use crate::cost::CostMatrix;
use crate::error::{Error, Result};
use crate::linalg::{DensityMatrix, Dims};

pub use admm::{solve, solve_warm};
pub use affine::{build_affine_system, AffineSystem};
pub use sample::{feasible_sample, feasible_sample_with_budget};
pub use vectorize::{devectorize_hermitian, side_length, vectorize_hermitian};
pub use verify::{verify_kappa, verify_solution, Verification};

/// A prescribed input/output pair `E(input) = output`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintPair {
    pub input: DensityMatrix,
    pub output: DensityMatrix,
}

impl ConstraintPair {
    pub fn new(input: DensityMatrix, output: DensityMatrix) -> Self {
        Self { input, output }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Threshold on the affine, primal and dual residuals.
    pub tol: f64,
    pub max_iters: usize,
    /// Over-relaxation factor in `[1, 2)`.
    pub over_relaxation: f64,
    /// Initial ADMM penalty; rebalanced during the run.
    pub penalty: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iters: 50_000,
            over_relaxation: 1.6,
            penalty: 1.0,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if !self.tol.is_finite() || self.tol <= 0.0 {
            return Err(Error::InvalidParameter(format!("tol must be > 0, got {}", self.tol)));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter("max_iters must be >= 1".into()));
        }
        if !(1.0..2.0).contains(&self.over_relaxation) {
            return Err(Error::InvalidParameter(format!(
                "over_relaxation must lie in [1, 2), got {}",
                self.over_relaxation
            )));
        }
        if !self.penalty.is_finite() || self.penalty <= 0.0 {
            return Err(Error::InvalidParameter(format!("penalty must be > 0, got {}", self.penalty)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct TransportProblem {
    pub dims: Dims,
    pub cost: CostMatrix,
    pub constraints: Vec<ConstraintPair>,
    pub options: SolverOptions,
}

impl TransportProblem {
    pub fn new(cost: CostMatrix, constraints: Vec<ConstraintPair>, options: SolverOptions) -> Result<Self> {
        let dims = cost.dims;
        options.validate()?;
        for (j, pair) in constraints.iter().enumerate() {
            if pair.input.dim() != dims.m {
                return Err(Error::DimensionMismatch(format!(
                    "constraint {j}: input is {}x{0}, expected {}x{1}",
                    pair.input.dim(),
                    dims.m
                )));
            }
            if pair.output.dim() != dims.n {
                return Err(Error::DimensionMismatch(format!(
                    "constraint {j}: output is {}x{0}, expected {}x{1}",
                    pair.output.dim(),
                    dims.n
                )));
            }
        }
        Ok(Self {
            dims,
            cost,
            constraints,
            options,
        })
    }

    /// A problem with only the channel condition.
    pub fn unconstrained(cost: CostMatrix) -> Self {
        Self {
            dims: cost.dims,
            cost,
            constraints: Vec::new(),
            options: SolverOptions::default(),
        }
    }

    pub fn with_constraint(mut self, input: DensityMatrix, output: DensityMatrix) -> Result<Self> {
        self.constraints.push(ConstraintPair::new(input, output));
        Self::new(self.cost, self.constraints, self.options)
    }

    pub fn with_options(mut self, options: SolverOptions) -> Result<Self> {
        options.validate()?;
        self.options = options;
        Ok(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Converged,
    MaxIters,
    Infeasible,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Converged => "Converged",
            Status::MaxIters => "MaxIters",
            Status::Infeasible => "Infeasible",
        })
    }
}

/// Result of [`solve`]. `kappa_star` satisfies the Choi-state invariants
/// only when `status` is [`Status::Converged`]; otherwise it is the best
/// iterate found.
#[derive(Debug, Clone)]
pub struct Solution {
    pub kappa_star: ChoiState,
    pub cost_value: f64,
    /// `‖A(κ*) − b‖` over all affine rows, reduction condition included.
    pub primal_residual: f64,
    pub dual_residual: f64,
    /// `‖E*(ρ_j) − σ_j‖_F` per constraint pair.
    pub constraint_residuals: Vec<f64>,
    pub iterations: usize,
    pub status: Status,
}

impl Solution {
    pub fn is_converged(&self) -> bool {
        self.status == Status::Converged
    }
}
