use crate::choi::{apply_dual_map, reduction_residual};
use crate::linalg::Hermitian;

use super::{Solution, TransportProblem};

/// Independent re-evaluation of a candidate Choi matrix against a problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Verification {
    /// `Tr(C κ)`.
    pub cost: f64,
    /// `‖Tr_B κ − I/m‖_F`.
    pub reduction_residual: f64,
    /// `‖E(ρ_j) − σ_j‖_F` per constraint pair.
    pub constraint_residuals: Vec<f64>,
    /// Most negative eigenvalue of `κ` (positive when `κ ≻ 0`).
    pub min_eigenvalue: f64,
}

impl Verification {
    pub fn max_constraint_residual(&self) -> f64 {
        self.constraint_residuals.iter().cloned().fold(0.0, f64::max)
    }

    /// Largest of the reduction residual, the constraint residuals and the
    /// PSD violation.
    pub fn worst_violation(&self) -> f64 {
        self.reduction_residual
            .max(self.max_constraint_residual())
            .max((-self.min_eigenvalue).max(0.0))
    }
}

pub fn verify_kappa(p: &TransportProblem, kappa: &Hermitian) -> Verification {
    let cost = p.cost.cost_of(kappa);
    let reduction_residual = reduction_residual(kappa, p.dims).expect("kappa matches problem dims");
    let constraint_residuals = p
        .constraints
        .iter()
        .map(|pair| {
            let out = apply_dual_map(p.dims, kappa.matrix(), pair.input.matrix())
                .expect("constraint matches problem dims");
            (out - pair.output.matrix()).norm()
        })
        .collect();
    Verification {
        cost,
        reduction_residual,
        constraint_residuals,
        min_eigenvalue: kappa.min_eigenvalue(),
    }
}

pub fn verify_solution(p: &TransportProblem, s: &Solution) -> Verification {
    verify_kappa(p, s.kappa_star.kappa())
}
