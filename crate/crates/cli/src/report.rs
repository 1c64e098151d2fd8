use serde::{Deserialize, Serialize};

use qchan_core::diagnostics::{Report, TransitionReport};
use qchan_core::sdp::Solution;

use crate::schema::{matrix_to_json, ComplexMatrix, SCHEMA_VERSION};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionRow {
    pub probability: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost: Option<f64>,
    pub entanglement_entropy: f64,
    pub schmidt_coeffs: Vec<f64>,
    pub support_dim: usize,
    pub is_channel: bool,
}

impl From<&TransitionReport> for TransitionRow {
    fn from(t: &TransitionReport) -> Self {
        Self {
            probability: t.probability,
            cost: t.cost,
            entanglement_entropy: t.entanglement_entropy,
            schmidt_coeffs: t.schmidt_coeffs.clone(),
            support_dim: t.support_dim,
            is_channel: t.is_channel,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverMeta {
    pub iterations: usize,
    pub tol: f64,
    pub max_iters: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub schema_version: String,
    pub status: String,
    pub optimal_cost: f64,
    pub dims: [usize; 2],
    pub kappa_star: ComplexMatrix,
    pub constraint_residuals: Vec<f64>,
    pub transitions: Vec<TransitionRow>,
    #[serde(default)]
    pub degenerate_groups: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weighted_entropy: Option<f64>,
    pub solver_meta: SolverMeta,
}

impl ReportFile {
    pub fn new(s: &Solution, report: Option<&Report>, tol: f64, max_iters: usize, wall_time_s: f64) -> Self {
        let dims = s.kappa_star.dims();
        Self {
            schema_version: SCHEMA_VERSION.into(),
            status: s.status.to_string(),
            optimal_cost: s.cost_value,
            dims: [dims.m, dims.n],
            kappa_star: matrix_to_json(s.kappa_star.kappa().matrix()),
            constraint_residuals: s.constraint_residuals.clone(),
            transitions: report
                .map(|r| r.transitions.iter().map(TransitionRow::from).collect())
                .unwrap_or_default(),
            degenerate_groups: report.map(|r| r.degenerate_groups.clone()).unwrap_or_default(),
            weighted_entropy: report.map(|r| r.weighted_entropy),
            solver_meta: SolverMeta {
                iterations: s.iterations,
                tol,
                max_iters,
                primal_residual: s.primal_residual,
                dual_residual: s.dual_residual,
                wall_time_s,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use qchan_core::diagnostics::full_report;
    use qchan_core::fixtures::time_problem;
    use qchan_core::sdp::solve;

    #[test]
    fn roundtrip_is_lossless() {
        let p = time_problem(2.0, true).unwrap();
        let s = solve(&p);
        let r = full_report(&s, &p.cost).unwrap();
        let file = ReportFile::new(&s, Some(&r), p.options.tol, p.options.max_iters, 0.0123);
        let text = serde_json::to_string_pretty(&file).unwrap();
        let back: ReportFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back, file);
    }
}
