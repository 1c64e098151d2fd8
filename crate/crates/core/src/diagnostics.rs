//! Entanglement and cost reporting for elementary transitions.

use crate::choi::{
    decompose_elementary, degenerate_groups, is_channel, transition_support, ChoiState,
    Decomposition, ElementaryTransition,
};
use crate::cost::CostMatrix;
use crate::error::{Error, Result};
use crate::linalg::{
    check_unit, eig_hermitian, partial_trace, CMatrix, CVector, Dims, Hermitian, Subsystem,
};
use crate::sdp::Solution;

/// Tolerance of the `Σ p_α cost_α = Tr(Cκ)` check in a [`Report`].
pub const AGGREGATION_TOL: f64 = 1e-8;

/// Squared Schmidt coefficients of `v`, i.e. the eigenvalues of
/// `Tr_B |v⟩⟨v|`, in descending order.
pub fn schmidt(v: &CVector, dims: Dims) -> Result<Vec<f64>> {
    if v.len() != dims.total() {
        return Err(Error::DimensionMismatch(format!(
            "vector has length {}, expected {}",
            v.len(),
            dims.total()
        )));
    }
    check_unit(v)?;
    let reduced = partial_trace(&Hermitian::projector(v), dims, Subsystem::B)?;
    let mut coeffs: Vec<f64> = reduced.eigenvalues().into_iter().map(|x| x.max(0.0)).collect();
    coeffs.reverse();
    Ok(coeffs)
}

/// `−Σ λ log₂ λ` over a probability vector, with `0 log 0 = 0`.
pub fn shannon_bits(probabilities: &[f64]) -> f64 {
    let h: f64 = probabilities
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum();
    h.max(0.0)
}

/// Entanglement entropy of a unit vector, in bits.
pub fn entanglement_entropy(v: &CVector, dims: Dims) -> Result<f64> {
    Ok(shannon_bits(&schmidt(v, dims)?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionReport {
    pub probability: f64,
    /// `Tr(C κ_α)`, when a cost is known.
    pub cost: Option<f64>,
    pub entanglement_entropy: f64,
    pub schmidt_coeffs: Vec<f64>,
    pub support_dim: usize,
    pub is_channel: bool,
}

impl TransitionReport {
    pub fn new(t: &ElementaryTransition, cost: Option<&CostMatrix>) -> Self {
        let schmidt_coeffs = schmidt(&t.vector, t.dims).expect("transition vectors are unit");
        Self {
            probability: t.probability,
            cost: cost.map(|c| c.cost_of_vector(&t.vector)),
            entanglement_entropy: shannon_bits(&schmidt_coeffs),
            schmidt_coeffs,
            support_dim: transition_support(t).dim,
            is_channel: is_channel(t),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub transitions: Vec<TransitionReport>,
    /// Index groups of transitions with equal probability.
    pub degenerate_groups: Vec<Vec<usize>>,
    /// `Tr(C κ)`, when a cost is known.
    pub total_cost: Option<f64>,
    /// `Σ p_α cost_α`.
    pub aggregated_cost: Option<f64>,
    /// `Σ p_α S_α`.
    pub weighted_entropy: f64,
}

impl Report {
    /// Whether the per-transition costs add up to the total.
    pub fn aggregation_holds(&self) -> bool {
        match (self.total_cost, self.aggregated_cost) {
            (Some(total), Some(sum)) => (total - sum).abs() <= AGGREGATION_TOL * total.abs().max(1.0),
            _ => true,
        }
    }
}

/// Decomposition in which each degenerate eigenspace of `κ` is split along
/// the eigenvectors of `C` restricted to it.
///
/// Inside such a group every orthonormal basis is an equally valid set of
/// elementary transitions. Fixing it by the cost makes the transitions
/// reproducible and keeps `Σ p_α Tr(Cκ_α) = Tr(Cκ)` exact. Probabilities are
/// `⟨v_α|κ|v_α⟩`.
pub fn cost_resolved_decomposition(cs: &ChoiState, c: &CostMatrix) -> Result<Decomposition> {
    if c.dims != cs.dims() {
        return Err(Error::DimensionMismatch(format!(
            "cost is {}x{}, Choi state is {}x{}",
            c.dims.m,
            c.dims.n,
            cs.dims().m,
            cs.dims().n
        )));
    }
    let mut dec = decompose_elementary(cs);
    for group in dec.degenerate_groups.clone() {
        let d = cs.dims().total();
        let mut basis = CMatrix::zeros(d, group.len());
        for (col, &i) in group.iter().enumerate() {
            basis.set_column(col, &dec.transitions[i].vector);
        }
        let restricted = Hermitian::symmetrized(basis.adjoint() * c.matrix() * &basis);
        let eig = eig_hermitian(&restricted);
        for (k, &i) in group.iter().enumerate() {
            let mut v = &basis * eig.vector(k);
            v /= nalgebra::ComplexField::from_real(v.norm());
            dec.transitions[i].probability = cs.kappa().expectation(&v);
            dec.transitions[i].vector = v;
        }
    }
    dec.transitions.sort_by(|a, b| b.probability.total_cmp(&a.probability));
    dec.degenerate_groups =
        degenerate_groups(&dec.transitions.iter().map(|t| t.probability).collect::<Vec<_>>());
    Ok(dec)
}

/// Per-transition report of a Choi state. With a cost, degenerate groups
/// are resolved by [`cost_resolved_decomposition`].
pub fn report_choi(cs: &ChoiState, cost: Option<&CostMatrix>) -> Result<Report> {
    let dec = match cost {
        Some(c) => cost_resolved_decomposition(cs, c)?,
        None => decompose_elementary(cs),
    };
    let transitions: Vec<TransitionReport> =
        dec.transitions.iter().map(|t| TransitionReport::new(t, cost)).collect();
    let aggregated_cost = cost.map(|_| {
        transitions
            .iter()
            .map(|r| r.probability * r.cost.unwrap_or(0.0))
            .sum()
    });
    let weighted_entropy = transitions
        .iter()
        .map(|r| r.probability * r.entanglement_entropy)
        .sum();
    Ok(Report {
        transitions,
        degenerate_groups: dec.degenerate_groups,
        total_cost: cost.map(|c| c.cost_of(cs.kappa())),
        aggregated_cost,
        weighted_entropy,
    })
}

/// Report on a converged solution.
pub fn full_report(s: &Solution, c: &CostMatrix) -> Result<Report> {
    if !s.is_converged() {
        return Err(Error::NotConverged(format!(
            "solver stopped with status {} after {} iterations",
            s.status, s.iterations
        )));
    }
    report_choi(&s.kappa_star, Some(c))
}
