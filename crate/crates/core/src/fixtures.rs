//! Worked two-level examples and their closed-form optima.
//!
//! Energy: `C = I ⊗ H − H ⊗ I + J σ₁ ⊗ σ₁`, optionally requiring the channel
//! to send the ground state `|1⟩⟨1|` of `H = diag(ε/2, −ε/2)` to `|0⟩⟨0|`.
//!
//! Time: costs `(0, k, 2, k+2)` on the unitary channels `I, σ₁, σ₃, σ₃σ₁`,
//! optionally requiring `|0⟩⟨0| ↦ |1⟩⟨1|`.
//!
//! Minimal disturbance: quadratic generator costs, whose unconstrained
//! optimum is the identity channel.

use num_complex::Complex64;

use crate::choi::{channel_to_choi, omega, unitary_choi_vector, ChoiState, KrausChannel};
use crate::cost::{
    cost_quadratic_generators, energy_example_cost, schwinger_generator_set, spin_generator_set,
    time_example_cost, time_example_unitaries,
};
use crate::error::{Error, Result};
use crate::linalg::{pauli, real_matrix, CVector, DensityMatrix, Dims, Hermitian};
use crate::sdp::TransportProblem;

pub fn energy_problem(eps: f64, j: f64, spin_flip: bool) -> Result<TransportProblem> {
    let p = TransportProblem::unconstrained(energy_example_cost(eps, j)?);
    if spin_flip {
        p.with_constraint(DensityMatrix::basis_state(2, 1), DensityMatrix::basis_state(2, 0))
    } else {
        Ok(p)
    }
}

pub fn time_problem(k: f64, flip: bool) -> Result<TransportProblem> {
    let p = TransportProblem::unconstrained(time_example_cost(k)?);
    if flip {
        p.with_constraint(DensityMatrix::basis_state(2, 0), DensityMatrix::basis_state(2, 1))
    } else {
        Ok(p)
    }
}

pub fn spin_disturbance_problem(r: usize) -> Result<TransportProblem> {
    Ok(TransportProblem::unconstrained(cost_quadratic_generators(&spin_generator_set(r)?)))
}

pub fn schwinger_disturbance_problem(m: usize) -> Result<TransportProblem> {
    Ok(TransportProblem::unconstrained(cost_quadratic_generators(&schwinger_generator_set(m)?)))
}

/// Optimal cost of the spin-flip constrained energy problem.
pub fn energy_constrained_cost(j: f64) -> f64 {
    j
}

/// Optimal cost of the unconstrained energy problem, `−√(J² + ε²/4)`.
pub fn energy_unconstrained_cost(eps: f64, j: f64) -> f64 {
    -(j * j + eps * eps / 4.0).sqrt()
}

/// The two negative eigenvalues of the energy cost, `(−√(J² + ε²), J)`.
pub fn energy_negative_eigenvalues(eps: f64, j: f64) -> (f64, f64) {
    (-(j * j + eps * eps).sqrt(), j)
}

/// `ψ₁ = (|00⟩ + |11⟩)/√2`, the eigenvector for `J`.
pub fn energy_psi1() -> CVector {
    omega(2)
}

/// `ψ₀ ∝ L|01⟩ − J|10⟩` with `L = √(J² + ε²) + ε`.
pub fn energy_psi0(eps: f64, j: f64) -> CVector {
    let l = (j * j + eps * eps).sqrt() + eps;
    let norm = (l * l + j * j).sqrt();
    crate::linalg::real_vector(&[0.0, l / norm, -j / norm, 0.0])
}

/// Choi state of the optimal spin-flip channel `ρ ↦ σ₁ρσ₁`.
pub fn spin_flip_choi() -> ChoiState {
    channel_to_choi(&KrausChannel::unitary(pauli::x()).expect("σ₁ is unitary"))
}

/// A member of the optimal family in the `J → −∞` limit, for `−1 ≤ γ ≤ 1`:
/// `((1+γ)/2)|φ₁⟩⟨φ₁| + ((1−γ)/2)|φ₂⟩⟨φ₂|` with
/// `φ₁ = (ψ₁ + iψ₀')/√2`, `φ₂ = (iψ₁ + ψ₀')/√2`, `ψ₀' = (|01⟩ + |10⟩)/√2`.
pub fn energy_limit_family_choi(gamma: f64) -> Result<ChoiState> {
    if !(-1.0..=1.0).contains(&gamma) {
        return Err(Error::InvalidParameter(format!("gamma must lie in [-1, 1], got {gamma}")));
    }
    let (phi1, phi2) = energy_limit_family_vectors();
    let kappa = Hermitian::projector(&phi1).scale((1.0 + gamma) / 2.0)
        + Hermitian::projector(&phi2).scale((1.0 - gamma) / 2.0);
    ChoiState::new(Dims::square(2), kappa)
}

pub fn energy_limit_family_vectors() -> (CVector, CVector) {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let i = Complex64::new(0.0, 1.0);
    let psi1 = omega(2);
    let psi0p = unitary_choi_vector(&pauli::x());
    let phi1 = (&psi1 + &psi0p * i) * Complex64::new(s, 0.0);
    let phi2 = (&psi1 * i + &psi0p) * Complex64::new(s, 0.0);
    (phi1, phi2)
}

/// Optimal cost of the flip-constrained time problem: `k` for `k ≤ 1`,
/// `1 + k/2 − 1/(2k)` for `k ≥ 1`.
pub fn time_constrained_cost(k: f64) -> f64 {
    if k <= 1.0 {
        k
    } else {
        1.0 + k / 2.0 - 1.0 / (2.0 * k)
    }
}

/// The optimal channel for `k ≥ 1`:
/// `[[ρ₁₁/k², ρ₁₀/k], [ρ₀₁/k, ρ₀₀ + (1 − 1/k²)ρ₁₁]]`.
pub fn time_optimal_channel(k: f64) -> Result<KrausChannel> {
    if k < 1.0 {
        return Err(Error::InvalidParameter(format!("the mixed optimum needs k >= 1, got {k}")));
    }
    let v1 = real_matrix(2, 2, &[0.0, 1.0 / k, 1.0, 0.0]);
    let v2 = real_matrix(2, 2, &[0.0, 0.0, 0.0, (1.0 - 1.0 / (k * k)).sqrt()]);
    KrausChannel::new(Dims::square(2), vec![v1, v2])
}

/// Expected Choi state of the flip-constrained time optimum.
pub fn time_constrained_choi(k: f64) -> Result<ChoiState> {
    if k <= 1.0 {
        Ok(channel_to_choi(&KrausChannel::unitary(time_example_unitaries()[1].clone())?))
    } else {
        Ok(channel_to_choi(&time_optimal_channel(k)?))
    }
}

/// Weights `((1 − 1/k²)/2, (1 + 1/k²)/2)` of the separable and entangled
/// transitions of the `k ≥ 1` optimum.
pub fn time_decomposition_weights(k: f64) -> (f64, f64) {
    let q = 1.0 / (k * k);
    ((1.0 - q) / 2.0, (1.0 + q) / 2.0)
}

/// Costs of the separable transition (`|1⟩|1⟩`) and of the entangled one
/// (`∝ |0⟩|1⟩ + (1/k)|1⟩|0⟩`).
pub fn time_transition_costs(k: f64) -> (f64, f64) {
    let q = 1.0 / (k * k);
    (1.0, (k + 1.0 - 1.0 / k + q) / (1.0 + q))
}

/// Choi state of the identity channel on dimension `m`.
pub fn identity_choi(m: usize) -> ChoiState {
    channel_to_choi(&KrausChannel::identity(m))
}
