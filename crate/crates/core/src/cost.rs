//! Cost matrices on `H_A ⊗ H_B`.
//!
//! Three recipes are provided: weighted mixtures of pure states, differences
//! of observables `I ⊗ O_B − O_Aᵀ ⊗ I`, and quadratic generator costs
//! `Σ_j |I ⊗ g_j − g_jᵀ ⊗ I|²`. The transpose is taken in the same fixed
//! basis used by the channel–state duality.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::choi::unitary_choi_vector;
use crate::error::{Error, Result};
use crate::linalg::{
    check_unit, eig_hermitian, kron, pauli, real_matrix, CMatrix, CVector, Dims, Hermitian,
};

/// Gram eigenvalues above this count towards the span of a mixture.
pub const SPAN_RANK_TOL: f64 = 1e-10;
/// Relative residual below which a product is considered already spanned.
const GENERATION_TOL: f64 = 1e-8;

/// Which recipe produced a cost matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    PureMixture,
    ObservableDifference,
    QuadraticGenerators,
    EnergyExample { eps: f64, j: f64 },
    TimeExample { k: f64 },
    Raw,
    WeightedSum,
}

/// A Hermitian observable `C` on `H_A ⊗ H_B`; the cost of a channel is `Tr(Cκ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    pub dims: Dims,
    pub op: Hermitian,
    pub provenance: Provenance,
}

impl CostMatrix {
    pub fn new(dims: Dims, op: Hermitian, provenance: Provenance) -> Result<Self> {
        if op.dim() != dims.total() {
            return Err(Error::DimensionMismatch(format!(
                "cost matrix has dimension {}, expected {}",
                op.dim(),
                dims.total()
            )));
        }
        Ok(Self { dims, op, provenance })
    }

    pub fn raw(dims: Dims, op: Hermitian) -> Result<Self> {
        Self::new(dims, op, Provenance::Raw)
    }

    pub fn matrix(&self) -> &CMatrix {
        self.op.matrix()
    }

    /// `Tr(C κ)`.
    pub fn cost_of(&self, kappa: &Hermitian) -> f64 {
        crate::linalg::frobenius_inner(&self.op, kappa).expect("kappa must match cost dims")
    }

    /// `⟨v|C|v⟩` for a unit vector `v`.
    pub fn cost_of_vector(&self, v: &CVector) -> f64 {
        self.op.expectation(v)
    }

    /// `αC + βI`.
    pub fn affine_transform(&self, alpha: f64, beta: f64) -> Self {
        let op = self.op.scale(alpha) + Hermitian::identity(self.dims.total()).scale(beta);
        Self {
            dims: self.dims,
            op,
            provenance: self.provenance.clone(),
        }
    }
}

/// Emitted when the states of a mixture fail to span `H_A ⊗ H_B`, which
/// silently gives zero cost to every orthogonal transition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpanDeficit {
    pub rank: usize,
    pub required: usize,
}

/// `C = Σ_α k_α |v_α⟩⟨v_α|`. The vectors need not be orthogonal.
pub fn cost_from_pure_mixture(
    dims: Dims,
    terms: &[(f64, CVector)],
) -> Result<(CostMatrix, Option<SpanDeficit>)> {
    let d = dims.total();
    let mut c = CMatrix::zeros(d, d);
    for (idx, (k, v)) in terms.iter().enumerate() {
        if v.len() != d {
            return Err(Error::DimensionMismatch(format!(
                "mixture term {idx} has length {}, expected {d}",
                v.len()
            )));
        }
        check_unit(v)?;
        c += (v * v.adjoint()).scale(*k);
    }

    let gram = Hermitian::symmetrized(CMatrix::from_fn(terms.len(), terms.len(), |a, b| {
        terms[a].1.dotc(&terms[b].1)
    }));
    let rank = eig_hermitian(&gram).values.iter().filter(|&&l| l > SPAN_RANK_TOL).count();
    let deficit = (rank < d).then_some(SpanDeficit { rank, required: d });

    let cost = CostMatrix::new(dims, Hermitian::symmetrized(c), Provenance::PureMixture)?;
    Ok((cost, deficit))
}

/// `I_m ⊗ O_B − O_Aᵀ ⊗ I_n`.
pub fn cost_observable_difference(o_a: &Hermitian, o_b: &Hermitian) -> CostMatrix {
    let dims = Dims::new(o_a.dim(), o_b.dim());
    let c = kron(&CMatrix::identity(dims.m, dims.m), o_b.matrix())
        - kron(&o_a.matrix().transpose(), &CMatrix::identity(dims.n, dims.n));
    CostMatrix {
        dims,
        op: Hermitian::symmetrized(c),
        provenance: Provenance::ObservableDifference,
    }
}

/// Self-adjoint `m×m` matrices generating the full algebra `M_m`.
#[derive(Debug, Clone)]
pub struct GeneratorSet {
    m: usize,
    generators: Vec<Hermitian>,
}

impl GeneratorSet {
    /// Validates shapes and checks that the set generates `M_m`.
    pub fn new(generators: Vec<Hermitian>) -> Result<Self> {
        let set = Self::without_generation_check(generators)?;
        let span = generated_dimension(&set.generators);
        let required = set.m * set.m;
        if span < required {
            return Err(Error::NotGenerating { span, required });
        }
        Ok(set)
    }

    /// Validates shapes only.
    pub fn without_generation_check(generators: Vec<Hermitian>) -> Result<Self> {
        let m = generators
            .first()
            .map(Hermitian::dim)
            .ok_or_else(|| Error::InvalidParameter("generator set is empty".into()))?;
        if m == 0 {
            return Err(Error::InvalidParameter("generators must have positive dimension".into()));
        }
        if let Some(bad) = generators.iter().position(|g| g.dim() != m) {
            return Err(Error::DimensionMismatch(format!(
                "generator {bad} has dimension {}, expected {m}",
                generators[bad].dim()
            )));
        }
        Ok(Self { m, generators })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn generators(&self) -> &[Hermitian] {
        &self.generators
    }
}

/// Dimension of the span of all products of the generators (including the
/// empty product `I`) up to length `2⌈log₂ m⌉ + 2`.
pub fn generated_dimension(generators: &[Hermitian]) -> usize {
    let Some(m) = generators.first().map(Hermitian::dim) else {
        return 0;
    };
    let target = m * m;
    let max_len = 2 * (m as f64).log2().ceil() as usize + 2;

    let mut basis: Vec<CMatrix> = Vec::new();
    let mut frontier = vec![CMatrix::identity(m, m)];
    add_if_independent(&mut basis, CMatrix::identity(m, m));

    for _ in 0..max_len {
        let mut next = Vec::new();
        for f in &frontier {
            for g in generators {
                let product = f * g.matrix();
                if let Some(new_dir) = add_if_independent(&mut basis, product) {
                    next.push(new_dir);
                    if basis.len() == target {
                        return target;
                    }
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    basis.len()
}

/// Orthogonalizes `x` against `basis` (two passes); pushes and returns the
/// normalized remainder when it is not already spanned.
fn add_if_independent(basis: &mut Vec<CMatrix>, x: CMatrix) -> Option<CMatrix> {
    let norm0 = x.norm();
    if norm0 == 0.0 {
        return None;
    }
    let mut r = x;
    for _ in 0..2 {
        for b in basis.iter() {
            let coeff = b.dotc(&r);
            r -= b * coeff;
        }
    }
    let norm = r.norm();
    if norm <= GENERATION_TOL * norm0 {
        return None;
    }
    r /= Complex64::new(norm, 0.0);
    basis.push(r.clone());
    Some(r)
}

/// `C = Σ_j D_j† D_j` with `D_j = I ⊗ g_j − g_jᵀ ⊗ I`.
pub fn cost_quadratic_generators(gs: &GeneratorSet) -> CostMatrix {
    let m = gs.m;
    let id = CMatrix::identity(m, m);
    let mut c = CMatrix::zeros(m * m, m * m);
    for g in &gs.generators {
        let d = kron(&id, g.matrix()) - kron(&g.matrix().transpose(), &id);
        c += d.adjoint() * &d;
    }
    CostMatrix {
        dims: Dims::square(m),
        op: Hermitian::symmetrized(c),
        provenance: Provenance::QuadraticGenerators,
    }
}

/// Single-spin Pauli observables on `r` spins, `m = 2^r`: the operator
/// `σ_j` acting on spin `i`, ordered by `(i, j)` lexicographically.
pub fn spin_generator_set(r: usize) -> Result<GeneratorSet> {
    if r == 0 {
        return Err(Error::InvalidParameter("spin count r must be at least 1".into()));
    }
    let id2 = CMatrix::identity(2, 2);
    let mut generators = Vec::with_capacity(3 * r);
    for i in 0..r {
        for j in 1..=3 {
            let mut op = CMatrix::identity(1, 1);
            for pos in 0..r {
                let factor = if pos == i { pauli::sigma(j) } else { id2.clone() };
                op = kron(&op, &factor);
            }
            generators.push(Hermitian::new(op)?);
        }
    }
    GeneratorSet::without_generation_check(generators)
}

/// The discrete Fourier transform `F_jk = e^{−2πi jk/m} / √m`.
pub fn qft_matrix(m: usize) -> CMatrix {
    let scale = 1.0 / (m as f64).sqrt();
    CMatrix::from_fn(m, m, |j, k| {
        let phase = -2.0 * PI * ((j * k) % m) as f64 / m as f64;
        Complex64::from_polar(scale, phase)
    })
}

/// Discrete position `h₁ = diag(0, …, m−1)` and momentum `h₂ = F† h₁ F`.
pub fn schwinger_pair(m: usize) -> Result<(Hermitian, Hermitian)> {
    if m < 2 {
        return Err(Error::InvalidParameter(format!("Schwinger pair needs m >= 2, got {m}")));
    }
    let diag: Vec<f64> = (0..m).map(|i| i as f64).collect();
    let h1 = Hermitian::from_real_diagonal(&diag);
    let f = qft_matrix(m);
    let h2 = Hermitian::symmetrized(f.adjoint() * h1.matrix() * &f);
    Ok((h1, h2))
}

pub fn schwinger_generator_set(m: usize) -> Result<GeneratorSet> {
    let (h1, h2) = schwinger_pair(m)?;
    GeneratorSet::without_generation_check(vec![h1, h2])
}

/// `C = I ⊗ H − Hᵀ ⊗ I + J σ₁ ⊗ σ₁` with `H = diag(ε/2, −ε/2)`.
/// `H` is real diagonal, so `Hᵀ = H`.
pub fn energy_example_cost(eps: f64, j: f64) -> Result<CostMatrix> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::InvalidParameter(format!("energy splitting eps must be > 0, got {eps}")));
    }
    if j.is_nan() || j >= 0.0 {
        return Err(Error::InvalidParameter(format!("coupling J must be < 0, got {j}")));
    }
    let h = Hermitian::from_real_diagonal(&[eps / 2.0, -eps / 2.0]);
    let diff = cost_observable_difference(&h, &h);
    let coupling = Hermitian::symmetrized(kron(&pauli::x(), &pauli::x()).scale(j));
    CostMatrix::new(Dims::square(2), diff.op + coupling, Provenance::EnergyExample { eps, j })
}

/// The unitaries `U₁ = I`, `U₂ = σ₁`, `U₃ = σ₃`, `U₄ = U₃U₂`.
pub fn time_example_unitaries() -> [CMatrix; 4] {
    let u1 = CMatrix::identity(2, 2);
    let u2 = real_matrix(2, 2, &[0.0, 1.0, 1.0, 0.0]);
    let u3 = real_matrix(2, 2, &[1.0, 0.0, 0.0, -1.0]);
    let u4 = &u3 * &u2;
    [u1, u2, u3, u4]
}

/// Costs `(0, k, 2, k + 2)` on the Choi vectors of `U₁ … U₄`.
pub fn time_example_cost(k: f64) -> Result<CostMatrix> {
    if k.is_nan() || k <= 0.0 {
        return Err(Error::InvalidParameter(format!("time cost k must be > 0, got {k}")));
    }
    let costs = [0.0, k, 2.0, k + 2.0];
    let terms: Vec<(f64, CVector)> = time_example_unitaries()
        .iter()
        .zip(costs)
        .map(|(u, c)| (c, unitary_choi_vector(u)))
        .collect();
    let (mut cost, _) = cost_from_pure_mixture(Dims::square(2), &terms)?;
    cost.provenance = Provenance::TimeExample { k };
    Ok(cost)
}

/// `Σ_i w_i C_i` over cost matrices of equal dims.
pub fn weighted_sum(terms: &[(f64, CostMatrix)]) -> Result<CostMatrix> {
    let dims = terms
        .first()
        .map(|(_, c)| c.dims)
        .ok_or_else(|| Error::InvalidParameter("weighted sum of no cost matrices".into()))?;
    let mut acc = Hermitian::zeros(dims.total());
    for (idx, (w, c)) in terms.iter().enumerate() {
        if c.dims != dims {
            return Err(Error::DimensionMismatch(format!(
                "sum term {idx} has dims ({}, {}), expected ({}, {})",
                c.dims.m, c.dims.n, dims.m, dims.n
            )));
        }
        acc = acc + c.op.scale(*w);
    }
    CostMatrix::new(dims, acc, Provenance::WeightedSum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::choi::omega;
    use crate::linalg::real_vector;
    use approx::assert_abs_diff_eq;

    fn assert_spectrum(c: &CostMatrix, expected: &[f64], tol: f64) {
        let vals = c.op.eigenvalues();
        assert_eq!(vals.len(), expected.len());
        for (v, e) in vals.iter().zip(expected) {
            assert_abs_diff_eq!(*v, *e, epsilon = tol);
        }
    }

    #[test]
    fn time_cost_spectrum() {
        assert_spectrum(&time_example_cost(2.0).unwrap(), &[0.0, 2.0, 2.0, 4.0], 1e-12);
        assert_spectrum(&time_example_cost(0.5).unwrap(), &[0.0, 0.5, 2.0, 2.5], 1e-12);
    }

    #[test]
    fn time_cost_eigenvectors_are_unitary_choi_vectors() {
        let k = 0.7;
        let c = time_example_cost(k).unwrap();
        for (u, cost) in time_example_unitaries().iter().zip([0.0, k, 2.0, k + 2.0]) {
            let v = unitary_choi_vector(u);
            assert!((c.matrix() * &v - &v * Complex64::new(cost, 0.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn rank_one_mixture_warns() {
        let (c, deficit) = cost_from_pure_mixture(Dims::square(2), &[(1.0, omega(2))]).unwrap();
        assert_eq!(deficit, Some(SpanDeficit { rank: 1, required: 4 }));
        assert_spectrum(&c, &[0.0, 0.0, 0.0, 1.0], 1e-14);
    }

    #[test]
    fn non_orthogonal_mixture_dips_below_constituent_costs() {
        // Gram matrix [[1, s], [s, 1]] has eigenvalues 1 ± s; C shares the nonzero ones.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v1 = real_vector(&[1.0, 0.0, 0.0, 0.0]);
        let v2 = real_vector(&[s, s, 0.0, 0.0]);
        let (c, _) = cost_from_pure_mixture(Dims::square(2), &[(1.0, v1), (1.0, v2)]).unwrap();
        assert_spectrum(&c, &[0.0, 0.0, 1.0 - s, 1.0 + s], 1e-14);
    }

    #[test]
    fn mixture_rejects_unnormalized() {
        let v = real_vector(&[1.0, 1.0, 0.0, 0.0]);
        assert!(matches!(
            cost_from_pure_mixture(Dims::square(2), &[(1.0, v)]),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn observable_difference_examples() {
        let h = Hermitian::from_real_diagonal(&[0.5, -0.5]);
        let c = cost_observable_difference(&h, &h);
        let expected = Hermitian::from_real_diagonal(&[0.0, -1.0, 1.0, 0.0]);
        assert!((c.matrix() - expected.matrix()).norm() < 1e-15);

        let z = cost_observable_difference(&Hermitian::zeros(3), &Hermitian::zeros(2));
        assert_eq!(z.dims, Dims::new(3, 2));
        assert_eq!(z.matrix().norm(), 0.0);
    }

    #[test]
    fn spin_generators() {
        let gs = spin_generator_set(1).unwrap();
        for (g, j) in gs.generators().iter().zip(1..=3) {
            assert_eq!(g.matrix(), &pauli::sigma(j));
        }
        let gs = spin_generator_set(2).unwrap();
        assert_eq!(gs.generators().len(), 6);
        for g in gs.generators() {
            assert!((g.matrix() * g.matrix() - CMatrix::identity(4, 4)).norm() < 1e-15);
        }
        assert_eq!(generated_dimension(spin_generator_set(1).unwrap().generators()), 4);
        assert_eq!(generated_dimension(gs.generators()), 16);
        assert!(spin_generator_set(0).is_err());
    }

    #[test]
    fn generation_check_rejects_identity_alone() {
        let err = GeneratorSet::new(vec![Hermitian::identity(2)]).unwrap_err();
        assert_eq!(err, Error::NotGenerating { span: 1, required: 4 });
        let gs = GeneratorSet::without_generation_check(vec![Hermitian::identity(2)]).unwrap();
        assert_eq!(cost_quadratic_generators(&gs).matrix().norm(), 0.0);
    }

    #[test]
    fn schwinger_pair_m2() {
        let (h1, h2) = schwinger_pair(2).unwrap();
        assert_eq!(h1, Hermitian::from_real_diagonal(&[0.0, 1.0]));
        let expected = real_matrix(2, 2, &[0.5, -0.5, -0.5, 0.5]);
        assert!((h2.matrix() - expected).norm() < 1e-15);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((qft_matrix(2) - real_matrix(2, 2, &[s, s, s, -s])).norm() < 1e-15);
    }

    #[test]
    fn schwinger_spectrum_and_unitarity() {
        let (_, h2) = schwinger_pair(4).unwrap();
        let vals = h2.eigenvalues();
        for (i, v) in vals.iter().enumerate() {
            assert_abs_diff_eq!(*v, i as f64, epsilon = 1e-12);
        }
        let f = qft_matrix(8);
        assert!((f.adjoint() * &f - CMatrix::identity(8, 8)).norm() < 1e-10);
        for m in [2, 3, 4] {
            assert_eq!(generated_dimension(schwinger_generator_set(m).unwrap().generators()), m * m);
        }
        assert!(schwinger_pair(1).is_err());
    }

    #[test]
    fn quadratic_costs_annihilate_omega() {
        for gs in [
            spin_generator_set(1).unwrap(),
            spin_generator_set(2).unwrap(),
            schwinger_generator_set(2).unwrap(),
            schwinger_generator_set(4).unwrap(),
        ] {
            let c = cost_quadratic_generators(&gs);
            assert!((c.matrix() * omega(gs.m())).norm() < 1e-10);
            let vals = c.op.eigenvalues();
            assert!(vals[0] > -1e-10);
            assert_abs_diff_eq!(vals[0], 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn energy_cost_spectrum() {
        let c = energy_example_cost(1.0, -1.0).unwrap();
        let vals = c.op.eigenvalues();
        assert_abs_diff_eq!(vals[0], -2f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(vals[1], -1.0, epsilon = 1e-12);
        assert!(energy_example_cost(0.0, -1.0).is_err());
        assert!(energy_example_cost(1.0, 0.5).is_err());
    }

    #[test]
    fn weighted_sum_and_transform() {
        let a = time_example_cost(1.0).unwrap();
        let b = energy_example_cost(1.0, -1.0).unwrap();
        let s = weighted_sum(&[(2.0, a.clone()), (1.0, b.clone())]).unwrap();
        let direct = a.matrix().scale(2.0) + b.matrix();
        assert!((s.matrix() - direct).norm() < 1e-14);
        let t = a.affine_transform(3.0, -1.0);
        assert_spectrum(&t, &[-1.0, 2.0, 5.0, 8.0], 1e-12);
        let bad = cost_observable_difference(&Hermitian::zeros(3), &Hermitian::zeros(3));
        assert!(weighted_sum(&[(1.0, a), (1.0, bad)]).is_err());
    }
}
