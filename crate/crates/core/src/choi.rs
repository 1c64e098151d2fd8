//! Channel–state duality.
//!
//! A channel `E` from A (dimension `m`) to B (dimension `n`) corresponds to
//! the state `κ = (1/m) Σ_ij |i⟩⟨j| ⊗ E(|i⟩⟨j|)`, whose reduction to A is
//! `I_m/m`. Bases are 0-indexed: `|0⟩, …, |m-1⟩`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    check_unit, eig_hermitian, partial_trace, partial_trace_matrix, CMatrix, CVector,
    DensityMatrix, Dims, Hermitian, Subsystem, PSD_TOL, TRACE_TOL,
};

/// Completeness tolerance for Kraus operators, Frobenius norm.
pub const KRAUS_TOL: f64 = 1e-9;
/// Allowed Frobenius deviation of `Tr_B κ` from `I/m`.
pub const REDUCTION_TOL: f64 = 1e-8;
/// Eigenvalues of `κ` at or below this are dropped from a decomposition.
pub const RANK_CUTOFF: f64 = 1e-10;
/// Probabilities closer than this are reported as a degenerate group.
pub const DEGENERACY_TOL: f64 = 1e-6;
/// Schmidt weights at or below this do not contribute to a support.
pub const SUPPORT_TOL: f64 = 1e-9;

/// A channel given by Kraus operators `V_j` of shape `n×m`.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    dims: Dims,
    ops: Vec<CMatrix>,
}

impl KrausChannel {
    pub fn new(dims: Dims, ops: Vec<CMatrix>) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::InvalidParameter("a channel needs at least one Kraus operator".into()));
        }
        for (k, v) in ops.iter().enumerate() {
            if v.nrows() != dims.n || v.ncols() != dims.m {
                return Err(Error::DimensionMismatch(format!(
                    "Kraus operator {k} is {}x{}, expected {}x{}",
                    v.nrows(),
                    v.ncols(),
                    dims.n,
                    dims.m
                )));
            }
        }
        let sum = ops
            .iter()
            .fold(CMatrix::zeros(dims.m, dims.m), |acc, v| acc + v.adjoint() * v);
        let residual = (sum - CMatrix::identity(dims.m, dims.m)).norm();
        if residual > KRAUS_TOL {
            return Err(Error::KrausIncomplete { residual });
        }
        Ok(Self { dims, ops })
    }

    /// `ρ ↦ UρU†`.
    pub fn unitary(u: CMatrix) -> Result<Self> {
        let dims = Dims::new(u.ncols(), u.nrows());
        Self::new(dims, vec![u])
    }

    pub fn identity(m: usize) -> Self {
        Self {
            dims: Dims::square(m),
            ops: vec![CMatrix::identity(m, m)],
        }
    }

    /// `X ↦ Tr(X) I_n / n`.
    pub fn completely_depolarizing(dims: Dims) -> Self {
        let scale = 1.0 / (dims.n as f64).sqrt();
        let mut ops = Vec::with_capacity(dims.total());
        for b in 0..dims.n {
            for a in 0..dims.m {
                let mut v = CMatrix::zeros(dims.n, dims.m);
                v[(b, a)] = Complex64::new(scale, 0.0);
                ops.push(v);
            }
        }
        Self { dims, ops }
    }

    /// The convex combination `λ·self + (1-λ)·other`.
    pub fn mix(&self, other: &KrausChannel, lambda: f64) -> Result<Self> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch("mixing channels of different dims".into()));
        }
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidParameter(format!("mixing weight {lambda} not in [0,1]")));
        }
        let a = lambda.sqrt();
        let b = (1.0 - lambda).sqrt();
        let ops = self
            .ops
            .iter()
            .map(|v| v.scale(a))
            .chain(other.ops.iter().map(|v| v.scale(b)))
            .collect();
        Ok(Self { dims: self.dims, ops })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn kraus_ops(&self) -> &[CMatrix] {
        &self.ops
    }

    /// `Σ_j V_j X V_j†` for any `m×m` matrix `X`.
    pub fn apply_matrix(&self, x: &CMatrix) -> Result<CMatrix> {
        if x.nrows() != self.dims.m || x.ncols() != self.dims.m {
            return Err(Error::DimensionMismatch(format!(
                "channel input is {}x{}, expected {}x{}",
                x.nrows(),
                x.ncols(),
                self.dims.m,
                self.dims.m
            )));
        }
        Ok(self
            .ops
            .iter()
            .fold(CMatrix::zeros(self.dims.n, self.dims.n), |acc, v| acc + v * x * v.adjoint()))
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let out = self.apply_matrix(rho.matrix())?;
        Ok(DensityMatrix::new_unchecked(Hermitian::symmetrized(out)))
    }
}

/// A state of AB whose reduction to A is maximally mixed.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiState {
    dims: Dims,
    kappa: DensityMatrix,
}

impl ChoiState {
    /// Validates positivity, unit trace and `Tr_B κ = I/m`.
    pub fn new(dims: Dims, kappa: Hermitian) -> Result<Self> {
        Self::with_tolerance(dims, kappa, REDUCTION_TOL)
    }

    /// As [`ChoiState::new`], with a caller supplied reduction tolerance.
    pub fn with_tolerance(dims: Dims, kappa: Hermitian, tol: f64) -> Result<Self> {
        if kappa.dim() != dims.total() {
            return Err(Error::DimensionMismatch(format!(
                "Choi matrix has dimension {}, expected {}",
                kappa.dim(),
                dims.total()
            )));
        }
        let residual = reduction_residual(&kappa, dims)?;
        if residual > tol {
            return Err(Error::NotMaximallyMixed { residual });
        }
        let trace = kappa.trace();
        if (trace - 1.0).abs() > tol.max(TRACE_TOL) {
            return Err(Error::BadTrace { trace });
        }
        let min_eigenvalue = kappa.min_eigenvalue();
        if min_eigenvalue < -PSD_TOL.max(tol) {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        Ok(Self {
            dims,
            kappa: DensityMatrix::new_unchecked(kappa),
        })
    }

    pub(crate) fn new_unchecked(dims: Dims, kappa: Hermitian) -> Self {
        Self {
            dims,
            kappa: DensityMatrix::new_unchecked(kappa),
        }
    }

    /// The rank-one Choi state `|v⟩⟨v|`; `v` must be maximally entangled.
    pub fn from_pure(dims: Dims, v: &CVector) -> Result<Self> {
        check_unit(v)?;
        Self::new(dims, Hermitian::projector(v))
    }

    /// `I/(mn)`, dual to the completely depolarizing channel.
    pub fn maximally_mixed(dims: Dims) -> Self {
        Self::new_unchecked(dims, Hermitian::identity(dims.total()).scale(1.0 / dims.total() as f64))
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn kappa(&self) -> &Hermitian {
        self.kappa.op()
    }

    pub fn density(&self) -> &DensityMatrix {
        &self.kappa
    }

    pub fn into_kappa(self) -> Hermitian {
        self.kappa.into_op()
    }
}

/// `‖Tr_B κ − I/m‖_F`.
pub fn reduction_residual(kappa: &Hermitian, dims: Dims) -> Result<f64> {
    let reduced = partial_trace_matrix(kappa.matrix(), dims, Subsystem::B)?;
    let target = CMatrix::identity(dims.m, dims.m).scale(1.0 / dims.m as f64);
    Ok((reduced - target).norm())
}

/// `κ = (1/m) Σ_ij |i⟩⟨j| ⊗ E(|i⟩⟨j|)`.
pub fn channel_to_choi(ch: &KrausChannel) -> ChoiState {
    let Dims { m, n } = ch.dims;
    let mut kappa = CMatrix::zeros(m * n, m * n);
    let mut unit = CMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            unit[(i, j)] = Complex64::new(1.0, 0.0);
            let block = ch.apply_matrix(&unit).expect("unit matrix has channel input shape");
            unit[(i, j)] = Complex64::new(0.0, 0.0);
            kappa
                .view_mut((i * n, j * n), (n, n))
                .copy_from(&block.scale(1.0 / m as f64));
        }
    }
    ChoiState::new_unchecked(ch.dims, Hermitian::symmetrized(kappa))
}

/// The linear map dual to an arbitrary operator `κ` on AB, applied to any
/// `m×m` matrix: `X ↦ m·Tr_A[(Xᵀ ⊗ I_n) κ]`.
pub fn apply_dual_map(dims: Dims, kappa: &CMatrix, x: &CMatrix) -> Result<CMatrix> {
    let Dims { m, n } = dims;
    if kappa.nrows() != m * n || kappa.ncols() != m * n {
        return Err(Error::DimensionMismatch(format!(
            "operator is {}x{}, expected {}x{}",
            kappa.nrows(),
            kappa.ncols(),
            m * n,
            m * n
        )));
    }
    if x.nrows() != m || x.ncols() != m {
        return Err(Error::DimensionMismatch(format!(
            "input is {}x{}, expected {m}x{m}",
            x.nrows(),
            x.ncols()
        )));
    }
    let mut out = CMatrix::zeros(n, n);
    for a in 0..m {
        for a2 in 0..m {
            let coeff = x[(a, a2)];
            if coeff == Complex64::new(0.0, 0.0) {
                continue;
            }
            out += kappa.view((a * n, a2 * n), (n, n)) * coeff;
        }
    }
    Ok(out.scale(m as f64))
}

/// Applies the channel dual to `cs` to the state `rho`.
pub fn apply_via_choi(cs: &ChoiState, rho: &DensityMatrix) -> Result<DensityMatrix> {
    let out = apply_dual_map(cs.dims, cs.kappa().matrix(), rho.matrix())?;
    Ok(DensityMatrix::new_unchecked(Hermitian::symmetrized(out)))
}

/// A rank-one term `p |v⟩⟨v|` of a Choi state.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementaryTransition {
    pub dims: Dims,
    pub probability: f64,
    /// Unit vector in `H_A ⊗ H_B`.
    pub vector: CVector,
}

impl ElementaryTransition {
    pub fn new(dims: Dims, probability: f64, vector: CVector) -> Result<Self> {
        if vector.len() != dims.total() {
            return Err(Error::DimensionMismatch(format!(
                "transition vector has length {}, expected {}",
                vector.len(),
                dims.total()
            )));
        }
        check_unit(&vector)?;
        Ok(Self {
            dims,
            probability,
            vector,
        })
    }

    /// The dual state `κ_α = |v⟩⟨v|`.
    pub fn choi_projector(&self) -> Hermitian {
        Hermitian::projector(&self.vector)
    }

    /// `Tr_B |v⟩⟨v|`.
    pub fn reduced_state(&self) -> Hermitian {
        partial_trace(&self.choi_projector(), self.dims, Subsystem::B)
            .expect("transition vector matches its dims")
    }

    /// The completely positive map `E_α` applied to `x`.
    pub fn apply(&self, x: &CMatrix) -> Result<CMatrix> {
        apply_dual_map(self.dims, self.choi_projector().matrix(), x)
    }

    /// `v` reshaped to the `m×n` coefficient matrix `V[a][b]`.
    pub fn coefficient_matrix(&self) -> CMatrix {
        CMatrix::from_fn(self.dims.m, self.dims.n, |a, b| self.vector[a * self.dims.n + b])
    }
}

/// Eigen-decomposition of a Choi state into elementary transitions.
#[derive(Debug, Clone)]
pub struct Decomposition {
    /// Transitions in order of descending probability.
    pub transitions: Vec<ElementaryTransition>,
    /// Index groups (into `transitions`) of equal probability within
    /// [`DEGENERACY_TOL`]. Only groups with two or more members are listed;
    /// the basis inside such a group is not unique.
    pub degenerate_groups: Vec<Vec<usize>>,
}

impl Decomposition {
    pub fn probabilities(&self) -> Vec<f64> {
        self.transitions.iter().map(|t| t.probability).collect()
    }

    /// `Σ p_α |v_α⟩⟨v_α|`.
    pub fn reconstruct(&self) -> CMatrix {
        let d = self.transitions.first().map_or(0, |t| t.dims.total());
        self.transitions.iter().fold(CMatrix::zeros(d, d), |acc, t| {
            acc + (&t.vector * t.vector.adjoint()).scale(t.probability)
        })
    }

    pub fn is_degenerate(&self, index: usize) -> bool {
        self.degenerate_groups.iter().any(|g| g.contains(&index))
    }
}

pub(crate) fn degenerate_groups(probabilities: &[f64]) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, &p) in probabilities.iter().enumerate() {
        match groups.last_mut() {
            Some(g) if (probabilities[*g.last().unwrap()] - p).abs() <= DEGENERACY_TOL => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    groups.retain(|g| g.len() > 1);
    groups
}

/// Splits `κ` into elementary transitions `κ = Σ p_α |v_α⟩⟨v_α|`, dropping
/// eigenvalues at or below [`RANK_CUTOFF`].
pub fn decompose_elementary(cs: &ChoiState) -> Decomposition {
    let eig = eig_hermitian(cs.kappa());
    let transitions: Vec<ElementaryTransition> = (0..eig.values.len())
        .rev()
        .filter(|&i| eig.values[i] > RANK_CUTOFF)
        .map(|i| ElementaryTransition {
            dims: cs.dims,
            probability: eig.values[i],
            vector: eig.vector(i),
        })
        .collect();
    let degenerate_groups = degenerate_groups(&transitions.iter().map(|t| t.probability).collect::<Vec<_>>());
    Decomposition {
        transitions,
        degenerate_groups,
    }
}

/// The subspace `H_A^α` of inputs not annihilated by a transition.
#[derive(Debug, Clone)]
pub struct Support {
    pub dim: usize,
    /// Orthonormal basis vectors of `H_A^α` as columns (`m × dim`).
    pub basis: CMatrix,
}

/// Support of an elementary transition: the range of `(Tr_B κ_α)ᵀ`.
///
/// `E_α(|ψ⟩⟨ψ|) = m·w w†` with `w = Vᵀψ`, so the annihilated vectors are the
/// kernel of `Vᵀ`, whose orthogonal complement is the range of `conj(V)`.
pub fn transition_support(t: &ElementaryTransition) -> Support {
    let reduced_t = t.reduced_state().transpose();
    let eig = eig_hermitian(&reduced_t);
    let keep: Vec<usize> = (0..eig.values.len()).filter(|&i| eig.values[i] > SUPPORT_TOL).collect();
    let mut basis = CMatrix::zeros(t.dims.m, keep.len());
    for (col, &i) in keep.iter().enumerate() {
        basis.set_column(col, &eig.vectors.column(i));
    }
    Support {
        dim: keep.len(),
        basis,
    }
}

/// A transition is itself a channel iff its dual vector is maximally
/// entangled, i.e. `Tr_B κ_α = I/m`.
pub fn is_channel(t: &ElementaryTransition) -> bool {
    reduction_residual(&t.choi_projector(), t.dims).is_ok_and(|r| r <= REDUCTION_TOL)
}

/// `|Ω⟩ = (1/√m) Σ_i |i⟩|i⟩`.
pub fn omega(m: usize) -> CVector {
    assert!(m >= 1, "omega needs m >= 1");
    let mut v = CVector::zeros(m * m);
    let amp = Complex64::new(1.0 / (m as f64).sqrt(), 0.0);
    for i in 0..m {
        v[i * m + i] = amp;
    }
    v
}

/// Choi vector `(1/√m) Σ_i |i⟩ ⊗ U|i⟩` of the unitary channel `U`.
pub fn unitary_choi_vector(u: &CMatrix) -> CVector {
    let (n, m) = u.shape();
    let scale = 1.0 / (m as f64).sqrt();
    CVector::from_fn(m * n, |idx, _| u[(idx % n, idx / n)] * scale)
}
