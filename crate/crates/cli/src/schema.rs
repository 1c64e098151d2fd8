//! Problem, Choi and report files.
//!
//! All files are JSON. Complex numbers are `[re, im]` pairs and matrices are
//! arrays of rows. Bases are 0-indexed, and the product basis of
//! `H_A ⊗ H_B` is ordered `|a⟩|b⟩ ↦ a·n + b`. The Choi state is taken in
//! this same basis, so a partial transpose on A is a transpose of the A
//! indices in it.

use std::fmt;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use qchan_core::choi::ChoiState;
use qchan_core::cost::{
    cost_from_pure_mixture, cost_observable_difference, cost_quadratic_generators,
    energy_example_cost, schwinger_generator_set, spin_generator_set, time_example_cost,
    weighted_sum, CostMatrix, GeneratorSet,
};
use qchan_core::linalg::{CMatrix, CVector, DensityMatrix, Dims, Hermitian};
use qchan_core::sdp::{ConstraintPair, SolverOptions, TransportProblem};

pub const SCHEMA_VERSION: &str = "1";

pub type Complex = [f64; 2];
pub type ComplexMatrix = Vec<Vec<Complex>>;

/// A load failure with the JSON path of the offending field.
#[derive(Debug)]
pub struct InputError {
    pub field: String,
    pub message: String,
}

impl InputError {
    pub fn new(field: impl Into<String>, message: impl fmt::Display) -> Self {
        Self {
            field: field.into(),
            message: message.to_string(),
        }
    }
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.is_empty() || self.field == "." {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.field, self.message)
        }
    }
}

impl std::error::Error for InputError {}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub schema_version: String,
    pub dims: [usize; 2],
    pub cost: CostSpec,
    #[serde(default)]
    pub constraints: Vec<ConstraintSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "recipe", rename_all = "snake_case", deny_unknown_fields)]
pub enum CostSpec {
    /// `Σ k_α |v_α⟩⟨v_α|`.
    Mixture { terms: Vec<MixtureTerm> },
    /// `I ⊗ O_B − O_Aᵀ ⊗ I`.
    ObservableDifference { o_a: ComplexMatrix, o_b: ComplexMatrix },
    QuadraticGenerators {
        generators: GeneratorSpec,
        #[serde(default)]
        skip_generation_check: bool,
    },
    EnergyExample {
        #[serde(default = "default_eps")]
        eps: f64,
        #[serde(default = "default_j")]
        j: f64,
    },
    TimeExample { k: f64 },
    Raw { matrix: ComplexMatrix },
    WeightedSum { terms: Vec<WeightedTerm> },
}

fn default_eps() -> f64 {
    1.0
}

fn default_j() -> f64 {
    -1.0
}

fn default_weight() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureTerm {
    pub cost: f64,
    pub vector: Vec<Complex>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorSpec {
    /// Single-spin Pauli matrices on each of `r` qubits.
    Spin(usize),
    /// Position and momentum on `m` levels.
    Schwinger(usize),
    Explicit(Vec<ComplexMatrix>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightedTerm {
    #[serde(default = "default_weight")]
    pub weight: f64,
    pub cost: CostSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintSpec {
    pub input: ComplexMatrix,
    pub output: ComplexMatrix,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    pub tol: Option<f64>,
    pub max_iters: Option<usize>,
    pub over_relaxation: Option<f64>,
    pub penalty: Option<f64>,
}

impl SolverSpec {
    pub fn apply(&self, mut opts: SolverOptions) -> SolverOptions {
        if let Some(tol) = self.tol {
            opts.tol = tol;
        }
        if let Some(n) = self.max_iters {
            opts.max_iters = n;
        }
        if let Some(a) = self.over_relaxation {
            opts.over_relaxation = a;
        }
        if let Some(p) = self.penalty {
            opts.penalty = p;
        }
        opts
    }
}

/// A Choi state on disk. Report files are accepted as well.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChoiFile {
    #[serde(default)]
    pub schema_version: Option<String>,
    pub dims: [usize; 2],
    #[serde(alias = "kappa_star")]
    pub kappa: ComplexMatrix,
}

pub fn to_complex(z: Complex64) -> Complex {
    [z.re, z.im]
}

pub fn matrix_to_json(x: &CMatrix) -> ComplexMatrix {
    (0..x.nrows())
        .map(|i| (0..x.ncols()).map(|j| to_complex(x[(i, j)])).collect())
        .collect()
}

pub fn matrix_from_json(rows: &ComplexMatrix, field: &str) -> Result<CMatrix, InputError> {
    let r = rows.len();
    if r == 0 {
        return Err(InputError::new(field, "matrix has no rows"));
    }
    let c = rows[0].len();
    for (i, row) in rows.iter().enumerate() {
        if row.len() != c {
            return Err(InputError::new(
                format!("{field}[{i}]"),
                format!("row has {} entries, expected {c}", row.len()),
            ));
        }
    }
    Ok(CMatrix::from_fn(r, c, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1])))
}

fn square_from_json(rows: &ComplexMatrix, size: usize, field: &str) -> Result<CMatrix, InputError> {
    let x = matrix_from_json(rows, field)?;
    if x.nrows() != size || x.ncols() != size {
        return Err(InputError::new(
            field,
            format!("matrix is {}x{}, expected {size}x{size}", x.nrows(), x.ncols()),
        ));
    }
    Ok(x)
}

fn hermitian_from_json(rows: &ComplexMatrix, size: usize, field: &str) -> Result<Hermitian, InputError> {
    Hermitian::new(square_from_json(rows, size, field)?).map_err(|e| InputError::new(field, e))
}

fn density_from_json(rows: &ComplexMatrix, size: usize, field: &str) -> Result<DensityMatrix, InputError> {
    DensityMatrix::from_matrix(square_from_json(rows, size, field)?).map_err(|e| InputError::new(field, e))
}

pub fn vector_from_json(entries: &[Complex]) -> CVector {
    CVector::from_iterator(entries.len(), entries.iter().map(|z| Complex64::new(z[0], z[1])))
}

fn dims_from(dims: [usize; 2], field: &str) -> Result<Dims, InputError> {
    if dims[0] == 0 || dims[1] == 0 {
        return Err(InputError::new(field, "dimensions must be at least 1"));
    }
    Ok(Dims::new(dims[0], dims[1]))
}

/// Options that override values read from a file.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub tol: Option<f64>,
    pub max_iters: Option<usize>,
    pub skip_generation_check: bool,
}

/// Parse JSON, reporting the path of the failing field.
pub fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, InputError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        InputError::new(path, e.into_inner())
    })
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, InputError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| InputError::new("", format!("cannot read {}: {e}", path.display())))?;
    parse_json(&text).map_err(|e| InputError::new(e.field, format!("{} ({})", e.message, path.display())))
}

/// A loaded cost matrix plus any warnings raised while building it.
pub struct BuiltCost {
    pub cost: CostMatrix,
    pub warnings: Vec<String>,
}

pub fn build_cost(spec: &CostSpec, dims: Dims, field: &str, skip_check: bool) -> Result<BuiltCost, InputError> {
    let mut warnings = Vec::new();
    let cost = match spec {
        CostSpec::Mixture { terms } => {
            let mut parsed = Vec::with_capacity(terms.len());
            for (i, t) in terms.iter().enumerate() {
                let v = vector_from_json(&t.vector);
                if v.len() != dims.total() {
                    return Err(InputError::new(
                        format!("{field}.terms[{i}].vector"),
                        format!("length {} does not match m*n = {}", v.len(), dims.total()),
                    ));
                }
                parsed.push((t.cost, v));
            }
            let (c, deficit) =
                cost_from_pure_mixture(dims, &parsed).map_err(|e| InputError::new(format!("{field}.terms"), e))?;
            if let Some(d) = deficit {
                warnings.push(format!(
                    "{field}: mixture vectors span only {} of {} dimensions",
                    d.rank, d.required
                ));
            }
            c
        }
        CostSpec::ObservableDifference { o_a, o_b } => {
            let a = hermitian_from_json(o_a, dims.m, &format!("{field}.o_a"))?;
            let b = hermitian_from_json(o_b, dims.n, &format!("{field}.o_b"))?;
            cost_observable_difference(&a, &b)
        }
        CostSpec::QuadraticGenerators {
            generators,
            skip_generation_check,
        } => {
            let skip = skip_check || *skip_generation_check;
            let set = match generators {
                GeneratorSpec::Spin(r) => spin_generator_set(*r),
                GeneratorSpec::Schwinger(m) => schwinger_generator_set(*m),
                GeneratorSpec::Explicit(list) => {
                    let mut gens = Vec::with_capacity(list.len());
                    for (i, g) in list.iter().enumerate() {
                        gens.push(hermitian_from_json(g, dims.m, &format!("{field}.generators.explicit[{i}]"))?);
                    }
                    if skip {
                        GeneratorSet::without_generation_check(gens)
                    } else {
                        GeneratorSet::new(gens)
                    }
                }
            }
            .map_err(|e| InputError::new(format!("{field}.generators"), e))?;
            cost_quadratic_generators(&set)
        }
        CostSpec::EnergyExample { eps, j } => {
            energy_example_cost(*eps, *j).map_err(|e| InputError::new(field, e))?
        }
        CostSpec::TimeExample { k } => time_example_cost(*k).map_err(|e| InputError::new(field, e))?,
        CostSpec::Raw { matrix } => {
            let h = hermitian_from_json(matrix, dims.total(), &format!("{field}.matrix"))?;
            CostMatrix::raw(dims, h).map_err(|e| InputError::new(field, e))?
        }
        CostSpec::WeightedSum { terms } => {
            if terms.is_empty() {
                return Err(InputError::new(format!("{field}.terms"), "weighted sum needs at least one term"));
            }
            let mut built = Vec::with_capacity(terms.len());
            for (i, t) in terms.iter().enumerate() {
                let sub = build_cost(&t.cost, dims, &format!("{field}.terms[{i}].cost"), skip_check)?;
                warnings.extend(sub.warnings);
                built.push((t.weight, sub.cost));
            }
            weighted_sum(&built).map_err(|e| InputError::new(format!("{field}.terms"), e))?
        }
    };
    if cost.dims != dims {
        return Err(InputError::new(
            field,
            format!(
                "recipe produces a {}x{} problem but dims is [{}, {}]",
                cost.dims.m, cost.dims.n, dims.m, dims.n
            ),
        ));
    }
    Ok(BuiltCost { cost, warnings })
}

pub struct BuiltProblem {
    pub problem: TransportProblem,
    pub warnings: Vec<String>,
}

pub fn build_problem(file: &ProblemFile, overrides: Overrides) -> Result<BuiltProblem, InputError> {
    if file.schema_version != SCHEMA_VERSION {
        return Err(InputError::new(
            "schema_version",
            format!("unsupported version {:?}, expected {SCHEMA_VERSION:?}", file.schema_version),
        ));
    }
    let dims = dims_from(file.dims, "dims")?;
    let BuiltCost { cost, warnings } = build_cost(&file.cost, dims, "cost", overrides.skip_generation_check)?;

    let mut constraints = Vec::with_capacity(file.constraints.len());
    for (i, c) in file.constraints.iter().enumerate() {
        let input = density_from_json(&c.input, dims.m, &format!("constraints[{i}].input"))?;
        let output = density_from_json(&c.output, dims.n, &format!("constraints[{i}].output"))?;
        constraints.push(ConstraintPair::new(input, output));
    }

    let mut options = file.solver.clone().unwrap_or_default().apply(SolverOptions::default());
    if let Some(tol) = overrides.tol {
        options.tol = tol;
    }
    if let Some(n) = overrides.max_iters {
        options.max_iters = n;
    }
    let problem = TransportProblem::new(cost, constraints, options).map_err(|e| InputError::new("solver", e))?;
    Ok(BuiltProblem { problem, warnings })
}

pub fn load_problem(path: &Path, overrides: Overrides) -> Result<BuiltProblem, InputError> {
    let file: ProblemFile = read_json(path)?;
    build_problem(&file, overrides)
}

pub fn load_choi(path: &Path) -> Result<ChoiState, InputError> {
    let file: ChoiFile = read_json(path)?;
    let dims = dims_from(file.dims, "dims")?;
    let kappa = square_from_json(&file.kappa, dims.total(), "kappa")?;
    let kappa = Hermitian::new(kappa).map_err(|e| InputError::new("kappa", e))?;
    ChoiState::new(dims, kappa).map_err(|e| InputError::new("kappa", e))
}

/// A problem file carrying only a raw cost matrix.
pub fn raw_cost_file(cost: &CostMatrix) -> ProblemFile {
    ProblemFile {
        schema_version: SCHEMA_VERSION.into(),
        dims: [cost.dims.m, cost.dims.n],
        cost: CostSpec::Raw {
            matrix: matrix_to_json(cost.matrix()),
        },
        constraints: Vec::new(),
        solver: None,
    }
}
