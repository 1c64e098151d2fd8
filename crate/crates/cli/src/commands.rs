use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qchan_core::choi::{channel_to_choi, decompose_elementary, omega, KrausChannel};
use qchan_core::cost::{
    cost_quadratic_generators, energy_example_cost, schwinger_generator_set, spin_generator_set,
    time_example_cost, time_example_unitaries, CostMatrix,
};
use qchan_core::diagnostics::{entanglement_entropy, full_report, report_choi};
use qchan_core::fixtures::{
    energy_constrained_cost, energy_negative_eigenvalues, energy_problem, energy_psi1,
    energy_unconstrained_cost, spin_flip_choi, time_constrained_choi, time_constrained_cost,
    time_decomposition_weights, time_problem,
};
use qchan_core::linalg::{eig_hermitian, Hermitian};
use qchan_core::sdp::{feasible_sample, solve, verify_kappa, Status, TransportProblem};

use crate::report::{ReportFile, TransitionRow};
use crate::schema::{
    load_choi, load_problem, matrix_from_json, raw_cost_file, read_json, ChoiFile, InputError,
    Overrides, SCHEMA_VERSION,
};
use crate::text::{sig, table, transition_table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_MAX_ITERS: i32 = 3;

/// Stored and recomputed report values must agree to this.
const REVERIFY_TOL: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(name = "qchan", version, about = "Cost-optimal quantum channels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output style on standard output.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the machine-readable result to this file.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Residual tolerance of the solver.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Iteration budget of the solver.
    #[arg(long, global = true)]
    pub max_iters: Option<usize>,
    /// Accept explicit generator sets without checking that they generate.
    #[arg(long, global = true)]
    pub skip_generation_check: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a problem file and report the optimal channel.
    Solve { problem: PathBuf },
    /// Print the spectrum of a cost matrix with eigenvector entanglement.
    Cost {
        #[command(subcommand)]
        recipe: CostRecipe,
    },
    /// Re-run a worked example against its closed-form values.
    #[command(alias = "paper")]
    Example {
        #[arg(value_enum)]
        example: Example,
        #[arg(long, allow_negative_numbers = true)]
        eps: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        j: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        k: Option<f64>,
        /// Number of spins for the minimal-disturbance example.
        #[arg(long)]
        r: Option<usize>,
        /// Levels of the Schwinger pair for the minimal-disturbance example.
        #[arg(long)]
        m: Option<usize>,
    },
    /// Split a Choi state into elementary transitions.
    Decompose {
        choi: PathBuf,
        /// Problem file whose cost is used for the cost column.
        #[arg(long)]
        cost: Option<PathBuf>,
    },
    /// Recompute the cost and residuals stored in a report.
    Verify { report: PathBuf, problem: PathBuf },
    /// Draw a seeded feasible point of a problem.
    Sample {
        problem: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Subcommand)]
pub enum CostRecipe {
    Energy {
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        eps: f64,
        #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
        j: f64,
    },
    Time {
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        k: f64,
    },
    Spin {
        #[arg(long, default_value_t = 1)]
        r: usize,
    },
    Schwinger {
        #[arg(long, default_value_t = 2)]
        m: usize,
    },
    /// The cost of a problem file.
    File { problem: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Example {
    Energy,
    Time,
    Mindisturb,
}

/// Runs a parsed command, writing to `out`, and returns the exit code.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let overrides = Overrides {
        tol: cli.tol,
        max_iters: cli.max_iters,
        skip_generation_check: cli.skip_generation_check,
    };
    match &cli.command {
        Command::Solve { problem } => cmd_solve(cli, problem, overrides, out, err),
        Command::Cost { recipe } => cmd_cost(cli, recipe, overrides, out, err),
        Command::Example { example, eps, j, k, r, m } => {
            let params = ExampleParams {
                eps: *eps,
                j: *j,
                k: *k,
                r: *r,
                m: *m,
            };
            cmd_example(cli, *example, params, out)
        }
        Command::Decompose { choi, cost } => cmd_decompose(cli, choi, cost.as_deref(), overrides, out, err),
        Command::Verify { report, problem } => cmd_verify(cli, report, problem, overrides, out),
        Command::Sample { problem, seed } => cmd_sample(cli, problem, *seed, overrides, out, err),
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n").with_context(|| format!("cannot write {}", path.display()))
}

fn emit<T: Serialize>(cli: &Cli, value: &T, text: &str, out: &mut dyn Write) -> Result<()> {
    match cli.format {
        Format::Text => write!(out, "{text}")?,
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(value)?)?,
    }
    if let Some(path) = &cli.output {
        write_json(path, value)?;
    }
    Ok(())
}

fn warn(err: &mut dyn Write, warnings: &[String]) -> Result<()> {
    for w in warnings {
        writeln!(err, "warning: {w}")?;
    }
    Ok(())
}

fn exit_code(status: Status) -> i32 {
    match status {
        Status::Converged => EXIT_OK,
        Status::Infeasible => EXIT_INFEASIBLE,
        Status::MaxIters => EXIT_MAX_ITERS,
    }
}

fn cmd_solve(cli: &Cli, path: &Path, overrides: Overrides, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let built = load_problem(path, overrides)?;
    warn(err, &built.warnings)?;
    let p = &built.problem;
    let start = Instant::now();
    let s = solve(p);
    let elapsed = start.elapsed().as_secs_f64();
    let report = if s.is_converged() {
        Some(full_report(&s, &p.cost)?)
    } else {
        None
    };
    let file = ReportFile::new(&s, report.as_ref(), p.options.tol, p.options.max_iters, elapsed);

    let mut text = String::new();
    writeln!(text, "status         {}", s.status)?;
    writeln!(text, "optimal cost   {}", sig(s.cost_value))?;
    writeln!(text, "dims           {} -> {}", p.dims.m, p.dims.n)?;
    writeln!(text, "iterations     {} ({:.3} s)", s.iterations, elapsed)?;
    writeln!(text, "residuals      primal {}  dual {}", sig(s.primal_residual), sig(s.dual_residual))?;
    for (j, r) in s.constraint_residuals.iter().enumerate() {
        writeln!(text, "constraint {j:<3} residual {}", sig(*r))?;
    }
    if let Some(r) = &report {
        writeln!(text)?;
        text.push_str(&transition_table(r));
    }
    emit(cli, &file, &text, out)?;
    Ok(exit_code(s.status))
}

#[derive(Serialize)]
struct Spectrum {
    dims: [usize; 2],
    eigenvalues: Vec<f64>,
    entanglement_entropy: Vec<f64>,
    degenerate: Vec<bool>,
}

fn cmd_cost(cli: &Cli, recipe: &CostRecipe, overrides: Overrides, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let bad = |e: qchan_core::Error| InputError::new("", e);
    let cost: CostMatrix = match recipe {
        CostRecipe::Energy { eps, j } => energy_example_cost(*eps, *j).map_err(bad)?,
        CostRecipe::Time { k } => time_example_cost(*k).map_err(bad)?,
        CostRecipe::Spin { r } => cost_quadratic_generators(&spin_generator_set(*r).map_err(bad)?),
        CostRecipe::Schwinger { m } => cost_quadratic_generators(&schwinger_generator_set(*m).map_err(bad)?),
        CostRecipe::File { problem } => {
            let built = load_problem(problem, overrides)?;
            warn(err, &built.warnings)?;
            built.problem.cost
        }
    };
    let mut eig = eig_hermitian(&cost.op);
    let d = eig.values.len();
    // Round-off around exact zeros would otherwise print as 1e-16.
    let scale = eig.values.iter().fold(1.0f64, |a, &l| a.max(l.abs()));
    for l in eig.values.iter_mut() {
        if l.abs() <= 1e-12 * scale {
            *l = 0.0;
        }
    }
    let degenerate: Vec<bool> = (0..d)
        .map(|i| {
            (i > 0 && (eig.values[i] - eig.values[i - 1]).abs() <= 1e-9)
                || (i + 1 < d && (eig.values[i + 1] - eig.values[i]).abs() <= 1e-9)
        })
        .collect();
    let entropies: Vec<f64> = (0..d)
        .map(|i| entanglement_entropy(&eig.vector(i), cost.dims).expect("eigenvectors are unit"))
        .collect();

    let rows: Vec<Vec<String>> = (0..d)
        .map(|i| {
            vec![
                i.to_string(),
                sig(eig.values[i]),
                sig(entropies[i]),
                if degenerate[i] { "degenerate" } else { "" }.to_string(),
            ]
        })
        .collect();
    let mut text = format!("cost on {} x {} levels\n", cost.dims.m, cost.dims.n);
    text.push_str(&table(&["#", "eigenvalue", "entropy [bits]", ""], &rows));
    if degenerate.iter().any(|&x| x) {
        text.push_str("entropies inside a degenerate eigenspace depend on the chosen basis\n");
    }
    let spectrum = Spectrum {
        dims: [cost.dims.m, cost.dims.n],
        eigenvalues: eig.values.clone(),
        entanglement_entropy: entropies,
        degenerate,
    };
    match cli.format {
        Format::Text => write!(out, "{text}")?,
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&spectrum)?)?,
    }
    if let Some(path) = &cli.output {
        write_json(path, &raw_cost_file(&cost))?;
    }
    Ok(EXIT_OK)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ExampleParams {
    pub eps: Option<f64>,
    pub j: Option<f64>,
    pub k: Option<f64>,
    pub r: Option<usize>,
    pub m: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub observed: String,
    pub pass: bool,
}

#[derive(Serialize)]
struct ExampleOutcome {
    example: String,
    checks: Vec<Check>,
    pass: bool,
}

struct Checks {
    list: Vec<Check>,
}

impl Checks {
    fn close(&mut self, name: impl Into<String>, expected: f64, observed: f64, tol: f64) {
        self.list.push(Check {
            name: name.into(),
            expected: format!("{} ± {}", sig(expected), sig(tol)),
            observed: sig(observed),
            pass: (observed - expected).abs() <= tol,
        });
    }

    fn at_most(&mut self, name: impl Into<String>, bound: f64, observed: f64) {
        self.list.push(Check {
            name: name.into(),
            expected: format!("<= {}", sig(bound)),
            observed: sig(observed),
            pass: observed <= bound,
        });
    }

    fn above(&mut self, name: impl Into<String>, bound: f64, observed: f64) {
        self.list.push(Check {
            name: name.into(),
            expected: format!("> {}", sig(bound)),
            observed: sig(observed),
            pass: observed > bound,
        });
    }

    fn status(&mut self, name: impl Into<String>, status: Status) {
        self.list.push(Check {
            name: name.into(),
            expected: "Converged".into(),
            observed: status.to_string(),
            pass: status == Status::Converged,
        });
    }
}

fn with_overrides(p: TransportProblem, cli: &Cli) -> Result<TransportProblem> {
    let mut opts = p.options;
    if let Some(tol) = cli.tol {
        opts.tol = tol;
    }
    if let Some(n) = cli.max_iters {
        opts.max_iters = n;
    }
    Ok(p.with_options(opts).map_err(|e| InputError::new("", e))?)
}

fn dist(a: &Hermitian, b: &Hermitian) -> f64 {
    (a.matrix() - b.matrix()).norm()
}

/// Checks for one example; the closed forms come from the fixtures module.
pub fn example_checks(example: Example, params: ExampleParams, cli: &Cli) -> Result<Vec<Check>> {
    let bad = |e: qchan_core::Error| InputError::new("", e);
    let mut c = Checks { list: Vec::new() };
    match example {
        Example::Energy => {
            let eps = params.eps.unwrap_or(1.0);
            let j = params.j.unwrap_or(-1.0);
            let scale = j.abs().max(1.0);
            let flip = with_overrides(energy_problem(eps, j, true).map_err(bad)?, cli)?;
            let s = solve(&flip);
            c.status("constrained: status", s.status);
            c.close("constrained: cost = J", energy_constrained_cost(j), s.cost_value, 1e-5 * scale);
            c.at_most("constrained: |k* - Choi(sx)|", 1e-4, dist(s.kappa_star.kappa(), spin_flip_choi().kappa()));

            let free = with_overrides(energy_problem(eps, j, false).map_err(bad)?, cli)?;
            let s = solve(&free);
            c.status("unconstrained: status", s.status);
            let expected = energy_unconstrained_cost(eps, j);
            c.close("unconstrained: cost = -sqrt(J^2+eps^2/4)", expected, s.cost_value, 1e-5 * scale);
            let (low, high) = energy_negative_eigenvalues(eps, j);
            if expected - low > 1e-3 * scale {
                c.above("unconstrained: strict gap over -sqrt(J^2+eps^2)", low, s.cost_value);
            }

            let spectrum = free.cost.op.eigenvalues();
            let nearest = |x: f64| spectrum.iter().cloned().min_by(|a, b| (a - x).abs().total_cmp(&(b - x).abs())).unwrap();
            c.close("eigenvalue -sqrt(J^2+eps^2)", low, nearest(low), 1e-9 * scale);
            c.close("eigenvalue J", high, nearest(high), 1e-9 * scale);
            let psi1_entropy = entanglement_entropy(&energy_psi1(), free.dims).map_err(bad)?;
            let residual = (free.cost.matrix() * energy_psi1() - energy_psi1() * num_complex::Complex64::new(j, 0.0)).norm();
            c.at_most("psi1 is the J eigenvector", 1e-9 * scale, residual);
            c.close("psi1 entropy [bits]", 1.0, psi1_entropy, 1e-8);
        }
        Example::Time => {
            let ks = match params.k {
                Some(k) => vec![k],
                None => vec![0.5, 2.0],
            };
            for k in ks {
                let flip = with_overrides(time_problem(k, true).map_err(bad)?, cli)?;
                let s = solve(&flip);
                c.status(format!("k={}: status", sig(k)), s.status);
                c.close(format!("k={}: constrained cost", sig(k)), time_constrained_cost(k), s.cost_value, 1e-5);
                let expected = time_constrained_choi(k).map_err(bad)?;
                let label = if k <= 1.0 { "Choi(U2)" } else { "optimal Choi" };
                c.at_most(format!("k={}: |k* - {label}|", sig(k)), 1e-4, dist(s.kappa_star.kappa(), expected.kappa()));
                if k > 1.0 {
                    let p = decompose_elementary(&s.kappa_star).probabilities();
                    let (w1, w2) = time_decomposition_weights(k);
                    c.close(format!("k={}: weight of separable part", sig(k)), w1, p.get(1).copied().unwrap_or(0.0), 1e-4);
                    c.close(format!("k={}: weight of entangled part", sig(k)), w2, p.first().copied().unwrap_or(0.0), 1e-4);
                }
                let free = with_overrides(time_problem(k, false).map_err(bad)?, cli)?;
                let s = solve(&free);
                c.close(format!("k={}: unconstrained cost", sig(k)), 0.0, s.cost_value, 1e-6);
                let id = channel_to_choi(&KrausChannel::unitary(time_example_unitaries()[0].clone()).map_err(bad)?);
                c.at_most(format!("k={}: |k* - |W><W||", sig(k)), 1e-4, dist(s.kappa_star.kappa(), id.kappa()));
            }
        }
        Example::Mindisturb => {
            let r = params.r.unwrap_or(1);
            let m = params.m.unwrap_or(2);
            let cases = [
                (format!("spin r={r}"), spin_generator_set(r).map_err(bad)?),
                (format!("schwinger m={m}"), schwinger_generator_set(m).map_err(bad)?),
            ];
            for (name, set) in cases {
                let cost = cost_quadratic_generators(&set);
                let dim = set.m();
                c.at_most(format!("{name}: |C W|"), 1e-10, (cost.matrix() * omega(dim)).norm());
                let p = with_overrides(TransportProblem::unconstrained(cost), cli)?;
                let s = solve(&p);
                c.status(format!("{name}: status"), s.status);
                c.at_most(format!("{name}: optimal cost"), 1e-6, s.cost_value);
                c.at_most(
                    format!("{name}: |k* - |W><W||"),
                    1e-3,
                    dist(s.kappa_star.kappa(), &Hermitian::projector(&omega(dim))),
                );
            }
        }
    }
    Ok(c.list)
}

fn cmd_example(cli: &Cli, example: Example, params: ExampleParams, out: &mut dyn Write) -> Result<i32> {
    let checks = example_checks(example, params, cli)?;
    let pass = checks.iter().all(|c| c.pass);
    let rows: Vec<Vec<String>> = checks
        .iter()
        .map(|c| {
            vec![
                if c.pass { "PASS" } else { "FAIL" }.to_string(),
                c.name.clone(),
                c.expected.clone(),
                c.observed.clone(),
            ]
        })
        .collect();
    let name = format!("{example:?}").to_lowercase();
    let mut text = table(&["", "check", "expected", "observed"], &rows);
    writeln!(text, "{name}: {}", if pass { "all checks pass" } else { "some checks FAIL" })?;
    let outcome = ExampleOutcome {
        example: name,
        checks,
        pass,
    };
    emit(cli, &outcome, &text, out)?;
    Ok(if pass { EXIT_OK } else { EXIT_INPUT })
}

#[derive(Serialize)]
struct DecomposeOutput {
    dims: [usize; 2],
    transitions: Vec<TransitionRow>,
    degenerate_groups: Vec<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    total_cost: Option<f64>,
    weighted_entropy: f64,
}

fn cmd_decompose(
    cli: &Cli,
    choi: &Path,
    cost: Option<&Path>,
    overrides: Overrides,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32> {
    let cs = load_choi(choi)?;
    let cost = match cost {
        Some(path) => {
            let built = load_problem(path, overrides)?;
            warn(err, &built.warnings)?;
            if built.problem.dims != cs.dims() {
                return Err(InputError::new("dims", "cost and Choi state have different dims").into());
            }
            Some(built.problem.cost)
        }
        None => None,
    };
    let report = report_choi(&cs, cost.as_ref())?;
    let dims = cs.dims();
    let count = report.transitions.len();
    let mut text = format!(
        "Choi state on {} x {} levels, {count} transition{}\n",
        dims.m,
        dims.n,
        if count == 1 { "" } else { "s" }
    );
    text.push_str(&transition_table(&report));
    let output = DecomposeOutput {
        dims: [dims.m, dims.n],
        transitions: report.transitions.iter().map(TransitionRow::from).collect(),
        degenerate_groups: report.degenerate_groups.clone(),
        total_cost: report.total_cost,
        weighted_entropy: report.weighted_entropy,
    };
    emit(cli, &output, &text, out)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct VerifyOutput {
    stored_cost: f64,
    recomputed_cost: f64,
    stored_constraint_residuals: Vec<f64>,
    recomputed_constraint_residuals: Vec<f64>,
    reduction_residual: f64,
    min_eigenvalue: f64,
    consistent: bool,
}

fn cmd_verify(cli: &Cli, report: &Path, problem: &Path, overrides: Overrides, out: &mut dyn Write) -> Result<i32> {
    let stored: ReportFile = read_json(report)?;
    let built = load_problem(problem, overrides)?;
    let p = &built.problem;
    if stored.dims != [p.dims.m, p.dims.n] {
        return Err(InputError::new("dims", "report and problem have different dims").into());
    }
    let kappa = matrix_from_json(&stored.kappa_star, "kappa_star")?;
    if kappa.nrows() != p.dims.total() || kappa.ncols() != p.dims.total() {
        return Err(InputError::new("kappa_star", "matrix size does not match dims").into());
    }
    let kappa = Hermitian::new(kappa).map_err(|e| InputError::new("kappa_star", e))?;
    let check = verify_kappa(p, &kappa);

    let mut consistent = (check.cost - stored.optimal_cost).abs() <= REVERIFY_TOL
        && check.constraint_residuals.len() == stored.constraint_residuals.len();
    for (a, b) in check.constraint_residuals.iter().zip(&stored.constraint_residuals) {
        consistent &= (a - b).abs() <= REVERIFY_TOL;
    }

    let mut text = String::new();
    writeln!(text, "cost                stored {}  recomputed {}", sig(stored.optimal_cost), sig(check.cost))?;
    for (j, (a, b)) in check.constraint_residuals.iter().zip(&stored.constraint_residuals).enumerate() {
        writeln!(text, "constraint {j:<3}      stored {}  recomputed {}", sig(*b), sig(*a))?;
    }
    writeln!(text, "reduction residual  {}", sig(check.reduction_residual))?;
    writeln!(text, "min eigenvalue      {}", sig(check.min_eigenvalue))?;
    writeln!(text, "{}", if consistent { "report is consistent" } else { "report does NOT match" })?;
    let output = VerifyOutput {
        stored_cost: stored.optimal_cost,
        recomputed_cost: check.cost,
        stored_constraint_residuals: stored.constraint_residuals.clone(),
        recomputed_constraint_residuals: check.constraint_residuals.clone(),
        reduction_residual: check.reduction_residual,
        min_eigenvalue: check.min_eigenvalue,
        consistent,
    };
    emit(cli, &output, &text, out)?;
    Ok(if consistent { EXIT_OK } else { EXIT_INPUT })
}

fn cmd_sample(cli: &Cli, problem: &Path, seed: u64, overrides: Overrides, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let built = load_problem(problem, overrides)?;
    warn(err, &built.warnings)?;
    let p = &built.problem;
    let cs = match feasible_sample(p, seed) {
        Ok(cs) => cs,
        Err(e @ qchan_core::Error::Infeasible { .. }) => {
            writeln!(err, "error: {e}")?;
            return Ok(EXIT_INFEASIBLE);
        }
        Err(e @ qchan_core::Error::IterationLimit { .. }) => {
            writeln!(err, "error: {e}")?;
            return Ok(EXIT_MAX_ITERS);
        }
        Err(e) => return Err(e.into()),
    };
    let cost = p.cost.cost_of(cs.kappa());
    let dims = cs.dims();
    let file = ChoiFile {
        schema_version: Some(SCHEMA_VERSION.into()),
        dims: [dims.m, dims.n],
        kappa: crate::schema::matrix_to_json(cs.kappa().matrix()),
    };
    let text = format!("seed {seed}: feasible point with cost {}\n", sig(cost));
    emit(cli, &file, &text, out)?;
    Ok(EXIT_OK)
}
