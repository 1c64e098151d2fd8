use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qchan_cli::report::ReportFile;
use qchan_cli::schema::{matrix_to_json, ChoiFile};
use qchan_core::fixtures::time_constrained_choi;
use serde_json::{json, Value};
use tempfile::TempDir;

fn qchan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qchan"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write(dir: &TempDir, name: &str, value: &Value) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, serde_json::to_string_pretty(value).unwrap()).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn c(re: f64) -> Value {
    json!([re, 0.0])
}

fn basis_state(dim: usize, i: usize) -> Value {
    let rows: Vec<Vec<Value>> = (0..dim)
        .map(|a| (0..dim).map(|b| c(if a == i && b == i { 1.0 } else { 0.0 })).collect())
        .collect();
    json!(rows)
}

fn time_flip(k: f64) -> Value {
    json!({
        "schema_version": "1",
        "dims": [2, 2],
        "cost": {"recipe": "time_example", "k": k},
        "constraints": [{"input": basis_state(2, 0), "output": basis_state(2, 1)}]
    })
}

fn solve_json(path: &Path, extra: &[&str]) -> (i32, Value) {
    let mut args = vec!["solve", s(path), "--format", "json"];
    args.extend_from_slice(extra);
    let out = qchan(&args);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap_or(Value::Null);
    (code(&out), v)
}

#[test]
fn solve_time_example() {
    let dir = TempDir::new().unwrap();
    let problem = write(&dir, "time.json", &time_flip(2.0));
    let report = dir.path().join("report.json");
    let out = qchan(&["solve", s(&problem), "--output", s(&report)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("optimal cost   1.75"), "{}", stdout(&out));

    let file: ReportFile = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(file.status, "Converged");
    assert!((file.optimal_cost - 1.75).abs() <= 1e-5);
    assert_eq!(file.transitions.len(), 2);
    assert_eq!(file.dims, [2, 2]);

    let verify = qchan(&["verify", s(&report), s(&problem)]);
    assert_eq!(code(&verify), 0, "{}{}", stdout(&verify), stderr(&verify));
    assert!(stdout(&verify).contains("report is consistent"));
}

#[test]
fn json_report_roundtrips_and_reverifies() {
    let dir = TempDir::new().unwrap();
    let problem = write(&dir, "time.json", &time_flip(3.0));
    let (exit, v) = solve_json(&problem, &[]);
    assert_eq!(exit, 0);
    let file: ReportFile = serde_json::from_value(v.clone()).unwrap();
    let again = serde_json::to_value(&file).unwrap();
    assert_eq!(again, v);

    // Tamper with the stored cost: verification must notice.
    let mut tampered = v.clone();
    tampered["optimal_cost"] = json!(file.optimal_cost + 1e-6);
    let bad = write(&dir, "tampered.json", &tampered);
    let out = qchan(&["verify", s(&bad), s(&problem)]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("does NOT match"));
}

#[test]
fn contradictory_constraints_exit_2() {
    let dir = TempDir::new().unwrap();
    let problem = write(
        &dir,
        "contra.json",
        &json!({
            "schema_version": "1",
            "dims": [2, 2],
            "cost": {"recipe": "time_example", "k": 1.0},
            "constraints": [
                {"input": basis_state(2, 0), "output": basis_state(2, 0)},
                {"input": basis_state(2, 0), "output": basis_state(2, 1)}
            ]
        }),
    );
    let (exit, v) = solve_json(&problem, &[]);
    assert_eq!(exit, 2);
    assert_eq!(v["status"], "Infeasible");
    assert_eq!(v["transitions"].as_array().unwrap().len(), 0);

    let out = qchan(&["sample", s(&problem)]);
    assert_eq!(code(&out), 2);
}

#[test]
fn iteration_budget_exits_3() {
    let dir = TempDir::new().unwrap();
    let problem = write(&dir, "time.json", &time_flip(2.0));
    let (exit, v) = solve_json(&problem, &["--max-iters", "2"]);
    assert_eq!(exit, 3);
    assert_eq!(v["status"], "MaxIters");
    assert_eq!(v["solver_meta"]["iterations"], 2);
}

#[test]
fn solver_section_is_honoured() {
    let dir = TempDir::new().unwrap();
    let mut problem = time_flip(2.0);
    problem["solver"] = json!({"max_iters": 2});
    let path = write(&dir, "time.json", &problem);
    assert_eq!(solve_json(&path, &[]).0, 3);
    // Command-line flags override the file.
    assert_eq!(solve_json(&path, &["--max-iters", "5000"]).0, 0);
}

#[test]
fn quadratic_generators_have_identity_optimum() {
    let dir = TempDir::new().unwrap();
    let problem = write(
        &dir,
        "spin.json",
        &json!({
            "schema_version": "1",
            "dims": [2, 2],
            "cost": {"recipe": "quadratic_generators", "generators": {"spin": 1}}
        }),
    );
    let (exit, v) = solve_json(&problem, &[]);
    assert_eq!(exit, 0);
    assert!(v["optimal_cost"].as_f64().unwrap().abs() <= 1e-6);
    let transitions = v["transitions"].as_array().unwrap();
    assert_eq!(transitions.len(), 1);
    assert!((transitions[0]["entanglement_entropy"].as_f64().unwrap() - 1.0).abs() <= 1e-8);
    assert_eq!(transitions[0]["is_channel"], true);
}

#[test]
fn explicit_generators_respect_the_check() {
    let dir = TempDir::new().unwrap();
    let z = json!([[c(1.0), c(0.0)], [c(0.0), c(-1.0)]]);
    let problem = write(
        &dir,
        "z.json",
        &json!({
            "schema_version": "1",
            "dims": [2, 2],
            "cost": {"recipe": "quadratic_generators", "generators": {"explicit": [z]}}
        }),
    );
    let out = qchan(&["solve", s(&problem)]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("cost.generators"), "{}", stderr(&out));
    let (exit, v) = solve_json(&problem, &["--skip-generation-check"]);
    assert_eq!(exit, 0);
    assert!(v["optimal_cost"].as_f64().unwrap().abs() <= 1e-6);
}

#[test]
fn other_recipes_solve() {
    let dir = TempDir::new().unwrap();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let recipes = [
        json!({"recipe": "energy_example", "eps": 1.0, "j": -1.0}),
        json!({"recipe": "observable_difference",
               "o_a": [[c(1.0), c(0.0)], [c(0.0), c(0.0)]],
               "o_b": [[c(0.0), c(0.0)], [c(0.0), c(1.0)]]}),
        json!({"recipe": "mixture", "terms": [
            {"cost": 1.0, "vector": [c(r), c(0.0), c(0.0), c(r)]},
            {"cost": -1.0, "vector": [c(0.0), c(r), c(r), c(0.0)]}]}),
        json!({"recipe": "raw", "matrix": [
            [c(1.0), c(0.0), c(0.0), c(0.0)],
            [c(0.0), c(0.0), c(0.0), c(0.0)],
            [c(0.0), c(0.0), c(0.0), c(0.0)],
            [c(0.0), c(0.0), c(0.0), c(1.0)]]}),
        json!({"recipe": "weighted_sum", "terms": [
            {"cost": {"recipe": "time_example", "k": 1.0}},
            {"weight": 0.5, "cost": {"recipe": "energy_example"}}]}),
    ];
    for (i, cost) in recipes.into_iter().enumerate() {
        let problem = write(&dir, &format!("r{i}.json"), &json!({"schema_version": "1", "dims": [2, 2], "cost": cost}));
        let (exit, v) = solve_json(&problem, &[]);
        assert_eq!(exit, 0, "recipe {i}");
        assert_eq!(v["status"], "Converged");
    }

    // The mixture spans only two of four directions; a warning is printed.
    let problem = dir.path().join("r2.json");
    let out = qchan(&["solve", s(&problem)]);
    assert!(stderr(&out).contains("span only 2 of 4"), "{}", stderr(&out));

    // The raw cost diag(1,0,0,1) is minimized by sending |0> to |1> and |1> to |0>.
    let (_, v) = solve_json(&dir.path().join("r3.json"), &[]);
    assert!(v["optimal_cost"].as_f64().unwrap().abs() <= 1e-6);
}

#[test]
fn cost_spectra() {
    let out = qchan(&["cost", "energy", "--eps", "1", "--j", "-1", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let eig: Vec<f64> = v["eigenvalues"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    let ent: Vec<f64> = v["entanglement_entropy"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert!((eig[0] + 2f64.sqrt()).abs() <= 1e-9);
    assert!((eig[1] + 1.0).abs() <= 1e-9);
    assert!((ent[1] - 1.0).abs() <= 1e-8);
    assert!(ent[0] < 0.99);

    let out = qchan(&["cost", "time", "--k", "1", "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let eig: Vec<f64> = v["eigenvalues"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    for (got, want) in eig.iter().zip([0.0, 1.0, 2.0, 3.0]) {
        assert!((got - want).abs() <= 1e-9, "{eig:?}");
    }
    for h in v["entanglement_entropy"].as_array().unwrap() {
        assert!((h.as_f64().unwrap() - 1.0).abs() <= 1e-8);
    }

    let out = qchan(&["cost", "spin", "--r", "2", "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v["eigenvalues"][0].as_f64().unwrap().abs() <= 1e-9);
    assert_eq!(v["degenerate"][0], false);
    assert!((v["entanglement_entropy"][0].as_f64().unwrap() - 2.0).abs() <= 1e-8);

    let out = qchan(&["cost", "energy", "--eps", "-1"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn cost_output_is_a_problem_file() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("cost.json");
    assert_eq!(code(&qchan(&["cost", "time", "--k", "2", "--output", s(&path)])), 0);
    let (exit, v) = solve_json(&path, &[]);
    assert_eq!(exit, 0);
    assert!(v["optimal_cost"].as_f64().unwrap().abs() <= 1e-6);
}

#[test]
fn worked_examples_pass() {
    for args in [
        vec!["example", "energy"],
        vec!["example", "time"],
        vec!["example", "time", "--k", "0.5"],
        vec!["example", "mindisturb"],
    ] {
        let out = qchan(&args);
        assert_eq!(code(&out), 0, "{args:?}\n{}", stdout(&out));
        assert!(!stdout(&out).contains("FAIL"));
    }
    let out = qchan(&["example", "nonsense"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn worked_example_failures_exit_1() {
    // An iteration budget of one cannot reach the closed-form optimum.
    let out = qchan(&["example", "time", "--k", "2", "--max-iters", "1"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("FAIL"));
}

fn choi_file(dir: &TempDir, name: &str, dims: [usize; 2], kappa: &qchan_core::linalg::CMatrix) -> PathBuf {
    let file = ChoiFile {
        schema_version: Some("1".into()),
        dims,
        kappa: matrix_to_json(kappa),
    };
    write(dir, name, &serde_json::to_value(file).unwrap())
}

#[test]
fn decompose_examples() {
    let dir = TempDir::new().unwrap();
    let k2 = time_constrained_choi(2.0).unwrap();
    let path = choi_file(&dir, "k2.json", [2, 2], k2.kappa().matrix());
    let out = qchan(&["decompose", s(&path), "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let t = v["transitions"].as_array().unwrap();
    assert_eq!(t.len(), 2);
    assert!((t[0]["probability"].as_f64().unwrap() - 0.625).abs() <= 1e-9);
    assert!((t[1]["probability"].as_f64().unwrap() - 0.375).abs() <= 1e-9);

    let omega = qchan_core::linalg::Hermitian::projector(&qchan_core::choi::omega(2));
    let path = choi_file(&dir, "omega.json", [2, 2], omega.matrix());
    let v: Value = serde_json::from_str(&stdout(&qchan(&["decompose", s(&path), "--format", "json"]))).unwrap();
    assert_eq!(v["transitions"].as_array().unwrap().len(), 1);
    assert_eq!(v["transitions"][0]["is_channel"], true);
    assert!((v["transitions"][0]["probability"].as_f64().unwrap() - 1.0).abs() <= 1e-12);

    let mixed = qchan_core::linalg::CMatrix::identity(4, 4).scale(0.25);
    let path = choi_file(&dir, "mixed.json", [2, 2], &mixed);
    let out = qchan(&["decompose", s(&path)]);
    let v: Value = serde_json::from_str(&stdout(&qchan(&["decompose", s(&path), "--format", "json"]))).unwrap();
    assert_eq!(v["transitions"].as_array().unwrap().len(), 4);
    assert_eq!(v["degenerate_groups"], json!([[0, 1, 2, 3]]));
    assert_eq!(stdout(&out).matches("degenerate 1").count(), 4);
}

#[test]
fn decompose_with_cost_and_report_input() {
    let dir = TempDir::new().unwrap();
    let problem = write(&dir, "time.json", &time_flip(2.0));
    let report = dir.path().join("report.json");
    assert_eq!(code(&qchan(&["solve", s(&problem), "--output", s(&report)])), 0);
    let out = qchan(&["decompose", s(&report), "--cost", s(&problem), "--format", "json"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((v["total_cost"].as_f64().unwrap() - 1.75).abs() <= 1e-6);
    assert!((v["transitions"][1]["cost"].as_f64().unwrap() - 1.0).abs() <= 1e-6);
}

#[test]
fn decompose_rejects_non_choi_states() {
    let dir = TempDir::new().unwrap();
    let mut bad = qchan_core::linalg::CMatrix::zeros(4, 4);
    bad[(0, 0)] = num_complex::Complex64::new(0.5, 0.0);
    bad[(1, 1)] = num_complex::Complex64::new(0.5, 0.0);
    let path = choi_file(&dir, "bad.json", [2, 2], &bad);
    let out = qchan(&["decompose", s(&path)]);
    assert_eq!(code(&out), 1);
    let err = stderr(&out);
    assert!(err.contains("kappa") && err.contains("not maximally mixed") && err.contains("residual"), "{err}");

    let mut negative = qchan_core::linalg::CMatrix::identity(4, 4).scale(0.25);
    negative[(0, 3)] = num_complex::Complex64::new(0.5, 0.0);
    negative[(3, 0)] = num_complex::Complex64::new(0.5, 0.0);
    let path = choi_file(&dir, "neg.json", [2, 2], &negative);
    let err = stderr(&qchan(&["decompose", s(&path)]));
    assert!(err.contains("positive semidefinite"), "{err}");
}

#[test]
fn sample_is_seeded_and_feasible() {
    let dir = TempDir::new().unwrap();
    let problem = write(&dir, "time.json", &time_flip(2.0));
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    assert_eq!(code(&qchan(&["sample", s(&problem), "--seed", "5", "--output", s(&a)])), 0);
    assert_eq!(code(&qchan(&["sample", s(&problem), "--seed", "5", "--output", s(&b)])), 0);
    assert_eq!(std::fs::read_to_string(&a).unwrap(), std::fs::read_to_string(&b).unwrap());
    let out = qchan(&["decompose", s(&a), "--cost", s(&problem)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
}

#[test]
fn malformed_files_name_the_field() {
    let dir = TempDir::new().unwrap();
    let good = time_flip(2.0);
    let mut cases: Vec<(Value, &str)> = Vec::new();

    let mut v = good.clone();
    v["schema_version"] = json!("2");
    cases.push((v, "schema_version"));
    let mut v = good.clone();
    v["dims"] = json!([2]);
    cases.push((v, "dims"));
    let mut v = good.clone();
    v["cost"] = json!({"recipe": "teleport"});
    cases.push((v, "cost"));
    let mut v = good.clone();
    v["cost"] = json!({"recipe": "time_example"});
    cases.push((v, "cost"));
    let mut v = good.clone();
    v["cost"] = json!({"recipe": "time_example", "k": -1.0});
    cases.push((v, "cost"));
    let mut v = good.clone();
    v["constraints"][0]["output"][1][1] = json!([1.0]);
    cases.push((v, "constraints[0].output"));
    let mut v = good.clone();
    v["constraints"][0]["output"] = basis_state(3, 0);
    cases.push((v, "constraints[0].output"));
    let mut v = good.clone();
    v["constraints"][0]["input"][0][0] = json!([2.0, 0.0]);
    cases.push((v, "constraints[0].input"));
    let mut v = good.clone();
    v["constraints"][0]["input"][0][1] = json!([0.3, 0.0]);
    cases.push((v, "constraints[0].input"));
    let mut v = good.clone();
    v["solver"] = json!({"tol": -1.0});
    cases.push((v, "solver"));
    let mut v = good.clone();
    v["solver"] = json!({"over_relaxation": 2.5});
    cases.push((v, "solver"));
    let mut v = good.clone();
    v["extra"] = json!(1);
    cases.push((v, "extra"));
    cases.push((json!({"schema_version": "1", "dims": [2, 3], "cost": {"recipe": "energy_example"}}), "cost"));
    cases.push((json!({"schema_version": "1", "dims": [0, 2], "cost": {"recipe": "energy_example"}}), "dims"));
    cases.push((json!({"schema_version": "1", "dims": [2, 2], "cost": {"recipe": "raw", "matrix": []}}), "cost.matrix"));
    cases.push((json!({"schema_version": "1", "dims": [2, 2], "cost": {"recipe": "weighted_sum", "terms": []}}), "cost.terms"));
    cases.push((json!({"schema_version": "1", "dims": [2, 2], "cost": {"recipe": "mixture", "terms": [{"cost": 1.0, "vector": [[1.0, 0.0]]}]}}), "cost.terms[0].vector"));

    for (i, (value, field)) in cases.into_iter().enumerate() {
        let path = write(&dir, &format!("bad{i}.json"), &value);
        let out = qchan(&["solve", s(&path)]);
        assert_eq!(code(&out), 1, "case {i}: {}", stderr(&out));
        assert!(stderr(&out).contains(field), "case {i}: expected {field:?} in {}", stderr(&out));
    }

    let path = dir.path().join("garbage.json");
    std::fs::write(&path, "{ not json").unwrap();
    let out = qchan(&["solve", s(&path)]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("line 1"), "{}", stderr(&out));
    let out = qchan(&["solve", "/nonexistent/problem.json"]);
    assert_eq!(code(&out), 1);
}
