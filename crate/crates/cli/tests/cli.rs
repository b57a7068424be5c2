use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn poincare(args: &[&str]) -> Output {
    poincare_env(args, &[])
}

fn poincare_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_poincare"));
    cmd.args(args);
    for (k, _) in std::env::vars().filter(|(k, _)| k.starts_with("POINCARE_")) {
        cmd.env_remove(k);
    }
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn schema_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../schemas")
}

fn load(name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(schema_dir().join(name)).unwrap()).unwrap()
}

fn validator(name: &str) -> jsonschema::Validator {
    let files = [
        "certificate.schema.json",
        "weight.schema.json",
        "planar_weight.schema.json",
        "polygon.schema.json",
        "decomposition.schema.json",
        "slicing_report.schema.json",
    ];
    let registry = jsonschema::Registry::new()
        .extend(files.map(|f| (format!("https://poincare.local/schemas/{f}"), load(f))))
        .and_then(|b| b.prepare())
        .expect("schemas register");
    jsonschema::options()
        .with_registry(&registry)
        .build(&load(name))
        .expect("schema compiles")
}

fn assert_valid(name: &str, instance: &Value) {
    let v = validator(name);
    let errors: Vec<String> = v
        .iter_errors(instance)
        .map(|e| format!("{} at {}", e, e.instance_path()))
        .collect();
    assert!(errors.is_empty(), "{name}: {errors:?}");
}

#[test]
fn pip_prints_pi() {
    let o = poincare(&["pip", "--p", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "3.141592653589793\n");
}

#[test]
fn constant_weight_eigenvalue_is_sharp() {
    let pi3 = stdout(&poincare(&["pip", "--p", "3"]))
        .trim()
        .parse::<f64>()
        .unwrap();
    let o = poincare(&["eig1d", "--weight", "constant", "--p", "3", "--L", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let lambda: f64 = stdout(&o).trim().parse().unwrap();
    assert!((lambda / pi3.powi(3) - 1.0).abs() < 1e-6);
}

#[test]
fn solvers_agree_through_the_registry() {
    let run = |solver: &str| -> f64 {
        let o = poincare(&[
            "eig1d",
            "--weight",
            "exponential",
            "--kappa",
            "-2",
            "--solver",
            solver,
            "--format",
            "json",
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert_valid("certificate.schema.json", &v["certificate"]);
        v["lambda"].as_f64().unwrap()
    };
    let exact = 1.0 + std::f64::consts::PI.powi(2);
    assert!((run("shooting") / exact - 1.0).abs() < 1e-8);
    assert!((run("riccati") / exact - 1.0).abs() < 1e-8);
    assert!((run("fem") / exact - 1.0).abs() < 1e-4);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["pip", "--p", "0.5"],
        vec!["pip"],
        vec!["eig1d", "--solver", "nope"],
        vec!["eig1d", "--L", "-1"],
        vec!["verify-prop", "--seeds", "5..2"],
        vec!["verify-prop", "--seeds", "x"],
        vec!["slice", "--epsilon", "0"],
        vec!["slice", "--format", "csv"],
        vec!["verify-2d", "--mesh-h", "0"],
        vec!["nonsense"],
    ] {
        let o = poincare(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn verify_prop_is_deterministic_and_valid() {
    let args = [
        "verify-prop",
        "--seeds",
        "1..3",
        "--p",
        "1.5,2,3",
        "--subsample",
        "0",
    ];
    let a = poincare(&args);
    let b = poincare(&args);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let lines: Vec<Value> = stdout(&a)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 9);
    for l in &lines {
        assert_valid("certificate.schema.json", l);
        assert_eq!(l["pass"], Value::Bool(true));
    }
    // `a..b` and `a..=b` name the same seeds.
    let c = poincare(&[
        "verify-prop",
        "--seeds",
        "1..=3",
        "--p",
        "1.5,2,3",
        "--subsample",
        "0",
    ]);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn flags_override_environment_override_defaults() {
    let pi3 = "3.0469919990461722\n";
    assert_eq!(stdout(&poincare_env(&["pip"], &[("POINCARE_P", "3")])), pi3);
    assert_eq!(
        stdout(&poincare_env(&["pip", "--p", "2"], &[("POINCARE_P", "3")])),
        "3.141592653589793\n"
    );
    let json = poincare_env(&["pip", "--p", "2"], &[("POINCARE_FORMAT", "json")]);
    let v: Value = serde_json::from_str(&stdout(&json)).unwrap();
    assert_eq!(v["pi_p"].as_f64(), Some(std::f64::consts::PI));
}

#[test]
fn output_file_matches_stdout() {
    let dir = std::env::temp_dir().join(format!("poincare-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("certs.jsonl");
    let args = [
        "verify-prop",
        "--suite",
        "exponential",
        "--kappas",
        "-1,1",
        "--p",
        "2",
    ];
    let o = poincare(&args);
    let mut with_file: Vec<&str> = args.to_vec();
    let p = path.to_str().unwrap();
    with_file.extend(["--output", p]);
    let f = poincare(&with_file);
    assert_eq!(f.status.code(), Some(0));
    assert!(f.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), o.stdout);

    let r = poincare(&["report", p]);
    assert_eq!(r.status.code(), Some(0));
    let csv = stdout(&r);
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "kind,p,scale,lambda,bound,margin,pass");
    assert_eq!(rows.len(), 3);
    assert!(rows[1..]
        .iter()
        .all(|r| r.starts_with("lemma_exponential,2,1,") && r.ends_with(",true")));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn failing_certificates_exit_1_and_are_named() {
    let o = poincare(&[
        "verify-prop",
        "--seeds",
        "4",
        "--p",
        "2",
        "--subsample",
        "0",
    ]);
    let mut line: Value = serde_json::from_str(stdout(&o).lines().next().unwrap()).unwrap();
    line["pass"] = Value::Bool(false);
    let dir = std::env::temp_dir().join(format!("poincare-fail-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.jsonl");
    std::fs::write(&path, format!("{line}\n")).unwrap();
    let r = poincare(&["report", path.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(1));
    assert!(stdout(&r).contains(",false"));
    let err = stderr(&r);
    assert!(err.contains("1 certificate(s) failed"), "{err}");
    assert!(err.contains("proposition_1d"), "{err}");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn slice_json_and_svg() {
    let args = [
        "slice",
        "--polygon",
        "random:2",
        "--epsilon",
        "0.3",
        "--ux",
        "1",
        "--uy",
        "0.5",
    ];
    let o = poincare(&args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(o.stdout, poincare(&args).stdout);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_valid("decomposition.schema.json", &v);
    let slices = v["decomposition"]["slices"].as_array().unwrap();
    assert!(slices.len() > 1);
    assert!(slices.iter().all(|s| s["width"].as_f64().unwrap() <= 0.3));

    let mut svg_args = args.to_vec();
    svg_args.extend(["--format", "svg"]);
    let svg = stdout(&poincare(&svg_args));
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches("<polygon").count(), slices.len());
}

#[test]
fn slice_certify_reports_every_slice() {
    let o = poincare(&["slice", "--epsilon", "0.4,0.2", "--certify"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_valid("slicing_report.schema.json", &v);
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
    let slices: u64 = v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["slices"].as_u64().unwrap())
        .sum();
    assert_eq!(v["certificates"].as_array().unwrap().len() as u64, slices);
}

#[test]
fn verify_2d_square_and_seeds() {
    let o = poincare(&["verify-2d", "--mesh-h", "0.1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_valid("certificate.schema.json", &v);
    assert_eq!(v["kind"], "theorem_2d");
    let lambda = v["computed_lambda"].as_f64().unwrap();
    assert!(lambda > std::f64::consts::PI.powi(2));

    let b = poincare(&["verify-2d", "--seeds", "0..1", "--format", "csv"]);
    assert_eq!(b.status.code(), Some(0), "{}", stderr(&b));
    assert_eq!(stdout(&b).lines().count(), 3);
}

#[test]
fn weight_files_round_trip_through_the_schema() {
    let dir = std::env::temp_dir().join(format!("poincare-weight-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let weight = serde_json::json!({
        "family": "product",
        "params": { "factors": [
            { "family": "log_quadratic", "params": { "a": 2.0, "m": 0.3 } },
            { "family": "piecewise_log_linear", "params": { "breakpoints": [0.0, 0.5, 1.0], "logvalues": [0.0, 0.5, 0.2] } }
        ] },
        "L": 1.0
    });
    assert_valid("weight.schema.json", &weight);
    let path = dir.join("w.json");
    std::fs::write(&path, weight.to_string()).unwrap();
    let o = poincare(&[
        "oracle1d",
        "--weight-file",
        path.to_str().unwrap(),
        "--nodes",
        "801",
        "--limit",
        "1e-3",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_valid("certificate.schema.json", &v["certificate"]);
    assert_eq!(v["weight"], weight);

    // Increasing log-slopes are not log-concave.
    let bad = serde_json::json!({
        "family": "piecewise_log_linear",
        "params": { "breakpoints": [0.0, 0.5, 1.0], "logvalues": [0.0, 0.1, 1.0] },
        "L": 1.0
    });
    std::fs::write(&path, bad.to_string()).unwrap();
    let o = poincare(&["eig1d", "--weight-file", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();

    let planar =
        serde_json::json!({ "family": "gaussian", "params": { "a": 1.5, "center": [0.2, 0.1] } });
    assert_valid("planar_weight.schema.json", &planar);
    assert_valid(
        "polygon.schema.json",
        &serde_json::json!([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]),
    );
}

#[test]
fn schemas_reject_malformed_records() {
    let cert = validator("certificate.schema.json");
    assert!(!cert.is_valid(&serde_json::json!({ "kind": "proposition_1d" })));
    let o = poincare(&[
        "verify-prop",
        "--seeds",
        "0",
        "--p",
        "2",
        "--subsample",
        "0",
    ]);
    let mut line: Value = serde_json::from_str(stdout(&o).lines().next().unwrap()).unwrap();
    assert!(cert.is_valid(&line));
    line["kind"] = Value::from("lemma");
    assert!(!cert.is_valid(&line));
    let weight = validator("weight.schema.json");
    assert!(!weight.is_valid(&serde_json::json!({ "family": "constant", "params": { "c": 1.0 } })));
    assert!(!weight
        .is_valid(&serde_json::json!({ "family": "power", "params": { "alpha": 1.0 }, "L": 1.0 })));
    assert!(
        !validator("polygon.schema.json").is_valid(&serde_json::json!([[0.0, 0.0], [1.0, 0.0]]))
    );
}
