use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn mahler(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mahler")).args(args).output().expect("runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn last_value(o: &Output) -> String {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    stdout(o).lines().last().unwrap().split_once(',').unwrap().1.to_string()
}

#[test]
fn rational_orbits() {
    let o = mahler(&["orbit", "--system", "somos4", "--mode", "rational", "--init", "1,1,1,1", "--n", "13"]);
    assert_eq!(last_value(&o), "83313");
    let o = mahler(&["orbit", "--system", "markoff", "--mode", "rational", "--init", "1,1,1", "--n", "9"]);
    assert_eq!(last_value(&o), "48928105");
    let o = mahler(&["orbit", "--recurrence", "x[n+2]*x[n] = x[n+1]^2 + 1", "--init", "1/2,3", "--n", "4"]);
    assert_eq!(last_value(&o), "401/3");
}

#[test]
fn lyness_is_five_periodic() {
    let o = mahler(&["orbit", "--system", "lyness", "--mode", "symbolic", "--n", "7"]);
    assert!(o.status.success());
    let rows: Vec<String> = stdout(&o).lines().skip(1).map(|l| l.split_once(',').unwrap().1.to_string()).collect();
    assert_eq!(rows.len(), 7);
    assert_eq!(rows[5], rows[0]);
    assert_eq!(rows[6], rows[1]);
    assert_eq!(rows[5], "\"x1\"");
}

#[test]
fn symbolic_budget_truncates_with_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("orbit.csv");
    let o = mahler(&["orbit", "--system", "rank2:3", "--mode", "symbolic", "--n", "12", "--max-terms", "50", "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let csv = fs::read_to_string(&out).unwrap();
    assert!(csv.lines().count() > 3 && csv.lines().count() < 13);
    let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("orbit.csv.meta.json")).unwrap()).unwrap();
    assert!(meta["truncated"].as_str().unwrap().contains("budget"));
}

#[test]
fn closed_forms() {
    let o = mahler(&["closed-form", "smyth", "mx4:2", "rank2-entropy:3", "markoff-x5"]);
    assert!(o.status.success());
    let lines: Vec<String> = stdout(&o).lines().map(String::from).collect();
    assert_eq!(lines, ["0.323065947219", "0.646131894439", "0.962423650119", "0.646131894439"]);
    let o = mahler(&["closed-form", "mx5:3", "cstar:60", "somos-x6"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 3);
}

#[test]
fn unknown_names_are_config_errors() {
    let o = mahler(&["closed-form", "apery"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    for name in ["smyth", "mx4:R", "mx5:R", "cstar:M", "rank2-entropy:R", "markoff-x5", "somos-x6"] {
        assert!(err.contains(name), "{err}");
    }
    assert_eq!(mahler(&["orbit", "--system", "nope"]).status.code(), Some(2));
    assert_eq!(mahler(&["mahler", "--system", "lyness", "--method", "reduced"]).status.code(), Some(2));
    assert_eq!(mahler(&["orbit", "--system", "markoff", "--init", "1,2"]).status.code(), Some(2));
    assert_eq!(mahler(&["mahler", "--system", "hv", "--param", "b=torus"]).status.code(), Some(2));
}

fn run_mahler(dir: &Path, name: &str, args: &[&str], threads: &str) -> (String, serde_json::Value) {
    let out = dir.join(name);
    let mut full: Vec<&str> = args.to_vec();
    full.extend(["-o", out.to_str().unwrap()]);
    let o = Command::new(env!("CARGO_BIN_EXE_mahler")).args(&full).env("MAHLER_THREADS", threads).output().unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let meta = fs::read_to_string(dir.join(format!("{name}.meta.json"))).unwrap();
    (fs::read_to_string(out).unwrap(), serde_json::from_str(&meta).unwrap())
}

#[test]
fn mahler_runs_are_reproducible_from_the_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["mahler", "--system", "rank2:2", "--samples", "3000", "--n", "30", "--seed", "7"];
    let (a, meta) = run_mahler(dir.path(), "a.csv", &args, "1");
    let (b, _) = run_mahler(dir.path(), "b.csv", &args, "1");
    let (c, _) = run_mahler(dir.path(), "c.csv", &args, "3");
    assert_eq!(a, b);
    assert_eq!(a, c);
    assert!(a.starts_with("n,value,stderr,skipped,samples_used\n"));
    assert_eq!(a.lines().count(), 31);
    assert_eq!(meta["schema_version"], 1);
    assert_eq!(meta["sampler"]["rng_seed"], 7);

    let rerun: Vec<String> = meta["rerun"].as_array().unwrap().iter().map(|v| v.as_str().unwrap().to_string()).collect();
    let rerun: Vec<&str> = rerun.iter().map(String::as_str).collect();
    let (d, _) = run_mahler(dir.path(), "d.csv", &rerun, "2");
    assert_eq!(a, d);
}

#[test]
fn reduced_method_and_frozen_parameter() {
    let dir = tempfile::tempdir().unwrap();
    let (csv, meta) = run_mahler(dir.path(), "m.csv", &["mahler", "--system", "markoff", "--method", "reduced", "--n", "12", "--samples", "500"], "1");
    assert_eq!(csv.lines().count(), 13);
    assert_eq!(meta["config"]["method"], "reduced");
    let (_, meta) = run_mahler(dir.path(), "hv.csv", &["mahler", "--system", "hv", "--param", "a=torus", "--n", "7", "--samples", "500"], "1");
    assert_eq!(meta["torus_dim"], 6);
    assert_eq!(meta["params"][0], "torus");
    let (_, meta) = run_mahler(dir.path(), "hv1.csv", &["mahler", "--system", "hv", "--param", "a=1", "--n", "7", "--samples", "500"], "1");
    assert_eq!(meta["torus_dim"], 5);
}

#[test]
fn entropy_report_json() {
    let o = mahler(&[
        "entropy", "--system", "rank2:3", "--format", "json", "--samples", "500", "--mahler-n", "30", "--degree-n", "20", "--height-n",
        "14",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["schema_version"], 1);
    assert!((r["exact_reference"].as_f64().unwrap() - 0.962_423_650_119).abs() < 1e-11);
    assert!(r["algebraic"]["fit"]["slope"].as_f64().is_some());
}

#[test]
fn a2_seed_has_period_five() {
    let dir = tempfile::tempdir().unwrap();
    let seed = dir.path().join("a2.json");
    fs::write(&seed, r#"{"n": 2, "matrix": [0, 1, -1, 0]}"#).unwrap();
    let out = dir.path().join("final.json");
    let o = mahler(&[
        "cluster", "--seed", seed.to_str().unwrap(), "--sequence", "1,2,1,2,1", "--check-period", "-o", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("period 5"), "{}", stdout(&o));
    let fin: serde_json::Value = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(fin["cluster"], serde_json::json!(["x2", "x1"]));
    let o = mahler(&["cluster", "--builtin", "rank2:3", "--sequence", "1,2,1,2,1,2", "--check-period"]);
    assert!(stdout(&o).contains("no return"));
}
