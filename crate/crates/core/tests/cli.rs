use std::path::PathBuf;
use std::process::{Command, Output};

fn pstirling(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pstirling")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn temp_path(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("pstirling-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn stirling_rademacher_row() {
    let o = pstirling(&["stirling", "--dist", "rademacher", "--jmax", "6"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("j,m,re,im\n"));
    assert!(text.lines().any(|l| l == "4,2,3,0"));
    assert_eq!(text.lines().count(), 1 + 28);
}

#[test]
fn moments_rademacher_row() {
    let o = pstirling(&["moments", "--dist", "rademacher", "--n", "3", "--jmax", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l == "3,4,21"));
}

#[test]
fn cumulants_poisson_are_lambda() {
    let o = pstirling(&["cumulants", "--dist", "poisson", "--lambda", "5/2", "--jmax", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let rows: Vec<String> = stdout(&o).lines().skip(1).map(String::from).collect();
    assert_eq!(rows, (1..=5).map(|j| format!("{j},5/2,0")).collect::<Vec<_>>());
}

#[test]
fn levy_poisson_h4() {
    let o = pstirling(&["levy", "--process", "poisson", "--t", "2", "--jmax", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l == "2,4,7/2"));
}

#[test]
fn json_mirrors_csv() {
    let o = pstirling(&["moments", "--dist", "rademacher", "--n", "3", "--jmax", "4", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let rows: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[4]["n"], 3);
    assert_eq!(rows[4]["j"], 4);
    assert_eq!(rows[4]["value"], "21");
}

#[test]
fn float_mode_values() {
    let o = pstirling(&["moments", "--dist", "bernoulli", "--p", "1/4", "--n", "1", "--jmax", "1", "--mode", "float"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l == "1,1,0.25"));
}

#[test]
fn edgeworth_uniform_has_exact_column() {
    let o = pstirling(&["edgeworth", "--dist", "uniform_std", "--n", "8", "--K", "2", "--grid", "-1:1:0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("y,G,F_exact,edgeworth,abs_err"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 5);
    for row in &rows {
        assert!((row[2] - row[3]).abs() < 1e-3);
        assert!((row[4] - (row[2] - row[3]).abs()).abs() < 1e-15);
    }
    assert!((rows[2][2] - 0.5).abs() < 1e-14);
    assert!(stderr(&o).is_empty());
}

#[test]
fn edgeworth_lattice_warns() {
    let o = pstirling(&["edgeworth", "--dist", "rademacher", "--n", "9", "--grid", "0:1:1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("lattice"));
    assert!(stdout(&o).lines().nth(1).unwrap().split(',').nth(2) == Some(""));
}

#[test]
fn config_file_and_flag_override() {
    let cfg = temp_path("poisson.json");
    std::fs::write(&cfg, r#"{"dist": "poisson", "lambda": "2", "jmax": 3}"#).unwrap();
    let path = cfg.to_str().unwrap();
    let o = pstirling(&["cumulants", "--config", path]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 4);
    let o = pstirling(&["cumulants", "--config", path, "--jmax", "2"]);
    assert_eq!(stdout(&o), "j,re,im\n1,2,0\n2,2,0\n");
    let o = pstirling(&["cumulants", "--config", path, "--dist", "rademacher"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("both"));
}

#[test]
fn levy_process_from_config() {
    let cfg = temp_path("levy.json");
    std::fs::write(&cfg, r#"{"tau2": "1", "tstar_moments": ["1", "1", "1", "1", "1"], "t": "1/2"}"#).unwrap();
    let a = pstirling(&["levy", "--config", cfg.to_str().unwrap(), "--jmax", "4"]);
    let b = pstirling(&["levy", "--process", "poisson", "--t", "1/2", "--jmax", "4"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn out_file() {
    let out = temp_path("table.csv");
    let o = pstirling(&["stirling", "--dist", "point_mass", "--jmax", "4", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert!(std::fs::read_to_string(&out).unwrap().lines().any(|l| l == "4,2,7,0"));
}

#[test]
fn argument_errors_exit_two() {
    for args in [
        &["stirling"][..],
        &["stirling", "--dist", "cauchy"],
        &["stirling", "--dist", "bernoulli", "--p", "3/2"],
        &["edgeworth", "--dist", "uniform_std", "--grid", "0:1:0"],
        &["moments", "--dist", "rademacher", "--n", "x"],
        &["validate", "--suite", "nope"],
        &["frobnicate"],
    ] {
        let o = pstirling(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!stderr(&o).is_empty());
    }
}

#[test]
fn unwritable_output_exits_one() {
    let o = pstirling(&["stirling", "--dist", "rademacher", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn validate_exact_suite() {
    let o = pstirling(&["validate", "--suite", "stirling"]);
    assert_eq!(o.status.code(), Some(0));
    let reports: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let reports = reports.as_array().unwrap();
    assert!(!reports.is_empty());
    assert!(reports.iter().all(|r| r["pass"] == true && r["quantity"].is_string()));
}

#[test]
fn validate_all_seed_7() {
    let o = pstirling(&["validate", "--suite", "all", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn repeated_runs_identical() {
    let args = ["moments", "--dist", "uniform_std", "--transform", "hat", "--n", "1:6", "--jmax", "8"];
    assert_eq!(pstirling(&args).stdout, pstirling(&args).stdout);
}
