use std::path::Path;
use std::process::{Command, Output};

fn ftqc(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ftqc"))
        .args(args)
        .current_dir(dir)
        .env_remove("FTQC_SEED")
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

const PLAN: &str = r#"{"parameters": {"eps0": 1e-10, "eps_th": 1e-9, "gate_count": 1e12, "p": 0.2, "p_hat": 0.4}}"#;

#[test]
fn plan_json_golden() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("plan.json"), PLAN).unwrap();
    let out = ftqc(dir.path(), &["plan", "--config", "plan.json"]);
    assert!(out.status.success());
    assert_eq!(
        stdout(&out),
        "{\n  \"alpha_required\": 0.2,\n  \"budget\": 0.1,\n  \"closed_form_levels\": 2.0,\n  \"eps_n\": 1e-13,\n  \"eps_qc\": 0.1,\n  \"levels\": 2\n}\n"
    );
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("plan.json"), PLAN).unwrap();
    let out = ftqc(dir.path(), &["plan", "--config", "plan.json", "--eps0", "1e-11", "--format", "csv"]);
    assert_eq!(stdout(&out), "levels,eps_n,eps_qc,budget,alpha_required,closed_form_levels\n1,1e-13,0.1,0.1,0.2,1.0\n");

    let out = ftqc(dir.path(), &["plan", "--config", "plan.json", "--levels", "2", "--out", "req.json"]);
    assert!(out.status.success() && out.stdout.is_empty());
    let req: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("req.json")).unwrap()).unwrap();
    assert_eq!(req["max_eps0"], 1e-10);
}

#[test]
fn tradeoff_csv_rows() {
    let dir = tempfile::tempdir().unwrap();
    // A tight budget: close to threshold the staircase climbs steeply.
    std::fs::write(
        dir.path().join("t.json"),
        r#"{"parameters": {"eps_th": 1e-3, "gate_count": 1e12, "p": 0.2, "p_hat": 0.201,
            "eps0_min": 1e-6, "eps0_max": 9.99999e-4, "points": 5}}"#,
    )
    .unwrap();
    let out = ftqc(dir.path(), &["tradeoff", "--config", "t.json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("eps0,levels,eps_qc,closed_form"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0], "1e-6,3,1e-15,2.03574471521");
    assert!(rows[4].starts_with("0.000999999,25,"));
}

#[test]
fn vote_modes() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("k.json"), r#"{"parameters": {"per_run_failure": 0.1, "target": 0.99}}"#).unwrap();
    let out = ftqc(dir.path(), &["vote", "--config", "k.json", "--format", "csv"]);
    assert_eq!(
        stdout(&out),
        "per_run_failure,target,repetitions,success_probability\n0.1,0.99,5,0.99144\n"
    );

    std::fs::write(dir.path().join("both.json"), r#"{"parameters": {"per_run_failure": 0.1, "target": 0.99, "repetitions": 3}}"#)
        .unwrap();
    assert_eq!(ftqc(dir.path(), &["vote", "--config", "both.json"]).status.code(), Some(2));
}

#[test]
fn verify_reports_per_input_records() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("v.json"),
        r#"{"parameters": {
            "circuit": {"qubits": 1, "gates": [{"name": "I", "targets": [0]}]},
            "computation": {"inputs": ["0", "1"], "outputs": ["0", "1"], "truth_table": {"0": "0", "1": "1"}},
            "noise": {"kind": "depolarizing", "strength": 0.2}}}"#,
    )
    .unwrap();
    let out = ftqc(dir.path(), &["verify", "--config", "v.json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["alpha"], 0.2);
    assert_eq!(report["bound_holds"], true);
    assert_eq!(report["per_input"][0]["actual_success"], 0.9);
    assert!(report.get("alpha_search").is_none());
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("typo.json"), r#"{"parameters": {"eps_zero": 1e-10}}"#).unwrap();
    for args in [["plan", "--config", "typo.json"], ["plan", "--config", "nope.json"]] {
        let out = ftqc(dir.path(), &args);
        assert_eq!(out.status.code(), Some(2));
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("ftqc plan: "));
    }
}
