use std::path::Path;
use std::process::Command;

use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_kahler-lab");

fn run(dir: &Path, cmd: &str, config: &str, extra: &[&str]) -> (i32, String) {
    let cfg = dir.join("lab.toml");
    std::fs::write(&cfg, config).unwrap();
    let out = Command::new(BIN)
        .arg(cmd)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .args(extra)
        .output()
        .unwrap();
    let text = String::from_utf8_lossy(&out.stdout).to_string() + &String::from_utf8_lossy(&out.stderr);
    (out.status.code().unwrap(), text)
}

#[test]
fn verify_operator_passes_on_defaults() {
    let dir = TempDir::new().unwrap();
    let (code, text) = run(dir.path(), "verify-operator", "[verify]\nsamples = 300\n", &[]);
    assert_eq!(code, 0, "{text}");
    assert!(text.starts_with("PASS verify-operator"));
    assert!(dir.path().join("out/verify_operator.json").exists());
}

#[test]
fn first_entry_fixture_is_a_violation() {
    let dir = TempDir::new().unwrap();
    let cfg = "[verify]\nsamples = 300\n[[verify.operators]]\nkind = \"first_entry\"\nn = 3\n";
    let (code, text) = run(dir.path(), "verify-operator", cfg, &[]);
    assert_eq!(code, 1, "{text}");
    assert!(text.starts_with("FAIL"));
}

#[test]
fn bad_configs_exit_with_config_error() {
    let dir = TempDir::new().unwrap();
    for cfg in ["[background]\nt = [0.0]\n", "[audit]\ns_fractions = [-0.5]\n", "not toml at all ["] {
        let (code, text) = run(dir.path(), "proof-audit", cfg, &[]);
        assert_eq!(code, 2, "{cfg}: {text}");
    }
    let (code, _) = run(dir.path(), "sweep", "", &["--grid", "7"]);
    assert_eq!(code, 2);
}

#[test]
fn starved_solver_exits_with_solver_failure() {
    let dir = TempDir::new().unwrap();
    let (code, text) = run(dir.path(), "solve-ma", "[solver]\nmax_iterations = 1\n", &["--grid", "8"]);
    assert_eq!(code, 3, "{text}");
}

#[test]
fn trivial_sweep_passes_and_writes_outputs() {
    let dir = TempDir::new().unwrap();
    let cfg = "[background]\nchi_diag = [0.0, 0.0]\nt = [1.0]\n[sampling]\ncount = 1\namplitude = 0.0\n";
    let (code, text) = run(dir.path(), "sweep", cfg, &["--grid", "8", "--jobs", "1", "--seed", "3"]);
    assert_eq!(code, 0, "{text}");
    let csv = std::fs::read_to_string(dir.path().join("out/sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
    assert!(dir.path().join("out/sweep_summary.json").exists());
}

#[test]
fn proof_audit_ledger_lists_every_chain_constant() {
    let dir = TempDir::new().unwrap();
    let cfg = "[audit]\nt = [1.0]\ns_fractions = [0.4]\nsharpness = [8.0, 32.0]\nprofile_levels = 8\n";
    let (code, text) = run(dir.path(), "proof-audit", cfg, &[]);
    assert_eq!(code, 0, "{text}");
    let ledger: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/ledger.json")).unwrap()).unwrap();
    let names: Vec<&str> =
        ledger[0]["constants"].as_array().unwrap().iter().map(|e| e["name"].as_str().unwrap()).collect();
    let wanted = "gamma kappa c_ratio K C_0 C_X beta epsilon_coef Lambda_coef C_p_young C_1 C_3 C_4 C_5 s_bar C_6 C_7 C_8 C_e C_9 C_10 alpha C_T";
    for want in wanted.split(' ') {
        assert!(names.contains(&want), "missing {want}");
    }
    for e in ledger[0]["constants"].as_array().unwrap() {
        assert!(e["formula_id"].is_string() && e["paper_step"].is_string() && e["provenance"].is_string());
    }
}
