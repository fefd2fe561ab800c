//! End-to-end tests of the `pir` binary: exit codes, output schemas, and
//! determinism.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn pir(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pir"))
        .args(args)
        .output()
        .expect("spawning pir")
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write_db16(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("db16.txt");
    std::fs::write(&path, "16\n1011001110001111\n").unwrap();
    path
}

#[test]
fn unknown_subcommand_exits_2() {
    let out = pir(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_required_flag_exits_2() {
    let out = pir(&["qdecode", "--b", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_error_in_params_exits_2() {
    let out = pir(&[
        "bound",
        "--formula",
        "thm45",
        "--params",
        "l=4,b=1,c=3,eps=0.5",
    ]);
    assert_eq!(out.status.code(), Some(2), "missing n is a usage error");
    let out = pir(&["bound", "--formula", "thm45", "--params", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn domain_error_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let db = write_db16(dir.path());
    let out = pir(&[
        "run",
        "--scheme",
        "square",
        "--db",
        db.to_str().unwrap(),
        "--index",
        "99",
    ]);
    assert_eq!(out.status.code(), Some(1));
    // Padded index: 16-bit database in a cube arrangement pads to 27, and
    // index 17 addresses padding.
    let out = pir(&[
        "run",
        "--scheme",
        "cube",
        "--db",
        db.to_str().unwrap(),
        "--index",
        "17",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn qdecode_reports_the_exact_bias() {
    let out = pir(&["qdecode", "--b", "1", "--f", "6", "--a0", "0", "--a1", "1"]);
    let v = stdout_json(&out);
    assert_eq!(v["schema"], 1);
    assert!((v["prob_correct"].as_f64().unwrap() - 0.75).abs() < 1e-9);
    assert!((v["bias"].as_f64().unwrap() - 0.25).abs() < 1e-9);
    assert!((v["tracenorm_ceiling"].as_f64().unwrap() - 0.25).abs() < 1e-9);
}

#[test]
fn bound_cor53_exponents() {
    let v = stdout_json(&pir(&["bound", "--formula", "cor53", "--params", "b=3"]));
    assert_eq!(v["exponent"].as_f64().unwrap(), 0.25);
    let v = stdout_json(&pir(&["bound", "--formula", "cor53", "--params", "b=1"]));
    assert_eq!(v["exponent"].as_f64().unwrap(), 0.5);
}

#[test]
fn run_is_deterministic_under_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let db = write_db16(dir.path());
    let args = [
        "run",
        "--scheme",
        "square",
        "--db",
        db.to_str().unwrap(),
        "--index",
        "7",
        "--seed",
        "99",
    ];
    let a = pir(&args);
    let b = pir(&args);
    assert!(a.status.success());
    assert_eq!(
        a.stdout, b.stdout,
        "identical argv and seed must give identical bytes"
    );
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["seed"], 99);
}

#[test]
fn seed_and_exhaustive_are_mutually_exclusive() {
    let dir = tempfile::tempdir().unwrap();
    let db = write_db16(dir.path());
    let out = pir(&[
        "run",
        "--scheme",
        "square",
        "--db",
        db.to_str().unwrap(),
        "--index",
        "1",
        "--seed",
        "3",
        "--exhaustive",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unseeded_runs_report_their_seed() {
    let dir = tempfile::tempdir().unwrap();
    let db = write_db16(dir.path());
    let out = pir(&[
        "run",
        "--scheme",
        "square",
        "--db",
        db.to_str().unwrap(),
        "--index",
        "3",
    ]);
    let v = stdout_json(&out);
    assert!(v["seed"].is_u64());
}

#[test]
fn out_writes_artifact_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let code_path = dir.path().join("code.json");
    let out = pir(&[
        "codegen",
        "--scheme",
        "square",
        "--n",
        "4",
        "--out",
        code_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());

    let artifact = std::fs::read(&code_path).unwrap();
    let code: Value = serde_json::from_slice(&artifact).unwrap();
    assert_eq!(code["m"], 8);
    assert_eq!(code["ell"], 2);
    assert_eq!(code["b"], 1);

    let manifest_path = dir.path().join("code.json.manifest.json");
    let manifest: Value = serde_json::from_slice(&std::fs::read(&manifest_path).unwrap()).unwrap();
    assert_eq!(manifest["subcommand"], "codegen");
    let digest = manifest["output_sha256"].as_str().unwrap();
    let recomputed = {
        use sha2::{Digest, Sha256};
        Sha256::digest(&artifact)
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect::<String>()
    };
    assert_eq!(digest, recomputed);
}

#[test]
fn codegen_rejects_non_square_sizes() {
    let out = pir(&["codegen", "--scheme", "square", "--n", "5"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn ldc_trial_round_trips_through_code_json() {
    let dir = tempfile::tempdir().unwrap();
    let code_path = dir.path().join("code.json");
    assert!(pir(&[
        "codegen",
        "--scheme",
        "square",
        "--n",
        "16",
        "--out",
        code_path.to_str().unwrap(),
    ])
    .status
    .success());

    let out = pir(&[
        "ldc-trial",
        "--code",
        code_path.to_str().unwrap(),
        "--delta",
        "0",
        "--model",
        "random",
        "--trials",
        "200",
        "--seed",
        "5",
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["success_rate"].as_f64().unwrap(), 1.0);

    // The hot model needs a target index.
    let out = pir(&[
        "ldc-trial",
        "--code",
        code_path.to_str().unwrap(),
        "--delta",
        "0.5",
        "--model",
        "hot",
        "--trials",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reduce_reports_stage_probabilities() {
    let dir = tempfile::tempdir().unwrap();
    let code_path = dir.path().join("code.json");
    assert!(pir(&[
        "codegen",
        "--scheme",
        "square",
        "--n",
        "4",
        "--out",
        code_path.to_str().unwrap(),
    ])
    .status
    .success());
    let out = pir(&[
        "reduce",
        "--code",
        code_path.to_str().unwrap(),
        "--x",
        "1010",
        "--index",
        "2",
        "--all-r",
    ]);
    let v = stdout_json(&out);
    assert!((v["sieve"]["stage1"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!((v["sieve"]["stage2"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-9);
    assert!((v["sieve"]["conditional_correct"].as_f64().unwrap() - 0.75).abs() < 1e-9);
    for arm in v["quantum_decoder"].as_array().unwrap() {
        assert!((arm["success"].as_f64().unwrap() - 0.75).abs() < 1e-9);
    }
}

#[test]
fn bound_thm52_supports_the_parity_variant() {
    let plain = stdout_json(&pir(&[
        "bound",
        "--formula",
        "thm52",
        "--params",
        "n=10000,l=9,b=3,eps=0.5",
    ]));
    let parity = stdout_json(&pir(&[
        "bound",
        "--formula",
        "thm52",
        "--params",
        "n=10000,l=9,b=3,eps=0.5,parity=1",
    ]));
    assert_eq!(parity["ell_prime"].as_f64().unwrap(), 84.0);
    assert!(parity["t_lower_bound"].as_f64().unwrap() > plain["t_lower_bound"].as_f64().unwrap());
}

#[test]
fn bound_table_emits_csv_and_json() {
    let out = pir(&[
        "bound-table",
        "--formula",
        "thm45",
        "--params",
        "l=4,b=1,c=3,eps=0.5",
        "--sweep",
        "n=100:300:100",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("formula,n,ell,b,c"));
    assert_eq!(lines.count(), 3);

    let out = pir(&[
        "bound-table",
        "--formula",
        "thm45",
        "--params",
        "l=4,b=1,c=3,eps=0.5",
        "--sweep",
        "n=100,200",
        "--json",
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
}

#[test]
fn qdecode_dumps_operator_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("unitary.json");
    let out = pir(&[
        "qdecode",
        "--b",
        "1",
        "--f",
        "6",
        "--a0",
        "0",
        "--a1",
        "0",
        "--dump-unitary",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let m = pir_cli::jsonio::matrix_from_json(&text).unwrap();
    assert_eq!(m.rows(), 4);
    // Specified column amplitudes survive serialization exactly; for the
    // xor table the (w=0, a=1) entry carries the minus sign.
    assert_eq!(m[(0, 0)], 0.5);
    assert_eq!(m[(0, 1)], -0.5);
}
