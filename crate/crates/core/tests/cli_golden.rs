//! Byte-exact CLI output against files in `tests/golden/`.
//! Run with `UPDATE_GOLDEN=1` to rewrite them.

use std::path::PathBuf;
use std::process::{Command, Output};

fn cdzero(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cdzero")).args(args).env_remove("RUST_LOG").output().expect("spawn cdzero")
}

fn golden(name: &str, args: &[&str]) {
    let out = cdzero(args);
    assert!(out.status.success(), "{name}: exit {:?}\n{}", out.status.code(), String::from_utf8_lossy(&out.stderr));
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, &out.stdout).unwrap();
        return;
    }
    let want = std::fs::read(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    assert_eq!(
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&want),
        "{name} differs from golden output"
    );
}

#[test]
fn mul() {
    golden("mul.txt", &["-n", "3", "mul", "e1", "e4"]);
    golden("mul.json", &["-n", "4", "mul", "e1 + e10", "e6 - e15", "--json"]);
}

#[test]
fn conj_tilde_hat() {
    golden("conj.txt", &["-n", "3", "conj", "2 + e1 - 1/2 e7"]);
    golden("tilde.txt", &["-n", "3", "tilde", "e1"]);
    golden("tilde.json", &["-n", "4", "tilde", "e1 + e10", "--json"]);
    golden("hat.txt", &["-n", "4", "hat", "e1 + e10"]);
}

#[test]
fn spectrum() {
    golden("spectrum.txt", &["-n", "4", "spectrum", "e1 + e10"]);
    golden("spectrum.json", &["-n", "4", "spectrum", "e1 + e10", "--json"]);
}

#[test]
fn annihilator() {
    golden("annihilator.txt", &["-n", "4", "annihilator", "e1 + e10"]);
    golden("annihilator.json", &["-n", "4", "annihilator", "e1", "--json"]);
}

#[test]
fn construct() {
    golden("construct_orthogonal.txt", &["-n", "3", "construct", "orthogonal", "e1", "e2"]);
    golden(
        "construct_tilde_partner.json",
        &["-n", "3", "construct", "tilde-partner", "e1", "e2", "--sign", "minus", "--json"],
    );
    golden("construct_spectral.txt", &["-n", "3", "construct", "spectral", "e1", "--sigma", "1", "--x", "e2"]);
    golden("construct_promote.json", &["-n", "4", "construct", "promote", "3 e1 - 4 e8", "--json"]);
}

#[test]
fn classify() {
    golden("classify.txt", &["-n", "3", "classify", "e1", "e2"]);
    golden("classify.json", &["-n", "3", "classify", "e1", "-e5", "--json"]);
}

#[test]
fn verify_paper_subset() {
    golden("verify_spectrum.txt", &["verify-paper", "--only", "example_spectrum"]);
    golden("verify_oracles.json", &["verify-paper", "--only", "construct_", "--json"]);
}

#[test]
fn small_sweeps() {
    golden("sweep_stiefel.json", &["-n", "3", "sweep", "--kind", "stiefel", "--count", "6", "--seed", "3"]);
    golden("sweep_constructors.json", &["-n", "3", "sweep", "--kind", "constructors", "--count", "8", "--seed", "1"]);
    golden(
        "sweep_identities.json",
        &["-n", "3", "sweep", "--kind", "identities", "--count", "2", "--seed", "5", "--only", "tilde"],
    );
}

#[test]
fn json_to_file_matches_stdout() {
    let dir = std::env::temp_dir().join(format!("cdzero-golden-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("out.json");
    let out = cdzero(&["-n", "3", "mul", "e1", "e2", "--json", file.to_str().unwrap()]);
    assert!(out.status.success());
    let stdout = cdzero(&["-n", "3", "mul", "e1", "e2", "--json"]).stdout;
    assert_eq!(std::fs::read(&file).unwrap(), stdout);
    std::fs::remove_dir_all(&dir).unwrap();
}

fn exit_code(args: &[&str]) -> i32 {
    let out = cdzero(args);
    assert!(out.stdout.is_empty() || out.status.success(), "payload on failure for {args:?}");
    out.status.code().unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(exit_code(&["-n", "3", "mul", "e1", "e2"]), 0);
    assert_eq!(exit_code(&["-n", "3", "mul", "e1 +", "e2"]), 2);
    assert_eq!(exit_code(&["mul", "e1", "e2"]), 2);
    assert_eq!(exit_code(&["-n", "3", "mul", "e9", "e2"]), 3);
    assert_eq!(exit_code(&["-n", "2", "spectrum", "e1"]), 4);
    assert_eq!(exit_code(&["-n", "3", "spectrum", "e0 + e1"]), 4);
    assert_eq!(exit_code(&["-n", "3", "construct", "orthogonal", "e1", "2 e2"]), 4);
    assert_eq!(exit_code(&["-n", "11", "conj", "e1"]), 4);
    assert_eq!(exit_code(&["-n", "11", "--allow-large", "conj", "e1"]), 0);
}

#[test]
fn failing_case_sets_exit_one() {
    let out = cdzero(&["verify-paper", "--only", "example_level5_zero_divisor"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("example_level5_zero_divisor"), "{err}");
    assert!(!err.contains("example_level5_zero_divisor_reconstructed"), "{err}");
}
