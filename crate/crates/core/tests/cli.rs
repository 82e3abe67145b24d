use std::path::{Path, PathBuf};
use std::process::Command;

use curvlab::cli::{run, EXIT_CONFIG, EXIT_NEGATIVE, EXIT_PASS};
use serde_json::Value;

fn curvlab(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("curvlab").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn config(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("examples/configs")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn generated(dir: &Path, file: &str, args: &[&str]) -> PathBuf {
    let path = dir.join(file);
    let mut full = vec!["gen"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["-o", path.to_str().unwrap()]);
    let (code, _, err) = curvlab(&full);
    assert_eq!(code, EXIT_PASS, "{err}");
    path
}

#[test]
fn gen_writes_phi_form_for_nilpotent_family() {
    let dir = tempfile::tempdir().unwrap();
    let path = generated(
        dir.path(),
        "t.json",
        &["nilpotent-phik", "--p", "5", "--q", "5", "--k", "5"],
    );
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(v["kind"], "phi");
    assert_eq!(v["schema"], 1);
    assert_eq!(v["space"]["p"], 5);
}

#[test]
fn gen_rejects_violated_preconditions_and_unknown_names() {
    let (code, _, err) = curvlab(&["gen", "rank4", "--p", "2", "--q", "3"]);
    assert_eq!(code, EXIT_CONFIG);
    assert!(err.contains("requires p ≥ q ≥ 2"), "{err}");

    let (code, _, err) = curvlab(&["gen", "unknown-name", "--p", "2", "--q", "2"]);
    assert_eq!(code, EXIT_CONFIG);
    assert!(err.contains("unknown"), "{err}");
}

#[test]
fn gen_dense_stores_all_components() {
    let (code, out, _) = curvlab(&["gen", "projection", "--p", "2", "--q", "2", "--dense"]);
    assert_eq!(code, EXIT_PASS);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["kind"], "dense");
    assert_eq!(v["components"].as_array().unwrap().len(), 256);
}

#[test]
fn projection_probe_verdicts_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let path = generated(
        dir.path(),
        "l.json",
        &["projection", "--p", "2", "--q", "5"],
    );
    let path = path.to_str().unwrap();

    let (code, out, _) = curvlab(&["probe", path, "--class", "spacelike"]);
    assert_eq!(code, EXIT_PASS);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["verdict"]["kind"], "ConstantRank");
    assert_eq!(v["verdict"]["rank"], 2);

    let (code, out, _) = curvlab(&["probe", path, "--class", "mixed"]);
    assert_eq!(code, EXIT_NEGATIVE);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["verdict"]["kind"], "NonConstantRank");
    let ranks: Vec<u64> = v["witnesses"]
        .as_array()
        .unwrap()
        .iter()
        .map(|w| w["rank"].as_u64().unwrap())
        .collect();
    assert!(ranks.len() >= 2);
    assert!(ranks.iter().any(|&r| r != ranks[0]), "{ranks:?}");
}

#[test]
fn corrupted_tensor_file_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"schema\": 1,").unwrap();
    let (code, _, err) = curvlab(&["probe", bad.to_str().unwrap(), "--class", "mixed"]);
    assert_eq!(code, EXIT_CONFIG);
    assert!(err.contains("JSON"), "{err}");

    let missing = dir.path().join("missing.json");
    let (code, _, _) = curvlab(&["classify", missing.to_str().unwrap()]);
    assert_eq!(code, EXIT_CONFIG);
}

#[test]
fn probe_is_deterministic_for_a_fixed_seed() {
    let dir = tempfile::tempdir().unwrap();
    let path = generated(
        dir.path(),
        "n.json",
        &["nilpotent-phik", "--p", "3", "--q", "3", "--k", "2"],
    );
    let path = path.to_str().unwrap();
    let args = [
        "--seed",
        "7",
        "--samples",
        "50",
        "probe",
        path,
        "--class",
        "timelike",
        "--mode",
        "jordan",
    ];
    let a = curvlab(&args);
    let b = curvlab(&args);
    assert_eq!(a, b);
    let v: Value = serde_json::from_str(&a.1).unwrap();
    assert_eq!(v["provenance"]["seed"], 7);
}

#[test]
fn classify_and_fit_identify_phi_tensors() {
    let dir = tempfile::tempdir().unwrap();
    let path = generated(
        dir.path(),
        "n.json",
        &["nilpotent-phik", "--p", "4", "--q", "4", "--k", "4"],
    );
    let path = path.to_str().unwrap();
    let (code, out, err) = curvlab(&["classify", path]);
    assert_eq!(code, EXIT_PASS, "{err}");
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["class"]["kind"], "Nilpotent");

    let (code, _, _) = curvlab(&["fit", path]);
    assert_eq!(code, EXIT_NEGATIVE);

    let path = generated(
        dir.path(),
        "i.json",
        &["identity", "--p", "2", "--q", "2", "--dense"],
    );
    let (code, out, err) = curvlab(&["fit", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_PASS, "{err}");
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!((v["c"].as_f64().unwrap() - 1.0).abs() < 1e-8, "{out}");
}

#[test]
fn classify_rejects_rank_four_tensor() {
    let dir = tempfile::tempdir().unwrap();
    let path = generated(dir.path(), "r.json", &["rank4", "--p", "3", "--q", "3"]);
    let (code, out, _) = curvlab(&["classify", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_NEGATIVE);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["class"]["kind"], "NotRank2JordanIP");
}

#[test]
fn verify_warped_demo_passes() {
    let (code, out, err) = curvlab(&["verify", &config("warped_demo.json")]);
    assert_eq!(code, EXIT_PASS, "{err}");
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!(v["max_residual"].as_f64().unwrap() <= 1e-5);
    for p in v["points"].as_array().unwrap() {
        assert!(p["measured"].is_number());
    }
}

#[test]
fn verify_rejects_constant_curvature_warping() {
    let (code, _, err) = curvlab(&["verify", &config("warped_degenerate.json")]);
    assert_eq!(code, EXIT_CONFIG);
    assert!(err.contains("A² − 4εκB"), "{err}");
}

#[test]
fn verify_pseudo_sphere_names_normalization() {
    let (code, out, err) = curvlab(&["verify", &config("pseudo_sphere_rho2.json")]);
    assert_eq!(code, EXIT_PASS, "{err}");
    let v: Value = serde_json::from_str(&out).unwrap();
    let matched = &v["normalization"]["matched"];
    assert!(
        matched.to_string().contains("rho_squared"),
        "{}",
        v["normalization"]
    );
}

#[test]
fn verify_hypersurfaces_pass() {
    for name in ["graph_hypersurface.json", "sphere_hypersurface.json"] {
        let (code, _, err) = curvlab(&["verify", &config(name)]);
        assert_eq!(code, EXIT_PASS, "{name}: {err}");
    }
}

#[test]
fn selftest_filter_restricts_criteria() {
    let (code, out, _) = curvlab(&["selftest", "--filter", "geometry"]);
    assert_eq!(code, EXIT_PASS, "{out}");
    assert_eq!(out.lines().filter(|l| l.contains("PASS")).count(), 3);

    let (code, _, _) = curvlab(&["selftest", "--filter", "no-such-criterion"]);
    assert_eq!(code, EXIT_CONFIG);
}

#[test]
fn csv_summary_format() {
    let (code, out, _) = curvlab(&[
        "--format",
        "csv-summary",
        "verify",
        &config("warped_demo.json"),
    ]);
    assert_eq!(code, EXIT_PASS);
    assert!(out.lines().count() >= 2);
    assert!(out.lines().next().unwrap().contains(','));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(curvlab(&["probe"]).0, EXIT_CONFIG);
    assert_eq!(
        curvlab(&["--tol-rank", "2", "gen", "identity"]).0,
        EXIT_CONFIG
    );
    assert_eq!(curvlab(&["--help"]).0, EXIT_PASS);
}

#[test]
fn binary_output_is_byte_identical_across_runs() {
    let bin = env!("CARGO_BIN_EXE_curvlab");
    let cfg = config("pseudo_sphere_rho2.json");
    let a = Command::new(bin).args(["verify", &cfg]).output().unwrap();
    let b = Command::new(bin).args(["verify", &cfg]).output().unwrap();
    assert_eq!(a.status.code(), Some(EXIT_PASS));
    assert_eq!(a.stdout, b.stdout);
}

#[cfg(feature = "mutation-sign-flip")]
#[test]
fn selftest_catches_flipped_sign_in_r_phi() {
    let (code, out, _) = curvlab(&["selftest", "--filter", "algebra"]);
    assert_ne!(code, EXIT_PASS, "{out}");
}
