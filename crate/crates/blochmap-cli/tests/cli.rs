//! End-to-end runs of the built binary.

use std::path::Path;
use std::process::{Command, Output};

fn blochmap(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blochmap"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("reading {name}: {e}"))
}

#[test]
fn help_lists_every_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let out = blochmap(&["--help"], dir.path());
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    for cmd in [
        "fidelity-fatou",
        "rxy",
        "patch-optimize",
        "k3-faulty",
        "k3-diff",
        "heatmap",
        "histogram-fatou",
        "precision-probe",
        "julia",
        "boxdim",
        "fidelity-avg",
        "circuit-verify",
        "success-prob",
    ] {
        assert!(text.contains(cmd), "--help must list {cmd}");
    }
}

#[test]
fn unknown_flag_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = blochmap(&["rxy", "--no-such-flag"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("--no-such-flag"), "usage error names the token: {err}");
}

#[test]
fn numeric_parse_failure_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let out = blochmap(&["rxy", "--delta", "abc"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("--delta"), "{err}");
}

#[test]
fn runtime_error_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = blochmap(&["rxy", "--config", "missing.json"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    // bad s parameter is caught at resolve time
    let out = blochmap(&["rxy", "--s", "bogus"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn rxy_is_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "rxy",
        "--ensemble",
        "100",
        "--n-max",
        "10",
        "--seed",
        "42",
        "--sampling",
        "uniform",
        "--precision",
        "f64",
        "--out",
        "a.csv",
    ];
    assert!(blochmap(&args, dir.path()).status.success());
    let mut args2 = args;
    args2[args.len() - 1] = "b.csv";
    assert!(blochmap(&args2, dir.path()).status.success());
    let a = read(dir.path(), "a.csv");
    let b = read(dir.path(), "b.csv");
    assert_eq!(a.replace("a.csv", ""), b.replace("b.csv", ""));
    assert!(a.starts_with("# blochmap"));
    assert!(a.contains("# config: {"));
    assert!(a.contains("n,r_xy"));
    assert_eq!(a.lines().count(), 5 + 11); // header block (2 + 2 notes + columns) + 11 rows
}

#[test]
fn config_file_loads_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("run.json"),
        r#"{"ensemble": 64, "n_max": 5, "delta": 0.25, "precision": "f64", "sampling": "uniform"}"#,
    )
    .unwrap();
    let out = blochmap(
        &["rxy", "--config", "run.json", "--delta", "0.5", "--out", "r.csv"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = read(dir.path(), "r.csv");
    assert!(text.contains("\"delta\":0.5"), "flag wins over file");
    assert!(text.contains("\"ensemble\":64"), "file field survives");
    // unknown config fields are rejected
    std::fs::write(dir.path().join("bad.json"), r#"{"no_such_field": 1}"#).unwrap();
    let out = blochmap(&["rxy", "--config", "bad.json"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("no_such_field"), "{err}");
}

#[test]
fn julia_writes_pgm_and_boxdim_reports_dimension() {
    let dir = tempfile::tempdir().unwrap();
    let out = blochmap(
        &["julia", "--s", "0", "--resolution", "64", "--horizon", "40", "--out", "j.pgm"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let bytes = std::fs::read(dir.path().join("j.pgm")).unwrap();
    assert!(bytes.starts_with(b"P5\n"));

    let out = blochmap(
        &["boxdim", "--s", "i", "--resolution", "128", "--horizon", "40", "--out", "d.csv"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = read(dir.path(), "d.csv");
    assert!(text.contains("# dimension: 2.0000000000000000e0"), "{text}");
    assert!(text.contains("box_px,epsilon,occupied"));
}

#[test]
fn k3_diff_and_heatmap_emit() {
    let dir = tempfile::tempdir().unwrap();
    let out = blochmap(
        &[
            "k3-diff", "--delta", "1e-2", "--theta", "1.2", "--phi", "0.4", "--n-max", "20",
            "--precision", "f64", "--out", "kd.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = read(dir.path(), "kd.csv");
    assert!(text.contains("n,k3_a,k3_b,dk3"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 1 + 21);

    let out = blochmap(
        &[
            "heatmap", "--resolution", "8", "--n-max", "10", "--precision", "f64", "--format",
            "json", "--out", "h.json",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let parsed: serde_json::Value =
        serde_json::from_str(&read(dir.path(), "h.json")).unwrap();
    assert_eq!(parsed["data"]["cells"].as_array().unwrap().len(), 64);
    assert_eq!(parsed["config"]["threshold"], serde_json::json!(0.05));
}

#[test]
fn circuit_verify_reports_tight_deviation() {
    let dir = tempfile::tempdir().unwrap();
    let out = blochmap(
        &["circuit-verify", "--s", "i", "--samples", "200", "--precision", "f64"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let parsed: serde_json::Value =
        serde_json::from_str(&read(dir.path(), "circuit-verify.json")).unwrap();
    let dev = parsed["data"]["max_projective_deviation"].as_f64().unwrap();
    assert!(dev < 1e-12, "deviation {dev}");
    assert_eq!(parsed["data"]["u_gate_unitary"], serde_json::json!(true));
    let chain = parsed["data"]["per_iteration_success"].as_array().unwrap();
    assert!(!chain.is_empty());
}

#[test]
fn precision_probe_and_success_prob_emit() {
    let dir = tempfile::tempdir().unwrap();
    let out = blochmap(
        &["precision-probe", "--digits-min", "4", "--digits-max", "8", "--out", "p.csv"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = read(dir.path(), "p.csv");
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 1 + 5);

    let out = blochmap(
        &["success-prob", "--points", "32", "--precision", "f64", "--out", "s.csv"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = read(dir.path(), "s.csv");
    assert!(text.contains("# sphere_average: 6.666"), "{text}");
}

#[test]
fn fatou_commands_emit() {
    let dir = tempfile::tempdir().unwrap();
    let out = blochmap(
        &[
            "fidelity-fatou", "--delta", "0.1", "--ensemble", "200", "--n-max", "20",
            "--precision", "f64", "--out", "ff.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = read(dir.path(), "ff.csv");
    let last = text.lines().last().unwrap();
    let mean: f64 = last.split(',').nth(1).unwrap().parse().unwrap();
    assert!(mean < 1e-3, "straddling pairs must decohere: {last}");

    let out = blochmap(
        &[
            "histogram-fatou", "--ensemble", "400", "--n-max", "30", "--histogram-at", "0,30",
            "--precision", "f64", "--out", "hist.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = read(dir.path(), "hist.csv");
    // final histogram: mass sits in the first and last bins only
    let rows: Vec<&str> = text.lines().filter(|l| l.starts_with("30,")).collect();
    assert_eq!(rows.len(), 10);
    let fractions: Vec<f64> =
        rows.iter().map(|r| r.split(',').nth(3).unwrap().parse().unwrap()).collect();
    let interior: f64 = fractions[1..9].iter().sum();
    assert!(interior < 0.05, "interior bins {fractions:?}");
    assert!(fractions[0] > 0.3 && fractions[9] > 0.3, "{fractions:?}");
}

#[test]
fn patch_and_k3_faulty_emit() {
    let dir = tempfile::tempdir().unwrap();
    let out = blochmap(
        &[
            "patch-optimize", "--ensemble", "100", "--delta", "1e-4", "--n-max", "30",
            "--precision", "f64", "--out", "patch.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = read(dir.path(), "patch.csv");
    assert!(text.contains("# min_single_step_success: 9.52"), "{text}");

    let out = blochmap(
        &[
            "k3-faulty", "--samples", "10", "--n-max", "40", "--d-phi", "1e-3", "--precision",
            "f64", "--format", "json", "--out", "kf.json",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let parsed: serde_json::Value =
        serde_json::from_str(&read(dir.path(), "kf.json")).unwrap();
    assert!(parsed["data"]["series"].as_array().unwrap().len() == 10 * 40);
}
