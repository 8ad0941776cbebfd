//! End-to-end runs of the `gaugelab` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gaugelab_core::keldysh::gamma_from_intensity;
use serde_json::Value;

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(format!("{name}.json"))
}

fn gaugelab(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_gaugelab"));
    cmd.args(args).env_remove("GAUGELAB_THREADS");
    if let Some(t) = threads {
        cmd.env("GAUGELAB_THREADS", t);
    }
    cmd.output().expect("binary runs")
}

fn run(kind: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        kind,
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    gaugelab(&args, None)
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("config.json");
    fs::write(&p, text).unwrap();
    p
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn classical_demo_with_defaults() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), r#"{"kind": "classical-demo"}"#);
    let out = tmp.path().join("out");
    let o = run("classical-demo", &cfg, &out, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert_eq!(stdout.lines().filter(|l| l.starts_with("PASS ")).count(), 6, "{stdout}");

    for name in ["trajectory_scalar.csv", "trajectory_vector.csv"] {
        let text = fs::read_to_string(out.join(name)).unwrap();
        assert!(text.starts_with("t,x,y,z,px,py,pz,vx,vy,vz,T,U,H\n"));
        assert_eq!(text.lines().count(), 1 + 10_001);
    }
    let report = json(&out.join("invariance_report.json"));
    assert_eq!(report["pass"], Value::Bool(true));
    let names: Vec<_> = report["matched"]
        .as_array()
        .unwrap()
        .iter()
        .map(|d| d["name"].as_str().unwrap())
        .collect();
    assert_eq!(names, ["r", "v", "T"]);
    let u = &report["differed"][0];
    assert_eq!(u["name"], "U");
    assert!((u["max_dev"].as_f64().unwrap() - 50.0).abs() < 1e-6);
    let summary = json(&out.join("summary.json"));
    assert_eq!(summary["kind"], "classical-demo");
    assert!(!summary["relations"].as_array().unwrap().is_empty());
}

#[test]
fn negative_mass_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"{"kind": "classical-demo", "particle": {"q": 1, "m": -1}}"#,
    );
    let o = run("classical-demo", &cfg, &tmp.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("particle.m"), "{}", stderr(&o));
    assert!(!tmp.path().join("out").exists());
}

#[test]
fn schema_errors_name_the_field() {
    let tmp = tempfile::tempdir().unwrap();
    let cases = [
        (
            r#"{"kind": "volkov", "pulse": {"envelope": "gaussian", "t_off": 1}}"#,
            "pulse.envelope",
        ),
        (
            r#"{"kind": "unitarity-check", "generators": [{"family": "product"}]}"#,
            "generators[0]",
        ),
        (
            r#"{"kind": "keldysh-map", "intensity": {"start": -1, "stop": 1, "count": 3}, "omega": {"start": 1, "stop": 1, "count": 1}}"#,
            "intensity.start",
        ),
        (
            r#"{"kind": "classical-demo", "integrator": {"dt": -0.1}}"#,
            "integrator.dt",
        ),
    ];
    for (text, field) in cases {
        let cfg = write_config(tmp.path(), text);
        let kind: Value = serde_json::from_str(text).unwrap();
        let o = run(kind["kind"].as_str().unwrap(), &cfg, &tmp.path().join("out"), &[]);
        assert_eq!(o.status.code(), Some(1), "{text}");
        assert!(stderr(&o).contains(field), "{field}: {}", stderr(&o));
    }
}

#[test]
fn kind_must_be_known_and_match() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run("warp-drive", &scenario("volkov"), tmp.path(), &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("unknown kind"));
    let o = run("keldysh-map", &scenario("volkov"), tmp.path(), &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("kind"));
    let o = run("volkov", &tmp.path().join("missing.json"), tmp.path(), &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--config"));
}

#[test]
fn single_cell_keldysh_scan() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"{"kind": "keldysh-map", "binding_energy": 0.5,
            "intensity": {"start": 0.0285, "stop": 0.0285, "count": 1},
            "omega": {"start": 0.057, "stop": 0.057, "count": 1}}"#,
    );
    let out = tmp.path().join("out");
    let o = run("keldysh-map", &cfg, &out, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(out.join("scan.csv")).unwrap();
    let lines: Vec<_> = csv.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], "omega,I,U_p,gamma,iso_group");
    let gamma: f64 = lines[1].split(',').nth(3).unwrap().parse().unwrap();
    let expected = gamma_from_intensity(0.5, 0.057, 0.0285).unwrap();
    assert!((gamma - expected).abs() <= 1e-11 * expected);
    assert!((gamma - 0.3376).abs() < 1e-4);
    assert_eq!(json(&out.join("scan.json"))["metadata"]["E_B"], 0.5);
}

#[test]
fn failed_physics_check_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let o = run(
        "classical-demo",
        &scenario("classical-demo"),
        &out,
        &["--tolerance", "0"],
    );
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL "));
    assert_eq!(json(&out.join("invariance_report.json"))["pass"], Value::Bool(false));
}

#[test]
fn format_selection() {
    let tmp = tempfile::tempdir().unwrap();
    let csv_only = tmp.path().join("csv");
    let o = run("keldysh-map", &scenario("keldysh-map"), &csv_only, &["--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let names: Vec<_> = fs::read_dir(&csv_only)
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    assert_eq!(names, ["scan.csv"]);
    let o = run(
        "keldysh-map",
        &scenario("keldysh-map"),
        &tmp.path().join("x"),
        &["--format", "xml"],
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--format"));
}

#[test]
fn unwritable_output_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let blocker = tmp.path().join("file");
    fs::write(&blocker, "").unwrap();
    let o = run("keldysh-map", &scenario("keldysh-map"), &blocker.join("out"), &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--out"), "{}", stderr(&o));
}

#[test]
fn thread_cap_does_not_change_output() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = scenario("unitarity-check");
    let mut outputs = Vec::new();
    for threads in ["1", "3"] {
        let out = tmp.path().join(threads);
        let args = [
            "unitarity-check",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ];
        let o = gaugelab(&args, Some(threads));
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let mut files: Vec<_> = fs::read_dir(&out).unwrap().map(|e| e.unwrap().path()).collect();
        files.sort();
        outputs.push(files.iter().map(|f| fs::read(f).unwrap()).collect::<Vec<_>>());
    }
    assert_eq!(outputs[0], outputs[1]);

    let args = [
        "unitarity-check",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        tmp.path().to_str().unwrap(),
    ];
    let o = gaugelab(&args, Some("zero"));
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("GAUGELAB_THREADS"));
}

#[test]
fn gauge_transform_reports_potentials_as_differed() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let o = run("gauge-transform", &scenario("gauge-transform"), &out, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report = json(&out.join("invariance_report.json"));
    assert_eq!(report["pass"], Value::Bool(true));
    let differed: Vec<_> = report["differed"]
        .as_array()
        .unwrap()
        .iter()
        .map(|d| d["name"].as_str().unwrap())
        .collect();
    assert_eq!(differed, ["phi", "A"]);
    // phi = -x vs phi' = 0 over x in [-2, 2].
    assert!((report["differed"][0]["max_dev"].as_f64().unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn volkov_scenario_writes_wavefunctions_and_residuals() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let o = run("volkov", &scenario("volkov"), &out, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let wf = fs::read_to_string(out.join("wavefunction_length.csv")).unwrap();
    assert!(wf.starts_with("t,x,y,z,re,im,modulus,phase\n"));
    assert_eq!(wf.lines().count(), 1 + 21 * 11);
    let res = json(&out.join("residual_velocity.json"));
    assert_eq!(res["gauge"], "velocity");
    assert!(res["grid"]["dx"].is_number() && res["grid"]["dt"].is_number() && res["grid"]["extent"].is_number());
    let q = &json(&out.join("summary.json"))["metadata"]["quadrature"];
    assert_eq!(q["phase_abs_tolerance"], 1e-10);
}
