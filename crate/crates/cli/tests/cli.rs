use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn multiplex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_multiplex"))
        .args(args)
        .output()
        .expect("spawn multiplex")
}

fn stderr_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stderr).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)))
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn small_config(dir: &Path) -> std::path::PathBuf {
    let cfg = serde_json::json!({
        "name": "small",
        "N": 8,
        "M": 3,
        "eps_intra": 1.0,
        "eps_inter": 0.5,
        "intra_graph": { "kind": "circulant", "half_width": 2 },
        "inter_graph": { "kind": "ring" },
        "frequencies": { "kind": "zero" },
        "init": { "kind": "twisted", "p_intra": 1, "p_inter": 1 },
        "perturbation": { "kind": "both", "eta": 0.025 },
        "seed": 5,
        "dt": 0.001,
        "t_end": 0.5,
        "record_every": 100
    });
    let path = dir.join("small.json");
    fs::write(&path, cfg.to_string()).unwrap();
    path
}

#[test]
fn list_scenarios_prints_all_eight() {
    let out = multiplex(&["list-scenarios"]);
    assert!(out.status.success());
    let names: Vec<_> = stdout_json(&out)
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap().to_owned())
        .collect();
    assert_eq!(names, ["fig2", "fig3a", "fig3b", "fig4", "fig5a", "fig5b", "fig5c", "fig5d"]);
}

#[test]
fn run_from_config_file_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let out_dir = dir.path().join("out");
    let out = multiplex(&["run", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let scenario = out_dir.join("small");
    for f in ["trajectory.csv", "order_parameter.csv", "spectrum.json", "config.json", "metadata.json"] {
        assert!(scenario.join(f).is_file(), "missing {f}");
    }
    let spectrum: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(scenario.join("spectrum.json")).unwrap()).unwrap();
    for key in ["eigenvalues", "zero_multiplicity", "classification", "zero_tolerance"] {
        assert!(spectrum.get(key).is_some(), "{key}");
    }
}

#[test]
fn flags_override_file_values_and_echo_reruns_identically() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let out = multiplex(&[
        "run",
        cfg.to_str().unwrap(),
        "--seed",
        "11",
        "--t-end",
        "0.3",
        "--out",
        a.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let echo = a.join("small/config.json");
    let resolved: serde_json::Value = serde_json::from_str(&fs::read_to_string(&echo).unwrap()).unwrap();
    assert_eq!(resolved["seed"], 11);
    assert_eq!(resolved["t_end"], 0.3);

    let out = multiplex(&["run", echo.to_str().unwrap(), "--out", b.to_str().unwrap()]);
    assert!(out.status.success());
    for f in ["trajectory.csv", "order_parameter.csv", "spectrum.json", "metadata.json"] {
        assert_eq!(fs::read(a.join("small").join(f)).unwrap(), fs::read(b.join("small").join(f)).unwrap(), "{f}");
    }
}

#[test]
fn parallel_jobs_match_serial() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let serial = dir.path().join("serial");
    let parallel = dir.path().join("parallel");
    let targets = [cfg.to_str().unwrap(), "fig2"];
    let args = |out: &Path, jobs: &str| {
        let mut v: Vec<String> = vec!["run".into()];
        v.extend(targets.iter().map(|s| s.to_string()));
        v.extend(["--t-end".into(), "0.4".into(), "--jobs".into(), jobs.into(), "--out".into()]);
        v.push(out.to_str().unwrap().into());
        v
    };
    for (out, jobs) in [(&serial, "1"), (&parallel, "2")] {
        let a = args(out, jobs);
        let status = multiplex(&a.iter().map(String::as_str).collect::<Vec<_>>()).status;
        assert!(status.success());
    }
    for name in ["small", "fig2"] {
        assert_eq!(
            fs::read(serial.join(name).join("trajectory.csv")).unwrap(),
            fs::read(parallel.join(name).join("trajectory.csv")).unwrap()
        );
    }
}

#[test]
fn unknown_scenario_is_a_json_error() {
    let out = multiplex(&["run", "no-such-scenario"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"], "unknown_scenario");
}

#[test]
fn invalid_override_names_the_field() {
    let out = multiplex(&["run", "fig2", "--dt", "-0.5"]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr_json(&out);
    assert_eq!(err["error"], "config");
    assert_eq!(err["field"], "dt");
}

#[test]
fn malformed_config_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, r#"{"name": "x", "N": 3}"#).unwrap();
    let out = multiplex(&["run", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"], "json");
}

#[test]
fn usage_errors_are_json_too() {
    let out = multiplex(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"], "usage");
}

#[test]
fn verify_reports_checks() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let out = multiplex(&["verify", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = stdout_json(&out);
    assert_eq!(report["passed"], true);
    let names: Vec<_> = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap().to_owned())
        .collect();
    assert_eq!(
        names,
        ["composition_residual", "factorization_run", "factorization_random", "sumset", "stability_iff"]
    );
}

#[test]
fn dump_graph_prints_matrices() {
    let dir = tempfile::tempdir().unwrap();
    let out = multiplex(&["dump-graph", "fig2", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["intra"]["n_rows"], 20);
    assert_eq!(v["inter"]["n_rows"], 3);
    assert_eq!(v["intra"]["entries"].as_array().unwrap().len(), 400);
    assert!(dir.path().join("intra.csv").is_file());
    assert!(dir.path().join("inter.csv").is_file());
}
