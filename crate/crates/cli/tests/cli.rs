use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn mmqo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mmqo")).args(args).output().expect("binary runs")
}

fn stdout_json(o: &Output) -> Value {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn stderr_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stderr).expect("stderr is JSON")
}

fn write(dir: &Path, name: &str, v: &Value) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_string(v).unwrap()).unwrap();
    p
}

fn identity(n: usize) -> Vec<Vec<f64>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect()
}

fn vacuum(n: usize) -> Value {
    json!({ "n_modes": n, "mean": vec![0.0; 2 * n], "cov": identity(2 * n) })
}

fn csv_rows(o: &Output) -> Vec<Vec<String>> {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap().lines().map(|l| l.split(',').map(String::from).collect()).collect()
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

#[test]
fn decompose_vacuum_gives_unit_kappas() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "vac3.json", &vacuum(3));
    let v = stdout_json(&mmqo(&["decompose", "--in", p.to_str().unwrap()]));
    let kappas = v["williamson"]["kappas"].as_array().unwrap();
    assert_eq!(kappas.len(), 3);
    assert!(kappas.iter().all(|k| (num(k) - 1.0).abs() < 1e-12));
    assert!((num(&v["purity"]) - 1.0).abs() < 1e-12);
    assert_eq!(v["principal_modes"]["mode_count"], json!(0));
}

#[test]
fn decompose_monte_carlo_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let st = json!({ "n_modes": 1, "mean": [0.3, -0.2], "cov": [[3.0, 0.5], [0.5, 1.5]] });
    let p = write(dir.path(), "mixed.json", &st);
    let p = p.to_str().unwrap();
    let a = mmqo(&["decompose", "--in", p, "--mc-samples", "2000", "--seed", "7"]);
    let b = mmqo(&["decompose", "--in", p, "--mc-samples", "2000", "--seed", "7"]);
    assert_eq!(a.stdout, b.stdout);
    let v = stdout_json(&a);
    assert_eq!(v["monte_carlo"]["seed"], json!(7));
    assert_eq!(v["monte_carlo"]["within_4_sigma"], json!(true));
}

#[test]
fn spopo_source_matches_formula() {
    let rows = csv_rows(&mmqo(&["source", "spopo", "--lambdas", "1,0.5", "--r", "0.9"]));
    assert_eq!(rows[0], vec!["mode", "lambda", "dx2"]);
    let dx2: Vec<f64> = rows[1..].iter().map(|r| r[2].parse().unwrap()).collect();
    let expect = |l: f64| ((1.0 - 0.9 * l) / (1.0 + 0.9 * l)).powi(2);
    assert!((dx2[0] - expect(1.0)).abs() < 1e-15);
    assert!((dx2[1] - expect(0.5)).abs() < 1e-15);
}

#[test]
fn hom_dip_is_zero() {
    let v = stdout_json(&mmqo(&["detect", "hom", "--overlap", "1", "--phi", "0"]));
    assert_eq!(v, json!({ "g2": 0.0 }));
    let v = stdout_json(&mmqo(&["detect", "hom", "--overlap", "0,0", "--phi", "0.3"]));
    assert_eq!(num(&v["g2"]), 0.5);
}

#[test]
fn pdc_source_reports_supermode_squeezing() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.json", &json!({ "g": [[1.0, 0.0], [0.0, 0.5]] }));
    let v = stdout_json(&mmqo(&["source", "pdc", "--in", g.to_str().unwrap(), "--gain", "0.5"]));
    let db: Vec<f64> = v["summary"]["squeezing_db"].as_array().unwrap().iter().map(num).collect();
    assert!((db[0] - 20.0 * 0.5 / std::f64::consts::LN_10).abs() < 1e-12);
    assert!((db[1] - 20.0 * 0.25 / std::f64::consts::LN_10).abs() < 1e-12);
    assert_eq!(v["state"]["n_modes"], json!(2));
}

#[test]
fn cluster_chain_nullifiers_at_ten_db() {
    let dir = tempfile::tempdir().unwrap();
    let v = json!({ "v": [[0, 1, 0, 0], [1, 0, 1, 0], [0, 1, 0, 1], [0, 0, 1, 0]] });
    let p = write(dir.path(), "chain.json", &v);
    let out = stdout_json(&mmqo(&["cluster", "--in", p.to_str().unwrap(), "--squeeze-db", "10"]));
    for x in out["nullifier_variances"]["controlled_z"].as_array().unwrap() {
        assert!((num(x) - 0.1).abs() < 1e-10, "{x}");
    }
    // The passive route carries sqrt(I + V^2) on both sides: 0.1 (1 + degree).
    let passive: Vec<f64> = out["nullifier_variances"]["passive"].as_array().unwrap().iter().map(num).collect();
    for (x, degree) in passive.iter().zip([1.0, 2.0, 2.0, 1.0]) {
        assert!((x - 0.1 * (1.0 + degree)).abs() < 1e-10, "{x}");
    }
    assert!(num(&out["condition_residual"]) < 1e-10);
    let src = stdout_json(&mmqo(&["source", "cluster", "--in", p.to_str().unwrap(), "--passive"]));
    assert_eq!(src["nullifier_variances"].as_array().unwrap().len(), 4);
}

#[test]
fn channel_output_round_trips_as_input() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "vac.json", &vacuum(1));
    let out = dir.path().join("lossy.json");
    let o = mmqo(&["channel", "--in", p.to_str().unwrap(), "--gain", "2", "--out", out.to_str().unwrap()]);
    assert!(o.status.success() && o.stdout.is_empty());
    let st: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(num(&st["cov"][0][0]), 3.0);
    let again = stdout_json(&mmqo(&["channel", "--in", out.to_str().unwrap(), "--gain", "0.5"]));
    assert!((num(&again["cov"][1][1]) - 2.0).abs() < 1e-15);
}

#[test]
fn homodyne_schedule_feeds_reconstruction() {
    let dir = tempfile::tempdir().unwrap();
    let st = json!({
        "n_modes": 2,
        "mean": [0.0, 0.0, 0.0, 0.0],
        "cov": [[2.0, 0.3, 0.1, 0.0], [0.3, 1.5, 0.0, -0.2], [0.1, 0.0, 1.0, 0.1], [0.0, -0.2, 0.1, 1.2]]
    });
    let p = write(dir.path(), "st.json", &st);
    let table = stdout_json(&mmqo(&["detect", "schedule", "--in", p.to_str().unwrap()]));
    assert_eq!(table["entries"].as_array().unwrap().len(), 10);
    let t = write(dir.path(), "table.json", &table);
    let rec = stdout_json(&mmqo(&["detect", "reconstruct", "--in", t.to_str().unwrap()]));
    for i in 0..4 {
        for j in 0..4 {
            assert!((num(&rec["cov"][i][j]) - num(&st["cov"][i][j])).abs() < 1e-12);
        }
    }
    let single = stdout_json(&mmqo(&["detect", "homodyne", "--in", p.to_str().unwrap(), "--lo", "[[1,0],[0,0]]", "--phi", "0"]));
    assert!((num(&single["variance"]) - 2.0).abs() < 1e-12);
}

#[test]
fn reconstruction_with_missing_setting_is_a_domain_error() {
    let dir = tempfile::tempdir().unwrap();
    let t = write(dir.path(), "t.json", &json!({ "n_modes": 1, "entries": [{ "lo": "single:0", "phi": 0.0, "variance": 1.0 }] }));
    let o = mmqo(&["detect", "reconstruct", "--in", t.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr_json(&o)["code"], json!("OracleFailure"));
}

#[test]
fn degauss_photon_added_vacuum() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "vac.json", &vacuum(1));
    let v = stdout_json(&mmqo(&["degauss", "--in", p.to_str().unwrap(), "--sign", "add", "--mode", "[1]", "--negativity"]));
    assert!((num(&v["value_at_origin"]) + 1.0 / (2.0 * std::f64::consts::PI)).abs() < 1e-12);
    assert_eq!(v["origin_sign"]["sign"], json!("negative"));
    assert!(num(&v["log_negativity"]["value"]) > 0.0);
    let o = mmqo(&["degauss", "--in", p.to_str().unwrap(), "--sign", "subtract", "--mode", "[1]"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr_json(&o)["code"], json!("VacuumSubtraction"));
}

#[test]
fn metrology_squeezing_improvement() {
    let v = stdout_json(&mmqo(&["metrology", "--model", "mz", "--photons", "100", "--squeeze-db", "10"]));
    assert!((num(&v["improvement"]) - 10f64.sqrt()).abs() < 1e-6);
    assert!((num(&v["coherent_bound"]) - num(&v["bound"]["a0"]) / 20.0).abs() < 1e-12);
}

#[test]
fn gain_sweep_crosses_one_near_two() {
    let rows = csv_rows(&mmqo(&["sweep", "gain", "--from", "1", "--to", "3", "--step", "0.01"]));
    assert_eq!(rows[0], vec!["gain", "x_variance", "p_variance", "product", "entangled"]);
    let data: Vec<(f64, f64)> = rows[1..].iter().map(|r| (r[0].parse().unwrap(), r[3].parse().unwrap())).collect();
    assert_eq!(data.len(), 201);
    let first_above = data.iter().find(|(_, p)| *p >= 1.0).unwrap().0;
    assert!((first_above - 2.0).abs() < 1e-9);
    assert!(data.windows(2).all(|w| w[1].1 >= w[0].1));
}

#[test]
fn spopo_and_hom_sweeps() {
    let rows = csv_rows(&mmqo(&["sweep", "spopo", "--from", "0", "--to", "0.9", "--step", "0.1", "--lambdas", "1,0.5"]));
    let dx: Vec<f64> = rows[1..].iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(dx.windows(2).all(|w| w[1] < w[0]));
    let rows = csv_rows(&mmqo(&["sweep", "hom", "--from", "0", "--to", "3.2", "--step", "0.1", "--overlap", "0.8"]));
    for r in &rows[1..] {
        let phi: f64 = r[0].parse().unwrap();
        let g2: f64 = r[1].parse().unwrap();
        assert!((g2 - 0.5 * (1.0 - 0.64 * (2.0 * phi).cos())).abs() < 1e-15);
    }
}

#[test]
fn energy_sweep_in_json() {
    let v = stdout_json(&mmqo(&["sweep", "energy", "--from", "2", "--to", "4", "--step", "1", "--log10", "--format", "json"]));
    assert_eq!(v["columns"][4], json!("bound"));
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert!((num(&rows[0][0]) - 100.0).abs() < 1e-9);
}

#[test]
fn bad_range_is_reported() {
    let o = mmqo(&["sweep", "hom", "--from", "1", "--to", "0", "--step", "0.1", "--overlap", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr_json(&o)["code"], json!("BadRange"));
}

#[test]
fn outputs_are_byte_identical() {
    let a = mmqo(&["sweep", "gain", "--from", "1", "--to", "3", "--step", "0.05"]);
    let b = mmqo(&["sweep", "gain", "--from", "1", "--to", "3", "--step", "0.05"]);
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.lines().nth(1).unwrap().starts_with("1.0000000000000000e0,"));
}

#[test]
fn unphysical_state_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = json!({ "n_modes": 1, "mean": [0, 0], "cov": [[0.5, 0.0], [0.0, 0.5]] });
    let p = write(dir.path(), "bad.json", &bad);
    let o = mmqo(&["decompose", "--in", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let e = stderr_json(&o);
    assert_eq!(e["code"], json!("NotPhysical"));
    assert!(e["context"]["min_eigenvalue"].as_f64().unwrap() < 0.0);
    assert!(e["message"].is_string());
}

#[test]
fn tolerance_flag_relaxes_physicality() {
    let dir = tempfile::tempdir().unwrap();
    let st = json!({ "n_modes": 1, "mean": [0, 0], "cov": [[1.0, 0.0], [0.0, 0.9999999]] });
    let p = write(dir.path(), "edge.json", &st);
    assert_eq!(mmqo(&["channel", "--in", p.to_str().unwrap(), "--gain", "1"]).status.code(), Some(1));
    let o = mmqo(&["--tolerance", "1e-6", "channel", "--in", p.to_str().unwrap(), "--gain", "1"]);
    assert!(o.status.success());
}

#[test]
fn usage_errors_exit_with_two() {
    let o = mmqo(&["channel", "--gain", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["code"], json!("UsageError"));

    let o = mmqo(&["decompose", "--in", "/nonexistent/state.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["code"], json!("InputUnreadable"));

    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("broken.json");
    std::fs::write(&p, "{ not json").unwrap();
    let o = mmqo(&["decompose", "--in", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["code"], json!("InvalidJson"));

    let o = mmqo(&["detect", "hom", "--overlap", "1", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["code"], json!("CsvUnavailable"));

    assert!(mmqo(&["--help"]).status.success());
}

#[test]
fn scenario_runs_relative_to_its_file() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "vac.json", &vacuum(2));
    let sc = write(
        dir.path(),
        "run.json",
        &json!({ "command": "channel", "args": ["--gain", "0.5"], "input": "vac.json", "output": "out.json" }),
    );
    let o = mmqo(&["scenario", "--in", sc.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let st: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("out.json")).unwrap()).unwrap();
    assert_eq!(st["n_modes"], json!(2));

    let sweep = write(dir.path(), "sweep.json", &json!({ "command": "sweep hom", "args": ["--from", "0", "--to", "1", "--step", "0.5", "--overlap", "1"] }));
    assert_eq!(csv_rows(&mmqo(&["scenario", "--in", sweep.to_str().unwrap()])).len(), 4);

    let bad = write(dir.path(), "bad.json", &json!({ "command": "plot" }));
    let o = mmqo(&["scenario", "--in", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["code"], json!("UnknownCommand"));

    let missing = write(dir.path(), "missing.json", &json!({ "command": "decompose", "input": "nope.json" }));
    assert_eq!(mmqo(&["scenario", "--in", missing.to_str().unwrap()]).status.code(), Some(2));
}
