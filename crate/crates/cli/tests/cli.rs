use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn gaplab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gaplab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn invalid_p_names_the_field() {
    let o = gaplab(&["gen", "--p", "1.5"]);
    assert!(!o.status.success());
    let err = stderr(&o);
    assert!(err.contains("`p`"), "{err}");
}

#[test]
fn config_errors_name_line_and_field() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "n = 10\nomega = -1\n").unwrap();
    let o = gaplab(&["gen", "--config", cfg.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("omega"), "{}", stderr(&o));

    std::fs::write(&cfg, "n = 10\nbogus = 3\n").unwrap();
    let o = gaplab(&["gen", "--config", cfg.to_str().unwrap()]);
    let err = stderr(&o);
    assert!(!o.status.success());
    assert!(err.contains("line 2") && err.contains("bogus"), "{err}");
}

#[test]
fn flags_override_config() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# sizes\nn = 5\np = 0.5\nseed = 3\n").unwrap();
    let from_cfg = gaplab(&["gen", "--config", cfg.to_str().unwrap()]);
    assert!(from_cfg.status.success(), "{}", stderr(&from_cfg));
    assert!(String::from_utf8_lossy(&from_cfg.stdout).starts_with("5\n"));

    let flags = gaplab(&["gen", "--config", cfg.to_str().unwrap(), "--n", "7"]);
    assert!(String::from_utf8_lossy(&flags.stdout).starts_with("7\n"));

    let direct = gaplab(&["gen", "--n", "5", "--p", "0.5", "--seed", "3"]);
    assert_eq!(from_cfg.stdout, direct.stdout);
}

#[test]
fn interlacing_preset_is_byte_identical() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    for d in [&a, &b] {
        let o = gaplab(&[
            "experiment",
            "--preset",
            "interlacing",
            "--seed",
            "1",
            "--trials",
            "200",
            "--out",
            d.path().to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let sa = read(&a.path().join("summary.csv"));
    assert_eq!(sa, read(&b.path().join("summary.csv")));
    assert!(sa.starts_with("trials,holding,"));
    assert!(!sa.contains('\r'));
}

#[test]
fn gaps_summary_has_one_row_per_index_and_delta() {
    let dir = TempDir::new().unwrap();
    let o = gaplab(&[
        "gaps", "--n", "200", "--p", "0.5", "--trials", "100", "--seed", "7", "--indices", "50,100,150", "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let summary = read(&dir.path().join("summary.csv"));
    let mut lines = summary.lines();
    assert_eq!(lines.next(), Some("index,delta,frequency"));
    // default grid 2^-6 .. 2^1
    assert_eq!(lines.count(), 8 * 3);

    let jsonl = read(&dir.path().join("trials.jsonl"));
    assert_eq!(jsonl.lines().count(), 100);
    for line in jsonl.lines() {
        let v: Value = serde_json::from_str(line).unwrap();
        assert!(v.is_object());
    }
    let manifest: Value = serde_json::from_str(&read(&dir.path().join("manifest.json"))).unwrap();
    assert_eq!(manifest["command"], "gaps");
    assert_eq!(manifest["settings"]["seed"], 7);
    for key in ["gamma", "c_dom", "cbar", "omega", "tol_factor", "k_norm", "zeta_relative_factor"] {
        assert!(manifest["settings"]["constants"].get(key).is_some(), "missing {key}");
    }
}

fn gaps_run(dir: &Path, threads: &str) {
    let o = gaplab(&[
        "gaps", "--n", "40", "--p", "0.4", "--trials", "30", "--seed", "11", "--threads", threads, "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn replay_matches_and_reports_corruption() {
    let dir = TempDir::new().unwrap();
    gaps_run(dir.path(), "2");
    let manifest = dir.path().join("manifest.json");
    let m = manifest.to_str().unwrap();

    for t in ["0", "17", "29"] {
        let o = gaplab(&["replay", "--manifest", m, "--trial", t]);
        assert!(o.status.success(), "{}", stderr(&o));
        assert!(String::from_utf8_lossy(&o.stdout).contains("match"));
    }

    let missing = gaplab(&["replay", "--manifest", m, "--trial", "30"]);
    assert!(!missing.status.success());
    assert!(stderr(&missing).contains("not found"));

    let log = dir.path().join("trials.jsonl");
    let text = read(&log);
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let mut v: Value = serde_json::from_str(&lines[5]).unwrap();
    v["min_gap"] = Value::from(v["min_gap"].as_f64().unwrap() * 1.5);
    v["simple_spectrum"] = Value::from(false);
    lines[5] = v.to_string();
    std::fs::write(&log, lines.join("\n") + "\n").unwrap();

    let o = gaplab(&["replay", "--manifest", m, "--trial", "5"]);
    assert!(!o.status.success());
    let err = stderr(&o);
    assert!(err.contains("min_gap") && err.contains("simple_spectrum"), "{err}");
    assert!(!err.contains("op_norm"), "{err}");
}

#[test]
fn version_mismatch_only_warns() {
    let dir = TempDir::new().unwrap();
    gaps_run(dir.path(), "1");
    let path = dir.path().join("manifest.json");
    let mut m: Value = serde_json::from_str(&read(&path)).unwrap();
    m["version"] = Value::from("0.0.0-old");
    std::fs::write(&path, m.to_string()).unwrap();
    let o = gaplab(&["replay", "--manifest", path.to_str().unwrap(), "--trial", "3"]);
    assert!(o.status.success());
    assert!(stderr(&o).contains("warning"));
}

#[test]
fn thread_count_does_not_change_artifacts() {
    let one = TempDir::new().unwrap();
    let eight = TempDir::new().unwrap();
    gaps_run(one.path(), "1");
    gaps_run(eight.path(), "8");
    for f in ["trials.jsonl", "summary.csv", "sup.csv"] {
        assert_eq!(read(&one.path().join(f)), read(&eight.path().join(f)), "{f}");
    }
}

#[test]
fn nodal_on_edge_list() {
    let dir = TempDir::new().unwrap();
    let edges = dir.path().join("path.txt");
    // path graph 0-1-2-3
    std::fs::write(&edges, "0 1\n1 2\n2 3\n").unwrap();
    let o = gaplab(&["nodal", "--edges", edges.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = String::from_utf8_lossy(&o.stdout).into_owned();
    let rows: Vec<&str> = out.lines().collect();
    assert_eq!(rows[0], "eigen_index,weak_count,strong_count,zero_count,weak_eq_strong");
    assert_eq!(rows.len(), 5);
    // the top eigenvector of a connected graph has one sign
    assert!(rows[4].starts_with("3,1,1,0,"), "{}", rows[4]);
}

#[test]
fn lcd_and_classify_on_input_vectors() {
    let dir = TempDir::new().unwrap();
    let vecs = dir.path().join("v.txt");
    std::fs::write(&vecs, "1 1 1 1 1 1 1 1\n1,0,0,0,0,0,0,0\n").unwrap();
    let o = gaplab(&["lcd", "--input", vecs.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = String::from_utf8_lossy(&o.stdout).into_owned();
    assert_eq!(out.lines().next(), Some("vector_id,block,theta_star,capped,lower_bound_check"));
    assert_eq!(out.lines().count(), 3);

    let o = gaplab(&["classify", "--input", vecs.to_str().unwrap(), "--p", "0.5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = String::from_utf8_lossy(&o.stdout).into_owned();
    assert!(out.lines().nth(2).unwrap().starts_with("1,compressible,"), "{out}");
}

#[test]
fn failed_hook_exits_nonzero() {
    // with K below any attainable norm ratio the operator-norm hook fails
    let o = gaplab(&["experiment", "--preset", "operator-norm", "--n", "40", "--trials", "3", "--k-norm", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("FAIL"));
}

#[test]
fn smallball_e1_table() {
    let o = gaplab(&["smallball", "--vector", "e1", "--n", "30", "--p", "0.3", "--trials", "2000", "--eps", "0.1,0.5"]);
    let out = String::from_utf8_lossy(&o.stdout).into_owned();
    assert!(out.starts_with("eps,levy,reference,ratio\n"), "{out}");
    assert_eq!(out.lines().count(), 3);
}
