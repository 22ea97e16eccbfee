use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn hyperfill(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperfill"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn only_cache_dir(out: &Path) -> std::path::PathBuf {
    let mut dirs: Vec<_> = std::fs::read_dir(out.join("cache")).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(dirs.len(), 1);
    dirs.pop().unwrap()
}

fn write_rows(path: &Path, rows: impl IntoIterator<Item = (usize, f64)>) {
    let mut s = String::from("id,value\n");
    for (id, v) in rows {
        s.push_str(&format!("{id},{v}\n"));
    }
    std::fs::write(path, s).unwrap();
}

/// Boundary and interior sample ids of a written space file.
fn split_ids(space: &Path) -> (Vec<usize>, Vec<usize>) {
    let v = read_json(space);
    let flags = v["boundary"].as_array().unwrap();
    let mut boundary = Vec::new();
    let mut interior = Vec::new();
    for (i, f) in flags.iter().enumerate() {
        if f.as_bool().unwrap() {
            boundary.push(i);
        } else {
            interior.push(i);
        }
    }
    (boundary, interior)
}

#[test]
fn generate_counts_and_rejects_unknown_names() {
    let dir = tempfile::tempdir().unwrap();
    let o = hyperfill(&["generate", "--space", "interval", "--depth", "5"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = read_json(&dir.path().join("space.json"));
    assert_eq!(v["points"].as_array().unwrap().len(), 33);

    let o = hyperfill(&["generate", "--space", "carpet_minus_edge", "--depth", "3"], dir.path());
    assert_eq!(code(&o), 0);
    let (boundary, interior) = split_ids(&dir.path().join("space.json"));
    assert_eq!(interior.len(), 512);
    assert_eq!(boundary.len(), 27);

    let o = hyperfill(&["generate", "--space", "moebius"], dir.path());
    assert_eq!(code(&o), 2);
}

#[test]
fn build_is_deterministic_cached_and_nested() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["build", "--space", "koch_rug", "--depth", "2", "--levels", "3"];
    let o = hyperfill(&args, dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("built"));
    let cache = only_cache_dir(dir.path());
    let first = std::fs::read(cache.join("filling.jsonl")).unwrap();

    let o = hyperfill(&args, dir.path());
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("reused"));

    std::fs::remove_dir_all(dir.path().join("cache")).unwrap();
    assert_eq!(code(&hyperfill(&args, dir.path())), 0);
    assert_eq!(std::fs::read(only_cache_dir(dir.path()).join("filling.jsonl")).unwrap(), first);

    let deeper = tempfile::tempdir().unwrap();
    let o = hyperfill(&["build", "--space", "koch_rug", "--depth", "2", "--levels", "4"], deeper.path());
    assert_eq!(code(&o), 0);
    let coarse = read_json(&cache.join("nets.json"));
    let fine = read_json(&only_cache_dir(deeper.path()).join("nets.json"));
    let coarse = coarse["levels"].as_array().unwrap();
    let fine = fine["levels"].as_array().unwrap();
    assert_eq!(fine.len(), coarse.len() + 1);
    assert_eq!(&fine[..coarse.len()], &coarse[..]);
}

#[test]
fn build_rejects_bad_geometry() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&hyperfill(&["build", "--alpha", "2"], dir.path())), 2);
    assert_eq!(code(&hyperfill(&["build", "--tau", "1.5"], dir.path())), 2);
    assert_eq!(code(&hyperfill(&["build", "--bogus-flag"], dir.path())), 2);
}

#[test]
fn solve_constant_and_zero_data() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    assert_eq!(code(&hyperfill(&["generate", "--space", "carpet_minus_edge", "--depth", "2"], out)), 0);
    let space = out.join("space.json");
    let (boundary, _) = split_ids(&space);
    write_rows(&out.join("f.csv"), boundary.iter().map(|&i| (i, 0.25)));
    for (name, f) in [("const", Some("f.csv")), ("zero", None)] {
        let problem = serde_json::json!({ "p": 3, "theta": 0.75, "f_csv": f, "G_csv": null });
        let path = out.join(format!("{name}.json"));
        std::fs::write(&path, problem.to_string()).unwrap();
        let o = hyperfill(&["solve", "--space", space.to_str().unwrap(), "--problem", path.to_str().unwrap()], out);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        let expected = if f.is_some() { 0.25 } else { 0.0 };
        let csv = std::fs::read_to_string(out.join("solution.csv")).unwrap();
        for line in csv.lines().skip(1) {
            let value: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
            assert!((value - expected).abs() < 1e-8, "{name}: {line}");
        }
        let diag = read_json(&out.join("diagnostics.json"));
        assert_eq!(diag["converged"], Value::Bool(true));
        assert_eq!(diag["config_hash"].as_str().unwrap().len(), 64);
        assert!(diag["el_residual"].as_f64().unwrap() <= 1e-7);
    }
}

#[test]
fn solve_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    assert_eq!(code(&hyperfill(&["generate", "--space", "carpet_minus_edge", "--depth", "2"], out)), 0);
    let space = out.join("space.json");
    let (_, interior) = split_ids(&space);
    write_rows(&out.join("g.csv"), interior.iter().map(|&i| (i, if i % 2 == 0 { 1.0 } else { -0.5 })));

    // p must exceed sigma/theta
    let path = out.join("bad.json");
    std::fs::write(&path, r#"{"p": 1.1, "theta": 0.75, "f_csv": null, "G_csv": "g.csv"}"#).unwrap();
    let o = hyperfill(&["solve", "--space", space.to_str().unwrap(), "--problem", path.to_str().unwrap()], out);
    assert_eq!(code(&o), 2);

    // one iteration cannot solve a nonlinear problem
    let path = out.join("short.json");
    std::fs::write(&path, r#"{"p": 3, "theta": 0.75, "f_csv": null, "G_csv": "g.csv"}"#).unwrap();
    let o = hyperfill(
        &["solve", "--space", space.to_str().unwrap(), "--problem", path.to_str().unwrap(), "--max-iter", "1"],
        out,
    );
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
    let diag = read_json(&out.join("diagnostics.json"));
    assert_eq!(diag["converged"], Value::Bool(false));
}

#[test]
fn check_passes_fails_and_rejects() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    let o = hyperfill(&["check", "--suite", "trace-identity"], out);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let report = read_json(&out.join("report-trace-identity.json"));
    assert_eq!(report["report"]["passed"], Value::Bool(true));
    assert_eq!(report["seed"], Value::from(7));

    let o = hyperfill(&["check", "--suite", "comparison", "--inject-violation"], out);
    assert_eq!(code(&o), 1);
    let report = read_json(&out.join("report-comparison.json"));
    assert_eq!(report["report"]["passed"], Value::Bool(false));
    assert!(report["report"]["witness"].as_str().unwrap().contains("trial 0"));

    assert_eq!(code(&hyperfill(&["check", "--suite", "bogus"], out)), 2);
}

#[test]
fn kellogg_writes_plot_data() {
    let dir = tempfile::tempdir().unwrap();
    let o = hyperfill(
        &["kellogg", "--space", "interval", "--depth", "8", "--p", "4", "--theta", "0.9", "--depths", "3,4,5"],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("kellogg.csv")).unwrap();
    let errors: Vec<f64> = csv.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(errors.len(), 3);
    assert!(errors.windows(2).all(|w| w[1] <= w[0]), "{errors:?}");
}
