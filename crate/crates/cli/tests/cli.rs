use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn mlrssc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mlrssc")).args(args).output().unwrap()
}

fn synth(dir: &Path, seed: &str) {
    let out = mlrssc(&["synth", "--seed", seed, "--out", dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

/// First `n` rows of every file in `src`, written to `dst`.
fn truncate(src: &Path, dst: &Path, n: usize) {
    fs::create_dir_all(dst).unwrap();
    for name in ["view1.csv", "view2.csv", "labels.txt"] {
        let text = fs::read_to_string(src.join(name)).unwrap();
        let head: Vec<&str> = text.lines().take(n).collect();
        fs::write(dst.join(name), head.join("\n") + "\n").unwrap();
    }
}

fn small_dataset(root: &Path) -> [String; 3] {
    synth(&root.join("full"), "4");
    truncate(&root.join("full"), &root.join("small"), 60);
    ["view1.csv", "view2.csv", "labels.txt"].map(|f| root.join("small").join(f).to_str().unwrap().to_string())
}

#[test]
fn synth_writes_identical_files_for_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    synth(&dir.path().join("a"), "9");
    synth(&dir.path().join("b"), "9");
    for name in ["view1.csv", "view2.csv", "labels.txt"] {
        let a = fs::read(dir.path().join("a").join(name)).unwrap();
        let b = fs::read(dir.path().join("b").join(name)).unwrap();
        assert_eq!(a, b);
    }
    let view = fs::read_to_string(dir.path().join("a/view1.csv")).unwrap();
    assert_eq!(view.lines().count(), 1000);
    assert!(view.lines().all(|l| l.split(',').count() == 2));
}

#[test]
fn synth_to_unwritable_path_fails() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let out = mlrssc(&["synth", "--out", blocker.join("sub").to_str().unwrap()]);
    assert!(!out.status.success());
}

#[test]
fn fit_records_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let [v1, v2, labels] = small_dataset(dir.path());
    let run = |name: &str| {
        let out_path = dir.path().join(name);
        let out = mlrssc(&[
            "fit", "--views", &v1, &v2, "--labels", &labels, "--k", "2", "--mode", "centroid",
            "--restarts", "4", "--seed", "3", "--out", out_path.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        (fs::read(out_path).unwrap(), String::from_utf8(out.stdout).unwrap())
    };
    let (a, table) = run("a.jsonl");
    let (b, _) = run("b.jsonl");
    assert_eq!(a, b);
    assert!(table.contains("Centroid MLRSSC"));
    let record: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(record["kind"], "run");
    assert!(record.get("wall_clock_seconds").is_none());
}

#[test]
fn fit_without_labels_and_single_view_mode() {
    let dir = tempfile::tempdir().unwrap();
    let [v1, v2, _] = small_dataset(dir.path());
    let out = mlrssc(&["fit", "--views", &v1, &v2, "--k", "2", "--mode", "single", "--restarts", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("labels:"));
    let out = mlrssc(&["fit", "--views", &v1, &v2, "--k", "2", "--mode", "single", "--view-index", "5"]);
    assert!(!out.status.success());
}

#[test]
fn kernel_fit_with_pca() {
    let dir = tempfile::tempdir().unwrap();
    let [v1, v2, labels] = small_dataset(dir.path());
    let out = mlrssc(&[
        "fit", "--views", &v1, &v2, "--labels", &labels, "--k", "2", "--fidelity", "kernel",
        "--sigma-mult", "1", "--pca", "0.9", "--restarts", "2", "--time",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8(out.stdout).unwrap().contains("Pairwise KMLRSSC"));
}

#[test]
fn grid_emits_sweep_and_best_records() {
    let dir = tempfile::tempdir().unwrap();
    let [v1, v2, labels] = small_dataset(dir.path());
    let out_path = dir.path().join("grid.jsonl");
    let out = mlrssc(&[
        "grid", "--views", &v1, &v2, "--labels", &labels, "--k", "2", "--restarts", "2",
        "--grid-beta1", "0.1,0.9", "--grid-lambda", "0.3,0.7", "--grid-mu", "100",
        "--workers", "1", "--out", out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(out_path).unwrap();
    let kinds: Vec<String> = text
        .lines()
        .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap()["kind"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(kinds, ["sweep", "sweep", "sweep", "sweep", "best"]);
}

#[test]
fn trace_csv_has_one_row_per_iteration() {
    let dir = tempfile::tempdir().unwrap();
    let [v1, v2, labels] = small_dataset(dir.path());
    let out = mlrssc(&["trace", "--views", &v1, &v2, "--labels", &labels, "--k", "2"]);
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "iteration,residual_sum,normalized_residual_sum,objective");
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert!(!rows.is_empty());
    for (i, r) in rows.iter().enumerate() {
        assert_eq!(r[0] as usize, i + 1);
        assert!(r[3].is_finite());
    }
}

#[test]
fn bench_single_size() {
    let out = mlrssc(&["bench", "--sizes", "100", "--repeats", "1"]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("n = 1 per cell"));
    assert_eq!(stdout.lines().filter(|l| l.starts_with("100 ")).count(), 1);
}

#[test]
fn errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "1,2\n3,x\n").unwrap();
    let out = mlrssc(&["fit", "--views", bad.to_str().unwrap(), "--k", "2"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.csv:2:"));
    let out = mlrssc(&["fit", "--views", "/nonexistent/view.csv", "--k", "2"]);
    assert!(!out.status.success());
}
