use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gmas-stab"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn gmas-stab")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    assert_eq!(o.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn examples(dir: &Path) -> PathBuf {
    let o = run(&["examples", "all", "--out", dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    dir.to_path_buf()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn fourcycle_bundle_has_five_rows() {
    let tmp = TempDir::new().unwrap();
    let o = run(&["examples", "fourcycle", "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let mut names: Vec<String> =
        std::fs::read_dir(tmp.path()).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    names.sort();
    assert_eq!(
        names,
        [
            "fourcycle_a0_b0_g0.gcrn",
            "fourcycle_a0_bm2_gm3.gcrn",
            "fourcycle_a2_bm2_g1.gcrn",
            "fourcycle_a3_b4_gm4.gcrn",
            "fourcycle_a5_b0_gm3.gcrn"
        ]
    );
}

#[test]
fn template_headers() {
    let tmp = TempDir::new().unwrap();
    let dir = examples(tmp.path());
    let ss = std::fs::read_to_string(dir.join("ssystem.gcrn")).unwrap();
    assert!(ss.contains("alpha_i") && ss.contains("beta_i") && ss.contains("G") && ss.contains("H"));
    let chain = std::fs::read_to_string(dir.join("revchain.gcrn")).unwrap();
    assert!(chain.contains("c1") && chain.contains("c4"));
}

#[test]
fn unknown_example_is_input_error() {
    let o = run(&["examples", "pentagon"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn every_bundled_example_analyzes() {
    let tmp = TempDir::new().unwrap();
    let dir = examples(tmp.path());
    for entry in std::fs::read_dir(&dir).unwrap() {
        let p = entry.unwrap().path();
        let o = run(&["analyze", p.to_str().unwrap(), "--samples", "2000", "--sweep-samples", "4"]);
        assert_eq!(o.status.code(), Some(0), "{}", p.display());
    }
}

#[test]
fn analyze_json_d_stable_row() {
    let tmp = TempDir::new().unwrap();
    let dir = examples(tmp.path());
    let v = json(&run(&["analyze", &path(&dir, "fourcycle_a5_b0_gm3.gcrn"), "--format", "json", "--samples", "2000"]));
    assert_eq!(v["global"]["D_stable"]["status"], "holds");
    assert_eq!(v["global"]["D_stable"]["method"], "criterion_3x3");
    assert_eq!(v["global"]["diag_D_stable"]["status"], "fails");
}

#[test]
fn analyze_unstable_row_has_witness() {
    let tmp = TempDir::new().unwrap();
    let dir = examples(tmp.path());
    let v = json(&run(&["analyze", &path(&dir, "fourcycle_a3_b4_gm4.gcrn"), "--format", "json"]));
    assert_eq!(v["global"]["D_stable"]["status"], "fails");
    assert!(v["global"]["witness"]["eigenvalue"]["re"].as_f64().unwrap() > 1e-6);
}

#[test]
fn analyze_xy_unique() {
    let tmp = TempDir::new().unwrap();
    let dir = examples(tmp.path());
    let o = run(&["analyze", &path(&dir, "xy_unique.gcrn")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("uniqueness: unique"));
}

#[test]
fn json_is_byte_identical_across_runs_and_threads() {
    let tmp = TempDir::new().unwrap();
    let dir = examples(tmp.path());
    let file = path(&dir, "fourcycle_a0_bm2_gm3.gcrn");
    let args = ["analyze", file.as_str(), "--format", "json", "--seed", "7", "--samples", "5000"];
    let a = bin().args(args).env("RAYON_NUM_THREADS", "1").output().unwrap();
    let b = bin().args(args).env("RAYON_NUM_THREADS", "4").output().unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn input_errors_exit_2() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(run(&["analyze", &path(tmp.path(), "missing.gcrn")]).status.code(), Some(2));
    let bad = write(tmp.path(), "bad.gcrn", "species: X\nvertex a: stoich = Q\n");
    let o = run(&["analyze", &bad]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    let rect = write(tmp.path(), "rect.csv", "1,2\n");
    assert_eq!(run(&["stability", &rect]).status.code(), Some(2));
    assert_eq!(run(&["analyze"]).status.code(), Some(2));
}

#[test]
fn cycle_cap_exits_3() {
    let tmp = TempDir::new().unwrap();
    // Complete digraph on 11 vertices: far more than a million simple cycles.
    let n = 11;
    let mut text = String::from("species: X\n");
    for i in 0..n {
        text += &format!("vertex v{i}: stoich = {i} X, kinetic = X\n");
    }
    for i in 0..n {
        for j in 0..n {
            if i != j {
                text += &format!("edge v{i} -> v{j}\n");
            }
        }
    }
    let file = write(tmp.path(), "dense.gcrn", &text);
    assert_eq!(run(&["cycles", &file]).status.code(), Some(3));
}

#[test]
fn stability_table_examples() {
    let tmp = TempDir::new().unwrap();
    let m = write(tmp.path(), "m.csv", "-1,0,-3\n1,-1,0\n0,3,-1\n");
    let v = json(&run(&["stability", &m, "--format", "json"]));
    assert_eq!(v["verdicts"][0]["notion"], "stable");
    assert_eq!(v["verdicts"][0]["status"], "fails");
    assert_eq!(v["p0plus"], true);

    let neg = write(tmp.path(), "neg.csv", "-1,0,0\n0,-1,0\n0,0,-1\n");
    let v = json(&run(&["stability", &neg, "--format", "json"]));
    assert!(v["verdicts"].as_array().unwrap().iter().all(|x| x["status"] == "holds"));

    let a = write(tmp.path(), "a.csv", "-1,-2\n-1,-2\n");
    let s = write(tmp.path(), "s.csv", "0.7071067811865476,0.7071067811865476\n");
    let v = json(&run(&["stability", &a, "--subspace", &s, "--format", "json"]));
    let semi = v["verdicts"].as_array().unwrap().iter().find(|x| x["notion"] == "D_semistable").unwrap();
    assert_eq!(semi["status"], "holds");
}

fn summary_distance(text: &str, key: &str) -> f64 {
    let start = text.find(key).unwrap() + key.len();
    text[start..].split(|c: char| c == ',' || c.is_whitespace()).find(|s| !s.is_empty()).unwrap().parse().unwrap()
}

#[test]
fn simulate_converges_for_classical_row() {
    let tmp = TempDir::new().unwrap();
    let dir = examples(tmp.path());
    let out = path(tmp.path(), "traj.csv");
    let o = run(&[
        "simulate",
        &path(&dir, "fourcycle_a0_b0_g0.gcrn"),
        "--perturb-equilibrium",
        "1,1,1,0.01",
        "--t-end",
        "50",
        "--out",
        &out,
    ]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(summary_distance(&s, "final distance to reference:") < 1e-4, "{s}");
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("t,x1,x2,x3\n"));
}

#[test]
fn simulate_at_equilibrium_does_not_drift() {
    let tmp = TempDir::new().unwrap();
    let dir = examples(tmp.path());
    let o = run(&["simulate", &path(&dir, "fourcycle_a3_b4_gm4.gcrn"), "--x0", "1,1,1", "--t-end", "10"]);
    assert_eq!(o.status.code(), Some(0));
    let summary = String::from_utf8(o.stderr.clone()).unwrap();
    assert!(summary_distance(&summary, "max distance:") < 1e-8, "{summary}");
    assert!(stdout(&o).starts_with("t,x1,x2,x3\n"));
}

#[test]
fn simulate_unstable_row_grows() {
    let tmp = TempDir::new().unwrap();
    let dir = examples(tmp.path());
    let out = path(tmp.path(), "traj.csv");
    let o = run(&[
        "simulate",
        &path(&dir, "fourcycle_a0_bm2_gm3.gcrn"),
        "--perturb-equilibrium",
        "1,1,1,0.001",
        "--t-end",
        "50",
        "--out",
        &out,
    ]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let initial = 0.001 * 0.2 * 3f64.sqrt();
    assert!(summary_distance(&s, "max distance:") >= 10.0 * initial, "{s}");
}

#[test]
fn simulate_needs_initial_state() {
    let tmp = TempDir::new().unwrap();
    let dir = examples(tmp.path());
    assert_eq!(run(&["simulate", &path(&dir, "xy_unique.gcrn")]).status.code(), Some(2));
}

#[test]
fn rates_flag_overrides_file() {
    let tmp = TempDir::new().unwrap();
    let dir = examples(tmp.path());
    let file = path(&dir, "xy_unique.gcrn");
    let o = run(&["simulate", &file, "--rates", "1,2", "--x0", "2,0.5", "--t-end", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(run(&["simulate", &file, "--rates", "1,2,3", "--x0", "1,1"]).status.code(), Some(2));
}

#[test]
fn cycles_and_uniqueness_commands() {
    let tmp = TempDir::new().unwrap();
    let dir = examples(tmp.path());
    let v = json(&run(&["cycles", &path(&dir, "revchain.gcrn"), "--format", "json"]));
    assert_eq!(v["cycles"].as_array().unwrap().len(), 3);
    assert_eq!(v["conclusion"], "necessary conditions satisfied (not sufficient)");
    let v = json(&run(&["uniqueness", &path(&dir, "ssystem.gcrn"), "--format", "json"]));
    assert_eq!(v["unique"], true);
}
