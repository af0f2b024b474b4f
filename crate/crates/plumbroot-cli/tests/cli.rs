//! End-to-end behaviour of the `plumbroot` binary: exit codes, formats and
//! file output.

use std::path::Path;
use std::process::{Command, Output};

use plumbroot::catalog;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_plumbroot")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write_graph(dir: &Path, name: &str, g: &plumbroot::PlumbingGraph) -> String {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string(&g.to_spec()).unwrap()).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn analyze_reports_rational_e8() {
    let o = run(&["analyze", "--catalog", "e8"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with("classification: Rational"), "{out}");
    assert!(out.contains("orbits: 1"));
    assert!(out.contains("0      2/1  0         0       -1/1"), "{out}");
}

#[test]
fn analyze_json_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_graph(dir.path(), "elliptic.json", &catalog::elliptic_length_one());
    let o = run(&["analyze", &path, "--format", "json", "--orbits", "0"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["classification"]["kind"], "WeaklyElliptic");
    assert_eq!(v["classification"]["l"], 1);
    assert_eq!(v["orbits"].as_array().unwrap().len(), 1);
    assert_eq!(v["orbits"][0]["rank_red"], 1);
    assert_eq!(v["orbits"][0]["module"]["finite"][0][1], 1);
}

#[test]
fn not_ar_graphs_exit_with_two() {
    let o = run(&["analyze", "--catalog", "two-node"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("oracle"), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
}

#[test]
fn input_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"vertices\": [{\"id\": 1, \"e\": -2}],\n \"edges\": [[1, 2]]}").unwrap();
    let o = run(&["analyze", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("bad.json") && stderr(&o).contains("unknown vertex"), "{}", stderr(&o));

    std::fs::write(&bad, "{\"vertices\": [], \"colour\": 1}").unwrap();
    let o = run(&["analyze", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 1"), "{}", stderr(&o));

    assert_eq!(run(&["analyze", "/nonexistent/graph.json"]).status.code(), Some(1));
    assert_eq!(run(&["lens", "4", "2"]).status.code(), Some(1));
    assert_eq!(run(&["seifert", "--e0", "-1", "--leg", "2/1", "--leg", "3/1"]).status.code(), Some(1));
    assert_eq!(run(&["analyze", "--catalog", "e8", "--orbits", "3"]).status.code(), Some(1));
    assert_eq!(run(&["verify"]).status.code(), Some(1));
}

#[test]
fn lens_csv_has_the_documented_columns() {
    let o = run(&["lens", "5", "3", "--table", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "p,q,a,d,rank_red,torsion,lambda");
    assert_eq!(lines.len(), 6);
    assert_eq!(lines[1], "5,3,0,2/5,0,1/5,0/1");
    let single = stdout(&run(&["lens", "5", "3", "--spinc", "3", "--format", "csv"]));
    assert_eq!(single, "p,q,a,d,rank_red,torsion,lambda\n5,3,3,0/1,0,0/1,0/1\n");
}

#[test]
fn seifert_reports_poincare_sphere() {
    let o = run(&["seifert", "--e0", "-2", "--leg", "2/1", "--leg", "3/2", "--leg", "5/4", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["dp"], 0);
    assert_eq!(v["order"], 1);
    assert_eq!(v["orbits"][0]["d"], "2/1");
    let csv = stdout(&run(&["seifert", "--e0", "-2", "--leg", "2/1", "--leg", "3/2", "--leg", "5/4", "--format", "csv"]));
    assert!(csv.starts_with("spinc,d,rank_red,chi_hf,sw_osz,min_tau,certified,torsion,sw_tcw,limit,limit_approx\n"));
}

#[test]
fn verify_suites_pass() {
    let o = run(&["verify", "lens", "25"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("lens spaces"));
    let o = run(&["verify", "seifert", "--e0", "-1", "--leg", "2/1", "--leg", "3/1", "--leg", "7/1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let dir = tempfile::tempdir().unwrap();
    let path = write_graph(dir.path(), "elliptic.json", &catalog::elliptic_length_one());
    let o = run(&["verify", "--oracle", &path]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("agree on all 11 orbits"));
}

#[test]
fn root_writes_one_dot_file_per_orbit() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("dots");
    let o = run(&["root", "--catalog", "elliptic", "--orbits", "0,4", "--out-dir", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let mut names: Vec<String> = std::fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    assert_eq!(names, ["elliptic-orbit0.dot", "elliptic-orbit4.dot"]);
    let dot = std::fs::read_to_string(out.join("elliptic-orbit0.dot")).unwrap();
    assert!(dot.starts_with("digraph \"elliptic-orbit0\""));

    let o = run(&["root", "--catalog", "two-node", "--out-dir", out.to_str().unwrap(), "--prefix", "x"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["root", "--catalog", "two-node", "--oracle", "--depth", "1", "--out-dir", out.to_str().unwrap(), "--prefix", "x"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(out.join("x-orbit0.dot").exists());
}

#[test]
fn output_files_are_complete_or_absent() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("report.csv");
    let o = run(&["analyze", "--catalog", "elliptic", "--format", "csv", "-o", target.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&target).unwrap().lines().count(), 12);

    let failed = dir.path().join("never.csv");
    let o = run(&["analyze", "--catalog", "two-node", "-o", failed.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!failed.exists());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn reports_do_not_depend_on_the_thread_count() {
    let one = run(&["--threads", "1", "analyze", "--catalog", "elliptic", "--format", "json"]);
    let four = run(&["--threads", "4", "analyze", "--catalog", "elliptic", "--format", "json"]);
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
}
