//! End-to-end tests driving the compiled binary: output formats, file
//! inputs, exit codes, and determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_spinnet"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

/// Run expecting success; return stdout.
fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "spinnet {:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 output")
}

fn exit_code(args: &[&str]) -> i32 {
    run(args).status.code().expect("exit code")
}

/// Scratch directory for input files, fresh per test.
fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("spinnet-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn eval_theta_in_all_normalizations() {
    let out = ok(&["eval", "--builtin", "theta", "--colors", "2,2,2"]);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("normalization,exact,decimal"));
    let rows: Vec<&str> = lines.collect();
    assert!(rows[0].starts_with("standard,-24,-2.4000"));
    assert!(rows[1].starts_with("penrose,-24,"));
    assert!(rows[2].starts_with("edge,-3,"));
    assert!(rows[3].starts_with("unitary,-1,"));
}

#[test]
fn eval_respects_vertex_rotations_in_graph_files() {
    let dir = scratch("rotations");
    // Same abstract graph, opposite rotation at the second vertex: the
    // two ribbon structures differ by a vertex flip, so the all-2
    // values differ by (-1)^3.
    let mirrored = dir.join("mirrored.graph");
    std::fs::write(
        &mirrored,
        "# two vertices, three parallel edges\n\
         vertex 0: 0 1 2\nvertex 1: 5 4 3\n\
         edge 0: 0 3\nedge 1: 1 4\nedge 2: 2 5\n",
    )
    .unwrap();
    let straight = dir.join("straight.graph");
    std::fs::write(
        &straight,
        "vertex 0: 0 1 2\nvertex 1: 3 4 5\n\
         edge 0: 0 3\nedge 1: 1 4\nedge 2: 2 5\n",
    )
    .unwrap();
    let coloring = dir.join("all2.colors");
    std::fs::write(&coloring, "0 2\n1 2\n# trailing comment\n2 2\n").unwrap();

    let g = mirrored.to_str().unwrap();
    let c = coloring.to_str().unwrap();
    let out = ok(&["eval", "--graph", g, "--coloring", c]);
    assert!(out.contains("standard,-24,"), "mirrored rotation: {out}");

    let g = straight.to_str().unwrap();
    let out = ok(&["eval", "--graph", g, "--coloring", c]);
    assert!(out.contains("standard,24,"), "straight rotation: {out}");
}

#[test]
fn classify_reports_geometry_and_determinant() {
    let out = ok(&["classify", "--colors", "4,4,4,4,6,6"]);
    assert!(out.contains("geometry,Minkowskian"));
    assert!(out.contains("det_c,-2592"));
    assert!(out.contains("degenerate,false"));

    let out = ok(&["classify", "--colors", "2,2,2,2,2,2"]);
    assert!(out.contains("geometry,Euclidean"));
    assert!(out.contains("det_c,32"));

    let out = ok(&["classify", "--colors", "3,4,4,3,5,5"]);
    assert!(out.contains("geometry,Plane"));
    assert!(out.contains("det_c,0"));
}

#[test]
fn asympt_prints_exact_growth_rates() {
    let out = ok(&["asympt", "--colors", "2,2,2,2,2,2", "--precision", "30"]);
    assert!(out.contains("329/729 - 460/729*sqrt(-2)"), "{out}");
    assert!(out.contains("329/729 + 460/729*sqrt(-2)"), "{out}");
    // Both branches carry alpha = -3/2 and contribute.
    assert_eq!(out.matches(",-3/2,").count(), 2, "{out}");
    assert_eq!(out.matches(",true").count(), 2, "{out}");
}

#[test]
fn sequence_starts_with_known_values() {
    let out = ok(&["sequence", "--colors", "2,2,2,2,2,2", "--nmax", "3"]);
    assert_eq!(out, "n,value\n0,1\n1,1/6\n2,-3/70\n3,-1/14\n");
}

#[test]
fn guess_rec_finds_the_catalan_recurrence() {
    let dir = scratch("catalan");
    let path = dir.join("catalan.txt");
    let mut seq = vec![1u128, 1];
    for n in 1..25u128 {
        let c = seq[n as usize];
        seq.push(c * (4 * n + 2) / (n + 2));
    }
    let text: String = seq.iter().map(|c| format!("{c}\n")).collect();
    std::fs::write(&path, text).unwrap();

    let p = path.to_str().unwrap();
    let out = ok(&["guess-rec", "--sequence", p]);
    assert_eq!(out, "shift,polynomial\n0,-4*n - 2\n1,n + 2\n");

    let out = ok(&["guess-rec", "--sequence", p, "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["order"], 1);
    assert_eq!(v["degree"], 1);
    assert_eq!(v["relation"], "(-4 n - 2) a(n+0) + (1 n + 2) a(n+1) = 0");
}

#[test]
fn radius_estimate_for_theta_is_near_27() {
    let out = ok(&["radius", "--builtin", "theta", "--nmax", "60"]);
    let line = out.lines().find(|l| l.starts_with("radius,")).unwrap();
    let r: f64 = line["radius,".len()..].parse().unwrap();
    assert!((r - 27.0).abs() < 0.5, "radius {r}");
}

#[test]
fn predict_error_shrinks_with_n() {
    let out = ok(&[
        "predict",
        "--colors",
        "2,2,2,2,2,2",
        "--nmax",
        "40",
        "--depth",
        "4",
    ]);
    let last = out.lines().last().unwrap();
    let cols: Vec<&str> = last.split(',').collect();
    assert_eq!(cols[0], "40");
    let value: f64 = cols[1].parse().unwrap();
    let error: f64 = cols[3].parse().unwrap();
    // Truncation after mu_4 leaves a relative error of order n^-5.
    assert!(
        (error / value).abs() < 1e-6,
        "relative error {} at n=40",
        error / value
    );
}

#[test]
fn json_output_is_wellformed() {
    let out = ok(&[
        "eval",
        "--builtin",
        "theta",
        "--colors",
        "2,2,2",
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0]["normalization"], "standard");
    assert_eq!(rows[0]["exact"], "-24");

    let out = ok(&[
        "formal-series",
        "--colors",
        "2,2,2,2,2,2",
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let branches = v.as_array().unwrap();
    assert_eq!(branches.len(), 2);
    for b in branches {
        assert_eq!(b["alpha"]["p"], "-3/2");
        assert_eq!(b["lambda"]["m"], -2);
        assert_eq!(b["lambda"]["p"], "329/729");
        // mu_0 = 1 through mu_6 at the default depth.
        let mu = b["mu"].as_array().unwrap();
        assert_eq!(mu.len(), 7);
        assert_eq!(mu[0]["p"], "1");
    }
}

#[test]
fn output_is_deterministic() {
    let args = ["asympt", "--colors", "4,4,4,4,6,6", "--precision", "40"];
    assert_eq!(ok(&args), ok(&args));
    let args = ["genfun", "--builtin", "tet"];
    assert_eq!(ok(&args), ok(&args));
}

#[test]
fn exit_codes_follow_error_classes() {
    // Wrong number of colors: parse error.
    assert_eq!(
        exit_code(&["eval", "--builtin", "theta", "--colors", "2,2"]),
        2
    );
    // Inadmissible coloring: degenerate input.
    assert_eq!(exit_code(&["classify", "--colors", "1,1,1,1,1,1"]), 4);
    // Unknown builtin graph.
    assert_eq!(
        exit_code(&["eval", "--builtin", "nosuch", "--colors", "2,2,2"]),
        5
    );
    // Too few terms to pin down any recurrence of the allowed shape.
    assert_eq!(
        exit_code(&["predict", "--colors", "4,4,4,4,6,6", "--nmax", "30"]),
        5
    );
}
