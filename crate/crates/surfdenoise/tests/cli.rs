use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_surfdenoise"))
        .args(args)
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn help_exits_zero() {
    let out = run(&["--help"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("experiment"));
    assert_eq!(code(&run(&["denoise", "--help"])), 0);
}

#[test]
fn unknown_method_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = dir.path().join("cube.obj");
    assert_eq!(
        code(&run(&[
            "make-shape",
            "--shape",
            "cube",
            "--resolution",
            "3",
            "-o",
            p(&mesh)
        ])),
        0
    );
    let out = run(&[
        "denoise",
        "-i",
        p(&mesh),
        "-o",
        p(&dir.path().join("x.obj")),
        "--method",
        "nope",
    ]);
    assert_eq!(code(&out), 2);
    let msg = stderr(&out);
    assert!(
        msg.contains("nope") && msg.contains("zheng-bilateral") && msg.contains("yadav-tukey-2018"),
        "{msg}"
    );
    assert!(!dir.path().join("x.obj").exists());
}

#[test]
fn missing_input_is_a_processing_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "denoise",
        "-i",
        p(&dir.path().join("absent.obj")),
        "-o",
        p(&dir.path().join("x.obj")),
        "--method",
        "yadav-tukey-2018",
    ]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("absent.obj"));
}

#[test]
fn malformed_obj_reports_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.obj");
    fs::write(&bad, "v 0 0 0\nv 1 0 0\nf 1 2\n").unwrap();
    let out = run(&[
        "denoise",
        "-i",
        p(&bad),
        "-o",
        p(&dir.path().join("x.obj")),
        "--method",
        "yadav-tukey-2018",
    ]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("line 3"), "{}", stderr(&out));
}

#[test]
fn zero_noise_leaves_the_mesh_unchanged() {
    let dir = tempfile::tempdir().unwrap();
    let clean = dir.path().join("clean.obj");
    let noisy = dir.path().join("noisy.obj");
    assert_eq!(
        code(&run(&[
            "make-shape",
            "--shape",
            "icosphere",
            "--resolution",
            "2",
            "-o",
            p(&clean)
        ])),
        0
    );
    assert_eq!(
        code(&run(&[
            "add-noise",
            "-i",
            p(&clean),
            "-o",
            p(&noisy),
            "--sigma-factor",
            "0",
            "--seed",
            "7"
        ])),
        0
    );
    assert_eq!(fs::read(&clean).unwrap(), fs::read(&noisy).unwrap());
}

#[test]
fn denoise_writes_a_report_against_truth() {
    let dir = tempfile::tempdir().unwrap();
    let clean = dir.path().join("clean.obj");
    let noisy = dir.path().join("noisy.obj");
    let out = dir.path().join("out.obj");
    let report = dir.path().join("report.json");
    assert_eq!(
        code(&run(&[
            "make-shape",
            "--shape",
            "cube",
            "--resolution",
            "6",
            "-o",
            p(&clean)
        ])),
        0
    );
    assert_eq!(
        code(&run(&[
            "add-noise",
            "-i",
            p(&clean),
            "-o",
            p(&noisy),
            "--sigma-factor",
            "0.2",
            "--seed",
            "3"
        ])),
        0
    );
    let r = run(&[
        "denoise",
        "-i",
        p(&noisy),
        "-o",
        p(&out),
        "--method",
        "yadav-tukey-2018",
        "--report",
        p(&report),
        "--ground-truth",
        p(&clean),
    ]);
    assert_eq!(code(&r), 0, "{}", stderr(&r));
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    let after = json["mean_angular_error_deg"].as_f64().unwrap();

    let m = dir.path().join("metrics.json");
    assert_eq!(
        code(&run(&[
            "metrics",
            "--truth",
            p(&clean),
            "--candidate",
            p(&noisy),
            "-o",
            p(&m)
        ])),
        0
    );
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(&m).unwrap()).unwrap();
    let before = json["mean_angular_error_deg"].as_f64().unwrap();
    assert!(after < before, "{before} -> {after}");
}

#[test]
fn spec_file_matches_flags() {
    let dir = tempfile::tempdir().unwrap();
    let clean = dir.path().join("clean.obj");
    let noisy = dir.path().join("noisy.obj");
    assert_eq!(
        code(&run(&[
            "make-shape",
            "--shape",
            "plane",
            "--resolution",
            "5",
            "-o",
            p(&clean)
        ])),
        0
    );
    assert_eq!(
        code(&run(&[
            "add-noise",
            "-i",
            p(&clean),
            "-o",
            p(&noisy),
            "--sigma-factor",
            "0.3",
            "--seed",
            "1"
        ])),
        0
    );
    let spec = dir.path().join("filter.txt");
    fs::write(&spec, "method = generic-unilateral\nsigma = 0.4\niterations = 5\n").unwrap();
    let a = dir.path().join("a.obj");
    let b = dir.path().join("b.obj");
    assert_eq!(
        code(&run(&["denoise", "-i", p(&noisy), "-o", p(&a), "--spec", p(&spec)])),
        0
    );
    let flags = [
        "denoise",
        "-i",
        p(&noisy),
        "-o",
        p(&b),
        "--method",
        "generic-unilateral",
        "--sigma",
        "0.4",
        "--iters",
        "5",
    ];
    assert_eq!(code(&run(&flags)), 0);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let out = run(&[
        "denoise",
        "-i",
        p(&noisy),
        "-o",
        p(&a),
        "--spec",
        p(&spec),
        "--sigma",
        "1",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn point_cloud_denoise() {
    let dir = tempfile::tempdir().unwrap();
    let cloud = dir.path().join("plane.xyz");
    let mut text = String::new();
    for i in 0..12 {
        for j in 0..12 {
            let z = if (i + j) % 2 == 0 { 0.01 } else { -0.01 };
            text.push_str(&format!("{} {} {z}\n", i as f64 * 0.1, j as f64 * 0.1));
        }
    }
    fs::write(&cloud, text).unwrap();
    let out = dir.path().join("out.xyz");
    let r = run(&["denoise", "-i", p(&cloud), "-o", p(&out), "--method", "zheng-rolling"]);
    assert_eq!(code(&r), 0, "{}", stderr(&r));
    let lines: Vec<Vec<f64>> = fs::read_to_string(&out)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| l.split_whitespace().map(|t| t.parse().unwrap()).collect())
        .collect();
    assert_eq!(lines.len(), 144);
    assert!(lines.iter().all(|l| l.len() == 6));
    let bumpiness: f64 = lines.iter().map(|l| l[2].abs()).sum::<f64>() / 144.0;
    assert!(bumpiness < 0.01, "{bumpiness}");
}

#[test]
fn kernel_table_header_and_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("k.csv");
    assert_eq!(
        code(&run(&[
            "kernel-table",
            "--kernel",
            "tukey",
            "--sigma",
            "2",
            "--xmax",
            "4",
            "--n",
            "9",
            "--out",
            p(&out)
        ])),
        0
    );
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,rho,psi,g"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 9);
    assert!(rows[8].starts_with("4,"));

    let out = run(&[
        "kernel-table",
        "--kernel",
        "gaussian",
        "--box-floor",
        "0.1",
        "--out",
        p(&dir.path().join("g.csv")),
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn experiment_summary_has_every_method() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let r = run(&[
        "experiment",
        "--preset",
        "cube",
        "--noise",
        "0.2",
        "--seed",
        "42",
        "--out",
        p(&out),
    ]);
    assert_eq!(code(&r), 0, "{}", stderr(&r));
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    let mut lines = summary.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&header[..3], ["method", "sigma", "mean_angular_error_deg"]);
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 14);
    for row in &rows {
        assert_eq!(row.len(), header.len());
        let err: f64 = row[2].parse().unwrap();
        assert!(err.is_finite() && err > 0.0, "{row:?}");
    }
    let noisy: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("noisy.json")).unwrap()).unwrap();
    assert!(noisy["mean_angular_error_deg"].as_f64().unwrap() > 0.0);
}

#[test]
fn unknown_experiment_method_lists_valid_ones() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "experiment",
        "--preset",
        "cube",
        "--methods",
        "yadav-tukey-2018,bogus",
        "--out",
        p(dir.path()),
    ]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("bogus"));
}
