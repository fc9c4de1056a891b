use std::path::Path;
use std::process::{Command, Output};

use covdesign::synthesis::{min_pairwise_distance, PointSet, Sidecar};
use covdesign::workspace::Workspace;

const FAST_CONFIG: &str = "seed = 5\n[design]\np0_grid = [1.3]\n[synthesis]\nt_max = 40\n";

fn covdesign(ws: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_covdesign"))
        .arg("--workspace")
        .arg(ws)
        .args(args)
        .env_remove("COVDESIGN_WORKSPACE")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn fast_config(dir: &Path) -> String {
    write_config(dir, "fast.toml", FAST_CONFIG)
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn read(ws: &Path, rel: &str) -> String {
    std::fs::read_to_string(ws.join(rel)).unwrap()
}

#[test]
fn generate_lhs_shape() {
    let dir = tempfile::tempdir().unwrap();
    let out = covdesign(
        dir.path(),
        &[
            "generate", "--method", "lhs", "--n", "16", "--d", "3", "--seed", "7",
        ],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = read(dir.path(), "designs/lhs-n16-d3-s7.csv");
    assert_eq!(csv.lines().count(), 16);
    assert!(csv.lines().all(|l| l.split(',').count() == 3));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ws = dir.path();
    assert_eq!(
        code(&covdesign(
            ws,
            &["generate", "--method", "sobol", "--n", "16", "--d", "12"]
        )),
        2
    );
    assert_eq!(
        code(&covdesign(
            ws,
            &["generate", "--method", "pds-dart", "--r-min", "0.9", "--n", "5", "--d", "2"]
        )),
        3
    );
    assert_eq!(
        code(&covdesign(ws, &["design", "--n", "10", "--d", "9"])),
        2
    );
    assert_eq!(
        code(&covdesign(
            ws,
            &["design", "--n", "10", "--d", "2", "--family", "halton"]
        )),
        2
    );
    assert_eq!(
        code(&covdesign(
            ws,
            &[
                "eval",
                "--kind",
                "blind",
                "--function",
                "alpine1",
                "--d",
                "3",
                "--n",
                "50",
                "--trials",
                "0"
            ]
        )),
        2
    );
    assert_eq!(
        code(&covdesign(
            ws,
            &["synthesize", "--params", "/nonexistent/report.toml"]
        )),
        2
    );
    assert_eq!(
        code(&covdesign(
            ws,
            &[
                "report",
                "--coverage",
                "--n",
                "100",
                "--d",
                "2..3",
                "--family",
                "lattice"
            ]
        )),
        2
    );
    let bad = ws.join("bad.toml");
    std::fs::write(&bad, "[synthesis]\nunknown_key = 1\n").unwrap();
    assert_eq!(
        code(&covdesign(
            ws,
            &[
                "--config",
                bad.to_str().unwrap(),
                "generate",
                "--method",
                "lhs",
                "--n",
                "4",
                "--d",
                "2"
            ]
        )),
        2
    );
    assert_eq!(code(&covdesign(ws, &["frobnicate"])), 2);
}

#[test]
fn design_then_synthesize_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fast_config(dir.path());
    let runs: Vec<_> = ["a", "b"]
        .iter()
        .map(|sub| {
            let ws = dir.path().join(sub);
            let out = covdesign(
                &ws,
                &[
                    "--config", &cfg, "design", "--n", "100", "--d", "2", "--family", "proposed",
                ],
            );
            assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
            let report = ws.join("reports/proposed-n100-d2.toml");
            let out = covdesign(
                &ws,
                &[
                    "--config",
                    &cfg,
                    "synthesize",
                    "--params",
                    report.to_str().unwrap(),
                ],
            );
            assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
            ws
        })
        .collect();
    let files = [
        "reports/proposed-n100-d2.toml",
        "reports/proposed-n100-d2-realizability.toml",
        "profiles/proposed-n100-d2-pcf.csv",
        "profiles/proposed-n100-d2-psd.csv",
        "designs/synth-proposed-n100-d2-alr-s5.csv",
        "designs/synth-proposed-n100-d2-alr-s5.toml",
        "profiles/synth-proposed-n100-d2-alr-s5-trace.csv",
    ];
    for f in files {
        assert_eq!(
            read(&runs[0], f),
            read(&runs[1], f),
            "{f} differs between runs"
        );
    }
    assert!(read(&runs[0], files[0]).contains("feasible = true"));

    let points = PointSet::read_csv(read(&runs[0], files[4]).as_bytes()).unwrap();
    let sidecar = Sidecar::from_toml(&read(&runs[0], files[5])).unwrap();
    assert_eq!((points.n(), points.d()), (100, 2));
    assert_eq!(
        sidecar.min_distance,
        Some(min_pairwise_distance(&points).unwrap())
    );
    let trace = read(&runs[0], files[6]);
    assert_eq!(trace.lines().count(), 1 + 1 + 40);
    let last_objective: f64 = trace
        .lines()
        .last()
        .unwrap()
        .split(',')
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert_eq!(sidecar.final_objective, Some(last_objective));

    let manifest = Workspace::open(&runs[0]).unwrap().manifest().unwrap();
    assert_eq!(manifest.len(), 2);
    let mut recorded = manifest[0].outputs.clone();
    recorded.sort();
    let mut expected: Vec<String> = files[..4].iter().map(|s| s.to_string()).collect();
    expected.sort();
    assert_eq!(recorded, expected);
    assert_eq!(manifest[1].seeds, vec![5]);
    assert!(manifest[1].command.iter().any(|a| a == "synthesize"));
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fast_config(dir.path());
    let ws = dir.path().join("ws");
    let out = covdesign(
        &ws,
        &[
            "--config", &cfg, "--seed", "11", "generate", "--method", "random", "--n", "8", "--d",
            "2",
        ],
    );
    assert_eq!(code(&out), 0);
    assert!(ws.join("designs/random-n8-d2-s11.csv").exists());
}

#[test]
fn coverage_report_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "coarse.toml",
        "[design]\np0_grid = [1.0, 1.25, 1.5, 1.75, 2.0, 2.25, 2.5]\n",
    );
    let ws = dir.path().join("ws");
    let out = covdesign(
        &ws,
        &[
            "--config",
            &cfg,
            "report",
            "--coverage",
            "--n",
            "200",
            "--d",
            "2..4",
        ],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = read(&ws, "reports/coverage-n200-d2-4.csv");
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("family,d,n,r_min,rho,feasible"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 9);
    for chunk in rows.chunks(3) {
        let fams: Vec<&str> = chunk.iter().map(|r| r[0]).collect();
        assert_eq!(fams, ["pds", "sfsd", "proposed"]);
        let rho: Vec<f64> = chunk.iter().map(|r| r[4].parse().unwrap()).collect();
        assert!(rho[2] >= rho[1] && rho[1] >= rho[0], "{rho:?}");
    }
}

#[test]
fn blind_eval_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let ws = dir.path();
    let args = [
        "eval",
        "--kind",
        "blind",
        "--function",
        "alpine1",
        "--method",
        "lhs,random",
        "--d",
        "3",
        "--n",
        "20",
        "--trials",
        "3",
    ];
    let out = covdesign(ws, &args);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = read(ws, "reports/eval-blind-n20-d3.csv");
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "method,function,d,n,trials,mse_mean,mse_std");
    assert!(lines[1].starts_with("lhs,alpine1,3,20,3,"));
    assert!(lines[2].starts_with("random,alpine1,3,20,3,"));
    assert_eq!(
        read(ws, "reports/eval-blind-lhs-alpine1-n20-d3-trials.csv")
            .lines()
            .count(),
        4
    );
    let again = tempfile::tempdir().unwrap();
    assert_eq!(code(&covdesign(again.path(), &args)), 0);
    assert_eq!(read(again.path(), "reports/eval-blind-n20-d3.csv"), csv);
}

#[test]
fn seqopt_traces() {
    let dir = tempfile::tempdir().unwrap();
    let ws = dir.path();
    let out = covdesign(
        ws,
        &[
            "eval",
            "--kind",
            "seqopt",
            "--function",
            "ackley",
            "--method",
            "random",
            "--init",
            "10",
            "--budget",
            "6",
            "--d",
            "3",
            "--trials",
            "2",
        ],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let trace = read(ws, "reports/eval-seqopt-random-ackley-n10-d3-trace1.csv");
    assert_eq!(trace.lines().count(), 1 + 1 + 6);
    assert!(read(ws, "reports/eval-seqopt-n10-d3.csv").contains("random,ackley,3,10,2,"));
}
