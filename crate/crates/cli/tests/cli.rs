use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn xbouss(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_xbouss"));
    cmd.args(args).env_remove("XBOUSS_WORKERS");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("run xbouss")
}

fn ok(args: &[&str]) -> String {
    let out = xbouss(args, &[]);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

struct Csv {
    meta: Vec<String>,
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
}

fn parse_csv(text: &str) -> Csv {
    let meta = text.lines().filter(|l| l.starts_with('#')).map(String::from).collect();
    let mut body = text.lines().filter(|l| !l.starts_with('#'));
    let columns = body.next().unwrap().split(',').map(String::from).collect();
    let rows = body.map(|l| l.split(',').map(String::from).collect()).collect();
    Csv { meta, columns, rows }
}

fn col(csv: &Csv, name: &str) -> Vec<f64> {
    let j = csv.columns.iter().position(|c| c == name).unwrap();
    csv.rows.iter().map(|r| r[j].parse().unwrap()).collect()
}

fn sech2(x: f64) -> f64 {
    1.0 / x.cosh().powi(2)
}

#[test]
fn solitary_peak_matches_golden_amplitude() {
    let csv = parse_csv(&ok(&["solitary", "--c", "1.025"]));
    assert_eq!(csv.columns, ["xi", "zeta", "v"]);
    assert!(csv.meta.iter().any(|m| m == "# command: \"solitary\""));
    let peak = col(&csv, "zeta").into_iter().fold(0.0, f64::max);
    assert!((peak / 0.050761707526104684 - 1.0).abs() < 1e-9, "{peak}");
}

#[test]
fn solitary_gn_peak() {
    let c: f64 = 1.01;
    let csv = parse_csv(&ok(&["solitary", "--c", "1.01", "--gn-mode"]));
    let peak = col(&csv, "zeta").into_iter().fold(0.0, f64::max);
    assert!((peak - (c * c - 1.0)).abs() <= 1e-6);
}

#[test]
fn exit_codes() {
    assert_eq!(xbouss(&["solitary", "--c", "1.0"], &[]).status.code(), Some(2));
    assert_eq!(xbouss(&["solitary"], &[]).status.code(), Some(2));
    assert_eq!(
        xbouss(&["solitary", "--c", "1.1", "--grid-n", "100"], &[])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(xbouss(&["residuals", "--eps", ""], &[]).status.code(), Some(2));
    assert_eq!(xbouss(&["residuals", "--eps", "1e-2,1e-1"], &[]).status.code(), Some(2));
    assert_eq!(xbouss(&["corrector", "--t", "5"], &[]).status.code(), Some(2));
    assert_eq!(
        xbouss(&["corrector", "--eps", "0.5", "--alpha", "2"], &[])
            .status
            .code(),
        Some(2)
    );
    let bad_workers = xbouss(&["solitary", "--c", "1.1"], &[("XBOUSS_WORKERS", "zero")]);
    assert_eq!(bad_workers.status.code(), Some(2));
    // an unreachable quadrature tolerance is a numerical failure
    let out = xbouss(&["corrector", "--tol", "1e-300", "--grid-n", "11"], &[]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("quadrature"));
}

#[test]
fn compare_columns() {
    let csv = parse_csv(&ok(&["compare", "--c", "1.025,1.01,1.002"]));
    assert_eq!(csv.columns, ["model", "c", "X", "Z"]);
    let pick = |model: &str, c: f64| -> Vec<(f64, f64)> {
        csv.rows
            .iter()
            .filter(|r| r[0] == model && r[1].parse::<f64>().unwrap() == c)
            .map(|r| (r[2].parse().unwrap(), r[3].parse().unwrap()))
            .collect()
    };
    let k1 = pick("KdV", 1.025);
    let k3 = pick("KdV", 1.002);
    assert_eq!(k1.len(), 601);
    for (a, b) in k1.iter().zip(&k3) {
        assert_eq!(a.0, b.0);
        assert!((a.1 - b.1).abs() <= 1e-12);
    }
    for c in [1.025, 1.01, 1.002] {
        for (x, z) in pick("GN", c) {
            assert!((z - sech2(x)).abs() <= 1e-12);
        }
        assert_eq!(pick("Boussinesq", c).len(), 601);
    }
    let dist = pick("xB", 1.002)
        .iter()
        .map(|(x, z)| (z - sech2(*x)).abs())
        .fold(0.0, f64::max);
    assert!(dist <= 0.01, "{dist}");
}

#[test]
fn corrector_reduces_to_background_at_time_zero() {
    let csv = parse_csv(&ok(&[
        "corrector",
        "--t",
        "0",
        "--grid-n",
        "101",
        "--grid-half-width",
        "10",
    ]));
    assert_eq!(csv.columns, ["x", "zeta1", "v1", "zeta2", "v2", "zeta", "v"]);
    let x = col(&csv, "x");
    let z2 = col(&csv, "zeta2");
    let z = col(&csv, "zeta");
    let z1 = col(&csv, "zeta1");
    for i in 0..x.len() {
        let g = (-(0.3 * std::f64::consts::PI * x[i]).powi(2)).exp();
        assert!((z2[i] - g).abs() < 1e-15);
        assert!((z[i] - z1[i] - 0.01 * g).abs() < 1e-15);
    }
}

#[test]
fn residuals_default_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    ok(&["residuals", "--out", out.to_str().unwrap()]);
    let csv = parse_csv(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(csv.columns, ["epsilon", "r1_l2", "r2_l2", "r1_inf", "r2_inf"]);
    let eps = col(&csv, "epsilon");
    let r1 = col(&csv, "r1_l2");
    for (e, r) in eps.iter().zip(&r1) {
        if (1e-4..=1e-2).contains(e) {
            let ratio = r / e.powi(3);
            assert!((20.0..=35.0).contains(&ratio), "{e}: {ratio}");
        }
    }
    let summary: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("sweep.summary.json")).unwrap()).unwrap();
    for key in ["r1_l2", "r1_inf"] {
        let s = summary["slopes"][key].as_f64().unwrap();
        assert!((2.9..=3.1).contains(&s), "{key}: {s}");
    }
    assert_eq!(summary["reports"].as_array().unwrap().len(), 5);
    let plot = parse_csv(&std::fs::read_to_string(dir.path().join("sweep_plot.csv")).unwrap());
    let guide = col(&plot, "log10_eps3");
    let le = col(&plot, "log10_eps");
    for (g, l) in guide.iter().zip(&le) {
        assert!((g - 3.0 * l).abs() < 1e-12);
    }
}

#[test]
fn opcheck_report() {
    let text = ok(&["opcheck", "--eps", "1e-1,1e-2,1e-3", "--samples", "30"]);
    let v: Value = serde_json::from_str(&text).unwrap();
    let checks = &v["metadata"]["checks"];
    for key in ["roundtrip_ok", "symmetry_ok", "bound_finite", "bound_non_increasing"] {
        assert_eq!(checks[key], true, "{key}");
    }
    assert!(checks["roundtrip_max"].as_f64().unwrap() <= 1e-10);
    assert!(checks["symmetry_max"].as_f64().unwrap() <= 1e-11);
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
}

#[test]
fn json_mirrors_csv() {
    let args = ["corrector", "--grid-n", "21", "--grid-half-width", "5"];
    let csv = parse_csv(&ok(&args));
    let mut with_json = args.to_vec();
    with_json.extend(["--format", "json"]);
    let v: Value = serde_json::from_str(&ok(&with_json)).unwrap();
    let cols: Vec<String> = v["columns"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c.as_str().unwrap().to_string())
        .collect();
    assert_eq!(cols, csv.columns);
    let meta = v["metadata"].as_object().unwrap();
    assert_eq!(meta.len(), csv.meta.len());
    for (line, (k, val)) in csv.meta.iter().zip(meta) {
        assert_eq!(line, &format!("# {k}: {val}"));
    }
    for (row, jrow) in csv.rows.iter().zip(v["rows"].as_array().unwrap()) {
        for (cell, jcell) in row.iter().zip(jrow.as_array().unwrap()) {
            assert_eq!(cell.parse::<f64>().unwrap(), jcell.as_f64().unwrap());
        }
    }
}

#[test]
fn output_is_deterministic_across_workers() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, workers: &str, args: &[&str]| -> Vec<u8> {
        let path = dir.path().join(name);
        let mut all = args.to_vec();
        all.extend(["--out", path.to_str().unwrap()]);
        let out = xbouss(&all, &[("XBOUSS_WORKERS", workers)]);
        assert!(out.status.success());
        std::fs::read(Path::new(&path)).unwrap()
    };
    let cmp = ["compare", "--c", "1.02,1.01"];
    assert_eq!(run("a.csv", "1", &cmp), run("b.csv", "3", &cmp));
    let cor = ["corrector", "--grid-n", "201"];
    assert_eq!(run("c.csv", "1", &cor), run("d.csv", "4", &cor));
    let res = [
        "residuals",
        "--eps",
        "1e-1,1e-2,1e-3",
        "--grid-n",
        "1024",
        "--format",
        "json",
    ];
    assert_eq!(run("e.json", "1", &res), run("f.json", "3", &res));
    assert_eq!(
        std::fs::read(dir.path().join("e.summary.json")).unwrap(),
        std::fs::read(dir.path().join("f.summary.json")).unwrap()
    );
    let op = ["opcheck", "--eps", "1e-1,1e-2", "--samples", "5"];
    assert_eq!(run("g.json", "1", &op), run("h.json", "2", &op));
}
