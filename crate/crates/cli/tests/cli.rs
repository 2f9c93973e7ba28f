use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn superdark(args: &[&str]) -> Output {
    superdark_env(args, &[])
}

fn superdark_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_superdark"));
    cmd.args(args).env_remove("SUPERDARK_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn ok(o: Output) -> Output {
    assert!(o.status.success(), "failed: {}", stderr(&o));
    o
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|f| f.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn darkstate_three_atoms() {
    let o = ok(superdark(&[
        "darkstate",
        "--chain",
        "3",
        "--ka",
        "0.1",
        "--pol",
        "perp",
    ]));
    let out = stdout(&o);
    assert!(
        out.contains("binomial       C = (0.408248, -0.816497, 0.408248)"),
        "{out}"
    );
    assert!(out.contains("asymptote"));
}

#[test]
fn darkstate_pair_and_json() {
    let dir = TempDir::new().unwrap();
    let json = dir.path().join("d.json");
    let o = ok(superdark(&[
        "darkstate",
        "--chain",
        "2",
        "--ka",
        "0.3",
        "--json",
        path_str(&json),
    ]));
    assert!(stdout(&o).contains("(0.707107, -0.707107)"));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(json).unwrap()).unwrap();
    assert_eq!(v["n_atoms"], 2);
    assert_eq!(v["variants"].as_array().unwrap().len(), 3);
}

#[test]
fn duplicate_positions_exit_two() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("dup.txt");
    fs::write(&p, "0 0 0\n1 0 0\n1 0 0\n").unwrap();
    let o = superdark(&["darkstate", "--positions", path_str(&p)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("geometry"), "{}", stderr(&o));
}

#[test]
fn explicit_positions_vector_mode() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("tri.txt");
    fs::write(&p, "# triangle\n0 0 0\n0.2 0 0\n0.1 0.17 0\n").unwrap();
    let o = ok(superdark(&["darkstate", "--positions", path_str(&p)]));
    let out = stdout(&o);
    assert!(out.contains("N = 3, vector"));
    assert!(out.contains("W eigenvector"));
    assert!(!out.contains("binomial"));
}

#[test]
fn tune_reports_known_shifts() {
    let o = ok(superdark(&[
        "tune", "--chain", "3", "--ka", "0.1", "--pol", "perp",
    ]));
    assert!(stdout(&o).contains("Ω/U = -0.875000"), "{}", stdout(&o));
    let o = ok(superdark(&[
        "tune", "--chain", "4", "--ka", "0.2", "--pol", "par",
    ]));
    assert!(stdout(&o).contains("Ω/U = -1.37037"));
    let o = ok(superdark(&["tune", "--chain", "2", "--ka", "0.2"]));
    assert!(stdout(&o).contains("zero-sum (d²k³):        (0, 0)"));
}

#[test]
fn tune_rejects_vector_mode() {
    let o = superdark(&["tune", "--chain", "3", "--ka", "0.1", "--pol", "vector"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn scan_csv_and_summary_agree() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("scan.csv");
    let summary = dir.path().join("summary.json");
    ok(superdark(&[
        "scan",
        "--chain",
        "3",
        "--ka",
        "0.1",
        "--pol",
        "perp",
        "--grid",
        "401",
        "--out",
        path_str(&csv),
        "--summary",
        path_str(&summary),
    ]));
    let (header, rows) = read_csv(&csv);
    assert_eq!(
        header,
        ["omega_over_u", "gamma_tilde_over_gamma", "eigenenergy"]
    );
    assert_eq!(rows.len(), 401);
    assert!(rows.windows(2).all(|w| w[1][0] > w[0][0]));

    let step = rows[1][0] - rows[0][0];
    let best = rows.iter().min_by(|a, b| a[1].total_cmp(&b[1])).unwrap();
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(summary).unwrap()).unwrap();
    let omega_min = report["omega_min_over_u"][0].as_f64().unwrap();
    let gamma_min = report["gamma_min_over_gamma"].as_f64().unwrap();
    assert!((best[0] - omega_min).abs() <= step);
    assert!(gamma_min <= best[1]);
    assert!((omega_min + 0.875).abs() < 0.01);
}

#[test]
fn scan_zero_row_matches_table_noshift() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("scan.csv");
    let table = dir.path().join("table.csv");
    ok(superdark(&[
        "scan",
        "--chain",
        "3",
        "--ka2",
        "0.01",
        "--pol",
        "par",
        "--omega-min",
        "-1",
        "--omega-max",
        "0",
        "--grid",
        "101",
        "--out",
        path_str(&csv),
    ]));
    ok(superdark(&[
        "table1",
        "--ka2",
        "0.01",
        "--n",
        "3",
        "--pol",
        "par",
        "--out",
        path_str(&table),
    ]));
    let (_, scan) = read_csv(&csv);
    let last = scan.last().unwrap();
    assert_eq!(last[0], 0.0);
    let text = fs::read_to_string(&table).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let noshift: f64 = row[4].parse().unwrap();
    assert_eq!(last[1], noshift);
    assert!((noshift / 0.0040 - 1.0).abs() < 0.03);
}

#[test]
fn scan_output_is_bit_stable() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = |p: &Path| {
        vec![
            "scan".to_string(),
            "--chain".into(),
            "4".into(),
            "--ka".into(),
            "0.3".into(),
            "--grid".into(),
            "301".into(),
            "--out".into(),
            p.to_str().unwrap().into(),
        ]
    };
    let run = |p: &Path, threads: &str| {
        let owned = args(p);
        let refs: Vec<&str> = owned.iter().map(String::as_str).collect();
        ok(superdark_env(&refs, &[("SUPERDARK_THREADS", threads)]));
    };
    run(&a, "1");
    run(&b, "4");
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn scan_usage_and_numerical_errors() {
    let o = superdark(&["scan", "--chain", "3", "--ka", "0.1", "--grid", "0"]);
    assert_eq!(o.status.code(), Some(2));

    // the minimum near -0.872 lies outside this window
    let o = superdark(&[
        "scan",
        "--chain",
        "3",
        "--ka",
        "0.1",
        "--pol",
        "par",
        "--omega-min",
        "-0.8",
        "--omega-max",
        "-0.5",
        "--grid",
        "31",
    ]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert!(stderr(&o).contains("bracket"));

    let o = superdark(&["scan", "--chain", "2", "--ka", "0.1"]);
    assert_eq!(o.status.code(), Some(2));

    let o = superdark_env(
        &["tune", "--chain", "3", "--ka", "0.1"],
        &[("SUPERDARK_THREADS", "zero")],
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn scan_single_point() {
    let o = ok(superdark(&[
        "scan",
        "--chain",
        "3",
        "--ka",
        "0.1",
        "--omega-min",
        "-0.5",
        "--omega-max",
        "-0.5",
        "--grid",
        "1",
    ]));
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 2);
}

#[test]
fn scan_five_atoms_routes_to_multi() {
    let dir = TempDir::new().unwrap();
    let summary = dir.path().join("s.json");
    let o = ok(superdark(&[
        "scan",
        "--chain",
        "5",
        "--ka",
        "0.1",
        "--pol",
        "perp",
        "--summary",
        path_str(&summary),
    ]));
    assert!(stdout(&o).contains("seed Ω/U"));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(summary).unwrap()).unwrap();
    assert_eq!(v["omega_min_over_u"].as_array().unwrap().len(), 2);
    assert!(
        v["gamma_min_over_gamma"].as_f64().unwrap() <= v["gamma_at_prediction"].as_f64().unwrap()
    );
}

#[test]
fn table1_single_cell() {
    let o = ok(superdark(&[
        "table1", "--ka2", "0.01", "--n", "3", "--pol", "par",
    ]));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(
        lines.next().unwrap(),
        "n,polarization,ka2,gamma_min,gamma_noshift"
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let gmin: f64 = row[3].parse().unwrap();
    assert!((gmin / 7.62e-7 - 1.0).abs() < 0.03);
}

#[test]
fn table1_full_compare() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("t.csv");
    let o = ok(superdark(&["table1", "--compare", "--out", path_str(&csv)]));
    let out = stdout(&o);
    assert!(out.contains("dev_min"));
    let worst: f64 = out
        .lines()
        .last()
        .unwrap()
        .trim_start_matches("largest relative deviation: ")
        .trim_end_matches('%')
        .parse()
        .unwrap();
    assert!(worst < 3.0);
    let (header, rows) = {
        let text = fs::read_to_string(&csv).unwrap();
        let mut l = text.lines().map(String::from).collect::<Vec<_>>();
        let h = l.remove(0);
        (h, l)
    };
    assert_eq!(header, "n,polarization,ka2,gamma_min,gamma_noshift");
    assert_eq!(rows.len(), 12);
}

#[test]
fn table1_compare_with_reference_file() {
    let dir = TempDir::new().unwrap();
    let reference = dir.path().join("ref.csv");
    fs::write(
        &reference,
        "n,polarization,ka2,gamma_min,gamma_noshift\n4,perpendicular,1.0,1.46e-3,2.7e-2\n",
    )
    .unwrap();
    let o = ok(superdark(&[
        "table1",
        "--n",
        "4",
        "--ka2",
        "1.0",
        "--pol",
        "perp",
        "--out",
        path_str(&dir.path().join("t.csv")),
        "--compare",
        path_str(&reference),
    ]));
    let out = stdout(&o);
    assert!(out.contains("-0.103%"), "{out}");
}

#[test]
fn config_file_with_flag_override() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(
        &cfg,
        "[geometry]\nchain = 4\nka = 0.2\npolarization = \"parallel\"\n",
    )
    .unwrap();
    let o = ok(superdark(&["tune", "--config", path_str(&cfg)]));
    assert!(stdout(&o).contains("N = 4, parallel"));
    let o = ok(superdark(&[
        "tune",
        "--config",
        path_str(&cfg),
        "--chain",
        "3",
        "--pol",
        "perp",
    ]));
    let out = stdout(&o);
    assert!(out.contains("N = 3, perpendicular"));
    assert!(out.contains("ka = 0.200000"));

    fs::write(&cfg, "[geometry]\nchain = 3\nspacing = 1\n").unwrap();
    let o = superdark(&["tune", "--config", path_str(&cfg)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn wmatrix_dumps_and_quadrature_agrees() {
    let dir = TempDir::new().unwrap();
    let closed = dir.path().join("closed");
    let quad = dir.path().join("quad");
    let p = dir.path().join("pair.txt");
    fs::write(&p, "0 0 0\n0.7 1.1 -0.4\n").unwrap();
    ok(superdark(&[
        "wmatrix",
        "--positions",
        path_str(&p),
        "--out-dir",
        path_str(&closed),
    ]));
    ok(superdark(&[
        "wmatrix",
        "--positions",
        path_str(&p),
        "--quadrature",
        "--out-dir",
        path_str(&quad),
    ]));
    let load = |d: &Path, f: &str| -> Vec<Vec<f64>> {
        fs::read_to_string(d.join(f))
            .unwrap()
            .lines()
            .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
            .collect()
    };
    let (wc, wq) = (load(&closed, "w.csv"), load(&quad, "w.csv"));
    assert_eq!(wc.len(), 6);
    assert!(wc.iter().all(|r| r.len() == 6));
    for (a, b) in wc.iter().flatten().zip(wq.iter().flatten()) {
        assert!((a - b).abs() < 1e-10);
    }
    assert_eq!(load(&closed, "u.csv").len(), 6);
}

#[test]
fn wmatrix_to_stdout() {
    let o = ok(superdark(&[
        "wmatrix", "--chain", "3", "--ka", "1", "--pol", "par",
    ]));
    let out = stdout(&o);
    assert!(out.starts_with("# U"));
    assert_eq!(out.lines().count(), 8);
    assert!(out.contains("# W"));
}
