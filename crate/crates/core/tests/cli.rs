use std::process::{Command, Output};

fn openchain(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_openchain")).args(args).output().expect("run openchain")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn spectrum_csv() {
    let text = stdout(&openchain(&["spectrum", "--spin", "half", "--length", "3"]));
    assert_eq!(text, "index,energy,degeneracy\n0,-1,2\n1,1,2\n2,2,4\n");
}

#[test]
fn profile_reports_oracle_column() {
    let text = stdout(&openchain(&["profile", "--spin", "half", "--length", "4", "--level", "first"]));
    let r = rows(&text);
    assert_eq!(r[0], ["bond", "value", "oracle"]);
    assert_eq!(r.len(), 4);
    let c23: f64 = r[2][1].parse().unwrap();
    let oracle: f64 = r[2][2].parse().unwrap();
    assert!((c23 - (1.0 + 2f64.sqrt()) / (2.0 + 2f64.sqrt())).abs() < 1e-10);
    assert!((c23 - oracle).abs() < 1e-10);
}

#[test]
fn spin_one_profile_defaults_to_negativity() {
    let text = stdout(&openchain(&["profile", "--spin", "one", "--length", "3"]));
    let v: f64 = rows(&text)[1][1].parse().unwrap();
    assert!((v - 1.0 / 3.0).abs() < 1e-10);
}

#[test]
fn thermal_crosses_zero_near_threshold() {
    let text = stdout(&openchain(&[
        "thermal", "--spin", "half", "--length", "2", "--tmin", "1.7", "--tmax", "1.95", "--steps", "6",
    ]));
    let r = rows(&text);
    assert_eq!(r[0], ["T", "value"]);
    let points: Vec<(f64, f64)> =
        r[1..].iter().map(|c| (c[0].parse().unwrap(), c[1].parse().unwrap())).collect();
    assert_eq!(points.len(), 6);
    for (t, c) in points {
        assert_eq!(c > 0.0, t < 2.0 / 3f64.ln(), "T={t} C={c}");
    }
}

#[test]
fn threshold_row() {
    let text = stdout(&openchain(&["threshold", "--spin", "half", "--length", "2", "--tol", "1e-10"]));
    let r = rows(&text);
    assert_eq!(r[0][4], "t_threshold");
    let t: f64 = r[1][4].parse().unwrap();
    assert!((t - 2.0 / 3f64.ln()).abs() < 1e-9);
    assert_eq!(r[1][8], "swap");
}

#[test]
fn json_output() {
    let text = stdout(&openchain(&["spectrum", "--spin", "one", "--length", "2", "--format", "json"]));
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let levels = v.as_array().unwrap();
    assert_eq!(levels.len(), 3);
    assert_eq!(levels[0]["energy"], serde_json::json!(-2.0));
    assert_eq!(levels[0]["degeneracy"], serde_json::json!(1));
    assert_eq!(levels[2]["degeneracy"], serde_json::json!(5));
}

#[test]
fn writes_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nested/spec.csv");
    let out = openchain(&["spectrum", "--spin", "half", "--length", "2", "--out", path.to_str().unwrap()]);
    assert!(stdout(&out).is_empty());
    assert_eq!(std::fs::read_to_string(path).unwrap(), "index,energy,degeneracy\n0,-1,1\n1,1,3\n");
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["spectrum", "--spin", "half", "--length", "1"][..],
        &["spectrum", "--spin", "two", "--length", "3"],
        &["profile", "--spin", "one", "--length", "3", "--measure", "concurrence"],
        &["thermal", "--spin", "half", "--length", "3", "--bond", "2", "4"],
        &["thermal", "--spin", "half", "--length", "3", "--tmin", "0"],
        &["spectrum", "--spin", "half", "--length", "3", "--tol=-1"],
        &["figure", "--id", "5"],
        &["profile", "--spin", "half", "--length", "3", "--level", "99"],
    ] {
        let out = openchain(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn computation_errors_exit_one() {
    // next-nearest pair in the four-site singlet is never entangled
    let out = openchain(&["threshold", "--spin", "half", "--length", "4", "--bond", "1", "3"]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("openchain: "));
}

#[test]
fn figure_schema_and_row_counts() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let expected_rows = [
        (1, (3..=10).map(|l| 2 * (l - 1)).sum::<usize>()),
        (2, 5 * 150),
        (3, (3..=6).map(|l| 2 * (l - 1)).sum::<usize>()),
        (4, 5 * 150),
    ];
    for (id, n) in expected_rows {
        stdout(&openchain(&["figure", "--id", &id.to_string(), "--out", d]));
        let text = std::fs::read_to_string(dir.path().join(format!("fig{id}.csv"))).unwrap();
        let r = rows(&text);
        assert_eq!(r[0], ["figure_id", "L", "level_or_T", "bond_or_measure", "value"]);
        assert_eq!(r.len() - 1, n, "figure {id}");
        assert!(r[1..].iter().all(|c| c[0] == id.to_string()));
    }
    let fig2 = std::fs::read_to_string(dir.path().join("fig2.csv")).unwrap();
    assert!(fig2.lines().nth(1).unwrap().starts_with("2,2,0.02,concurrence,"));
}
