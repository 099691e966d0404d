use serde_json::Value;
use std::process::{Command, Output};

fn fingap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fingap")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = fingap(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn pair(v: &Value) -> (f64, f64) {
    (v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

#[test]
fn curve_roots_are_minus_e() {
    let v = json(&["curve", "--l", "0,0,0,1", "--tau", "0+2i"]);
    assert_eq!(v["command"], "curve");
    assert_eq!(v["results"]["genus"], 1);
    let mut minus_e: Vec<f64> = v["results"]["lattice"]["e_values"].as_array().unwrap().iter().map(|z| -pair(z).0).collect();
    minus_e.sort_by(f64::total_cmp);
    let roots: Vec<f64> = v["results"]["roots"].as_array().unwrap().iter().map(|z| pair(z).0).collect();
    for (r, m) in roots.iter().zip(&minus_e) {
        assert!((r - m).abs() < 1e-9 * m.abs(), "{roots:?} vs {minus_e:?}");
    }
}

fn gaps(tau: &str) -> Vec<(String, String)> {
    let out = fingap(&["bands", "--l", "0,0,0,1", "--tau", tau, "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("gap,lo,hi"));
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[1].to_string(), f[2].to_string())
        })
        .collect()
}

#[test]
fn band_edges_follow_the_lattice() {
    for (tau, second) in [("0+2i", [1, 2]), ("1+2i", [2, 1])] {
        let curve = json(&["curve", "--l", "0,0,0,1", "--tau", tau]);
        let e: Vec<f64> = curve["results"]["lattice"]["e_values"].as_array().unwrap().iter().map(|z| pair(z).0).collect();
        let g = gaps(tau);
        assert_eq!(g.len(), 2);
        assert_eq!(g[0].0, "-inf");
        let close = |s: &str, want: f64| (s.parse::<f64>().unwrap() - want).abs() < 1e-8 * want.abs();
        assert!(close(&g[0].1, -e[0]));
        assert!(close(&g[1].0, -e[second[0]]) && close(&g[1].1, -e[second[1]]), "{tau}: {g:?} {e:?}");
    }
}

#[test]
fn heun_reports_the_fuchs_relation() {
    let v = json(&["heun", "--l", "0,0,0,1", "--tau", "0+2i", "--E", "0"]);
    let r = &v["results"];
    assert_eq!(pair(&r["fuchs_defect"]), (0.0, 0.0));
    assert_eq!(r["round_trip"]["l"], serde_json::json!([0, 0, 0, 1]));
    assert_eq!(r["winding_numbers"]["counts"], serde_json::json!([1, 1, 0]));
    let ev = r["cycle_monodromy"]["eigenvalues"].as_array().unwrap();
    let (a, b) = (pair(&ev[0]), pair(&ev[1]));
    // product one
    assert!((a.0 * b.0 - a.1 * b.1 - 1.0).abs() < 1e-9 && (a.0 * b.1 + a.1 * b.0).abs() < 1e-9);
}

#[test]
fn output_is_reproducible() {
    for args in [
        &["curve", "--l", "2,1,0,0", "--tau", "0.3+1.4i"][..],
        &["monodromy", "--l", "0,0,0,1", "--tau", "0.2+1.2i", "--E", "1+2i"][..],
        &["xi", "--l", "1,0,1,1", "--tau", "0.1+1.3i", "--format", "csv"][..],
    ] {
        let a = fingap(args);
        let b = fingap(args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn out_flag_writes_the_file() {
    let dir = std::env::temp_dir().join(format!("fingap-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("xi.json");
    let out = fingap(&["xi", "--l", "0,0,0,1", "--tau", "2i", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["results"]["genus"], 1);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn monodromy_methods_agree() {
    let v = json(&["monodromy", "--l", "2,1,0,0", "--tau", "0.3+1.1i", "--E", "5+9i"]);
    for p in v["results"]["periods"].as_array().unwrap() {
        assert_eq!(p["pass"], true, "{p}");
    }
    let v = json(&["monodromy", "--l", "0,0,0,1", "--tau", "2i", "--E", "3.14269405933469"]);
    assert_eq!(v["results"]["periods"][0]["at_root"], true);
}

#[test]
fn operator_check_passes() {
    let v = json(&["operator-check", "--l", "0,0,0,1", "--tau", "0.2+1.3i"]);
    let r = &v["results"];
    assert_eq!(r["commutator"]["pass"], true, "{r}");
    assert_eq!(r["relation"]["pass"], true, "{r}");
    assert_eq!(r["determinant"]["pass"], true, "{r}");
}

#[test]
fn eigen_continue_starts_at_the_trigonometric_value() {
    let out = fingap(&["eigen-continue", "--l", "1,1,0,0", "--m", "1", "--p-path", "0:0.05:5", "--format", "csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 7);
    let v = json(&["eigen-continue", "--l", "1,1,0,0", "--m", "1", "--p-path", "0:0.05:5"]);
    let trig = v["results"]["trigonometric_limit"].as_f64().unwrap();
    let e0 = pair(&v["results"]["samples"][0]["E"]).0;
    assert!((e0 - trig).abs() < 1e-9 * trig.abs());
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["curve", "--l", "0,0,0,1"][..],
        &["curve", "--l", "0,0,0,0", "--tau", "2i"][..],
        &["curve", "--l", "0,0,1", "--tau", "2i"][..],
        &["curve", "--l", "0,0,0,1", "--tau", "0-2i"][..],
        &["curve", "--l", "0,0,0,1", "--tau", "2i", "--bogus"][..],
        &["heun", "--l", "0,0,0,1", "--tau", "2i"][..],
        &["eigen-continue", "--l", "1,1,0,0"][..],
        &["bands", "--l", "0,0,0,1", "--tau", "2i", "--format", "xml"][..],
    ] {
        let out = fingap(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    let out = fingap(&["curve", "--l", "0,0,0,1", "--tau", "banana"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("--tau"));
}

#[test]
fn domain_errors_exit_1() {
    let out = fingap(&["bands", "--l", "1,0,0,0", "--tau", "2i"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("l0 = l1 = 0"));
    let out = fingap(&["bands", "--l", "0,0,0,1", "--tau", "0.3+2i"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn negative_couplings_are_normalized() {
    let v = json(&["curve", "--l", "0,0,0,-2", "--tau", "2i"]);
    assert_eq!(v["inputs"]["l"], serde_json::json!([0, 0, 0, 1]));
    assert_eq!(v["inputs"]["normalized"], true);
}
