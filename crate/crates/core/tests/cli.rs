//! Black-box tests of the command-line interface: output shapes, exit codes,
//! determinism, and numeric round-tripping.

use std::process::{Command, Output};

use jnb::transition::thresholds;

fn jnb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jnb"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON record")
}

fn c_ref() -> f64 {
    let (_, c0) = thresholds(3.0).unwrap();
    2.0 * c0
}

#[test]
fn eps0_known_values() {
    let v = stdout_json(&jnb(&["eps0", "--p", "2"]));
    assert!((v["eps0"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    let v = stdout_json(&jnb(&["eps0", "--p", "1"]));
    assert!((v["eps0"].as_f64().unwrap() - 2.0 / std::f64::consts::E).abs() < 1e-12);
    let v = stdout_json(&jnb(&["eps0", "--p", "3"]));
    let expect = (12.0 / std::f64::consts::E - 2.0).cbrt();
    assert!((v["eps0"].as_f64().unwrap() - expect).abs() < 1e-12);
}

#[test]
fn eps0_domain_error_is_exit_2() {
    let out = jnb(&["eps0", "--p", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("domain"));
}

#[test]
fn eval_known_points() {
    let c = format!("{:.17e}", c_ref());
    // degenerate corner
    let v = stdout_json(&jnb(&["eval", "--p", "3", "--C", &c, "--x1", "0", "--x2", "1"]));
    assert_eq!(v["label"], "R4");
    assert!(v["b"].as_f64().unwrap().abs() < 1e-12);
    // top-center point
    let v = stdout_json(&jnb(&["eval", "--p", "3", "--C", &c, "--x1", "0", "--x2", &c]));
    assert_eq!(v["label"], "R3");
    assert!(v["b"].as_f64().unwrap() > 0.0);
    assert_eq!(v["foliation"]["kind"], "tangent");
    // lower boundary carries |x1|^p
    let s = 1.5_f64;
    let v = stdout_json(&jnb(&[
        "eval", "--p", "3", "--C", &c,
        "--x1", "1.5", "--x2", &format!("{:.17e}", s.exp()),
    ]));
    assert!((v["b"].as_f64().unwrap() - s.powi(3)).abs() < 1e-9);
}

#[test]
fn eval_outside_domain_is_exit_2() {
    let c = format!("{:.17e}", c_ref());
    let out = jnb(&["eval", "--p", "3", "--C", &c, "--x1", "0", "--x2", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("outside Omega_C"), "diagnostic: {msg}");
}

#[test]
fn constants_record_is_ordered() {
    let c = format!("{:.17e}", c_ref());
    let v = stdout_json(&jnb(&["constants", "--p", "3", "--C", &c]));
    let read = |k: &str| v[k].as_f64().unwrap();
    assert!(0.0 < read("w_star") && read("w_star") < read("c1"));
    assert!(read("c1") < read("c2"));
    assert!(read("w_star") < read("w_bar") && read("w_bar") < read("c2"));
    assert!(-read("w_bar") < read("v_bar") && read("v_bar") < 0.0);
    assert!(read("d_bar") > 0.0);
    assert!(read("xi") > read("xi0"));
}

#[test]
fn grid_rows_and_corner_values() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("grid.csv");
    let c = c_ref();
    let c_s = format!("{:.17e}", c);
    let out = jnb(&[
        "grid", "--p", "3", "--C", &c_s,
        "--x1-min", "0", "--x1-max", "1", "--n1", "2",
        "--r-min", "1", "--r-max", &c_s, "--n2", "2",
        "--out", path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let body = std::fs::read_to_string(&path).unwrap();
    let rows: Vec<&str> = body.lines().collect();
    assert_eq!(rows.len(), 1 + 4, "header plus n1*n2 rows");
    assert_eq!(rows[0], "x1,x2,label,b");
    // R = 1 rows sit on the lower curve and carry |x1|^p; numbers round-trip
    for row in &rows[1..] {
        let cols: Vec<&str> = row.split(',').collect();
        let x1: f64 = cols[0].parse().unwrap();
        let x2: f64 = cols[1].parse().unwrap();
        let b: f64 = cols[3].parse().unwrap();
        if (x2 - x1.exp()).abs() < 1e-9 * x2 {
            assert!((b - x1.abs().powi(3)).abs() < 1e-9, "row {row}");
        }
        // round-trip: re-printing at 17 significant digits is identical
        assert_eq!(format!("{x1:.16e}"), cols[0]);
        assert_eq!(format!("{b:.16e}"), cols[3]);
    }
    // the (0, C) node agrees with eval
    let v = stdout_json(&jnb(&["eval", "--p", "3", "--C", &c_s, "--x1", "0", "--x2", &c_s]));
    let b_eval = v["b"].as_f64().unwrap();
    let node = rows[1..]
        .iter()
        .map(|r| r.split(',').collect::<Vec<_>>())
        .find(|cols| cols[0].parse::<f64>().unwrap() == 0.0
            && (cols[1].parse::<f64>().unwrap() - c).abs() < 1e-9 * c)
        .expect("grid contains the (0, C) corner");
    let b_grid: f64 = node[3].parse().unwrap();
    assert!((b_grid - b_eval).abs() < 1e-12 * b_eval.max(1.0));
}

#[test]
fn grid_rejects_bad_r_range() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("grid.csv");
    let c = format!("{:.17e}", c_ref());
    let out = jnb(&[
        "grid", "--p", "3", "--C", &c,
        "--x1-min", "0", "--x1-max", "1", "--n1", "2",
        "--r-min", "0.5", "--r-max", "2", "--n2", "2",
        "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unwritable_output_is_exit_3() {
    let c = format!("{:.17e}", c_ref());
    let out = jnb(&[
        "grid", "--p", "3", "--C", &c,
        "--x1-min", "0", "--x1-max", "1", "--n1", "2",
        "--r-min", "1", "--r-max", "2", "--n2", "2",
        "--out", "/nonexistent-dir/grid.csv",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn optimizer_profile_and_footer() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("profile.csv");
    let c = c_ref();
    let c_s = format!("{:.17e}", c);
    let out = jnb(&[
        "optimizer", "--p", "3", "--C", &c_s,
        "--x1", "0", "--x2", &c_s,
        "--samples", "64",
        "--out", path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let body = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = body.lines().collect();
    assert_eq!(lines.len(), 1 + 64 + 1);
    let footer: serde_json::Value =
        serde_json::from_str(lines.last().unwrap().trim_start_matches("# ")).unwrap();
    assert!(footer["mean"].as_f64().unwrap().abs() < 1e-8);
    assert!((footer["exp_mean"].as_f64().unwrap() - c).abs() < 1e-8 * c);
    assert!(footer["a_infty"].as_f64().unwrap() <= c * (1.0 + 1e-6));

    // a lower-boundary point yields a constant profile
    let path2 = dir.path().join("const.csv");
    let out = jnb(&[
        "optimizer", "--p", "3", "--C", &c_s,
        "--x1", "0.7", "--x2", &format!("{:.17e}", 0.7_f64.exp()),
        "--samples", "16",
        "--out", path2.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let body = std::fs::read_to_string(&path2).unwrap();
    let values: Vec<f64> = body
        .lines()
        .skip(1)
        .take(16)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(values.iter().all(|&v| (v - 0.7).abs() < 1e-12));
}

#[test]
fn verify_passes_and_is_byte_deterministic() {
    let c = format!("{:.17e}", c_ref());
    let a = jnb(&["verify", "--p", "3", "--C", &c, "--seed", "1"]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    let b = jnb(&["verify", "--p", "3", "--C", &c, "--seed", "1"]);
    assert_eq!(a.stdout, b.stdout);
    let report: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(report["all_passed"], true);
}

#[test]
fn verify_below_threshold_is_exit_2() {
    let (_, c0) = thresholds(3.0).unwrap();
    let c = format!("{:.17e}", 0.5 * c0);
    let out = jnb(&["verify", "--p", "3", "--C", &c, "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn quad_tolerance_env_override() {
    let out = Command::new(env!("CARGO_BIN_EXE_jnb"))
        .args(["eps0", "--p", "3"])
        .env("JNB_QUAD_TOL", "1e-6")
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let expect = (12.0 / std::f64::consts::E - 2.0).cbrt();
    assert!((v["eps0"].as_f64().unwrap() - expect).abs() < 1e-5);

    let out = Command::new(env!("CARGO_BIN_EXE_jnb"))
        .args(["eps0", "--p", "3"])
        .env("JNB_QUAD_TOL", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn limit_scan_rows_shrink() {
    let out = jnb(&["limit-scan", "--p", "3"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    let gaps: Vec<f64> = text
        .lines()
        .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap()["omega_gap"]
            .as_f64()
            .unwrap())
        .collect();
    assert_eq!(gaps.len(), 4);
    for pair in gaps.windows(2) {
        assert!(pair[1].abs() < pair[0].abs());
    }
}
