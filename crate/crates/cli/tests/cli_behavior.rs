//! Exit-code contract and output-shape checks for the `gf` binary.

use std::process::Command;

fn gf(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_gf"))
        .args(args)
        .env("GF_THREADS", "2")
        .current_dir(std::env::temp_dir())
        .output()
        .expect("spawn gf")
}

#[test]
fn identities_default_succeeds() {
    let out = gf(&["identities", "--k", "500"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_slice(&out.stdout).expect("JSON report on stdout");
    assert_eq!(report["counts"]["determinant_ok"], 500);
}

#[test]
fn corrupted_recurrence_exits_one() {
    let out = gf(&["identities", "--k", "50", "--corrupt-recurrence"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn budget_exceeded_exits_two() {
    let out = gf(&["largedev", "--n", "30", "--budget", "1000"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fully_aliased_scan_exits_three() {
    // depth-1 cylinders are so coarse that every dyadic block aliases
    let out = gf(&["decay", "--n", "1", "--k", "3"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn invalid_config_exits_sixtyfour() {
    let out = gf(&["largedev", "--alphabet", "0,2"]);
    assert_eq!(out.status.code(), Some(64));
    let out = gf(&["decay", "--map", "doubling"]);
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn decay_csv_has_dyadic_rows_and_header() {
    let dir = std::env::temp_dir().join(format!("gf-shape-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("decay.csv");
    let out = Command::new(env!("CARGO_BIN_EXE_gf"))
        .args(["decay", "--n", "12", "--k", "20", "--out"])
        .arg(&path)
        .env("GF_THREADS", "2")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "j,xi_lo,xi_hi,sup_abs,n_samples,aliased");
    assert!(lines.len() - 1 >= 20, "expected >= 20 dyadic rows, got {}", lines.len() - 1);
    assert!(!text.contains('\r'));
    // 17-significant-digit scientific reals with '.' decimal separator
    assert!(lines[1].split(',').nth(1).unwrap().contains('e'));
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(summary["fitted_exponents"]["e_hat"].as_f64().is_some());
    assert!(summary["runtime_s"].as_f64().unwrap() >= 0.0);
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn nonconc_affine_reports_zero_kappa() {
    let dir = std::env::temp_dir().join(format!("gf-nonconc-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_gf"))
        .args([
            "nonconc", "--map", "lueroth", "--s", "0", "--n", "6", "--epsilon", "0.7", "--out",
        ])
        .arg(dir.join("nonconc.csv"))
        .env("GF_THREADS", "2")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["fitted_exponents"]["kappa_hat"], 0.0);
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn equidist_zero_point_stays_at_one() {
    let dir = std::env::temp_dir().join(format!("gf-equidist-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("equidist.csv");
    let out = Command::new(env!("CARGO_BIN_EXE_gf"))
        .args(["equidist", "--x", "0", "--k", "2", "--out"])
        .arg(&path)
        .env("GF_THREADS", "2")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    for line in text.lines().skip(1) {
        let abs_w: f64 = line.split(',').last().unwrap().parse().unwrap();
        assert!((abs_w - 1.0).abs() < 1e-12, "|W| = {abs_w} != 1 at x = 0");
    }
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn equidist_reads_explicit_sequence_file() {
    let dir = std::env::temp_dir().join(format!("gf-seq-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let seq_path = dir.join("seq.txt");
    let terms: Vec<String> = (1..=200u64).map(|k| (k * k).to_string()).collect();
    std::fs::write(&seq_path, terms.join("\n")).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_gf"))
        .args(["equidist", "--k", "1", "--seq"])
        .arg(&seq_path)
        .arg("--out")
        .arg(dir.join("equidist.csv"))
        .env("GF_THREADS", "2")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let _ = std::fs::remove_dir_all(&dir);
}
