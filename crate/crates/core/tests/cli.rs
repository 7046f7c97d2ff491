use std::path::PathBuf;
use std::process::{Command, Output};

use epilab::experiment::{parse_csv, parse_json, DGapRow, ExperimentRow};

fn epilab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_epilab")).args(args).output().unwrap()
}

fn tmp(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

#[test]
fn divergence_rows_satisfy_bounds_recomputed_from_the_file() {
    let out = epilab(&["divergence", "--tol", "1e-9"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "t,h_X,h_sum,h_diff,logH_X,logH_sum,logH_diff,log_ratio_sum,log_ratio_diff,paper_lb_log_ratio,D_X,D_sum,D_diff,all_bounds_hold"
    );
    let rows: Vec<ExperimentRow> = parse_csv(&text).unwrap();
    assert_eq!(rows.iter().map(|r| r.t).collect::<Vec<_>>(), vec![2.0, 4.0, 8.0, 12.0, 16.0]);
    for r in rows.iter().filter(|r| r.all_bounds_hold) {
        assert!(r.logH_sum > 0.5f64.ln() + 4.0 * r.t / 3.0);
        assert!(r.log_ratio_sum > r.paper_lb_log_ratio);
        assert!((r.logH_X - 2.0 * r.h_X).abs() <= 1e-10 * r.logH_X);
        assert!((r.log_ratio_sum - (r.logH_sum - r.logH_X)).abs() <= 1e-10 * r.logH_sum);
    }
    assert!(rows.iter().all(|r| r.all_bounds_hold));
}

#[test]
fn dgap_writes_json_and_reports_slopes() {
    let path = tmp("dgap.json");
    let out = epilab(&["dgap", "--t-grid", "4,8", "--format", "json", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("D_X/t"), "{stderr}");
    assert!(stderr.contains("gaussian control"), "{stderr}");
    let rows: Vec<DGapRow> = parse_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows[1].gap_sum > rows[0].gap_sum);
    assert!((rows[0].slope_X - rows[0].row.D_X / 4.0).abs() < 1e-15);
}

#[test]
fn usage_and_io_errors_exit_with_two() {
    assert_eq!(epilab(&["divergence", "--t-grid", "1"]).status.code(), Some(2));
    assert_eq!(epilab(&["divergence", "--t-grid", "two"]).status.code(), Some(2));
    assert_eq!(epilab(&["divergence", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(epilab(&["nonsense"]).status.code(), Some(2));
    assert_eq!(epilab(&[]).status.code(), Some(2));
    let unwritable = epilab(&["divergence", "--t-grid", "2", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(unwritable.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&unwritable.stderr).contains("i/o"));
}

#[test]
fn help_exits_cleanly() {
    let out = epilab(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    for sub in ["divergence", "dgap", "verify"] {
        assert!(text.contains(sub));
    }
}

#[test]
fn verify_suite_passes_and_marks_expected_violations() {
    let path = tmp("verify.json");
    let out = epilab(&["verify", "--format", "json", "--seed", "11", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let verdicts = v.as_array().unwrap();
    for item in verdicts {
        let keys: Vec<&str> = item.as_object().unwrap().keys().map(String::as_str).collect();
        assert_eq!(keys, ["inputs", "lhs", "margin", "name", "rhs", "slack", "status", "tolerances"]);
    }
    let violated: Vec<_> = verdicts.iter().filter(|v| v["status"] == "violated").collect();
    assert_eq!(violated.len(), 2);
    assert!(violated.iter().all(|v| v["inputs"]["expected"] == "violated"));
}
