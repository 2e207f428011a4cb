use std::fs;
use std::process::{Command, Output};

fn cocoa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cocoa")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Parses a single-row CSV result into (header, value) pairs.
fn csv_row(out: &Output) -> Vec<(String, String)> {
    let text = stdout(out);
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    header.iter().zip(row).map(|(h, v)| (h.to_string(), v.to_string())).collect()
}

fn field(row: &[(String, String)], name: &str) -> f64 {
    row.iter().find(|(h, _)| h == name).unwrap().1.parse().unwrap()
}

#[test]
fn breakeven_indonesia_intermediate() {
    let out = cocoa(&[
        "breakeven", "--country", "indonesia", "--pym", "2.6", "--goal", "2.0", "--price-mode", "short", "--format", "csv",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let row = csv_row(&out);
    assert!((field(&row, "exact_days") - 67.5).abs() < 0.05);
    assert_eq!(field(&row, "gridline_days"), 60.0);
}

#[test]
fn scenario_ghana_maximum_thirty_days() {
    let out = cocoa(&[
        "scenario", "--country", "ghana", "--pym", "3.3", "--days", "30", "--price-mode", "short", "--format", "csv",
    ]);
    assert!(out.status.success());
    let row = csv_row(&out);
    assert!((field(&row, "per_farmer") - 3012.36).abs() / 3012.36 < 0.005);
    assert!((field(&row, "pct_change") - 171.5).abs() < 0.5);
}

#[test]
fn winwin_without_losses_needs_nothing() {
    let out = cocoa(&["winwin", "--penalty", "0", "--conversion", "0", "--rate", "0", "--format", "csv"]);
    assert!(out.status.success());
    let row = csv_row(&out);
    assert_eq!(field(&row, "required_t"), 0.0);
    assert_eq!(field(&row, "gamma_p"), 1.0);
}

#[test]
fn sweep_quarter_grid_has_five_rows() {
    let out = cocoa(&["sweep", "--grid", "0,0.25,0.5,0.75,1", "--pym", "2.6", "--format", "csv"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 6);
    let full = text.lines().last().unwrap();
    let delta: f64 = full.split(',').nth(1).unwrap().parse().unwrap();
    assert!((delta - 0.7332).abs() < 5e-4, "{delta}");
}

#[test]
fn out_of_range_grid_is_a_usage_error() {
    let out = cocoa(&["sweep", "--grid", "0,1.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_target_lists_valid_ones() {
    let out = cocoa(&["replicate", "table9"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("tableS4") && err.contains("figS3"), "{err}");
}

#[test]
fn invalid_profiles_are_validation_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    fs::write(&path, "name,area_harvested_ha\nX,abc\n").unwrap();
    let out = cocoa(&["--profiles", path.to_str().unwrap(), "equilibrium"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn trial_file_is_summarised() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trial.csv");
    fs::write(
        &path,
        "farm_id,tree_id,treatment,assigned_rate,flowers_open,flowers_pollinated,fruit_set_48h,wilt_losses,pest_losses,disease_losses,fruits_harvested,dry_bean_kg\n\
         F1,T1,hand_pollinated,1.0,100,100,40,10,2,3,20,2.0\n\
         F1,T2,hand_pollinated,1.0,100,100,40,10,2,3,20,4.0\n\
         F1,T3,open_control,0.0,100,0,7,2,0,0,5,1.0\n\
         F1,T4,open_control,0.0,100,0,6,2,0,0,4,1.0\n",
    )
    .unwrap();
    let out = cocoa(&["ingest-trial", path.to_str().unwrap(), "--format", "csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("pym,3\n"), "{text}");
    assert!(text.contains("fruit_set_rate,0.4\n"));

    fs::write(
        &path,
        "farm_id,tree_id,treatment,assigned_rate,flowers_open,flowers_pollinated,fruit_set_48h,wilt_losses,pest_losses,disease_losses,fruits_harvested,dry_bean_kg\n\
         F1,T1,hand_pollinated,1.0,100,50,60,0,0,0,0,0\n",
    )
    .unwrap();
    let out = cocoa(&["ingest-trial", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn replication_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = cocoa(&["replicate", "--out", dir.path().to_str().unwrap()]);
        assert!(out.status.success());
    }
    let mut names: Vec<_> = fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.len() >= 18);
    for name in names {
        assert_eq!(fs::read(a.path().join(&name)).unwrap(), fs::read(b.path().join(&name)).unwrap());
    }
}

#[test]
fn strict_replication_reports_tolerance_failures() {
    let out = cocoa(&["replicate", "table1", "tableS1", "--strict"]);
    assert_eq!(out.status.code(), Some(0));
    let out = cocoa(&["replicate", "tableS4", "--strict"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("FAIL"));
}

#[test]
fn config_overrides_defaults_and_flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("config.json");
    fs::write(&path, r#"{"pym_intermediate": 2.0, "adoption_rate": 0.5}"#).unwrap();
    let cfg = path.to_str().unwrap();
    let from_config = csv_row(&cocoa(&["--config", cfg, "equilibrium", "--format", "csv"]));
    let base: f64 = 2_046_854.77;
    assert!((field(&from_config, "delta") - base * 0.5 / 4_466_574.0).abs() < 1e-6);
    let from_flag = csv_row(&cocoa(&["--config", cfg, "equilibrium", "--adoption", "0.25", "--format", "csv"]));
    assert!((field(&from_flag, "delta") - base * 0.25 / 4_466_574.0).abs() < 1e-6);

    fs::write(&path, r#"{"unknown_key": 1}"#).unwrap();
    assert_eq!(cocoa(&["--config", cfg, "equilibrium"]).status.code(), Some(3));
}
