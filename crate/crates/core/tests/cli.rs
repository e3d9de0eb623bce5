//! The command-line binary: outputs, formats and exit codes.

mod common;

use common::{bin, scene_path};
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("binary runs")
}

#[test]
fn report_writes_json_with_every_radius() {
    let out = run(&["report", "--scene", &scene_path("example4")]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for key in [
        "focrad0",
        "focradminus",
        "dcsd_half",
        "lr",
        "ur",
        "dir",
        "tir",
        "tir_flag",
        "air",
    ] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["tir_flag"], "INFIMUM");
    assert_eq!(v["dcsd_half"], "inf");
    assert!((v["lr"].as_f64().unwrap() - 2.0).abs() < 1e-9);
    assert!((v["ur"].as_f64().unwrap() - 4.0).abs() < 1e-9);
}

#[test]
fn missing_scene_file_exits_with_config_code() {
    let out = run(&["report", "--scene", "/nonexistent/scene.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error ["));
}

#[test]
fn malformed_scene_exits_with_config_code() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\"name\": 3}").unwrap();
    let out = run(&["report", "--scene", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn out_of_w_fiber_height_is_clamped_not_fatal() {
    let out = run(&[
        "fibers",
        "--scene",
        &scene_path("example4"),
        "--s",
        "0.5",
        "--r-max",
        "100",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn svg_for_planar_scene_is_an_svg_document() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tube.svg");
    let out = run(&[
        "tube",
        "--scene",
        &scene_path("circle_mu1"),
        "--radius",
        "0.5",
        "--format",
        "svg",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("<svg") || text.starts_with("<?xml"));
    assert!(text.trim_end().ends_with("</svg>"));
}

#[test]
fn svg_for_spatial_scene_fails_after_writing_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sing.svg");
    let out = run(&[
        "singular",
        "--scene",
        &scene_path("example1b"),
        "--format",
        "svg",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_ne!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("SVG_UNSUPPORTED_DIM"));
    let csv = std::fs::read_to_string(path.with_extension("csv")).unwrap();
    assert!(csv.starts_with("component,s,R,x1,x2,x3"));
    assert!(csv.lines().count() > 1);
}

#[test]
fn sweep_uses_the_family_grid() {
    let out = run(&["sweep", "--scene", &scene_path("example6_family")]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,dir,tir,air,collapse_count,status"));
    assert_eq!(lines.count(), 3);
}

#[test]
fn sweep_rejects_half_a_range() {
    let out = run(&["sweep", "--scene", &scene_path("example6_family"), "--t-min", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gen_scene_reproduces_bundled_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "gen-scene",
        "--name",
        "ellipse_mu1",
        "--dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let fresh = std::fs::read_to_string(dir.path().join("ellipse_mu1.json")).unwrap();
    let bundled = std::fs::read_to_string(scene_path("ellipse_mu1")).unwrap();
    assert_eq!(fresh, bundled);
}

#[test]
fn check_reports_transversality() {
    let out = run(&["check", "--scene", &scene_path("example1a")]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["regular"], false);
    assert_eq!(v["witnesses"][0]["continuum"], true);
}
