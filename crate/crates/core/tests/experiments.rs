//! Fiber traces, tube sampling and parameter sweeps.

mod common;

use common::scene;
use muthick::experiments::{fiber_trace, linspace, radii_sweep, tube_boundary};
use muthick::vector::VecN;

#[test]
fn fiber_trace_follows_the_distance_law() {
    let sc = scene("example2_stadium");
    let comp = &sc.components[0];
    let s = 0.4 * comp.curve.length();
    let foot = comp.eval(s).unwrap();
    let v = foot.normal.clone().unwrap();
    let trace = fiber_trace(&sc, 0, s, &v, 1.0, 41).unwrap();
    assert_eq!(trace.len(), 41);
    for p in &trace {
        let d = p.point.dist(&foot.jet.point);
        assert!((d - p.r.abs() * foot.w.mu).abs() <= 1e-12 * (1.0 + d));
    }
}

#[test]
fn fiber_trace_refuses_heights_beyond_w() {
    let sc = scene("example4");
    let foot = sc.components[0].eval(0.5).unwrap();
    let limit = 1.0 / foot.w.d1.abs();
    let v = VecN::from_slice(&[1.0, 0.0]);
    assert!(fiber_trace(&sc, 0, 0.5, &v, 2.0 * limit, 5).is_err());
}

#[test]
fn circle_tube_is_two_concentric_circles() {
    let sc = scene("circle_mu1");
    let tube = tube_boundary(&sc, 0.5, 128, 1).unwrap();
    assert!(tube.overlap.is_empty());
    assert_eq!(tube.boundary.len(), 256);
    for p in &tube.boundary {
        let rho = p.point.norm();
        assert!((rho - 0.5).abs() < 1e-12 || (rho - 1.5).abs() < 1e-12, "{rho}");
    }
}

#[test]
fn circle_tube_overlaps_past_the_center() {
    let sc = scene("circle_mu1");
    let tube = tube_boundary(&sc, 1.5, 64, 1).unwrap();
    assert_eq!(tube.overlap.len(), 64);
    assert!(tube.overlap.iter().all(|p| (p.point.norm() - 0.5).abs() < 1e-12));
}

#[test]
fn sweep_is_ordered_and_reports_each_parameter() {
    let sc = scene("example3_family");
    let grid = linspace(-0.02, 0.02, 5);
    let rows = radii_sweep(&sc, &grid);
    assert_eq!(rows.iter().map(|r| r.t).collect::<Vec<_>>(), grid);
    assert!(rows
        .iter()
        .all(|r| r.ok() && r.dir <= r.tir + 1e-12 && r.tir <= r.air + 1e-12));
}

#[test]
fn tubes_below_dir_have_no_overlap() {
    for name in ["example1a", "example2_stadium", "example4", "ellipse_mu1", "circle_mu1"] {
        let sc = scene(name);
        let dir = muthick::radii::radii_report(&sc).unwrap().dir;
        let tube = tube_boundary(&sc, 0.9 * dir.min(4.0), 200, 1).unwrap();
        assert!(tube.overlap.is_empty(), "{name}: {} overlap points", tube.overlap.len());
    }
}

/// Minimum of `|x - gamma(s)|^2 / mu(s)^2` over a dense grid of feet.
fn g_oracle(sc: &muthick::scene::Scene, x: &VecN) -> f64 {
    let comp = &sc.components[0];
    let (lo, hi) = comp.curve.domain();
    (0..=20_000)
        .map(|k| {
            let f = comp.eval(lo + (hi - lo) * k as f64 / 20_000.0).unwrap();
            x.dist(&f.jet.point).powi(2) / (f.w.mu * f.w.mu)
        })
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn example1a_tube_beyond_focal_radius_stays_on_its_level_set() {
    // Every sampled image of the radius-2.2 sphere bundle is a genuine
    // boundary point: no foot is closer in the weighted sense.
    let sc = scene("example1a");
    let tube = tube_boundary(&sc, 2.2, 120, 1).unwrap();
    assert!(tube.overlap.is_empty());
    for p in tube.boundary.iter().step_by(7) {
        assert!(g_oracle(&sc, &p.point) >= 2.2f64.powi(2) * (1.0 - 1e-6), "s = {}", p.s);
    }
}
