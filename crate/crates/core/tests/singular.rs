//! The singular graph and collapse arcs.

mod common;

use common::scene;
use muthick::expmap::{exp_at, f_second_at, normal_frame};
use muthick::radii::radii_report;
use muthick::singular::{detect_collapse_arcs, g_value, singular_set};
use rand::{Rng, SeedableRng};

#[test]
fn off_principal_directions_are_regular_at_singular_heights() {
    let sc = scene("example2_stadium");
    let ur = radii_report(&sc).unwrap().ur;
    let pts = singular_set(&sc, ur);
    assert!(!pts.is_empty());
    for p in pts.iter().take(8) {
        let comp = &sc.components[p.comp];
        let foot = comp.eval(p.s).unwrap();
        let principal = foot.normal.clone().unwrap();
        // in the plane the only other unit normal is the opposite one
        let other = -&principal;
        let q = exp_at(&foot, &other, p.r_s);
        assert!(f_second_at(&foot, &q) > 0.0);
    }
}

#[test]
fn spatial_non_principal_directions_are_regular() {
    let sc = scene("example1b");
    let foot = sc.components[0].eval(0.3).unwrap();
    let principal = foot.normal.clone().unwrap();
    let frame = normal_frame(&foot.jet.d1);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    for _ in 0..8 {
        let a: f64 = rng.random_range(0.2..6.0);
        let v = frame[0].scaled(a.cos()).plus_scaled(a.sin(), &frame[1]);
        if (v.dot(&principal) - 1.0).abs() < 1e-6 {
            continue;
        }
        let q = exp_at(&foot, &v, 2.0);
        assert!(f_second_at(&foot, &q) > 0.0);
    }
}

#[test]
fn singular_points_are_zeros_of_g() {
    for name in ["example2_stadium", "example4"] {
        let sc = scene(name);
        let ur = radii_report(&sc).unwrap().ur;
        for p in singular_set(&sc, ur) {
            let foot = sc.components[p.comp].eval(p.s).unwrap();
            assert!(g_value(&foot).abs() <= 1e-8, "{name} s = {}", p.s);
            let expected = 1.0 / (foot.w.d1 * foot.w.d1 - foot.w.mu * foot.w.d2).sqrt();
            assert!((p.r_s - expected).abs() <= 1e-9 * expected);
        }
    }
}

#[test]
fn circles_of_constant_weight_have_no_singular_set() {
    let sc = scene("circle_mu1");
    assert!(singular_set(&sc, 1.0).is_empty());
    assert!(detect_collapse_arcs(&sc, 1.0).unwrap().is_empty());
}

#[test]
fn collapse_arc_maps_to_its_center() {
    let sc = scene("example1a");
    let ur = radii_report(&sc).unwrap().ur;
    let arcs = detect_collapse_arcs(&sc, ur).unwrap();
    assert_eq!(arcs.len(), 1);
    let arc = &arcs[0];
    assert!((arc.r - 2.0).abs() <= 1e-9);
    assert!(arc.p0.dist(&muthick::vector::VecN::from_slice(&[-1.0, 0.0])) <= 1e-9);
}
