//! Shared fixtures and independent oracles for the integration tests.
#![allow(dead_code)]

use muthick::expmap::w_limit;
use muthick::presets::{preset, PRESET_NAMES};
use muthick::scene::Scene;
use muthick::vector::VecN;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn scene(name: &str) -> Scene {
    Scene::from_config(&preset(name).expect("bundled preset")).expect("preset builds")
}

pub fn all_scenes() -> Vec<Scene> {
    PRESET_NAMES.iter().map(|n| scene(n)).collect()
}

/// A random normal offset strictly inside W.
#[derive(Debug, Clone)]
pub struct Case {
    pub comp: usize,
    pub s: f64,
    pub v: VecN,
    pub r: f64,
}

/// `count` offsets with `s` kept `margin * L` away from open ends and
/// `R <= min(r_cap, 0.95 / |mu'|)`.
pub fn random_cases(scene: &Scene, count: usize, seed: u64, r_cap: f64, margin: f64) -> Vec<Case> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let comp = rng.random_range(0..scene.components.len());
        let c = &scene.components[comp];
        let (lo, hi) = c.curve.domain();
        let pad = if c.curve.is_closed() {
            0.0
        } else {
            margin * c.curve.length()
        };
        let s = rng.random_range(lo + pad..hi - pad);
        let foot = c.eval(s).unwrap();
        let raw: Vec<f64> = (0..scene.dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let Some(v) = VecN::from(raw).reject_unit(&foot.jet.d1).normalized() else {
            continue;
        };
        if v.dot(&foot.jet.d1).abs() > 1e-12 {
            continue;
        }
        let r = rng.random_range(0.0..1.0) * r_cap.min(0.95 * w_limit(&foot));
        out.push(Case { comp, s, v, r });
    }
    out
}

/// Roots of `1 - C t^2/2 - A t sqrt(1 - B^2 t^2)` on `[0, 1/B]` found by a
/// sign scan with bisection, independent of the closed form.
pub fn chord_height_scan(a: f64, b: f64, c: f64) -> Vec<f64> {
    let f = |t: f64| 1.0 - 0.5 * c * t * t - a * t * (1.0 - b * b * t * t).max(0.0).sqrt();
    let end = 1.0 / b;
    let n = 200_000;
    let mut roots = Vec::new();
    let mut prev = f(0.0);
    for k in 1..=n {
        let t = end * k as f64 / n as f64;
        let cur = f(t);
        if cur == 0.0 {
            roots.push(t);
        } else if prev != 0.0 && prev.signum() != cur.signum() {
            let (mut lo, mut hi) = (end * (k - 1) as f64 / n as f64, t);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if f(mid).signum() == prev.signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        prev = cur;
    }
    roots
}

/// Intersections of the circles `|x - c0| = r0` and `|x - c1| = r1`.
pub fn circle_circle(c0: [f64; 2], r0: f64, c1: [f64; 2], r1: f64) -> Vec<[f64; 2]> {
    let (dx, dy) = (c1[0] - c0[0], c1[1] - c0[1]);
    let d = dx.hypot(dy);
    if d > r0 + r1 || d < (r0 - r1).abs() || d == 0.0 {
        return Vec::new();
    }
    let a = (r0 * r0 - r1 * r1 + d * d) / (2.0 * d);
    let h = (r0 * r0 - a * a).max(0.0).sqrt();
    let (mx, my) = (c0[0] + a * dx / d, c0[1] + a * dy / d);
    vec![[mx + h * dy / d, my - h * dx / d], [mx - h * dy / d, my + h * dx / d]]
}

/// Wraps an angle difference into `(-pi, pi]`.
pub fn angle_gap(a: f64, b: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let d = (a - b).rem_euclid(tau);
    if d > tau / 2.0 {
        d - tau
    } else {
        d
    }
}

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_muthick")
}

pub fn scene_path(name: &str) -> String {
    format!("{}/../../scenes/{name}.json", env!("CARGO_MANIFEST_DIR"))
}
