//! Randomized laws of the normal exponential map.

mod common;

use common::scene;
use muthick::expmap::{exp_at, f_prime_at, f_second_at, f_second_closed_at, fiber_at, recover_offset, w_limit};
use muthick::vector::VecN;
use proptest::prelude::*;

fn scene_names() -> impl Strategy<Value = &'static str> {
    prop::sample::select(vec![
        "example1b",
        "example2_stadium",
        "example4",
        "ellipse_mu1",
        "circle_mu1",
    ])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn offset_round_trips_through_recovery(
        name in scene_names(),
        u in 0.01f64..0.99,
        raw in prop::collection::vec(-1.0f64..1.0, 3),
        frac in 0.0f64..0.95,
    ) {
        let sc = scene(name);
        let comp = &sc.components[0];
        let (lo, hi) = comp.curve.domain();
        let foot = comp.eval(lo + u * (hi - lo)).unwrap();
        let v = VecN::from_slice(&raw[..sc.dim]).reject_unit(&foot.jet.d1).normalized();
        prop_assume!(v.is_some());
        let v = v.unwrap();
        let r = frac * w_limit(&foot).min(5.0);
        let p = exp_at(&foot, &v, r);

        // p is a critical point of F_p at this foot
        let scale = 2.0 / (foot.w.mu * foot.w.mu);
        prop_assert!(f_prime_at(&foot, &p).abs() <= 1e-9 * scale * (1.0 + r));
        prop_assert!(fiber_at(&foot, 1e-12).distance(&p) <= 1e-10 * (1.0 + r));

        let (v2, r2) = recover_offset(&foot, &p);
        prop_assert!((r2 - r).abs() <= 1e-10 * (1.0 + r));
        if r > 1e-6 {
            prop_assert!(exp_at(&foot, &v2, r2).dist(&p) <= 1e-9 * (1.0 + r));
        }
    }

    #[test]
    fn closed_second_derivative_matches_general_formula(
        name in scene_names(),
        u in 0.01f64..0.99,
        raw in prop::collection::vec(-1.0f64..1.0, 3),
        frac in 0.0f64..0.95,
    ) {
        let sc = scene(name);
        let comp = &sc.components[0];
        let (lo, hi) = comp.curve.domain();
        let foot = comp.eval(lo + u * (hi - lo)).unwrap();
        let v = VecN::from_slice(&raw[..sc.dim]).reject_unit(&foot.jet.d1).normalized();
        prop_assume!(v.is_some());
        let v = v.unwrap();
        let r = frac * w_limit(&foot).min(5.0);
        let p = exp_at(&foot, &v, r);
        let closed = f_second_closed_at(&foot, &v, r);
        let general = f_second_at(&foot, &p);
        let scale = 2.0 / (foot.w.mu * foot.w.mu);
        prop_assert!((closed - general).abs() <= 1e-9 * scale.max(closed.abs()));
    }

    #[test]
    fn height_zero_is_the_foot(name in scene_names(), u in 0.0f64..1.0) {
        let sc = scene(name);
        let comp = &sc.components[0];
        let (lo, hi) = comp.curve.domain();
        let foot = comp.eval(lo + u * (hi - lo)).unwrap();
        let v = muthick::expmap::normal_frame(&foot.jet.d1).swap_remove(0);
        prop_assert_eq!(exp_at(&foot, &v, 0.0), foot.jet.point.clone());
    }
}
