//! The bundled scene library. Each preset records its reference values in
//! the `metadata.expected` block so tests and users can compare against them.

use crate::geometry::{ComponentSpec, StadiumParams, WeightSpec};
use crate::scene::{FamilyKind, FamilySpec, SceneConfig};
use serde_json::json;
use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

/// Names accepted by [`preset`], in the order they are written out.
pub const PRESET_NAMES: &[&str] = &[
    "example1a",
    "example1b",
    "example2_stadium",
    "example3_family",
    "example4",
    "example6_family",
    "circle_mu1",
    "ellipse_mu1",
];

/// Seed shared by every bundled scene.
pub const DEFAULT_SEED: u64 = 20240917;

/// Stadium geometry used by the stadium scenes: a unit-circle arc around
/// `(1, 0)`, two long nearly straight sides and a wide cap.
pub fn stadium_params() -> StadiumParams {
    StadiumParams {
        eps: 0.3,
        delta: 0.05,
        line_length: 10.0,
        line_curvature: 0.01,
        cap_blend: 0.5,
    }
}

/// Weight used by the stadium scenes: `cos(s/2)` for `|s| <= 2 eps`, then a
/// gentle bend into a constant.
pub fn stadium_weight() -> WeightSpec {
    WeightSpec::StadiumProfile {
        s1: 2.0 * stadium_params().eps,
        blend: 0.2,
        ramp: 8.0,
    }
}

fn unit_arc(t0: f64, t1: f64) -> ComponentSpec {
    ComponentSpec::Circle {
        center: None,
        radius: 1.0,
        arc: Some([t0, t1]),
    }
}

fn half_cos() -> WeightSpec {
    WeightSpec::Cosine {
        amplitude: 1.0,
        frequency: 0.5,
        phase: 0.0,
        offset: 0.0,
    }
}

fn quartic_dip() -> WeightSpec {
    WeightSpec::Polynomial {
        coeffs: vec![1.0, 0.0, -0.125],
    }
}

fn scene(name: &str, dim: usize, comp: ComponentSpec, weight: WeightSpec, metadata: serde_json::Value) -> SceneConfig {
    SceneConfig {
        name: name.to_string(),
        ambient_dim: dim,
        components: vec![comp],
        weights: vec![weight],
        tolerances: BTreeMap::new(),
        seed: DEFAULT_SEED,
        family: None,
        metadata: Some(metadata),
    }
}

/// Builds a bundled scene by name.
pub fn preset(name: &str) -> Option<SceneConfig> {
    let sqrt2 = 2f64.sqrt();
    Some(match name {
        "example1a" => scene(
            name,
            2,
            unit_arc(-FRAC_PI_2, FRAC_PI_2),
            half_cos(),
            json!({
                "description": "half unit circle with mu = cos(s/2); every offset at height 2 along the normal lands on (-1, 0)",
                "expected": {
                    "focrad0": 2.0, "focradminus": 2.0 * sqrt2, "dir": 2.0, "tir": 2.0, "air": 2.0 * sqrt2,
                    "collapse_point": [-1.0, 0.0], "collapse_r": 2.0, "transversal": false
                }
            }),
        ),
        "example1b" => scene(
            name,
            3,
            unit_arc(-FRAC_PI_2, FRAC_PI_2),
            half_cos(),
            json!({
                "description": "the half circle of example1a placed in R^3",
                "expected": {
                    "focrad0": 2.0, "focradminus": 2.0 * sqrt2, "tir": 2.0,
                    "collapse_point": [-1.0, 0.0, 0.0], "collapse_r": 2.0
                }
            }),
        ),
        "example2_stadium" => scene(
            name,
            2,
            ComponentSpec::Stadium(stadium_params()),
            stadium_weight(),
            json!({
                "description": "stadium with mu = cos(s/2) near (1, 0): collapse at height 2 while the upper radius stays large",
                "stadium": { "eps": 0.3, "line_length": 10.0 },
                "expected": { "dir": 2.0, "tir": 2.0, "ur_min": 3.5 },
                "computed": { "ur": 5.081085, "dcsd_half": 41.9076 }
            }),
        ),
        "example3_family" => {
            let mut cfg = scene(
                name,
                2,
                ComponentSpec::Stadium(stadium_params()),
                stadium_weight(),
                json!({
                    "description": "additive family t + mu on the stadium: the upper radius drops as t crosses 0",
                    "expected": { "air_drop_min": 1.5, "transversal_for_generic_t": true }
                }),
            );
            cfg.family = Some(FamilySpec {
                kind: FamilyKind::Additive,
                t_values: Some((-10..=10).map(|k| k as f64 / 100.0).collect()),
            });
            cfg
        }
        "example4" => scene(
            name,
            2,
            unit_arc(-1.0, 1.0),
            quartic_dip(),
            json!({
                "description": "unit circle arc |s| <= 1 with mu = 1 - s^2/8: one isolated singular point",
                "expected": {
                    "focrad0": 2.0, "focradminus": 4.0, "singular_points": [[0.0, 2.0]], "collapse_arcs": 0
                }
            }),
        ),
        "example6_family" => {
            let mut cfg = scene(
                name,
                2,
                unit_arc(-1.0, 1.0),
                quartic_dip(),
                json!({
                    "description": "additive family t + 1 - s^2/8: TIR jumps from 4 to below 2 as t crosses 0",
                    "expected": { "tir_negative_t": 4.0, "tir_positive_t_max": 2.0 }
                }),
            );
            cfg.family = Some(FamilySpec {
                kind: FamilyKind::Additive,
                t_values: Some(vec![-0.05, 0.0, 0.05]),
            });
            cfg
        }
        "circle_mu1" => scene(
            name,
            2,
            ComponentSpec::Circle {
                center: None,
                radius: 1.0,
                arc: None,
            },
            WeightSpec::Constant { value: 1.0 },
            json!({
                "description": "unit circle with constant weight",
                "expected": { "dir": 1.0, "tir": 1.0, "air": 1.0 }
            }),
        ),
        "ellipse_mu1" => scene(
            name,
            2,
            ComponentSpec::Ellipse {
                a: 2.0,
                b: 1.0,
                center: None,
            },
            WeightSpec::Constant { value: 1.0 },
            json!({
                "description": "ellipse with semi-axes 2 and 1 and constant weight; the focal radius is the smallest curvature radius b^2/a",
                "expected": { "ur": 0.5, "focal_witness": [2.0, 0.0], "length": 9.688448220547675 }
            }),
        ),
        _ => return None,
    })
}
