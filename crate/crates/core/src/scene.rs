//! Scene files and the validated in-memory scene.
//!
//! A scene is a list of curve components, one weight per component, a block
//! of tolerance overrides and an optional weight family for sweeps. Scene
//! files are JSON; unknown keys are rejected everywhere.

use crate::error::{Error, Result};
use crate::geometry::{
    build_arclength_curve, check_positive, ArclengthCurve, BuildOptions, ComponentSpec, CurveJet, WeightFunction,
    WeightJet, WeightSpec,
};
use crate::tolerance::Tolerances;
use crate::vector::VecN;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;
use std::sync::{Arc, OnceLock};

/// A one-parameter family of weights `mu_t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    /// Default parameter grid for sweeps.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_values: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    /// `mu_t = t + mu`.
    Additive,
}

/// The on-disk scene description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneConfig {
    pub name: String,
    pub ambient_dim: usize,
    pub components: Vec<ComponentSpec>,
    /// One weight per component, in the same order.
    pub weights: Vec<WeightSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilySpec>,
    /// Free-form annotations such as expected reference values.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<serde_json::Value>,
}

impl SceneConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidScene(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::InvalidScene(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("scene config serializes");
        s.push('\n');
        s
    }

    /// Resolved tolerances: defaults, then the scene block, then `overrides`.
    pub fn tolerances_with(&self, overrides: &[String]) -> Result<Tolerances> {
        let mut t = Tolerances::default();
        for (k, v) in &self.tolerances {
            t.set(k, *v)?;
        }
        for kv in overrides {
            t.apply_override(kv)?;
        }
        if t.tau_lo >= t.tau_hi {
            return Err(Error::InvalidTolerance {
                name: "tau_lo".into(),
                value: t.tau_lo,
            });
        }
        Ok(t)
    }
}

type SampleCache = OnceLock<(usize, Arc<Vec<(f64, VecN)>>)>;

/// One curve component with its weight.
#[derive(Debug, Clone)]
pub struct Component {
    pub curve: ArclengthCurve,
    pub weight: WeightFunction,
    /// Cached grid of sample points, keyed by the sample count.
    samples: SampleCache,
}

/// Everything known at one foot point: curve jet, weight jet, curvature and
/// principal normal.
#[derive(Debug, Clone)]
pub struct FootData {
    pub s: f64,
    pub jet: CurveJet,
    pub w: WeightJet,
    pub kappa: f64,
    pub normal: Option<VecN>,
}

impl FootData {
    /// Curvature derivative `kappa' = gamma'' . gamma''' / kappa` (zero where
    /// the normal is absent).
    pub fn kappa_prime(&self) -> f64 {
        if self.kappa > 0.0 {
            self.jet.d2.dot(&self.jet.d3) / self.kappa
        } else {
            0.0
        }
    }
}

impl Component {
    pub fn new(curve: ArclengthCurve, weight: WeightFunction) -> Self {
        Component {
            curve,
            weight,
            samples: OnceLock::new(),
        }
    }

    /// Grid parameters with their curve points (see
    /// [`ArclengthCurve::sample_params`]); cached for the first `n` requested.
    pub fn sample_table(&self, n: usize) -> Arc<Vec<(f64, VecN)>> {
        let build = || {
            Arc::new(
                self.curve
                    .sample_params(n)
                    .into_iter()
                    .map(|s| (s, self.curve.jet_unchecked(s).point))
                    .collect::<Vec<_>>(),
            )
        };
        let (cached_n, table) = self.samples.get_or_init(|| (n, build()));
        if *cached_n == n {
            table.clone()
        } else {
            build()
        }
    }

    /// Evaluates curve and weight at `s` (wrapped or range-checked).
    pub fn eval(&self, s: f64) -> Result<FootData> {
        let s = self.curve.normalize(s)?;
        Ok(self.eval_unchecked(s))
    }

    pub(crate) fn eval_unchecked(&self, s: f64) -> FootData {
        let jet = self.curve.jet_unchecked(s);
        let frame = self.curve.frame_from_jet(s, &jet);
        FootData {
            s,
            w: self.weight.eval(s),
            kappa: frame.curvature,
            normal: frame.normal,
            jet,
        }
    }
}

/// A validated scene ready for analysis.
#[derive(Debug, Clone)]
pub struct Scene {
    pub name: String,
    pub dim: usize,
    pub components: Vec<Component>,
    pub tol: Tolerances,
    pub seed: u64,
    pub family: Option<FamilySpec>,
}

impl Scene {
    /// Builds a scene with the tolerances from the file.
    pub fn from_config(cfg: &SceneConfig) -> Result<Self> {
        Self::from_config_with(cfg, &[])
    }

    /// Builds a scene with extra `KEY=VALUE` tolerance overrides.
    pub fn from_config_with(cfg: &SceneConfig, overrides: &[String]) -> Result<Self> {
        let tol = cfg.tolerances_with(overrides)?;
        if cfg.ambient_dim < 2 {
            return Err(Error::InvalidScene("ambient_dim must be at least 2".into()));
        }
        if cfg.components.is_empty() {
            return Err(Error::InvalidScene("scene has no components".into()));
        }
        if cfg.components.len() != cfg.weights.len() {
            return Err(Error::InvalidScene(format!(
                "{} components but {} weights",
                cfg.components.len(),
                cfg.weights.len()
            )));
        }
        let opts = BuildOptions {
            ambient_dim: cfg.ambient_dim,
            tol_arc: tol.tol_arc,
            kappa_tol_rel: tol.kappa_tol_rel,
        };
        let mut components = Vec::with_capacity(cfg.components.len());
        for (id, (cs, ws)) in cfg.components.iter().zip(&cfg.weights).enumerate() {
            let curve = build_arclength_curve(id, cs, &opts)?;
            let (lo, _) = curve.domain();
            let weight = WeightFunction::new(ws, lo, curve.length())?;
            components.push(Component::new(curve, weight));
        }
        let scene = Scene {
            name: cfg.name.clone(),
            dim: cfg.ambient_dim,
            components,
            tol,
            seed: cfg.seed,
            family: cfg.family.clone(),
        };
        scene.validate_weights()?;
        scene.check_disjoint()?;
        Ok(scene)
    }

    /// Parses and builds a scene file.
    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        Self::from_config_with(&SceneConfig::load(path)?, overrides)
    }

    fn validate_weights(&self) -> Result<()> {
        for c in &self.components {
            let (lo, hi) = c.curve.domain();
            check_positive(&c.weight, lo, c.curve.length(), self.tol.focal_samples)?;
            if c.curve.is_closed() {
                let a = c.weight.eval(lo);
                let b = c.weight.eval(hi);
                let scale = 1.0 + a.mu.abs();
                let mismatch = [a.mu - b.mu, a.d1 - b.d1, a.d2 - b.d2]
                    .iter()
                    .fold(0.0_f64, |m, x| m.max(x.abs()));
                if mismatch > 1e-9 * scale {
                    return Err(Error::NonperiodicWeight { mismatch });
                }
            }
        }
        Ok(())
    }

    fn check_disjoint(&self) -> Result<()> {
        let n = self.tol.disjoint_samples;
        let samples: Vec<Vec<VecN>> = self
            .components
            .iter()
            .map(|c| {
                c.curve
                    .sample_params(n)
                    .into_iter()
                    .map(|s| c.curve.jet_unchecked(s).point)
                    .collect()
            })
            .collect();
        for a in 0..samples.len() {
            for b in a + 1..samples.len() {
                let mut best = f64::INFINITY;
                for p in &samples[a] {
                    for q in &samples[b] {
                        best = best.min(p.dist(q));
                    }
                }
                let spacing =
                    self.components[a].curve.length() / n as f64 + self.components[b].curve.length() / n as f64;
                // sampled distance overestimates the true one by at most the spacing
                if best <= spacing {
                    return Err(Error::ComponentsIntersect { a, b, distance: best });
                }
            }
        }
        Ok(())
    }

    /// The same scene with every weight shifted by `t`.
    pub fn with_shift(&self, t: f64) -> Result<Self> {
        let mut out = self.clone();
        for c in &mut out.components {
            c.weight = c.weight.shifted(t);
        }
        out.validate_weights()?;
        Ok(out)
    }

    pub fn component(&self, id: usize) -> Result<&Component> {
        self.components.get(id).ok_or(Error::NoSuchComponent(id))
    }

    /// Largest component length; used to scale tolerances.
    pub fn max_length(&self) -> f64 {
        self.components.iter().map(|c| c.curve.length()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CIRCLE: &str = r#"{
        "name": "c",
        "ambient_dim": 2,
        "components": [{"basis": "circle", "radius": 1.0}],
        "weights": [{"kind": "constant", "value": 1.0}]
    }"#;

    #[test]
    fn parses_and_builds() {
        let cfg = SceneConfig::from_json(CIRCLE).unwrap();
        let scene = Scene::from_config(&cfg).unwrap();
        assert_eq!(scene.components.len(), 1);
        let back = SceneConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn rejects_unknown_keys_everywhere() {
        for bad in [
            CIRCLE.replace("\"name\"", "\"colour\": 1, \"name\""),
            CIRCLE.replace("\"radius\"", "\"radiu\": 2, \"radius\""),
            CIRCLE.replace("\"value\"", "\"scale\": 2, \"value\""),
        ] {
            assert!(SceneConfig::from_json(&bad).is_err(), "{bad}");
        }
        let mut cfg = SceneConfig::from_json(CIRCLE).unwrap();
        cfg.tolerances.insert("bogus".into(), 1.0);
        assert!(Scene::from_config(&cfg).is_err());
    }

    #[test]
    fn rejects_nonpositive_and_nonperiodic_weights() {
        let mut cfg = SceneConfig::from_json(CIRCLE).unwrap();
        cfg.weights[0] = WeightSpec::Cosine {
            amplitude: 1.0,
            frequency: 1.0,
            phase: 0.0,
            offset: 0.5,
        };
        assert!(matches!(Scene::from_config(&cfg), Err(Error::NonpositiveWeight { .. })));
        cfg.weights[0] = WeightSpec::Polynomial {
            coeffs: vec![1.0, 0.01],
        };
        assert!(matches!(Scene::from_config(&cfg), Err(Error::NonperiodicWeight { .. })));
    }

    #[test]
    fn rejects_touching_components() {
        let mut cfg = SceneConfig::from_json(CIRCLE).unwrap();
        cfg.components.push(ComponentSpec::Circle {
            center: Some(vec![1.5, 0.0]),
            radius: 1.0,
            arc: None,
        });
        cfg.weights.push(WeightSpec::Constant { value: 1.0 });
        assert!(matches!(
            Scene::from_config(&cfg),
            Err(Error::ComponentsIntersect { .. })
        ));
    }
}
