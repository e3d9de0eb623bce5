//! Batch drivers: radii sweeps over an additive weight family, fiber traces
//! and samples of the tube boundary.

use crate::error::{Error, Result};
use crate::expmap::{exp_at, normal_frame, potential_g, w_limit};
use crate::radii::radii_report;
use crate::scene::Scene;
use crate::singular::TirFlag;
use crate::vector::VecN;
use rayon::prelude::*;
use std::f64::consts::TAU;

/// One row of a radii sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub t: f64,
    pub dir: f64,
    pub tir: f64,
    pub air: f64,
    pub collapse_count: usize,
    pub tir_flag: Option<TirFlag>,
    /// `None` for a successful row, otherwise the error code and message.
    pub failure: Option<(String, String)>,
}

impl SweepRow {
    pub fn ok(&self) -> bool {
        self.failure.is_none()
    }
}

/// Radii of `mu + t` for every `t` in the grid, in grid order. A failing
/// row carries its error and the sweep continues.
pub fn radii_sweep(scene: &Scene, t_grid: &[f64]) -> Vec<SweepRow> {
    t_grid
        .par_iter()
        .map(|&t| {
            let row = scene.with_shift(t).and_then(|sc| radii_report(&sc));
            match row {
                Ok(r) => SweepRow {
                    t,
                    dir: r.dir,
                    tir: r.tir.value,
                    air: r.air,
                    collapse_count: r.collapse_arcs.len(),
                    tir_flag: Some(r.tir.flag),
                    failure: None,
                },
                Err(e) => SweepRow {
                    t,
                    dir: f64::NAN,
                    tir: f64::NAN,
                    air: f64::NAN,
                    collapse_count: 0,
                    tir_flag: None,
                    failure: Some((e.code().to_string(), e.to_string())),
                },
            }
        })
        .collect()
}

/// `n` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
    }
}

/// A point on a fiber trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TracePoint {
    pub s: f64,
    /// Signed height; negative values use the direction `-v`.
    pub r: f64,
    pub point: VecN,
}

/// Points `exp(gamma(s), R v)` for `R` on a uniform grid in
/// `[-r_max, r_max]`; the trace lies on the fiber at `s`.
pub fn fiber_trace(
    scene: &Scene,
    comp_id: usize,
    s: f64,
    v: &VecN,
    r_max: f64,
    samples: usize,
) -> Result<Vec<TracePoint>> {
    let comp = scene.component(comp_id)?;
    let foot = comp.eval(s)?;
    let limit = w_limit(&foot);
    if !(r_max >= 0.0) || r_max > limit * (1.0 + scene.tol.w_boundary_rel) {
        return Err(Error::OutOfW { r: r_max, limit });
    }
    if v.dim() != scene.dim {
        return Err(Error::InvalidScene("direction has the wrong dimension".into()));
    }
    let v = v
        .reject_unit(&foot.jet.d1)
        .normalized()
        .ok_or(Error::DegenerateDirection)?;
    let minus = -&v;
    Ok(linspace(-r_max, r_max, samples.max(2))
        .into_iter()
        .map(|r| {
            let dir = if r < 0.0 { &minus } else { &v };
            TracePoint {
                s: foot.s,
                r,
                point: exp_at(&foot, dir, r.abs()),
            }
        })
        .collect())
}

/// A sampled image point of the sphere bundle of radius `R`.
#[derive(Debug, Clone, PartialEq)]
pub struct TubePoint {
    pub comp: usize,
    pub s: f64,
    /// Angle of the direction in the normal frame (0 or pi in the plane).
    pub angle: f64,
    pub point: VecN,
    /// `G` at the point.
    pub g: f64,
}

/// Boundary samples split by whether they are genuinely on `{G = R^2}`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TubeSample {
    pub boundary: Vec<TubePoint>,
    /// Points with `G < R^2 - tol`, which lie inside the tube.
    pub overlap: Vec<TubePoint>,
}

/// Samples `exp(gamma(s), R v)` on a grid of `s_samples` feet per component
/// and `v_samples` directions per foot, keeping feet where `R` is in W.
///
/// In the plane the two normal directions are used. In higher dimensions the
/// directions run around the circle spanned by the first two normal frame
/// vectors.
pub fn tube_boundary(scene: &Scene, r: f64, s_samples: usize, v_samples: usize) -> Result<TubeSample> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidScene(format!("tube radius must be positive, got {r}")));
    }
    let tol = scene.tol.tube_tol_rel * r * r;
    let mut jobs: Vec<(usize, f64, f64, VecN)> = Vec::new();
    for (ci, comp) in scene.components.iter().enumerate() {
        for s in comp.curve.sample_params(s_samples) {
            let foot = comp.eval_unchecked(s);
            if r > w_limit(&foot) {
                continue;
            }
            let frame = normal_frame(&foot.jet.d1);
            if scene.dim == 2 {
                jobs.push((ci, s, 0.0, frame[0].clone()));
                jobs.push((ci, s, TAU / 2.0, -&frame[0]));
            } else {
                for k in 0..v_samples.max(1) {
                    let a = TAU * k as f64 / v_samples.max(1) as f64;
                    let v = frame[0].scaled(a.cos()).plus_scaled(a.sin(), &frame[1]);
                    jobs.push((ci, s, a, v));
                }
            }
        }
    }
    let points: Vec<TubePoint> = jobs
        .par_iter()
        .map(|(ci, s, a, v)| {
            let foot = scene.components[*ci].eval_unchecked(*s);
            let point = exp_at(&foot, v, r);
            let g = potential_g(scene, &point);
            TubePoint {
                comp: *ci,
                s: *s,
                angle: *a,
                point,
                g,
            }
        })
        .collect();
    let mut out = TubeSample::default();
    for p in points {
        if p.g >= r * r - tol {
            out.boundary.push(p);
        } else {
            out.overlap.push(p);
        }
    }
    Ok(out)
}
