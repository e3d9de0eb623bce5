//! Deterministic serialization of results: JSON reports, CSV tables and
//! planar SVG drawings.
//!
//! Every floating-point number is written with 17 significant digits so a
//! value read back is bit-identical to the one written. Non-finite values are
//! spelled `inf`, `-inf` and `nan` (as JSON strings inside JSON documents).

use crate::error::{Error, Result};
use crate::experiments::{SweepRow, TracePoint, TubePoint};
use crate::radii::{DoubleCriticalPair, RadiiReport};
use crate::scene::Scene;
use crate::singular::{CollapseArc, SingularGraphPoint, TirFlag, Transversality};
use crate::vector::VecN;
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;
use std::fmt::Write as _;

/// A float formatted with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x:.16e}")
    }
}

/// Wrapper that serializes an `f64` through [`fmt_f64`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let text = fmt_f64(self.0);
        if self.0.is_finite() {
            RawValue::from_string(text)
                .map_err(serde::ser::Error::custom)?
                .serialize(ser)
        } else {
            ser.serialize_str(&text)
        }
    }
}

fn nums(v: &VecN) -> Vec<Num> {
    v.iter().map(|x| Num(*x)).collect()
}

#[derive(Serialize)]
struct FootJson {
    component: usize,
    s: Num,
    point: Vec<Num>,
}

#[derive(Serialize)]
struct PairJson {
    component1: usize,
    s1: Num,
    component2: usize,
    s2: Num,
    ratio: Num,
    midpoint: Vec<Num>,
    residual: Num,
}

#[derive(Serialize)]
struct ArcJson {
    component: usize,
    s1: Num,
    s2: Num,
    kappa: Num,
    r: Num,
    a: Num,
    p0: Vec<Num>,
    residuals: [Num; 6],
}

#[derive(Serialize)]
struct WitnessJson {
    focrad0: FootJson,
    focradminus: FootJson,
    dcsd_pair: Option<PairJson>,
    collapse_arcs: Vec<ArcJson>,
}

#[derive(Serialize)]
struct ReportJson<'a> {
    scene: &'a str,
    focrad0: Num,
    focradminus: Num,
    dcsd_half: Num,
    lr: Num,
    ur: Num,
    dir: Num,
    tir: Num,
    tir_flag: TirFlag,
    air: Num,
    pair_count: usize,
    pair_seeds_discarded: usize,
    witnesses: WitnessJson,
}

fn foot_json(scene: &Scene, (ci, s): (usize, f64)) -> FootJson {
    let point = scene.components[ci].eval_unchecked(s).jet.point;
    FootJson {
        component: ci,
        s: Num(s),
        point: nums(&point),
    }
}

fn pair_json(p: &DoubleCriticalPair) -> PairJson {
    PairJson {
        component1: p.comp1,
        s1: Num(p.s1),
        component2: p.comp2,
        s2: Num(p.s2),
        ratio: Num(p.ratio),
        midpoint: nums(&p.midpoint),
        residual: Num(p.residual),
    }
}

fn arc_json(a: &CollapseArc) -> ArcJson {
    let r = &a.residuals;
    ArcJson {
        component: a.comp,
        s1: Num(a.s1),
        s2: Num(a.s2),
        kappa: Num(a.kappa),
        r: Num(a.r),
        a: Num(a.a),
        p0: nums(&a.p0),
        residuals: [r.kappa_prime, r.gamma, r.mu, r.r, r.p, r.fit].map(Num),
    }
}

fn to_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

/// The radii report as pretty JSON.
pub fn report_json(scene: &Scene, r: &RadiiReport) -> String {
    to_pretty(&ReportJson {
        scene: &scene.name,
        focrad0: Num(r.focrad0),
        focradminus: Num(r.focradminus),
        dcsd_half: Num(r.dcsd_half),
        lr: Num(r.lr),
        ur: Num(r.ur),
        dir: Num(r.dir),
        tir: Num(r.tir.value),
        tir_flag: r.tir.flag,
        air: Num(r.air),
        pair_count: r.pair_count,
        pair_seeds_discarded: r.pair_discarded,
        witnesses: WitnessJson {
            focrad0: foot_json(scene, r.focal.witness0),
            focradminus: foot_json(scene, r.focal.witness_minus),
            dcsd_pair: r.dcsd_pair.as_ref().map(pair_json),
            collapse_arcs: r.collapse_arcs.iter().map(arc_json).collect(),
        },
    })
}

/// The radii report as `key,value` CSV.
pub fn report_csv(r: &RadiiReport) -> String {
    let mut out = String::from("key,value\n");
    for (k, v) in [
        ("focrad0", r.focrad0),
        ("focradminus", r.focradminus),
        ("dcsd_half", r.dcsd_half),
        ("lr", r.lr),
        ("ur", r.ur),
        ("dir", r.dir),
        ("tir", r.tir.value),
        ("air", r.air),
    ] {
        let _ = writeln!(out, "{k},{}", fmt_f64(v));
    }
    out
}

/// A short human-readable table of the radii.
pub fn report_table(scene: &Scene, r: &RadiiReport) -> String {
    let mut out = format!("scene {}\n", scene.name);
    let flag = match r.tir.flag {
        TirFlag::Attained => "attained by a collapse arc",
        TirFlag::Infimum => "no collapse arc, equals UR",
    };
    let rows = [
        ("FocRad0", r.focrad0, String::new()),
        ("FocRad-", r.focradminus, String::new()),
        ("DCSD/2", r.dcsd_half, format!("{} pairs", r.pair_count)),
        ("DIR = LR", r.dir, String::new()),
        ("TIR", r.tir.value, flag.to_string()),
        ("AIR = UR", r.air, String::new()),
    ];
    for (name, v, note) in rows {
        let _ = writeln!(out, "  {name:<9} {v:>22.15}  {note}");
    }
    out
}

/// Sweep rows as CSV with a trailing status column.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("t,dir,tir,air,collapse_count,status\n");
    for r in rows {
        let status = match &r.failure {
            None => "OK".to_string(),
            Some((code, _)) => format!("FAILED:{code}"),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{status}",
            fmt_f64(r.t),
            fmt_f64(r.dir),
            fmt_f64(r.tir),
            fmt_f64(r.air),
            r.collapse_count
        );
    }
    out
}

fn coord_header(prefix: &str, dim: usize) -> String {
    let mut h = prefix.to_string();
    for i in 1..=dim {
        let _ = write!(h, ",x{i}");
    }
    h.push('\n');
    h
}

fn push_coords(out: &mut String, p: &VecN) {
    for x in p.iter() {
        out.push(',');
        out.push_str(&fmt_f64(*x));
    }
    out.push('\n');
}

/// Fiber traces as `component,s,R,x1..xn`.
pub fn trace_csv(dim: usize, traces: &[(usize, Vec<TracePoint>)]) -> String {
    let mut out = coord_header("component,s,R", dim);
    for (ci, t) in traces {
        for p in t {
            let _ = write!(out, "{ci},{},{}", fmt_f64(p.s), fmt_f64(p.r));
            push_coords(&mut out, &p.point);
        }
    }
    out
}

/// Tube samples as `component,s,R,x1..xn`.
pub fn tube_csv(dim: usize, r: f64, points: &[TubePoint]) -> String {
    let mut out = coord_header("component,s,R", dim);
    for p in points {
        let _ = write!(out, "{},{},{}", p.comp, fmt_f64(p.s), fmt_f64(r));
        push_coords(&mut out, &p.point);
    }
    out
}

/// Singular graph points as `component,s,R,x1..xn`.
pub fn singular_csv(dim: usize, points: &[SingularGraphPoint]) -> String {
    let mut out = coord_header("component,s,R", dim);
    for p in points {
        let _ = write!(out, "{},{},{}", p.comp, fmt_f64(p.s), fmt_f64(p.r_s));
        push_coords(&mut out, &p.location);
    }
    out
}

/// Collapse arcs as CSV, one row per arc.
pub fn collapse_csv(dim: usize, arcs: &[CollapseArc]) -> String {
    let mut out = String::from("component,s1,s2,kappa,r,a");
    for i in 1..=dim {
        let _ = write!(out, ",p0_{i}");
    }
    out.push_str(",res_kappa,res_gamma,res_mu,res_r,res_p,res_fit\n");
    for a in arcs {
        let _ = write!(
            out,
            "{},{},{},{},{},{}",
            a.comp,
            fmt_f64(a.s1),
            fmt_f64(a.s2),
            fmt_f64(a.kappa),
            fmt_f64(a.r),
            fmt_f64(a.a)
        );
        for x in a.p0.iter() {
            let _ = write!(out, ",{}", fmt_f64(*x));
        }
        let r = &a.residuals;
        for v in [r.kappa_prime, r.gamma, r.mu, r.r, r.p, r.fit] {
            let _ = write!(out, ",{}", fmt_f64(v));
        }
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct CheckJson<'a> {
    scene: &'a str,
    regular: bool,
    zeros: usize,
    witnesses: Vec<WitnessZero>,
}

#[derive(Serialize)]
struct WitnessZero {
    component: usize,
    s: Num,
    s_lo: Num,
    s_hi: Num,
    g: Num,
    g_prime: Num,
    continuum: bool,
}

/// The regular-value diagnostic as JSON.
pub fn check_json(scene: &Scene, t: &Transversality) -> String {
    to_pretty(&CheckJson {
        scene: &scene.name,
        regular: t.regular,
        zeros: t.zeros,
        witnesses: t
            .witnesses
            .iter()
            .map(|w| WitnessZero {
                component: w.comp,
                s: Num(w.s),
                s_lo: Num(w.s_lo),
                s_hi: Num(w.s_hi),
                g: Num(w.g),
                g_prime: Num(w.g_prime),
                continuum: w.is_continuum(),
            })
            .collect(),
    })
}

/// Drawing layers, rendered in declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Layer {
    Curve,
    Fibers,
    Tube,
    Singular,
}

impl Layer {
    fn id(self) -> &'static str {
        match self {
            Layer::Curve => "curve",
            Layer::Fibers => "fibers",
            Layer::Tube => "tube",
            Layer::Singular => "singular",
        }
    }

    fn style(self) -> &'static str {
        match self {
            Layer::Curve => r##"fill="none" stroke="#000000""##,
            Layer::Fibers => r##"fill="none" stroke="#1f77b4""##,
            Layer::Tube => r##"fill="#d62728" stroke="none""##,
            Layer::Singular => r##"fill="#2ca02c" stroke="none""##,
        }
    }
}

enum Shape {
    Polyline(Vec<[f64; 2]>),
    Dot([f64; 2]),
}

/// A planar drawing with a viewBox fitted to its content.
pub struct SvgDrawing {
    shapes: Vec<(Layer, Shape)>,
}

impl SvgDrawing {
    /// Starts a drawing; fails for non-planar scenes.
    pub fn new(dim: usize) -> Result<Self> {
        if dim != 2 {
            return Err(Error::SvgUnsupportedDim { dim });
        }
        Ok(SvgDrawing { shapes: Vec::new() })
    }

    /// Adds every component of the scene as polylines.
    pub fn add_scene_curves(&mut self, scene: &Scene, samples: usize) {
        for c in &scene.components {
            let mut pts: Vec<[f64; 2]> = c
                .curve
                .sample_params(samples)
                .into_iter()
                .map(|s| {
                    let p = c.eval_unchecked(s).jet.point;
                    [p[0], p[1]]
                })
                .collect();
            if c.curve.is_closed() {
                pts.push(pts[0]);
            }
            self.polyline(Layer::Curve, pts);
        }
    }

    pub fn polyline(&mut self, layer: Layer, pts: Vec<[f64; 2]>) {
        if pts.iter().all(|p| p[0].is_finite() && p[1].is_finite()) {
            self.shapes.push((layer, Shape::Polyline(pts)));
        }
    }

    pub fn dot(&mut self, layer: Layer, p: [f64; 2]) {
        if p[0].is_finite() && p[1].is_finite() {
            self.shapes.push((layer, Shape::Dot(p)));
        }
    }

    /// Renders the document. The y axis points up.
    pub fn render(&self) -> String {
        let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        let mut grow = |p: &[f64; 2]| {
            x0 = x0.min(p[0]);
            x1 = x1.max(p[0]);
            y0 = y0.min(p[1]);
            y1 = y1.max(p[1]);
        };
        for (_, s) in &self.shapes {
            match s {
                Shape::Polyline(v) => v.iter().for_each(&mut grow),
                Shape::Dot(p) => grow(p),
            }
        }
        if !x0.is_finite() {
            (x0, y0, x1, y1) = (-1.0, -1.0, 1.0, 1.0);
        }
        let span = (x1 - x0).max(y1 - y0).max(1e-9);
        let (w, h) = ((x1 - x0).max(1e-9 * span), (y1 - y0).max(1e-9 * span));
        let (mx, my) = (0.1 * w, 0.1 * h);
        let stroke = 0.003 * span;
        let radius = 0.008 * span;
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{:.9} {:.9} {:.9} {:.9}">"#,
            x0 - mx,
            -(y1 + my),
            w + 2.0 * mx,
            h + 2.0 * my
        );
        let mut layers: Vec<Layer> = self.shapes.iter().map(|(l, _)| *l).collect();
        layers.sort();
        layers.dedup();
        for layer in layers {
            let _ = writeln!(
                out,
                r#"<g id="{}" {} stroke-width="{:.9}">"#,
                layer.id(),
                layer.style(),
                stroke
            );
            for (l, s) in &self.shapes {
                if *l != layer {
                    continue;
                }
                match s {
                    Shape::Polyline(v) => {
                        out.push_str(r#"<polyline points=""#);
                        for (i, p) in v.iter().enumerate() {
                            if i > 0 {
                                out.push(' ');
                            }
                            let _ = write!(out, "{:.9},{:.9}", p[0], -p[1]);
                        }
                        out.push_str("\"/>\n");
                    }
                    Shape::Dot(p) => {
                        let _ = writeln!(out, r#"<circle cx="{:.9}" cy="{:.9}" r="{:.9}"/>"#, p[0], -p[1], radius);
                    }
                }
            }
            out.push_str("</g>\n");
        }
        out.push_str("</svg>\n");
        out
    }
}
