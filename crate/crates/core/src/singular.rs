//! The singular set of the weighted exponential map, horizontally collapsing
//! arcs, the topological injectivity radius and the regular-value diagnostic.
//!
//! Everything here revolves around `g = mu'' + kappa^2 mu / 4`. Where `g`
//! vanishes along the principal normal, `F_p''` vanishes at the height
//! `R_s = (mu'^2 - mu mu'')^(-1/2)`; an interval of such zeros over an arc of
//! constant curvature whose images coincide is a collapse arc.

use crate::error::{Error, Result};
use crate::expmap::{exp_at, f_second_closed_at, normal_frame, w_limit, NormalOffset};
use crate::numeric::{bisect, determinant, golden_min, solve_dense};
use crate::radii::clamp_wrap;
use crate::scene::{Component, FootData, Scene};
use crate::vector::VecN;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

/// `g = mu'' + kappa^2 mu / 4` at a foot.
pub fn g_value(foot: &FootData) -> f64 {
    foot.w.d2 + 0.25 * foot.kappa * foot.kappa * foot.w.mu
}

/// `g' = mu''' + kappa kappa' mu / 2 + kappa^2 mu' / 4`.
pub fn g_derivative(foot: &FootData) -> f64 {
    let k = foot.kappa;
    foot.w.d3 + 0.5 * k * foot.kappa_prime() * foot.w.mu + 0.25 * k * k * foot.w.d1
}

/// A zero of `g` on one component: an isolated point, or a run of grid
/// samples on which `g` and `g'` are both negligible.
#[derive(Debug, Clone, PartialEq)]
pub struct GZero {
    pub comp: usize,
    /// Representative abscissa (the refined point, or the run midpoint).
    pub s: f64,
    pub s_lo: f64,
    pub s_hi: f64,
    pub g: f64,
    pub g_prime: f64,
    /// Grid samples inside a continuum run; empty for isolated zeros.
    pub run: Vec<f64>,
}

impl GZero {
    pub fn is_continuum(&self) -> bool {
        !self.run.is_empty()
    }
}

/// Zeros of `g` on a component.
///
/// The grid is scanned for sign changes (refined by bisection), for runs of
/// samples with `|g| <= tol` and for discrete local minima of `|g|` that a
/// grid would step over. A run whose `|g'|` stays below `eps_reg` is kept as
/// a continuum; other runs and minima are refined to a single point, by
/// bisection on `g'` when it changes sign and golden search on `|g|` when not.
pub fn g_zeros(comp: &Component, comp_id: usize, samples: usize, tol: f64, eps_reg: f64) -> Vec<GZero> {
    let curve = &comp.curve;
    let closed = curve.is_closed();
    let params = curve.sample_params(samples);
    let h = curve.length() / samples as f64;
    let feet: Vec<FootData> = params.par_iter().map(|&s| comp.eval_unchecked(s)).collect();
    let g: Vec<f64> = feet.iter().map(g_value).collect();
    let dg: Vec<f64> = feet.iter().map(g_derivative).collect();
    let m = params.len();
    let near: Vec<bool> = g.iter().map(|v| v.abs() <= tol).collect();
    let xtol = 1e-14 * curve.length().max(1.0);
    let at = |s: f64| comp.eval_unchecked(clamp_wrap(comp, s));
    let (lo, hi) = curve.domain();
    let clip = |a: f64, b: f64| if closed { (a, b) } else { (a.max(lo), b.min(hi)) };

    let refine_point = |a: f64, b: f64| -> GZero {
        let (a, b) = clip(a, b);
        let da = g_derivative(&at(a));
        let db = g_derivative(&at(b));
        let gs = |s: f64| g_value(&at(s));
        let mut s = golden_min(|s| gs(s).abs(), a, b, xtol).0;
        if da * db < 0.0 {
            // a tangential touch: the extremum of g locates it exactly
            let t = bisect(|s| g_derivative(&at(s)), a, b, xtol);
            if gs(t).abs() <= gs(s).abs() {
                s = t;
            }
        }
        let f = at(s);
        GZero {
            comp: comp_id,
            s: f.s,
            s_lo: f.s,
            s_hi: f.s,
            g: g_value(&f),
            g_prime: g_derivative(&f),
            run: Vec::new(),
        }
    };

    let mut out: Vec<GZero> = Vec::new();
    // runs of near-zero samples; on a closed curve start after a gap
    let start = if closed { (0..m).find(|&i| !near[i]) } else { Some(0) };
    match start {
        None => {
            // g vanishes everywhere on a closed curve
            let gp = dg.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            out.push(GZero {
                comp: comp_id,
                s: params[0],
                s_lo: lo,
                s_hi: hi,
                g: g.iter().fold(0.0f64, |a, v| a.max(v.abs())),
                g_prime: gp,
                run: params.clone(),
            });
        }
        Some(st) => {
            let mut k = 0;
            while k < m {
                let i = (st + k) % m;
                if !near[i] {
                    k += 1;
                    continue;
                }
                let mut idx = Vec::new();
                while k < m && near[(st + k) % m] {
                    idx.push((st + k) % m);
                    k += 1;
                }
                let max_dg = idx.iter().fold(0.0f64, |a, &j| a.max(dg[j].abs()));
                let first = params[idx[0]];
                let last = first + curve.param_gap(first, params[*idx.last().unwrap()]).abs();
                if idx.len() >= 2 && max_dg <= eps_reg {
                    let mid = clamp_wrap(comp, 0.5 * (first + last));
                    out.push(GZero {
                        comp: comp_id,
                        s: mid,
                        s_lo: first,
                        s_hi: last,
                        g: idx.iter().fold(0.0f64, |a, &j| a.max(g[j].abs())),
                        g_prime: max_dg,
                        run: idx.iter().map(|&j| params[j]).collect(),
                    });
                } else {
                    out.push(refine_point(first - h, last + h));
                }
            }
        }
    }
    // sign changes and hidden minima between samples outside the runs
    let pairs = if closed { m } else { m - 1 };
    for i in 0..pairs {
        let j = (i + 1) % m;
        if near[i] || near[j] {
            continue;
        }
        if g[i] * g[j] < 0.0 {
            let a = params[i];
            let b = a + curve.param_gap(a, params[j]).abs();
            let s = bisect(|s| g_value(&at(s)), a, b, xtol);
            let f = at(s);
            out.push(GZero {
                comp: comp_id,
                s: f.s,
                s_lo: f.s,
                s_hi: f.s,
                g: g_value(&f),
                g_prime: g_derivative(&f),
                run: Vec::new(),
            });
        }
    }
    for i in 0..m {
        if near[i] {
            continue;
        }
        let prev = if i > 0 {
            Some(i - 1)
        } else if closed {
            Some(m - 1)
        } else {
            None
        };
        let next = if i + 1 < m {
            Some(i + 1)
        } else if closed {
            Some(0)
        } else {
            None
        };
        let v = g[i].abs();
        let is_min = prev.is_some_and(|p| v <= g[p].abs() && g[p] * g[i] > 0.0)
            && next.is_some_and(|n| v <= g[n].abs() && g[n] * g[i] > 0.0);
        if is_min {
            let z = refine_point(params[i] - h, params[i] + h);
            if z.g.abs() <= tol {
                out.push(z);
            }
        }
    }
    out.sort_by(|a, b| a.s_lo.total_cmp(&b.s_lo));
    let mut dedup: Vec<GZero> = Vec::new();
    for z in out {
        let dup = dedup
            .iter()
            .any(|d| !d.is_continuum() && !z.is_continuum() && curve.param_gap(d.s, z.s).abs() <= 2.0 * h);
        if !dup {
            dedup.push(z);
        }
    }
    dedup
}

/// One point `(s, R_s)` of the singular graph.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularGraphPoint {
    pub comp: usize,
    pub s: f64,
    /// `(mu'^2 - mu mu'')^(-1/2)`.
    pub r_s: f64,
    /// `exp(gamma(s), R_s N(s))`.
    pub location: VecN,
    /// `|g|` at the point.
    pub g_residual: f64,
    /// `|F_p''|` at the image point, which must be negligible.
    pub hess_residual: f64,
}

fn singular_point(scene: &Scene, comp_id: usize, foot: &FootData, ur: f64) -> Option<SingularGraphPoint> {
    let comp = &scene.components[comp_id];
    if foot.kappa <= comp.curve.kappa_tol() {
        return None;
    }
    let gv = g_value(foot);
    if gv.abs() > scene.tol.tol_sng {
        return None;
    }
    let (mu, m1, m2) = (foot.w.mu, foot.w.d1, foot.w.d2);
    let h = m1 * m1 - mu * m2;
    if !(h > 0.0) {
        return None;
    }
    let r_s = h.powf(-0.5);
    if !(r_s > 0.0 && r_s < ur) {
        return None;
    }
    let n = foot.normal.clone()?;
    let hess = f_second_closed_at(foot, &n, r_s).abs();
    // |F''| is first order in g; allow the same relative slack
    let band = scene
        .tol
        .hess_band(mu)
        .max(scene.tol.tol_sng * 2.0 / (mu * mu) * (1.0 + r_s * r_s) * 4.0);
    if hess > band {
        return None;
    }
    Some(SingularGraphPoint {
        comp: comp_id,
        s: foot.s,
        r_s,
        location: exp_at(foot, &n, r_s),
        g_residual: gv.abs(),
        hess_residual: hess,
    })
}

/// The singular set inside `D(ur)` for every component, in component order
/// then by arclength. Continuum zeros of `g` contribute every grid sample.
pub fn singular_set(scene: &Scene, ur: f64) -> Vec<SingularGraphPoint> {
    let tol = &scene.tol;
    let mut out = Vec::new();
    for (ci, comp) in scene.components.iter().enumerate() {
        for z in g_zeros(comp, ci, tol.singular_samples, tol.tol_sng, tol.eps_reg) {
            if z.is_continuum() {
                for &s in &z.run {
                    if let Some(p) = singular_point(scene, ci, &comp.eval_unchecked(s), ur) {
                        out.push(p);
                    }
                }
            } else if let Some(p) = singular_point(scene, ci, &comp.eval_unchecked(z.s), ur) {
                out.push(p);
            }
        }
    }
    out.sort_by(|a, b| a.comp.cmp(&b.comp).then(a.s.total_cmp(&b.s)));
    out
}

/// Outcome of the singularity test at one offset.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularityTest {
    pub singular: bool,
    /// `mu^2 |F_p''| / 2`, dimensionless.
    pub residual: f64,
    /// `|det d exp| / mu^(n-1)` from finite differences, when requested.
    pub fd_ratio: Option<f64>,
}

/// Whether `exp` is singular at the offset, by `|F_p''| <= tol_hess`.
/// With `cross_check` the normalized determinant of a finite-difference
/// Jacobian is reported alongside.
pub fn is_singular(scene: &Scene, comp_id: usize, offset: &NormalOffset, cross_check: bool) -> Result<SingularityTest> {
    let comp = scene.component(comp_id)?;
    let foot = comp.eval(offset.s)?;
    let limit = w_limit(&foot);
    if !(offset.r < limit * (1.0 - scene.tol.w_boundary_rel)) {
        return Err(Error::OutOfW { r: offset.r, limit });
    }
    let mu = foot.w.mu;
    let f2 = f_second_closed_at(&foot, &offset.v, offset.r);
    let residual = 0.5 * mu * mu * f2.abs();
    let fd_ratio = if cross_check {
        Some(fd_jacobian_ratio(scene, comp, &foot, &offset.v, offset.r))
    } else {
        None
    };
    Ok(SingularityTest {
        singular: residual <= scene.tol.tol_hess_rel,
        residual,
        fd_ratio,
    })
}

/// Normal frame at `s` obtained by projecting a reference frame onto the
/// normal space and orthonormalizing, which varies smoothly with `s`.
fn transported_frame(reference: &[VecN], tangent: &VecN) -> Option<Vec<VecN>> {
    let mut out: Vec<VecN> = Vec::with_capacity(reference.len());
    for e in reference {
        let mut v = e.reject_unit(tangent);
        for f in &out {
            v = v.reject_unit(f);
        }
        out.push(v.normalized()?);
    }
    Some(out)
}

fn exp_coords(comp: &Component, reference: &[VecN], s: f64, c: &[f64]) -> Option<VecN> {
    let foot = comp.eval(s).ok()?;
    let frame = transported_frame(reference, &foot.jet.d1)?;
    let mut w = VecN::zeros(foot.jet.point.dim());
    for (ci, e) in c.iter().zip(&frame) {
        w.axpy(*ci, e);
    }
    let r = w.norm();
    Some(match w.normalized() {
        Some(v) => exp_at(&foot, &v, r),
        None => foot.jet.point.clone(),
    })
}

/// `|det J| / mu^(n-1)` for the central-difference Jacobian of
/// `(s, c) -> exp(gamma(s), sum c_i e_i(s))`. The ratio is 1 at the zero
/// section and vanishes exactly where the map is singular.
pub fn fd_jacobian_ratio(scene: &Scene, comp: &Component, foot: &FootData, v: &VecN, r: f64) -> f64 {
    let n = foot.jet.point.dim();
    let reference = normal_frame(&foot.jet.d1);
    let c0: Vec<f64> = reference.iter().map(|e| r * e.dot(v)).collect();
    let len = comp.curve.length();
    let mut hs = scene.tol.fd_step_rel * len;
    let s0 = foot.s;
    if !comp.curve.is_closed() {
        let (lo, hi) = comp.curve.domain();
        hs = hs.min(0.5 * (s0 - lo).max(0.0)).min(0.5 * (hi - s0).max(0.0));
    }
    let hc = scene.tol.fd_step_rel * r.max(1.0);
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    let central = |f: &dyn Fn(f64) -> Option<VecN>, h: f64| -> Vec<f64> {
        match (f(h), f(-h)) {
            (Some(a), Some(b)) => (&a - &b).scaled(0.5 / h).as_slice().to_vec(),
            _ => vec![f64::NAN; n],
        }
    };
    if hs > 0.0 {
        cols.push(central(&|d| exp_coords(comp, &reference, s0 + d, &c0), hs));
    } else {
        // at an endpoint of an open arc use a one-sided difference
        let (lo, _) = comp.curve.domain();
        let h = scene.tol.fd_step_rel * len;
        let dir = if s0 <= lo { 1.0 } else { -1.0 };
        let a = exp_coords(comp, &reference, s0 + dir * h, &c0);
        let b = exp_coords(comp, &reference, s0, &c0);
        cols.push(match (a, b) {
            (Some(a), Some(b)) => (&a - &b).scaled(dir / h).as_slice().to_vec(),
            _ => vec![f64::NAN; n],
        });
    }
    for k in 0..n - 1 {
        cols.push(central(
            &|d| {
                let mut c = c0.clone();
                c[k] += d;
                exp_coords(comp, &reference, s0, &c)
            },
            hc,
        ));
    }
    let det = determinant(cols);
    det.abs() / foot.w.mu.powi(n as i32 - 1)
}

/// Tally of the two singularity criteria over random offsets.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AgreementSurvey {
    pub tested: usize,
    pub both_singular: usize,
    pub both_regular: usize,
    /// Cases where one test sits inside the indecisive band.
    pub inconclusive: usize,
    /// `(component, s, R, residual, fd_ratio)` for every disagreement.
    pub disagreements: Vec<(usize, f64, f64, f64, f64)>,
}

/// Compares the `F_p''` criterion with the finite-difference determinant on
/// `samples` seeded random offsets with `R <= min(r_max, 0.9 / |mu'|)`,
/// followed by the given singular graph points.
///
/// A disagreement is a case where one test is decisive one way and the other
/// is decisive the other way: singular means residual `<= tol_hess_rel` or
/// ratio `<= tau_lo`, regular means a value `>= tau_hi`.
pub fn agreement_survey(scene: &Scene, samples: usize, r_max: f64, extra: &[SingularGraphPoint]) -> AgreementSurvey {
    let mut rng = ChaCha8Rng::seed_from_u64(scene.seed);
    let mut cases: Vec<(usize, f64, VecN, f64)> = Vec::with_capacity(samples + extra.len());
    let ncomp = scene.components.len();
    while cases.len() < samples {
        let ci = rng.random_range(0..ncomp);
        let comp = &scene.components[ci];
        let (lo, hi) = comp.curve.domain();
        let s = lo + (hi - lo) * rng.random::<f64>();
        let foot = comp.eval_unchecked(s);
        let dir = VecN::from(
            (0..scene.dim)
                .map(|_| rng.sample::<f64, _>(StandardNormal))
                .collect::<Vec<f64>>(),
        );
        let Some(v) = dir.reject_unit(&foot.jet.d1).normalized() else {
            continue;
        };
        let cap = r_max.min(0.9 * w_limit(&foot));
        let r = cap * rng.random::<f64>();
        cases.push((ci, s, v, r));
    }
    for p in extra {
        let foot = scene.components[p.comp].eval_unchecked(p.s);
        if let Some(n) = foot.normal.clone() {
            cases.push((p.comp, p.s, n, p.r_s));
        }
    }
    let tol = &scene.tol;
    let results: Vec<Option<(f64, f64)>> = cases
        .par_iter()
        .map(|(ci, s, v, r)| {
            let off = NormalOffset {
                s: *s,
                v: v.clone(),
                r: *r,
            };
            is_singular(scene, *ci, &off, true)
                .ok()
                .map(|t| (t.residual, t.fd_ratio.unwrap_or(f64::NAN)))
        })
        .collect();
    let mut out = AgreementSurvey::default();
    for ((ci, s, _, r), res) in cases.iter().zip(results) {
        let Some((q, ratio)) = res else { continue };
        out.tested += 1;
        let primary_sing = q <= tol.tol_hess_rel;
        let primary_reg = q >= tol.tau_hi;
        let fd_sing = ratio <= tol.tau_lo;
        let fd_reg = ratio >= tol.tau_hi;
        if (primary_sing && fd_reg) || (primary_reg && fd_sing) || ratio.is_nan() {
            out.disagreements.push((*ci, *s, *r, q, ratio));
        } else if primary_sing && fd_sing {
            out.both_singular += 1;
        } else if primary_reg && fd_reg {
            out.both_regular += 1;
        } else {
            out.inconclusive += 1;
        }
    }
    out
}

/// Residuals of the collapse conditions over a detected arc.
#[derive(Debug, Clone, PartialEq)]
pub struct CollapseResiduals {
    pub kappa_prime: f64,
    pub gamma: f64,
    pub mu: f64,
    pub r: f64,
    pub p: f64,
    /// Largest deviation of `mu` from the fitted cosine.
    pub fit: f64,
}

/// A circular arc whose normal offsets at height `r` all land on `p0`.
#[derive(Debug, Clone, PartialEq)]
pub struct CollapseArc {
    pub comp: usize,
    pub s1: f64,
    pub s2: f64,
    pub kappa: f64,
    pub r: f64,
    /// Phase in `mu = (2/(kappa r)) cos(kappa s/2 + a)`.
    pub a: f64,
    pub p0: VecN,
    pub residuals: CollapseResiduals,
}

struct PointResidual {
    kappa_prime: f64,
    gamma: f64,
    mu: f64,
    h: f64,
}

fn point_residual(foot: &FootData) -> PointResidual {
    let k = foot.kappa;
    PointResidual {
        kappa_prime: foot.kappa_prime().abs(),
        gamma: foot.jet.d3.plus_scaled(k * k, &foot.jet.d1).norm(),
        mu: g_value(foot).abs(),
        h: foot.w.d1 * foot.w.d1 - foot.w.mu * foot.w.d2,
    }
}

const ARC_CHECK_SAMPLES: usize = 200;

/// Maximal arcs on which the curve is circular, `mu` solves
/// `mu'' + kappa^2 mu / 4 = 0` and the offsets at a common height `r < ur`
/// along the principal normal meet in a single point.
pub fn detect_collapse_arcs(scene: &Scene, ur: f64) -> Result<Vec<CollapseArc>> {
    let tol = &scene.tol;
    let mut arcs = Vec::new();
    for (ci, comp) in scene.components.iter().enumerate() {
        let curve = &comp.curve;
        let closed = curve.is_closed();
        let len = curve.length();
        let params = curve.sample_params(tol.singular_samples);
        let m = params.len();
        let passes = |f: &FootData| -> bool {
            if f.kappa <= curve.kappa_tol() {
                return false;
            }
            let pr = point_residual(f);
            pr.kappa_prime <= tol.eps_kappa
                && pr.gamma <= tol.eps_gamma
                && pr.mu <= tol.eps_mu
                && pr.h > 0.0
                && pr.h.powf(-0.5) < ur
        };
        let ok: Vec<bool> = params.par_iter().map(|&s| passes(&comp.eval_unchecked(s))).collect();
        let start = if closed {
            match (0..m).find(|&i| !ok[i]) {
                Some(i) => i,
                // a whole closed curve cannot collapse: the arc must be proper
                None => continue,
            }
        } else {
            0
        };
        let mut k = 0;
        while k < m {
            if !ok[(start + k) % m] {
                k += 1;
                continue;
            }
            let first_k = k;
            while k < m && ok[(start + k) % m] {
                k += 1;
            }
            let first = params[(start + first_k) % m];
            let last = first + curve.param_gap(first, params[(start + k - 1) % m]).abs();
            let h = len / tol.singular_samples as f64;
            let xtol = 1e-12 * len.max(1.0);
            let pass_at = |s: f64| passes(&comp.eval_unchecked(clamp_wrap(comp, s)));
            // push each end out to where the conditions stop holding
            let (lo_dom, hi_dom) = curve.domain();
            let s1 = if !closed && first <= lo_dom {
                first
            } else {
                edge(&pass_at, first, first - h, xtol)
            };
            let s2 = if !closed && last >= hi_dom {
                last
            } else {
                edge(&pass_at, last, last + h, xtol)
            };
            if s2 - s1 < tol.arc_min_len_rel * len || (closed && s2 - s1 >= len) {
                continue;
            }
            if let Some(arc) = fit_arc(scene, ci, comp, s1, s2, ur) {
                arcs.push(arc);
            }
        }
    }
    Ok(arcs)
}

/// Bisects the pass/fail boundary between `inside` (passing) and `outside`.
fn edge(pass: &dyn Fn(f64) -> bool, mut inside: f64, mut outside: f64, xtol: f64) -> f64 {
    if pass(outside) {
        return outside;
    }
    while (outside - inside).abs() > xtol {
        let mid = 0.5 * (inside + outside);
        if pass(mid) {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    inside
}

fn fit_arc(scene: &Scene, ci: usize, comp: &Component, s1: f64, s2: f64, ur: f64) -> Option<CollapseArc> {
    let tol = &scene.tol;
    let feet: Vec<FootData> = (0..=ARC_CHECK_SAMPLES)
        .map(|k| {
            let s = s1 + (s2 - s1) * k as f64 / ARC_CHECK_SAMPLES as f64;
            comp.eval_unchecked(clamp_wrap(comp, s))
        })
        .collect();
    let count = feet.len() as f64;
    let kappa = feet.iter().map(|f| f.kappa).sum::<f64>() / count;
    let res: Vec<PointResidual> = feet.iter().map(point_residual).collect();
    let h_mean = res.iter().map(|p| p.h).sum::<f64>() / count;
    if !(h_mean > 0.0) {
        return None;
    }
    let r = h_mean.powf(-0.5);
    if !(r < ur) {
        return None;
    }
    let max = |f: &dyn Fn(&PointResidual) -> f64| res.iter().map(f).fold(0.0f64, f64::max);
    let r_res = max(&|p| (p.h - 1.0 / (r * r)).abs());
    let residuals_ok = max(&|p| p.kappa_prime) <= tol.eps_kappa
        && max(&|p| p.gamma) <= tol.eps_gamma
        && max(&|p| p.mu) <= tol.eps_mu
        && r_res <= tol.eps_r;
    if !residuals_ok {
        return None;
    }
    // mu ~ c1 cos(kappa s / 2) + c2 sin(kappa s / 2), unwrapped arclength
    let unwrapped: Vec<f64> = (0..=ARC_CHECK_SAMPLES)
        .map(|k| s1 + (s2 - s1) * k as f64 / ARC_CHECK_SAMPLES as f64)
        .collect();
    let mut ata = vec![vec![0.0; 2]; 2];
    let mut atb = vec![0.0; 2];
    for (s, f) in unwrapped.iter().zip(&feet) {
        let (sn, cs) = (0.5 * kappa * s).sin_cos();
        let row = [cs, sn];
        for i in 0..2 {
            atb[i] += row[i] * f.w.mu;
            for j in 0..2 {
                ata[i][j] += row[i] * row[j];
            }
        }
    }
    let c = solve_dense(&mut ata, &mut atb)?;
    let a = (-c[1]).atan2(c[0]);
    let amp = 2.0 / (kappa * r);
    let fit = unwrapped
        .iter()
        .zip(&feet)
        .map(|(s, f)| (f.w.mu - amp * (0.5 * kappa * s + a).cos()).abs())
        .fold(0.0f64, f64::max);
    if fit > tol.arc_fit_tol {
        return None;
    }
    let images: Vec<VecN> = feet
        .iter()
        .map(|f| exp_at(f, f.normal.as_ref().expect("kappa above threshold"), r))
        .collect();
    let mut p0 = VecN::zeros(scene.dim);
    for q in &images {
        p0.axpy(1.0 / count, q);
    }
    let p_res = images.iter().map(|q| q.dist(&p0)).fold(0.0f64, f64::max);
    if p_res > tol.eps_p {
        return None;
    }
    Some(CollapseArc {
        comp: ci,
        s1: clamp_wrap(comp, s1),
        s2: clamp_wrap(comp, s2),
        kappa,
        r,
        a,
        p0,
        residuals: CollapseResiduals {
            kappa_prime: max(&|p| p.kappa_prime),
            gamma: max(&|p| p.gamma),
            mu: max(&|p| p.mu),
            r: r_res,
            p: p_res,
            fit,
        },
    })
}

/// Whether the reported topological injectivity radius comes from a
/// detected collapse arc or is the infimum `ur`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TirFlag {
    Attained,
    Infimum,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TirValue {
    pub value: f64,
    pub flag: TirFlag,
}

/// Smallest collapse height, or `ur` when there is no collapse arc. The
/// value is clamped into `[lr, ur]`, which only absorbs rounding since a
/// collapse height is a focal height below `ur`.
pub fn tir(lr: f64, ur: f64, arcs: &[CollapseArc]) -> TirValue {
    match arcs.iter().map(|a| a.r).min_by(f64::total_cmp) {
        Some(r) => TirValue {
            value: r.clamp(lr.min(ur), ur),
            flag: TirFlag::Attained,
        },
        None => TirValue {
            value: ur,
            flag: TirFlag::Infimum,
        },
    }
}

/// Result of the regular-value diagnostic.
#[derive(Debug, Clone, PartialEq)]
pub struct Transversality {
    /// True when `|g'| > eps_reg` at every zero of `g`.
    pub regular: bool,
    /// Zeros where the derivative test fails.
    pub witnesses: Vec<GZero>,
    /// Number of zeros found.
    pub zeros: usize,
}

/// Checks that 0 is a regular value of `g` on every component.
pub fn transversality_check(scene: &Scene) -> Transversality {
    let tol = &scene.tol;
    let mut zeros = 0;
    let mut witnesses = Vec::new();
    for (ci, comp) in scene.components.iter().enumerate() {
        for z in g_zeros(comp, ci, tol.singular_samples, tol.tol_sng, tol.eps_reg) {
            zeros += 1;
            if z.is_continuum() || z.g_prime.abs() <= tol.eps_reg {
                witnesses.push(z);
            }
        }
    }
    Transversality {
        regular: witnesses.is_empty(),
        witnesses,
        zeros,
    }
}
