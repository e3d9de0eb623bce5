//! Focal radii from the `Delta`/`Lambda` profiles, double critical pairs, and
//! the assembled radii report.
//!
//! With `A = kappa mu`, `B = |mu'|` and `C = (mu^2)''` the pointwise focal
//! analysis reduces to the roots of `1 - C t^2/2 - A t sqrt(1 - B^2 t^2)`;
//! `Delta = C/2 + A^2/4 - B^2` decides whether the principal normal direction
//! can degenerate, and `Lambda^(-1/2)` is the first height where it does.

use crate::error::{Error, Result};
use crate::numeric::{golden_max, golden_min, solve_dense};
use crate::scene::{Component, FootData, Scene};
use crate::singular::{detect_collapse_arcs, tir, CollapseArc, TirValue};
use crate::vector::VecN;
use rayon::prelude::*;

/// Pointwise focal data at one foot.
#[derive(Debug, Clone, PartialEq)]
pub struct PointwiseFocal {
    pub s: f64,
    /// `Delta = mu (mu'' + kappa^2 mu / 4)`.
    pub delta: f64,
    /// `Lambda = (mu^2)''/2 + kappa^2 mu^2/2 + kappa mu sqrt(Delta)`, absent
    /// when `Delta` is below the band.
    pub lambda: Option<f64>,
    pub focrad0_pt: f64,
    pub focradminus_pt: f64,
}

/// Width of the band that separates `Delta >= 0` from `Delta > 0`.
pub fn delta_band(foot: &FootData, band_rel: f64) -> f64 {
    let m = foot.w.mu * foot.kappa;
    band_rel * (m * m).max(1.0)
}

/// Pointwise `Delta`, `Lambda` and focal radii at an evaluated foot.
///
/// The radii are `min(Lambda^(-1/2), 1/|mu'|)` inside the respective band and
/// `1/|mu'|` outside it. Mathematically `Lambda >= mu'^2` whenever
/// `Delta >= 0`, so the minimum only guards against rounding.
pub fn pointwise_focal(foot: &FootData, band_rel: f64) -> PointwiseFocal {
    let (mu, m1, m2) = (foot.w.mu, foot.w.d1, foot.w.d2);
    let k = foot.kappa;
    let delta = mu * (m2 + 0.25 * k * k * mu);
    let band = delta_band(foot, band_rel);
    let inv_slope = if m1 == 0.0 { f64::INFINITY } else { 1.0 / m1.abs() };
    let lambda = if delta >= -band {
        Some(mu * m2 + m1 * m1 + 0.5 * k * k * mu * mu + k * mu * delta.max(0.0).sqrt())
    } else {
        None
    };
    let lam_radius = match lambda {
        Some(l) if l > 0.0 => 1.0 / l.sqrt(),
        _ => f64::INFINITY,
    };
    let focrad0_pt = if lambda.is_some() {
        lam_radius.min(inv_slope)
    } else {
        inv_slope
    };
    let focradminus_pt = if delta > band {
        lam_radius.min(inv_slope)
    } else {
        inv_slope
    };
    PointwiseFocal {
        s: foot.s,
        delta,
        lambda,
        focrad0_pt,
        focradminus_pt,
    }
}

/// `delta_lambda` at arclength `s` of a component.
pub fn delta_lambda(comp: &Component, s: f64, band_rel: f64) -> Result<PointwiseFocal> {
    Ok(pointwise_focal(&comp.eval(s)?, band_rel))
}

/// Global focal radii with the feet that attain them.
#[derive(Debug, Clone, PartialEq)]
pub struct FocalRadii {
    pub focrad0: f64,
    pub focradminus: f64,
    /// `(component, s)` attaining `focrad0`.
    pub witness0: (usize, f64),
    /// `(component, s)` attaining `focradminus`.
    pub witness_minus: (usize, f64),
}

/// Infima of the pointwise focal radii over all components.
///
/// Each component is sampled densely; every discrete local minimum of each
/// profile is refined by golden-section search inside its bracket, and every
/// discrete local maximum of `Delta` that lies below the band is refined too,
/// since an isolated zero of `Delta` switches the `FocRad^0` profile to
/// `Lambda^(-1/2)` at a single point that a grid would miss.
pub fn focal_radii(scene: &Scene) -> FocalRadii {
    focal_radii_with(scene, scene.tol.focal_samples)
}

/// [`focal_radii`] with an explicit sample count per component.
pub fn focal_radii_with(scene: &Scene, samples: usize) -> FocalRadii {
    let band_rel = scene.tol.delta_band_rel;
    let mut best0 = (f64::INFINITY, (0usize, 0.0));
    let mut best_m = (f64::INFINITY, (0usize, 0.0));
    for (ci, comp) in scene.components.iter().enumerate() {
        let params = comp.curve.sample_params(samples);
        let closed = comp.curve.is_closed();
        let h = comp.curve.length() / samples as f64;
        let pts: Vec<PointwiseFocal> = params
            .par_iter()
            .map(|&s| pointwise_focal(&comp.eval_unchecked(s), band_rel))
            .collect();
        let bands: Vec<f64> = params
            .par_iter()
            .map(|&s| delta_band(&comp.eval_unchecked(s), band_rel))
            .collect();
        let m = pts.len();
        let neighbours = |i: usize| -> (Option<usize>, Option<usize>) {
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
            (prev, next)
        };
        let is_local_min = |i: usize, f: &dyn Fn(&PointwiseFocal) -> f64| {
            let (p, n) = neighbours(i);
            let v = f(&pts[i]);
            v.is_finite() && p.is_none_or(|j| v <= f(&pts[j])) && n.is_none_or(|j| v <= f(&pts[j]))
        };
        let mut refine: Vec<(usize, u8)> = Vec::new();
        for i in 0..m {
            if is_local_min(i, &|p| p.focrad0_pt) {
                refine.push((i, 0));
            }
            if is_local_min(i, &|p| p.focradminus_pt) {
                refine.push((i, 1));
            }
            let (p, n) = neighbours(i);
            let d = pts[i].delta;
            if d < -bands[i] && p.is_none_or(|j| d >= pts[j].delta) && n.is_none_or(|j| d >= pts[j].delta) {
                refine.push((i, 2));
            }
        }
        let refined: Vec<PointwiseFocal> = refine
            .par_iter()
            .map(|&(i, what)| {
                let s0 = params[i];
                let (lo, hi) = bracket(comp, s0, h);
                let at = |s: f64| pointwise_focal(&comp.eval_unchecked(clamp_wrap(comp, s)), band_rel);
                let xtol = 1e-12 * comp.curve.length().max(1.0);
                let s = match what {
                    0 => golden_min(|s| at(s).focrad0_pt, lo, hi, xtol).0,
                    1 => golden_min(|s| at(s).focradminus_pt, lo, hi, xtol).0,
                    _ => golden_max(|s| at(s).delta, lo, hi, xtol).0,
                };
                at(s)
            })
            .collect();
        for p in pts.iter().chain(refined.iter()) {
            if p.focrad0_pt < best0.0 {
                best0 = (p.focrad0_pt, (ci, p.s));
            }
            if p.focradminus_pt < best_m.0 {
                best_m = (p.focradminus_pt, (ci, p.s));
            }
        }
    }
    FocalRadii {
        focrad0: best0.0,
        focradminus: best_m.0,
        witness0: best0.1,
        witness_minus: best_m.1,
    }
}

fn bracket(comp: &Component, s0: f64, h: f64) -> (f64, f64) {
    let (lo, hi) = comp.curve.domain();
    if comp.curve.is_closed() {
        (s0 - h, s0 + h)
    } else {
        ((s0 - h).max(lo), (s0 + h).min(hi))
    }
}

pub(crate) fn clamp_wrap(comp: &Component, s: f64) -> f64 {
    comp.curve.normalize(s).unwrap_or_else(|_| {
        let (lo, hi) = comp.curve.domain();
        s.clamp(lo, hi)
    })
}

/// Solutions of `1 - C t^2/2 - A t sqrt(1 - B^2 t^2) = 0` on `[0, 1/B]`
/// (or `[0, inf)` when `B = 0`).
///
/// The candidates are `t = (C/2 + A^2/2 +- A sqrt(D))^(-1/2)` with
/// `D = C/2 + A^2/4 - B^2`. Squaring the equation introduces a spurious
/// branch where `1 - C t^2/2` and `A t sqrt(...)` have opposite signs, so
/// every candidate is kept only if it solves the original equation to a
/// relative residual of 1e-12.
pub fn chord_height_roots(a: f64, b: f64, c: f64) -> Result<Vec<f64>> {
    let b = b.abs();
    let d = 0.5 * c + 0.25 * a * a - b * b;
    if d < 0.0 || (a == 0.0 && c == 0.0) {
        return Err(Error::NoSolution);
    }
    let base = 0.5 * c + 0.5 * a * a;
    let root_d = d.sqrt();
    let upper = if b > 0.0 { 1.0 / b } else { f64::INFINITY };
    let mut out: Vec<f64> = Vec::new();
    for sign in [1.0, -1.0] {
        let q = base + sign * a * root_d;
        if !(q > 0.0) {
            continue;
        }
        let t = 1.0 / q.sqrt();
        // a root computed at the interval end may overshoot by rounding
        let t = if t > upper && t <= upper * (1.0 + 1e-12) {
            upper
        } else {
            t
        };
        if !(t.is_finite() && t <= upper) {
            continue;
        }
        let (res, scale) = chord_height_residual(a, b, c, t);
        if res.abs() <= 1e-12 * scale && !out.iter().any(|&u| (u - t).abs() <= 1e-12 * t) {
            out.push(t);
        }
    }
    if out.is_empty() {
        return Err(Error::NoSolution);
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// Value of `1 - C t^2/2 - A t sqrt(1 - B^2 t^2)` and the magnitude of its terms.
pub fn chord_height_residual(a: f64, b: f64, c: f64, t: f64) -> (f64, f64) {
    let quad = 0.5 * c * t * t;
    let rad = a * t * (1.0 - b * b * t * t).max(0.0).sqrt();
    (1.0 - quad - rad, 1.0 + quad.abs() + rad.abs())
}

/// A critical point of `sigma = |q1 - q2|^2 / (mu1 + mu2)^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct DoubleCriticalPair {
    pub comp1: usize,
    pub s1: f64,
    pub comp2: usize,
    pub s2: f64,
    /// `|q1 - q2| / (mu(q1) + mu(q2))`.
    pub ratio: f64,
    /// The point `q1 + mu1/(mu1 + mu2) (q2 - q1)`.
    pub midpoint: VecN,
    /// Dimensionless residual `|grad sigma| |q1 - q2| / sigma`.
    pub residual: f64,
    /// Largest violation of the angle law at the two feet.
    pub angle_law: f64,
}

/// Result of [`find_double_critical_pairs`].
#[derive(Debug, Clone, PartialEq)]
pub struct PairSearch {
    pub pairs: Vec<DoubleCriticalPair>,
    /// Grid seeds tried.
    pub seeds: usize,
    /// Seeds discarded because Newton did not converge or the limit failed validation.
    pub discarded: usize,
}

struct PairEval {
    sigma: f64,
    grad: [f64; 2],
    dist: f64,
}

fn pair_eval(f1: &FootData, f2: &FootData) -> PairEval {
    let d = &f1.jet.point - &f2.jet.point;
    let e = d.norm_sq();
    let m = f1.w.mu + f2.w.mu;
    let m2 = m * m;
    let m3 = m2 * m;
    PairEval {
        sigma: e / m2,
        grad: [
            2.0 * d.dot(&f1.jet.d1) / m2 - 2.0 * e * f1.w.d1 / m3,
            -2.0 * d.dot(&f2.jet.d1) / m2 - 2.0 * e * f2.w.d1 / m3,
        ],
        dist: e.sqrt(),
    }
}

fn dimensionless(p: &PairEval) -> f64 {
    if p.sigma > 0.0 {
        (p.grad[0].hypot(p.grad[1])) * p.dist / p.sigma
    } else {
        f64::INFINITY
    }
}

/// Searches every component pair (including each component with itself) for
/// double critical pairs: sign-change seeds on a grid, damped Newton with a
/// finite-difference Jacobian, validation and deduplication.
pub fn find_double_critical_pairs(scene: &Scene) -> PairSearch {
    let n = scene.tol.pair_grid;
    let tables: Vec<(Vec<f64>, Vec<FootData>)> = scene
        .components
        .iter()
        .map(|c| {
            let ps = c.curve.sample_params(n);
            let feet: Vec<FootData> = ps.par_iter().map(|&s| c.eval_unchecked(s)).collect();
            (ps, feet)
        })
        .collect();
    let mut all = Vec::new();
    let mut seeds_total = 0;
    let mut discarded = 0;
    for a in 0..scene.components.len() {
        for b in a..scene.components.len() {
            let (seeds, found, bad) = search_pair(scene, a, b, &tables[a], &tables[b]);
            seeds_total += seeds;
            discarded += bad;
            all.extend(found);
        }
    }
    all.sort_by(|x, y| {
        (x.comp1, x.comp2)
            .cmp(&(y.comp1, y.comp2))
            .then(x.s1.total_cmp(&y.s1))
            .then(x.s2.total_cmp(&y.s2))
    });
    let mut pairs: Vec<DoubleCriticalPair> = Vec::new();
    for p in all {
        let c1 = &scene.components[p.comp1].curve;
        let c2 = &scene.components[p.comp2].curve;
        let tol = 1e-6 * c1.length().max(c2.length());
        let dup = pairs.iter_mut().rev().take(64).find(|q| {
            q.comp1 == p.comp1
                && q.comp2 == p.comp2
                && c1.param_gap(q.s1, p.s1).abs() + c2.param_gap(q.s2, p.s2).abs() <= tol
        });
        match dup {
            Some(q) => {
                if p.residual < q.residual {
                    *q = p;
                }
            }
            None => pairs.push(p),
        }
    }
    PairSearch {
        pairs,
        seeds: seeds_total,
        discarded,
    }
}

fn search_pair(
    scene: &Scene,
    a: usize,
    b: usize,
    ta: &(Vec<f64>, Vec<FootData>),
    tb: &(Vec<f64>, Vec<FootData>),
) -> (usize, Vec<DoubleCriticalPair>, usize) {
    let ca = &scene.components[a];
    let cb = &scene.components[b];
    let same = a == b;
    let band = scene.tol.pair_band_rel * ca.curve.length();
    let cells = |c: &Component, len: usize| -> Vec<(usize, usize)> {
        let mut v: Vec<(usize, usize)> = (0..len - 1).map(|i| (i, i + 1)).collect();
        if c.curve.is_closed() {
            v.push((len - 1, 0));
        }
        v
    };
    let cells_a = cells(ca, ta.0.len());
    let cells_b = cells(cb, tb.0.len());
    let gap = |i: usize, j: usize| ca.curve.param_gap(ta.0[i], tb.0[j]).abs();
    let mut seeds: Vec<(f64, f64)> = Vec::new();
    for &(i0, i1) in &cells_a {
        for &(j0, j1) in &cells_b {
            if same {
                if j0 <= i0 {
                    continue;
                }
                if [gap(i0, j0), gap(i0, j1), gap(i1, j0), gap(i1, j1)]
                    .iter()
                    .any(|g| *g < band)
                {
                    continue;
                }
            }
            let corners = [
                pair_eval(&ta.1[i0], &tb.1[j0]),
                pair_eval(&ta.1[i0], &tb.1[j1]),
                pair_eval(&ta.1[i1], &tb.1[j0]),
                pair_eval(&ta.1[i1], &tb.1[j1]),
            ];
            let straddles = |k: usize| {
                let lo = corners.iter().map(|c| c.grad[k]).fold(f64::INFINITY, f64::min);
                let hi = corners.iter().map(|c| c.grad[k]).fold(f64::NEG_INFINITY, f64::max);
                lo <= 0.0 && hi >= 0.0
            };
            if straddles(0) && straddles(1) {
                let mid = |c: &Component, x0: f64, x1: f64| x0 + 0.5 * c.curve.param_gap(x0, x1);
                seeds.push((mid(ca, ta.0[i0], ta.0[i1]), mid(cb, tb.0[j0], tb.0[j1])));
            }
        }
    }
    let results: Vec<Option<DoubleCriticalPair>> = seeds
        .par_iter()
        .map(|&(s1, s2)| refine_pair(scene, a, b, s1, s2))
        .collect();
    let total = results.len();
    let found: Vec<DoubleCriticalPair> = results.into_iter().flatten().collect();
    let bad = total - found.len();
    (total, found, bad)
}

fn refine_pair(scene: &Scene, a: usize, b: usize, s1: f64, s2: f64) -> Option<DoubleCriticalPair> {
    let ca = &scene.components[a];
    let cb = &scene.components[b];
    let tol = &scene.tol;
    let eval = |x: f64, y: f64| -> Option<(PairEval, FootData, FootData)> {
        let f1 = ca.eval(x).ok()?;
        let f2 = cb.eval(y).ok()?;
        Some((pair_eval(&f1, &f2), f1, f2))
    };
    let h = 1e-7 * ca.curve.length().max(cb.curve.length()).max(1.0);
    let mut x = [s1, s2];
    let mut cur = eval(x[0], x[1])?.0;
    let mut lambda = 1e-6;
    for _ in 0..tol.pair_max_iter {
        if dimensionless(&cur) <= 0.1 * tol.pair_tol {
            break;
        }
        // finite-difference Jacobian of the analytic gradient
        let mut jac = [[0.0; 2]; 2];
        for k in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[k] += h;
            xm[k] -= h;
            let gp = eval(xp[0], xp[1])?.0.grad;
            let gm = eval(xm[0], xm[1])?.0.grad;
            for r in 0..2 {
                jac[r][k] = (gp[r] - gm[r]) / (2.0 * h);
            }
        }
        let g = cur.grad;
        let jtj = [
            [
                jac[0][0] * jac[0][0] + jac[1][0] * jac[1][0],
                jac[0][0] * jac[0][1] + jac[1][0] * jac[1][1],
            ],
            [
                jac[0][1] * jac[0][0] + jac[1][1] * jac[1][0],
                jac[0][1] * jac[0][1] + jac[1][1] * jac[1][1],
            ],
        ];
        let jtg = [jac[0][0] * g[0] + jac[1][0] * g[1], jac[0][1] * g[0] + jac[1][1] * g[1]];
        let scale = jtj[0][0].max(jtj[1][1]).max(f64::MIN_POSITIVE);
        let mut improved = false;
        for _ in 0..30 {
            let mut m = vec![
                vec![jtj[0][0] + lambda * scale, jtj[0][1]],
                vec![jtj[1][0], jtj[1][1] + lambda * scale],
            ];
            let mut rhs = vec![-jtg[0], -jtg[1]];
            let Some(step) = solve_dense(&mut m, &mut rhs) else {
                lambda *= 10.0;
                continue;
            };
            let xn = [x[0] + step[0], x[1] + step[1]];
            if let Some((next, _, _)) = eval(xn[0], xn[1]) {
                let gn = next.grad[0].hypot(next.grad[1]);
                if gn < g[0].hypot(g[1]) {
                    x = [clamp_wrap(ca, xn[0]), clamp_wrap(cb, xn[1])];
                    cur = next;
                    lambda = (lambda * 0.1).max(1e-12);
                    improved = true;
                    break;
                }
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }
    let (pe, f1, f2) = eval(x[0], x[1])?;
    let residual = dimensionless(&pe);
    if !(residual <= tol.pair_tol) {
        return None;
    }
    if a == b && ca.curve.param_gap(f1.s, f2.s).abs() < tol.pair_band_rel * ca.curve.length() {
        return None;
    }
    let (q1, q2) = (&f1.jet.point, &f2.jet.point);
    let (m1, m2) = (f1.w.mu, f2.w.mu);
    let ratio = pe.dist / (m1 + m2);
    let midpoint = q1.plus_scaled(m1 / (m1 + m2), &(q2 - q1));
    let u12 = (q2 - q1).normalized()?;
    let law1 = (u12.dot(&f1.jet.d1) + ratio * f1.w.d1).abs();
    let law2 = (-u12.dot(&f2.jet.d1) + ratio * f2.w.d1).abs();
    let angle_law = law1.max(law2);
    if angle_law > tol.angle_law_tol {
        return None;
    }
    let (mut s1, mut s2, mut c1, mut c2) = (f1.s, f2.s, a, b);
    if a == b && s2 < s1 {
        std::mem::swap(&mut s1, &mut s2);
    }
    if c2 < c1 {
        std::mem::swap(&mut c1, &mut c2);
        std::mem::swap(&mut s1, &mut s2);
    }
    Some(DoubleCriticalPair {
        comp1: c1,
        s1,
        comp2: c2,
        s2,
        ratio,
        midpoint,
        residual,
        angle_law,
    })
}

/// Half the double critical self-distance: the smallest pair ratio, or
/// infinity when there are no pairs.
pub fn dcsd_half(pairs: &[DoubleCriticalPair]) -> f64 {
    pairs.iter().map(|p| p.ratio).fold(f64::INFINITY, f64::min)
}

/// All radii of a scene together with their witnesses.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiiReport {
    pub focrad0: f64,
    pub focradminus: f64,
    pub dcsd_half: f64,
    pub lr: f64,
    pub ur: f64,
    pub dir: f64,
    pub tir: TirValue,
    pub air: f64,
    pub focal: FocalRadii,
    /// The pair attaining `dcsd_half`, if any.
    pub dcsd_pair: Option<DoubleCriticalPair>,
    pub pair_count: usize,
    pub pair_seeds: usize,
    pub pair_discarded: usize,
    pub collapse_arcs: Vec<CollapseArc>,
}

/// Computes every radius of the scene.
pub fn radii_report(scene: &Scene) -> Result<RadiiReport> {
    let focal = focal_radii(scene);
    let search = find_double_critical_pairs(scene);
    let half = dcsd_half(&search.pairs);
    let dcsd_pair = search
        .pairs
        .iter()
        .filter(|p| p.ratio == half)
        .min_by(|x, y| (x.comp1, x.comp2).cmp(&(y.comp1, y.comp2)).then(x.s1.total_cmp(&y.s1)))
        .cloned();
    let lr = half.min(focal.focrad0);
    let ur = half.min(focal.focradminus);
    let arcs = detect_collapse_arcs(scene, ur)?;
    let tir_value = tir(lr, ur, &arcs);
    Ok(RadiiReport {
        focrad0: focal.focrad0,
        focradminus: focal.focradminus,
        dcsd_half: half,
        lr,
        ur,
        dir: lr,
        tir: tir_value,
        air: ur,
        focal,
        dcsd_pair,
        pair_count: search.pairs.len(),
        pair_seeds: search.seeds,
        pair_discarded: search.discarded,
        collapse_arcs: arcs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chord_height_reference_cases() {
        assert_eq!(chord_height_roots(1.0, 0.0, 0.0).unwrap(), vec![1.0]);
        assert_eq!(chord_height_roots(0.0, 1.0, 2.0).unwrap(), vec![1.0]);
        assert!(matches!(chord_height_roots(0.0, 0.0, 0.0), Err(Error::NoSolution)));
        assert!(matches!(chord_height_roots(0.1, 1.0, 0.1), Err(Error::NoSolution)));
    }

    #[test]
    fn chord_height_drops_the_squared_branch() {
        // t = 1.8478 solves the squared equation but not the original one
        let roots = chord_height_roots(1.0, 0.5, 1.0).unwrap();
        assert_eq!(roots.len(), 1);
        let t = roots[0];
        assert!((t - (1.0 + 0.5f64.sqrt()).powf(-0.5)).abs() < 1e-14);
        assert!(chord_height_residual(1.0, 0.5, 1.0, t).0.abs() < 1e-14);
    }
}
