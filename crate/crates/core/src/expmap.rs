//! The weighted normal exponential map, its fibers, the squared weighted
//! distance `F_p(s) = |p - gamma(s)|^2 / mu(s)^2` and the potential
//! `G(p) = min F_p`.

use crate::error::{Error, Result};
use crate::numeric::golden_min;
use crate::scene::{Component, FootData, Scene};
use crate::vector::VecN;

/// A normal vector `R v` at the foot `gamma(s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalOffset {
    pub s: f64,
    /// Unit vector orthogonal to `gamma'(s)`.
    pub v: VecN,
    /// Weighted height, `R >= 0`.
    pub r: f64,
}

impl NormalOffset {
    /// Projects `v` onto the normal space at `s`, normalizes it and checks
    /// that `R v` lies in the closed domain `R <= 1/|mu'|`.
    pub fn new(comp: &Component, s: f64, v: &VecN, r: f64, w_boundary_rel: f64) -> Result<Self> {
        let foot = comp.eval(s)?;
        if v.dim() != foot.jet.point.dim() {
            return Err(Error::InvalidScene("direction has the wrong dimension".into()));
        }
        if !(r >= 0.0 && r.is_finite()) {
            return Err(Error::OutOfW {
                r,
                limit: w_limit(&foot),
            });
        }
        let vn = v
            .reject_unit(&foot.jet.d1)
            .normalized()
            .filter(|u| u.norm() > 0.5)
            .ok_or(Error::DegenerateDirection)?;
        let limit = w_limit(&foot);
        if r > limit * (1.0 + w_boundary_rel) {
            return Err(Error::OutOfW { r, limit });
        }
        Ok(NormalOffset { s: foot.s, v: vn, r })
    }

    /// True when `R` sits on the boundary `R = 1/|mu'|` of W.
    pub fn on_boundary(&self, comp: &Component, w_boundary_rel: f64) -> bool {
        let limit = comp.eval(self.s).map(|f| w_limit(&f)).unwrap_or(f64::INFINITY);
        limit.is_finite() && (self.r - limit).abs() <= w_boundary_rel * limit
    }
}

/// `1/|mu'|`, infinite where the weight is stationary.
pub fn w_limit(foot: &FootData) -> f64 {
    if foot.w.d1 == 0.0 {
        f64::INFINITY
    } else {
        1.0 / foot.w.d1.abs()
    }
}

/// `exp(gamma(s), R v) = gamma - mu mu' R^2 gamma' + mu R sqrt(1 - (mu' R)^2) v`.
pub fn exp_mu(comp: &Component, offset: &NormalOffset) -> Result<VecN> {
    let foot = comp.eval(offset.s)?;
    let limit = w_limit(&foot);
    if offset.r > limit * (1.0 + 1e-12) {
        return Err(Error::OutOfW { r: offset.r, limit });
    }
    Ok(exp_at(&foot, &offset.v, offset.r))
}

/// The map at an already evaluated foot, without domain checks. The square
/// root is clamped at zero on the boundary of W.
pub fn exp_at(foot: &FootData, v: &VecN, r: f64) -> VecN {
    let mu = foot.w.mu;
    let x = foot.w.d1 * r;
    let root = (1.0 - x * x).max(0.0).sqrt();
    let mut p = foot.jet.point.plus_scaled(-mu * foot.w.d1 * r * r, &foot.jet.d1);
    p.axpy(mu * r * root, v);
    p
}

/// Image of the normal space at one foot.
#[derive(Debug, Clone, PartialEq)]
pub enum FiberShape {
    /// Hyperplane through `base` with unit normal `normal` (where `mu' = 0`).
    Plane { base: VecN, normal: VecN },
    /// Sphere through the foot, tangent to the normal space there.
    Sphere { center: VecN, radius: f64 },
}

impl FiberShape {
    /// Distance of `p` from the shape.
    pub fn distance(&self, p: &VecN) -> f64 {
        match self {
            FiberShape::Plane { base, normal } => (p - base).dot(normal).abs(),
            FiberShape::Sphere { center, radius } => (p.dist(center) - radius).abs(),
        }
    }
}

/// Fiber at `s`: a plane when `|mu'| <= tol`, otherwise the sphere with
/// center `gamma - mu/(2 mu') gamma'` and radius `mu / (2 |mu'|)`.
pub fn fiber_geometry(comp: &Component, s: f64, tol: f64) -> Result<FiberShape> {
    let foot = comp.eval(s)?;
    Ok(fiber_at(&foot, tol))
}

pub fn fiber_at(foot: &FootData, tol: f64) -> FiberShape {
    let (mu, d1) = (foot.w.mu, foot.w.d1);
    if d1.abs() <= tol {
        FiberShape::Plane {
            base: foot.jet.point.clone(),
            normal: foot.jet.d1.clone(),
        }
    } else {
        FiberShape::Sphere {
            center: foot.jet.point.plus_scaled(-mu / (2.0 * d1), &foot.jet.d1),
            radius: mu / (2.0 * d1.abs()),
        }
    }
}

/// `F_p` at an evaluated foot.
pub fn f_at(foot: &FootData, p: &VecN) -> f64 {
    let e = p.dist(&foot.jet.point);
    let mu = foot.w.mu;
    e * e / (mu * mu)
}

/// First derivative of `F_p` in `s`, by logarithmic differentiation.
pub fn f_prime_at(foot: &FootData, p: &VecN) -> f64 {
    let d = p - &foot.jet.point;
    let e = d.norm_sq();
    let e1 = -2.0 * d.dot(&foot.jet.d1);
    let mu = foot.w.mu;
    e1 / (mu * mu) - 2.0 * e * foot.w.d1 / (mu * mu * mu)
}

/// Second derivative of `F_p` in `s`, valid at every foot.
pub fn f_second_at(foot: &FootData, p: &VecN) -> f64 {
    let d = p - &foot.jet.point;
    let e = d.norm_sq();
    let e1 = -2.0 * d.dot(&foot.jet.d1);
    let e2 = 2.0 - 2.0 * d.dot(&foot.jet.d2);
    let (mu, m1, m2) = (foot.w.mu, foot.w.d1, foot.w.d2);
    let mu2 = mu * mu;
    e2 / mu2 - 4.0 * e1 * m1 / (mu2 * mu) - 2.0 * e * (m2 / (mu2 * mu) - 3.0 * m1 * m1 / (mu2 * mu2))
}

pub fn f_p(comp: &Component, s: f64, p: &VecN) -> Result<f64> {
    Ok(f_at(&comp.eval(s)?, p))
}

pub fn f_p_prime(comp: &Component, s: f64, p: &VecN) -> Result<f64> {
    Ok(f_prime_at(&comp.eval(s)?, p))
}

pub fn f_p_second(comp: &Component, s: f64, p: &VecN) -> Result<f64> {
    Ok(f_second_at(&comp.eval(s)?, p))
}

/// Closed form of `F_p''` for `p = exp(gamma(s), R v)`:
/// `(2/mu^2) (1 - R mu sqrt(1 - mu'^2 R^2) (gamma''.v) - R^2 (mu'^2 + mu mu''))`.
/// The term `gamma''.v` equals `kappa cos(beta)`.
pub fn f_second_closed_at(foot: &FootData, v: &VecN, r: f64) -> f64 {
    let (mu, m1, m2) = (foot.w.mu, foot.w.d1, foot.w.d2);
    let x = m1 * r;
    let root = (1.0 - x * x).max(0.0).sqrt();
    let kcos = foot.jet.d2.dot(v);
    2.0 / (mu * mu) * (1.0 - r * mu * root * kcos - r * r * (m1 * m1 + mu * m2))
}

/// Closed form at a critical foot given only `p`. The offset `(v, R)` is
/// recovered from `p`; fails with `NotCriticalFoot` when `|F_p'|` exceeds `tol_grad`.
pub fn f_p_second_critical(comp: &Component, s: f64, p: &VecN, tol_grad: f64) -> Result<f64> {
    let foot = comp.eval(s)?;
    let g = f_prime_at(&foot, p);
    if g.abs() > tol_grad {
        return Err(Error::NotCriticalFoot {
            residual: g.abs(),
            tol: tol_grad,
        });
    }
    let (v, r) = recover_offset(&foot, p);
    Ok(f_second_closed_at(&foot, &v, r))
}

/// Recovers `(v, R)` with `p = exp(gamma(s), R v)` at a critical foot.
pub fn recover_offset(foot: &FootData, p: &VecN) -> (VecN, f64) {
    let mu = foot.w.mu;
    let d = p - &foot.jet.point;
    let r = d.norm() / mu;
    let normal_part = d.reject_unit(&foot.jet.d1);
    let v = normal_part
        .normalized()
        .unwrap_or_else(|| normal_frame(&foot.jet.d1).swap_remove(0));
    (v, r)
}

/// Criticality class of a foot for `F_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriticalClass {
    NotCritical,
    CpPlus,
    CpZero,
    CpMinus,
}

pub fn classify_critical(comp: &Component, s: f64, p: &VecN, tol_grad: f64, tol_hess: f64) -> Result<CriticalClass> {
    let foot = comp.eval(s)?;
    Ok(classify_at(&foot, p, tol_grad, tol_hess))
}

pub fn classify_at(foot: &FootData, p: &VecN, tol_grad: f64, tol_hess: f64) -> CriticalClass {
    if f_prime_at(foot, p).abs() > tol_grad {
        return CriticalClass::NotCritical;
    }
    let h = f_second_at(foot, p);
    if h.abs() <= tol_hess {
        CriticalClass::CpZero
    } else if h > 0.0 {
        CriticalClass::CpPlus
    } else {
        CriticalClass::CpMinus
    }
}

/// Orthonormal basis of the normal space to `tangent`.
///
/// In the plane this is the quarter-turn rotation of the tangent. In higher
/// dimensions the standard basis vectors are taken in order of increasing
/// `|tangent_i|` (ties broken by index), the one most aligned with the
/// tangent is dropped, and the rest are orthonormalized against the tangent.
pub fn normal_frame(tangent: &VecN) -> Vec<VecN> {
    let n = tangent.dim();
    if n == 2 {
        return vec![tangent.perp2()];
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| tangent[a].abs().total_cmp(&tangent[b].abs()).then(a.cmp(&b)));
    let mut frame: Vec<VecN> = Vec::with_capacity(n - 1);
    for &i in order.iter().take(n - 1) {
        let mut e = VecN::basis(n, i).reject_unit(tangent);
        for f in &frame {
            e = e.reject_unit(f);
        }
        // re-orthogonalize once for stability
        e = e.reject_unit(tangent);
        for f in &frame {
            e = e.reject_unit(f);
        }
        frame.push(e.normalized().expect("pivot order keeps a non-degenerate vector"));
    }
    frame
}

/// Result of a global mu-closest point search.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosestPoint {
    /// All feet attaining the minimum within the tie band, as
    /// `(component, s)` in component order then by `s`.
    pub feet: Vec<(usize, f64)>,
    /// `G(p)`.
    pub g: f64,
    pub unique: bool,
}

/// Global minimum of `F_p` over every component: dense grid, then Newton
/// polish (with a golden-section fallback) inside each discrete minimum's
/// bracket. Ties within the relative band `tie_rel` are all reported.
pub fn mu_closest_point(scene: &Scene, p: &VecN) -> ClosestPoint {
    let n = scene.tol.closest_samples;
    let mut cands: Vec<(usize, f64, f64)> = Vec::new();
    let mut grid_vals: Vec<Vec<(f64, f64)>> = Vec::new();
    for (ci, comp) in scene.components.iter().enumerate() {
        let grid = comp.sample_table(n);
        let vals: Vec<(f64, f64)> = grid
            .iter()
            .map(|(s, q)| {
                let mu = comp.weight.eval(*s).mu;
                let e = p.dist(q);
                (*s, e * e / (mu * mu))
            })
            .collect();
        let m = vals.len();
        let closed = comp.curve.is_closed();
        let h = comp.curve.length() / n as f64;
        for i in 0..m {
            let prev = if i > 0 {
                Some(vals[i - 1].1)
            } else if closed {
                Some(vals[m - 1].1)
            } else {
                None
            };
            let next = if i + 1 < m {
                Some(vals[i + 1].1)
            } else if closed {
                Some(vals[0].1)
            } else {
                None
            };
            let f = vals[i].1;
            let is_min = prev.is_none_or(|v| f <= v) && next.is_none_or(|v| f <= v);
            if !is_min {
                continue;
            }
            let (s, val) = polish_min(comp, p, vals[i].0, h, closed);
            cands.push((ci, s, val));
        }
        grid_vals.push(vals);
    }
    let g = cands.iter().map(|c| c.2).fold(f64::INFINITY, f64::min);
    let band = g * scene.tol.tie_rel + f64::MIN_POSITIVE;
    let mut feet: Vec<(usize, f64, f64)> = cands.into_iter().filter(|c| c.2 <= g + band).collect();
    // flat minima: grid samples that already sit inside the tie band
    for (ci, vals) in grid_vals.iter().enumerate() {
        for &(s, f) in vals {
            if f <= g + band {
                feet.push((ci, s, f));
            }
        }
    }
    feet.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut merged: Vec<(usize, f64, f64)> = Vec::new();
    for f in feet {
        let comp = &scene.components[f.0];
        let h = comp.curve.length() / n as f64;
        let dup = merged
            .iter_mut()
            .rev()
            .take_while(|m| m.0 == f.0)
            .find(|m| comp.curve.param_gap(m.1, f.1).abs() <= 2.0 * h);
        match dup {
            Some(m) => {
                if f.2 < m.2 {
                    *m = f;
                }
            }
            None => merged.push(f),
        }
    }
    // the last and first feet of a closed component may also coincide
    if merged.len() > 1 {
        let (a, b) = (merged[0], merged[merged.len() - 1]);
        let comp = &scene.components[a.0];
        let h = comp.curve.length() / n as f64;
        if a.0 == b.0 && comp.curve.is_closed() && comp.curve.param_gap(a.1, b.1).abs() <= 2.0 * h {
            let keep = if b.2 < a.2 { b } else { a };
            merged.pop();
            merged[0] = keep;
        }
    }
    let unique = merged.len() == 1;
    ClosestPoint {
        feet: merged.iter().map(|f| (f.0, f.1)).collect(),
        g,
        unique,
    }
}

/// Minimizes `F_p` near the grid point `s0` with spacing `h`.
fn polish_min(comp: &Component, p: &VecN, s0: f64, h: f64, closed: bool) -> (f64, f64) {
    let (lo_dom, hi_dom) = comp.curve.domain();
    let (mut lo, mut hi) = (s0 - h, s0 + h);
    if !closed {
        lo = lo.max(lo_dom);
        hi = hi.min(hi_dom);
    }
    let eval = |s: f64| comp.eval_unchecked(wrap(comp, s));
    let mut s = s0;
    let mut best = (s0, f_at(&eval(s0), p));
    let mut newton_ok = true;
    for _ in 0..30 {
        let foot = eval(s);
        let d1 = f_prime_at(&foot, p);
        let d2 = f_second_at(&foot, p);
        if !(d2 > 0.0) {
            newton_ok = false;
            break;
        }
        let next = s - d1 / d2;
        if !(lo..=hi).contains(&next) {
            newton_ok = false;
            break;
        }
        let step = (next - s).abs();
        s = next;
        let f = f_at(&eval(s), p);
        if f < best.1 {
            best = (s, f);
        }
        if step <= 1e-15 * (1.0 + s.abs()) {
            break;
        }
    }
    if !newton_ok {
        let (s, f) = golden_min(|x| f_at(&eval(x), p), lo, hi, 1e-13 * (1.0 + h));
        if f < best.1 {
            best = (s, f);
        }
    }
    (wrap(comp, best.0), best.1)
}

fn wrap(comp: &Component, s: f64) -> f64 {
    comp.curve.normalize(s).unwrap_or_else(|_| {
        let (lo, hi) = comp.curve.domain();
        s.clamp(lo, hi)
    })
}

/// `G(p)`.
pub fn potential_g(scene: &Scene, p: &VecN) -> f64 {
    mu_closest_point(scene, p).g
}

/// Outcome of the finite-difference check of the gradient of `G`.
#[derive(Debug, Clone, PartialEq)]
pub struct GradCheck {
    /// Cosine of the angle between the FD gradient and `u(q, p)`.
    pub cosine: f64,
    /// The same angle in radians.
    pub angle: f64,
    pub magnitude: f64,
    /// `2 |p - q| / mu(q)^2`.
    pub lower_bound: f64,
    /// Whether `magnitude >= lower_bound` up to the relative tolerance `1e-5`.
    pub bound_ok: bool,
    pub foot: (usize, f64),
}

/// Central-difference gradient of `G` at `p` compared with the radial
/// direction `u(q, p)` from the unique foot `q`.
pub fn grad_g_check(scene: &Scene, p: &VecN, h: f64) -> Result<GradCheck> {
    let cp = mu_closest_point(scene, p);
    if !cp.unique {
        return Err(Error::NonUniqueFoot { count: cp.feet.len() });
    }
    let (ci, s) = cp.feet[0];
    let foot = scene.components[ci].eval(s)?;
    let n = p.dim();
    let mut grad = VecN::zeros(n);
    for i in 0..n {
        let mut a = p.clone();
        let mut b = p.clone();
        a[i] += h;
        b[i] -= h;
        grad[i] = (potential_g(scene, &a) - potential_g(scene, &b)) / (2.0 * h);
    }
    let d = p - &foot.jet.point;
    let u = d.normalized().ok_or(Error::NonUniqueFoot { count: 0 })?;
    let magnitude = grad.norm();
    let cosine = (grad.dot(&u) / magnitude).clamp(-1.0, 1.0);
    let lower_bound = 2.0 * d.norm() / (foot.w.mu * foot.w.mu);
    Ok(GradCheck {
        cosine,
        angle: cosine.acos(),
        magnitude,
        lower_bound,
        bound_ok: magnitude >= lower_bound * (1.0 - 1e-5),
        foot: (ci, s),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::SceneConfig;

    fn circle_scene(weight: &str) -> Scene {
        let text = format!(
            r#"{{"name":"c","ambient_dim":2,"components":[{{"basis":"circle","radius":1.0}}],"weights":[{weight}]}}"#
        );
        Scene::from_config(&SceneConfig::from_json(&text).unwrap()).unwrap()
    }

    #[test]
    fn constant_weight_exp_is_straight() {
        let sc = circle_scene(r#"{"kind":"constant","value":1.0}"#);
        let c = &sc.components[0];
        let off = NormalOffset::new(c, 0.0, &VecN::from_slice(&[-1.0, 0.0]), 0.5, 1e-12).unwrap();
        let p = exp_mu(c, &off).unwrap();
        assert!(p.dist(&VecN::from_slice(&[0.5, 0.0])) < 1e-15);
        let f = f_second_closed_at(&c.eval(0.0).unwrap(), &off.v, 0.5);
        assert!((f - 1.0).abs() < 1e-14);
        assert!(matches!(
            fiber_geometry(c, 1.0, 1e-12).unwrap(),
            FiberShape::Plane { .. }
        ));
    }

    #[test]
    fn closest_point_on_circle() {
        let sc = circle_scene(r#"{"kind":"constant","value":1.0}"#);
        let cp = mu_closest_point(&sc, &VecN::from_slice(&[2.0, 0.0]));
        assert!(cp.unique);
        assert!((cp.g - 1.0).abs() < 1e-14);
        assert!(cp.feet[0].1.abs() < 1e-9 || (cp.feet[0].1 - 2.0 * std::f64::consts::PI).abs() < 1e-9);
        let centre = mu_closest_point(&sc, &VecN::from_slice(&[0.0, 0.0]));
        assert!(!centre.unique);
    }

    #[test]
    fn out_of_w_rejected() {
        let sc = circle_scene(r#"{"kind":"cosine","amplitude":0.5,"frequency":1.0,"offset":1.0}"#);
        let c = &sc.components[0];
        // |mu'(pi/2)| = 0.5, so R = 2 is the boundary
        let v = VecN::from_slice(&[0.0, -1.0]);
        assert!(NormalOffset::new(c, std::f64::consts::FRAC_PI_2, &v, 2.0, 1e-12).is_ok());
        assert!(matches!(
            NormalOffset::new(c, std::f64::consts::FRAC_PI_2, &v, 2.1, 1e-12),
            Err(Error::OutOfW { .. })
        ));
    }

    #[test]
    fn normal_frame_is_orthonormal() {
        let t = VecN::from_slice(&[0.3, -0.5, 0.6, 0.2]).normalized().unwrap();
        let f = normal_frame(&t);
        assert_eq!(f.len(), 3);
        for (i, a) in f.iter().enumerate() {
            assert!(a.dot(&t).abs() < 1e-15);
            for (j, b) in f.iter().enumerate() {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((a.dot(b) - e).abs() < 1e-15);
            }
        }
    }
}
