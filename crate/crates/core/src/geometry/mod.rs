//! Curves parametrized by arclength, their Frenet data, and weights.
//!
//! Every component is stored so that evaluation at an arclength `s` returns
//! the point together with exact first, second and third derivatives. Circles,
//! segments and the stadium are natively unit speed. Fourier and Chebyshev
//! curves are reparametrized numerically: the arclength table is built by
//! adaptive quadrature, inverted by cubic Hermite interpolation, and polished
//! with Newton steps, after which derivatives follow from the chain rule.

mod series;
mod stadium;
mod weight;

pub use series::{Chebyshev, Fourier};
pub use stadium::{StadiumCurve, StadiumParams};
pub(crate) use weight::check_positive;
pub use weight::{WeightFunction, WeightJet, WeightSpec};

use crate::error::{Error, Result};
use crate::numeric::{adaptive_gl, gl_panel};
use crate::vector::VecN;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Per-coordinate Fourier coefficients of a closed raw curve on `[0, 2pi)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FourierCoords {
    /// `cos[0]` is the constant term.
    pub cos: Vec<f64>,
    /// `sin[k-1]` multiplies `sin(k t)`.
    pub sin: Vec<f64>,
}

/// Declarative description of one curve component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "basis", rename_all = "snake_case", deny_unknown_fields)]
pub enum ComponentSpec {
    /// Circle in the (x1, x2) plane. With `arc = [t0, t1]` only the angles in
    /// that range are kept and the component is an open arc whose arclength
    /// is `radius * angle`.
    Circle {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<Vec<f64>>,
        radius: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        arc: Option<[f64; 2]>,
    },
    /// Ellipse `(a cos t, b sin t)` in the (x1, x2) plane.
    Ellipse {
        a: f64,
        b: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<Vec<f64>>,
    },
    /// Straight segment, arclength measured from `from`.
    Segment { from: Vec<f64>, to: Vec<f64> },
    /// Closed stadium-like convex curve with arclength domain `[-A, A)`.
    Stadium(StadiumParams),
    /// Closed curve given by Fourier series per coordinate in `t` on `[0, 2pi)`.
    Fourier { coords: Vec<FourierCoords> },
    /// Open arc given by Chebyshev series per coordinate on `interval`; the
    /// arclength starts at `s_origin` (default 0) at the interval's left end.
    Chebyshev {
        coords: Vec<Vec<f64>>,
        interval: [f64; 2],
        #[serde(default, skip_serializing_if = "Option::is_none")]
        s_origin: Option<f64>,
    },
}

/// Position and exact derivatives with respect to arclength.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveJet {
    pub point: VecN,
    pub d1: VecN,
    pub d2: VecN,
    pub d3: VecN,
}

/// Frenet-type data at one arclength value.
#[derive(Debug, Clone, PartialEq)]
pub struct FrenetData {
    pub s: f64,
    pub point: VecN,
    pub tangent: VecN,
    pub second_deriv: VecN,
    pub curvature: f64,
    /// Principal normal; `None` where the curvature is below `kappa_tol`.
    pub normal: Option<VecN>,
}

#[derive(Debug, Clone)]
enum Repr {
    Circle { center: VecN, radius: f64 },
    Segment { from: VecN, dir: VecN },
    Stadium(StadiumCurve),
    Reparam(Reparam),
}

/// A curve component parametrized by arclength.
#[derive(Debug, Clone)]
pub struct ArclengthCurve {
    id: usize,
    dim: usize,
    closed: bool,
    s_start: f64,
    length: f64,
    kappa_tol: f64,
    repr: Repr,
}

/// Knobs for [`build_arclength_curve`].
#[derive(Debug, Clone, Copy)]
pub struct BuildOptions {
    pub ambient_dim: usize,
    /// Unit-speed tolerance.
    pub tol_arc: f64,
    /// Relative curvature threshold (`kappa_tol = kappa_tol_rel / L`).
    pub kappa_tol_rel: f64,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            ambient_dim: 2,
            tol_arc: 1e-10,
            kappa_tol_rel: 1e-9,
        }
    }
}

/// Builds the arclength parametrization of `spec` as component `id`.
pub fn build_arclength_curve(id: usize, spec: &ComponentSpec, opts: &BuildOptions) -> Result<ArclengthCurve> {
    let n = opts.ambient_dim;
    if n < 2 {
        return Err(Error::InvalidScene("ambient dimension must be at least 2".into()));
    }
    let point_of = |v: &Option<Vec<f64>>| -> Result<VecN> {
        match v {
            None => Ok(VecN::zeros(n)),
            Some(c) if c.len() == n && c.iter().all(|x| x.is_finite()) => Ok(VecN::from_slice(c)),
            Some(c) => Err(Error::InvalidScene(format!(
                "point {c:?} does not have {n} finite coordinates"
            ))),
        }
    };
    let (closed, s_start, length, repr) = match spec {
        ComponentSpec::Circle { center, radius, arc } => {
            if !(radius.is_finite() && *radius > 0.0) {
                return Err(Error::InvalidScene("circle radius must be positive".into()));
            }
            let center = point_of(center)?;
            match arc {
                None => (
                    true,
                    0.0,
                    2.0 * PI * radius,
                    Repr::Circle {
                        center,
                        radius: *radius,
                    },
                ),
                Some([t0, t1]) => {
                    if !(t1 > t0 && t1 - t0 < 2.0 * PI) {
                        return Err(Error::InvalidScene("circle arc needs t0 < t1 < t0 + 2pi".into()));
                    }
                    (
                        false,
                        radius * t0,
                        radius * (t1 - t0),
                        Repr::Circle {
                            center,
                            radius: *radius,
                        },
                    )
                }
            }
        }
        ComponentSpec::Segment { from, to } => {
            let a = point_of(&Some(from.clone()))?;
            let b = point_of(&Some(to.clone()))?;
            let d = &b - &a;
            let len = d.norm();
            let dir = d.normalized().ok_or(Error::NonRegularCurve { t: 0.0 })?;
            (false, 0.0, len, Repr::Segment { from: a, dir })
        }
        ComponentSpec::Stadium(params) => {
            let c = StadiumCurve::new(params.clone())?;
            let a = c.half_length();
            (true, -a, 2.0 * a, Repr::Stadium(c))
        }
        ComponentSpec::Ellipse { a, b, center } => {
            if !(a.is_finite() && b.is_finite() && *a > 0.0 && *b > 0.0) {
                return Err(Error::InvalidScene("ellipse semi-axes must be positive".into()));
            }
            let c = point_of(center)?;
            let mut coords = Vec::with_capacity(n);
            for i in 0..n {
                let (cos, sin) = match i {
                    0 => (vec![c[0], *a], vec![]),
                    1 => (vec![c[1], 0.0], vec![*b]),
                    _ => (vec![c[i]], vec![]),
                };
                coords.push(Fourier::new(cos, sin, 1.0));
            }
            let rp = Reparam::new(RawCurve::Fourier(coords), 0.0, 2.0 * PI, 0.0)?;
            (true, 0.0, rp.length, Repr::Reparam(rp))
        }
        ComponentSpec::Fourier { coords } => {
            if coords.len() != n {
                return Err(Error::InvalidScene(format!(
                    "fourier curve needs {n} coordinate series"
                )));
            }
            let series: Vec<Fourier> = coords
                .iter()
                .map(|c| Fourier::new(c.cos.clone(), c.sin.clone(), 1.0))
                .collect();
            if series.iter().any(|s| !s.is_finite()) || series.iter().all(|s| s.order() < 1) {
                return Err(Error::InvalidScene(
                    "fourier coefficients must be finite, order >= 1".into(),
                ));
            }
            let rp = Reparam::new(RawCurve::Fourier(series), 0.0, 2.0 * PI, 0.0)?;
            (true, 0.0, rp.length, Repr::Reparam(rp))
        }
        ComponentSpec::Chebyshev {
            coords,
            interval,
            s_origin,
        } => {
            if coords.len() != n {
                return Err(Error::InvalidScene(format!(
                    "chebyshev curve needs {n} coordinate series"
                )));
            }
            let [t0, t1] = *interval;
            if !(t0.is_finite() && t1.is_finite() && t1 > t0) {
                return Err(Error::InvalidScene("chebyshev interval must be increasing".into()));
            }
            let series: Vec<Chebyshev> = coords.iter().map(|c| Chebyshev::new(c.clone(), t0, t1)).collect();
            if series.iter().any(|s| !s.is_finite()) || coords.iter().all(|c| c.len() < 2) {
                return Err(Error::InvalidScene(
                    "chebyshev coefficients must be finite, order >= 1".into(),
                ));
            }
            let s0 = s_origin.unwrap_or(0.0);
            let rp = Reparam::new(RawCurve::Chebyshev(series), t0, t1, s0)?;
            (false, s0, rp.length, Repr::Reparam(rp))
        }
    };
    Ok(ArclengthCurve {
        id,
        dim: n,
        closed,
        s_start,
        length,
        kappa_tol: opts.kappa_tol_rel / length,
        repr,
    })
}

impl ArclengthCurve {
    pub fn id(&self) -> usize {
        self.id
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Arclength domain `[lo, hi]`; for closed components `hi` is identified with `lo`.
    pub fn domain(&self) -> (f64, f64) {
        (self.s_start, self.s_start + self.length)
    }

    pub fn kappa_tol(&self) -> f64 {
        self.kappa_tol
    }

    /// Maps `s` into the canonical domain: wraps closed components and
    /// rejects values outside an open arc (up to a relative slack of 1e-9).
    pub fn normalize(&self, s: f64) -> Result<f64> {
        let (lo, hi) = self.domain();
        if !s.is_finite() {
            return Err(Error::OutOfDomain { s, lo, hi });
        }
        if self.closed {
            let r = (s - lo).rem_euclid(self.length);
            Ok(lo + if r >= self.length { 0.0 } else { r })
        } else {
            let slack = 1e-9 * self.length;
            if s < lo - slack || s > hi + slack {
                Err(Error::OutOfDomain { s, lo, hi })
            } else {
                Ok(s.clamp(lo, hi))
            }
        }
    }

    /// Signed parameter difference `b - a`, taking the short way around on
    /// closed components.
    pub fn param_gap(&self, a: f64, b: f64) -> f64 {
        let d = b - a;
        if self.closed {
            let l = self.length;
            d - l * (d / l).round()
        } else {
            d
        }
    }

    /// Position and exact derivatives at `s`.
    pub fn jet(&self, s: f64) -> Result<CurveJet> {
        let s = self.normalize(s)?;
        Ok(self.jet_unchecked(s))
    }

    pub(crate) fn jet_unchecked(&self, s: f64) -> CurveJet {
        let n = self.dim;
        match &self.repr {
            Repr::Circle { center, radius } => {
                let r = *radius;
                let (sn, cs) = (s / r).sin_cos();
                CurveJet {
                    point: center + &VecN::planar(n, r * cs, r * sn),
                    d1: VecN::planar(n, -sn, cs),
                    d2: VecN::planar(n, -cs / r, -sn / r),
                    d3: VecN::planar(n, sn / (r * r), -cs / (r * r)),
                }
            }
            Repr::Segment { from, dir } => CurveJet {
                point: from.plus_scaled(s, dir),
                d1: dir.clone(),
                d2: VecN::zeros(n),
                d3: VecN::zeros(n),
            },
            Repr::Stadium(c) => {
                let j = c.jet(s);
                CurveJet {
                    point: VecN::planar(n, j[0][0], j[0][1]),
                    d1: VecN::planar(n, j[1][0], j[1][1]),
                    d2: VecN::planar(n, j[2][0], j[2][1]),
                    d3: VecN::planar(n, j[3][0], j[3][1]),
                }
            }
            Repr::Reparam(rp) => rp.jet(s),
        }
    }

    pub fn point(&self, s: f64) -> Result<VecN> {
        Ok(self.jet(s)?.point)
    }

    /// Third derivative `gamma'''(s)`, from exact differentiation.
    pub fn third_derivative(&self, s: f64) -> Result<VecN> {
        Ok(self.jet(s)?.d3)
    }

    /// Frenet-type data at `s`.
    pub fn frame(&self, s: f64) -> Result<FrenetData> {
        let s = self.normalize(s)?;
        let j = self.jet_unchecked(s);
        Ok(self.frame_from_jet(s, &j))
    }

    pub(crate) fn frame_from_jet(&self, s: f64, j: &CurveJet) -> FrenetData {
        let kappa = j.d2.norm();
        let normal = if kappa > self.kappa_tol {
            Some(j.d2.scaled(1.0 / kappa))
        } else {
            None
        };
        FrenetData {
            s,
            point: j.point.clone(),
            tangent: j.d1.clone(),
            second_deriv: j.d2.clone(),
            curvature: if normal.is_some() { kappa } else { 0.0 },
            normal,
        }
    }

    /// `n + 1` sample abscissae spanning the domain. Closed components skip
    /// the duplicated right end, open arcs include both endpoints.
    pub fn sample_params(&self, n: usize) -> Vec<f64> {
        let (lo, _) = self.domain();
        let n = n.max(2);
        if self.closed {
            (0..n).map(|k| lo + self.length * k as f64 / n as f64).collect()
        } else {
            (0..=n).map(|k| lo + self.length * k as f64 / n as f64).collect()
        }
    }

    /// The stadium model behind this component, if any.
    pub fn as_stadium(&self) -> Option<&StadiumCurve> {
        match &self.repr {
            Repr::Stadium(c) => Some(c),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
enum RawCurve {
    Fourier(Vec<Fourier>),
    Chebyshev(Vec<Chebyshev>),
}

impl RawCurve {
    fn dim(&self) -> usize {
        match self {
            RawCurve::Fourier(c) => c.len(),
            RawCurve::Chebyshev(c) => c.len(),
        }
    }

    /// `(r, r', r'', r''')` in the raw parameter.
    fn eval(&self, t: f64) -> [VecN; 4] {
        let n = self.dim();
        let mut out = [VecN::zeros(n), VecN::zeros(n), VecN::zeros(n), VecN::zeros(n)];
        for i in 0..n {
            let v = match self {
                RawCurve::Fourier(c) => c[i].eval4(t),
                RawCurve::Chebyshev(c) => c[i].eval4(t),
            };
            for (k, vk) in v.iter().enumerate() {
                out[k][i] = *vk;
            }
        }
        out
    }

    fn speed(&self, t: f64) -> f64 {
        self.eval(t)[1].norm()
    }
}

/// Numerical arclength reparametrization of a raw curve.
#[derive(Debug, Clone)]
struct Reparam {
    raw: RawCurve,
    s0: f64,
    length: f64,
    /// Knots `(t_k, s_k, speed_k)`, with `s` measured from `s0`.
    knots: Vec<(f64, f64, f64)>,
}

const REPARAM_PANELS: usize = 512;

impl Reparam {
    fn new(raw: RawCurve, t0: f64, t1: f64, s0: f64) -> Result<Self> {
        let m = REPARAM_PANELS;
        let ts: Vec<f64> = (0..=m).map(|k| t0 + (t1 - t0) * k as f64 / m as f64).collect();
        // regularity: speed must stay away from zero relative to its scale
        let mut vmax: f64 = 0.0;
        let mut vmin = (f64::INFINITY, t0);
        for k in 0..=4 * m {
            let t = t0 + (t1 - t0) * k as f64 / (4 * m) as f64;
            let v = raw.speed(t);
            vmax = vmax.max(v);
            if v < vmin.0 {
                vmin = (v, t);
            }
        }
        if !(vmin.0 > 1e-8 * vmax) || !vmax.is_finite() {
            return Err(Error::NonRegularCurve { t: vmin.1 });
        }
        let mut knots = Vec::with_capacity(m + 1);
        let mut s = 0.0;
        for k in 0..=m {
            knots.push((ts[k], s, raw.speed(ts[k])));
            if k < m {
                s += adaptive_gl(|t| raw.speed(t), ts[k], ts[k + 1], 1e-15, 4096).ok_or(Error::QuadratureFailure)?;
            }
        }
        Ok(Reparam {
            raw,
            s0,
            length: s,
            knots,
        })
    }

    /// Raw parameter at arclength offset `u = s - s0` in `[0, L]`.
    fn t_of(&self, u: f64) -> f64 {
        let k = match self.knots.binary_search_by(|q| q.1.total_cmp(&u)) {
            Ok(i) => return self.knots[i].0,
            Err(0) => 0,
            Err(i) => (i - 1).min(self.knots.len() - 2),
        };
        let (ta, sa, va) = self.knots[k];
        let (tb, sb, vb) = self.knots[k + 1];
        // cubic Hermite for t(s) with slopes 1/speed
        let h = sb - sa;
        let x = (u - sa) / h;
        let (h00, h10, h01, h11) = (
            (1.0 + 2.0 * x) * (1.0 - x) * (1.0 - x),
            x * (1.0 - x) * (1.0 - x),
            x * x * (3.0 - 2.0 * x),
            x * x * (x - 1.0),
        );
        let mut t = h00 * ta + h10 * h / va + h01 * tb + h11 * h / vb;
        t = t.clamp(ta, tb);
        let tol = 1e-13 * self.length.max(1.0);
        for _ in 0..8 {
            let s_t = sa + gl_panel(|x| self.raw.speed(x), ta, t);
            let err = s_t - u;
            if err.abs() <= tol {
                break;
            }
            t = (t - err / self.raw.speed(t)).clamp(ta, tb);
        }
        t
    }

    fn jet(&self, s: f64) -> CurveJet {
        let u = (s - self.s0).clamp(0.0, self.length);
        let t = self.t_of(u);
        let [r, r1, r2, r3] = self.raw.eval(t);
        let sig = r1.norm();
        let a = r1.dot(&r2);
        let sig_t = a / sig;
        let sig_tt = (r2.norm_sq() + r1.dot(&r3)) / sig - a * a / (sig * sig * sig);
        let t1 = 1.0 / sig;
        let t2 = -sig_t / sig.powi(3);
        let t3 = -sig_tt / sig.powi(4) + 3.0 * sig_t * sig_t / sig.powi(5);
        let d1 = r1.scaled(t1);
        let mut d2 = r2.scaled(t1 * t1);
        d2.axpy(t2, &r1);
        let mut d3 = r3.scaled(t1 * t1 * t1);
        d3.axpy(3.0 * t1 * t2, &r2);
        d3.axpy(t3, &r1);
        CurveJet { point: r, d1, d2, d3 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn build(spec: ComponentSpec) -> ArclengthCurve {
        build_arclength_curve(0, &spec, &BuildOptions::default()).unwrap()
    }

    #[test]
    fn unit_circle_preset() {
        let c = build(ComponentSpec::Circle {
            center: None,
            radius: 1.0,
            arc: None,
        });
        assert!((c.length() - 2.0 * PI).abs() < 1e-15);
        let f = c.frame(PI / 3.0).unwrap();
        assert!((f.curvature - 1.0).abs() < 1e-15);
        let n = f.normal.unwrap();
        assert!((&n + &f.point).norm() < 1e-15);
        assert_eq!(c.point(0.0).unwrap().as_slice(), &[1.0, 0.0]);
    }

    #[test]
    fn segment_has_no_normal() {
        let c = build(ComponentSpec::Segment {
            from: vec![0.0, 0.0],
            to: vec![3.0, 4.0],
        });
        let f = c.frame(1.0).unwrap();
        assert_eq!(f.curvature, 0.0);
        assert!(f.normal.is_none());
        assert!(c.third_derivative(2.0).unwrap().norm() == 0.0);
        assert!(matches!(c.frame(6.0), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn ellipse_reparametrization_is_unit_speed() {
        let c = build(ComponentSpec::Ellipse {
            a: 2.0,
            b: 1.0,
            center: None,
        });
        for k in 0..97 {
            let s = c.length() * k as f64 / 97.0;
            let j = c.jet(s).unwrap();
            assert!((j.d1.norm() - 1.0).abs() < 1e-12);
            assert!(j.d1.dot(&j.d2).abs() < 1e-10);
        }
        let f = c.frame(0.0).unwrap();
        assert!((f.curvature - 2.0).abs() < 1e-10);
    }

    #[test]
    fn closed_domain_wraps() {
        let c = build(ComponentSpec::Ellipse {
            a: 2.0,
            b: 1.0,
            center: None,
        });
        let l = c.length();
        let a = c.point(0.3).unwrap();
        let b = c.point(0.3 + l).unwrap();
        let d = c.point(0.3 - 2.0 * l).unwrap();
        assert!(a.dist(&b) < 1e-12 && a.dist(&d) < 1e-12);
        assert!((c.param_gap(0.1, l - 0.1) + 0.2).abs() < 1e-12);
    }

    #[test]
    fn non_regular_chebyshev_rejected() {
        // (u^2, u^3) has a cusp at u = 0
        let spec = ComponentSpec::Chebyshev {
            coords: vec![vec![0.5, 0.0, 0.5], vec![0.0, 0.75, 0.0, 0.25]],
            interval: [-1.0, 1.0],
            s_origin: None,
        };
        let err = build_arclength_curve(0, &spec, &BuildOptions::default()).unwrap_err();
        assert!(matches!(err, Error::NonRegularCurve { .. }));
    }
}
