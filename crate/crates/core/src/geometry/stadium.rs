//! The stadium-like closed convex curve built from a curvature profile.
//!
//! The curve is parametrized natively by arclength on `[-A, A)` with
//! `gamma(0) = (1, 0)` and is symmetric about the x-axis. On the upper half
//! the curvature is
//!
//! * 1 on `[0, eps - delta]` (an arc of the unit circle about the origin),
//! * a smooth decrease to a small `line_curvature` over `[eps - delta, eps + delta]`,
//! * `line_curvature` along a nearly straight run of length `line_length`,
//! * a smooth rise over `2 * cap_blend` to the cap curvature `k2`,
//! * `k2` until the tangent has turned by a half turn.
//!
//! `k2` is solved so that the upper half ends on the x-axis, which closes the
//! curve. The turning angle has a closed form; positions are accumulated with
//! Gauss–Legendre panels.

use crate::error::{Error, Result};
use crate::numeric::{bisect, gl_panel, smoothstep, smoothstep_d1, smoothstep_integral};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

/// Shape parameters of the stadium.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StadiumParams {
    pub eps: f64,
    pub delta: f64,
    pub line_length: f64,
    pub line_curvature: f64,
    pub cap_blend: f64,
}

impl Default for StadiumParams {
    fn default() -> Self {
        StadiumParams {
            eps: 0.3,
            delta: 0.05,
            line_length: 10.0,
            line_curvature: 0.01,
            cap_blend: 0.5,
        }
    }
}

const PANEL: f64 = 0.25;

#[derive(Debug, Clone)]
pub struct StadiumCurve {
    params: StadiumParams,
    /// Piece boundaries `0, a1, a2, a3, a4, A` on the upper half.
    knots: [f64; 6],
    /// Accumulated turning at each piece boundary.
    turning: [f64; 6],
    k2: f64,
    /// Panel starts with the position there.
    panels: Vec<(f64, f64, f64)>,
}

impl StadiumCurve {
    pub fn new(params: StadiumParams) -> Result<Self> {
        let p = &params;
        let finite = [p.eps, p.delta, p.line_length, p.line_curvature, p.cap_blend]
            .iter()
            .all(|x| x.is_finite() && *x > 0.0);
        if !finite || p.delta >= p.eps || p.line_curvature >= 1.0 {
            return Err(Error::InvalidScene(
                "stadium needs 0 < delta < eps, 0 < line_curvature < 1 and positive lengths".into(),
            ));
        }
        let turn_before_cap = |k2: f64| {
            let mut c = StadiumCurve::skeleton(p.clone(), k2);
            c.fill_turning();
            c.turning[4]
        };
        // the cap must still have to turn; otherwise the curve cannot close
        if turn_before_cap(p.line_curvature) >= PI {
            return Err(Error::InvalidScene("stadium turns too far before the cap".into()));
        }
        let y_end = |k2: f64| -> f64 {
            let mut c = StadiumCurve::skeleton(p.clone(), k2);
            c.fill_turning();
            c.fill_panels();
            c.panels.last().map(|q| q.2).unwrap_or(0.0)
        };
        // bracket the cap curvature: a tiny cap leaves the end above the axis,
        // a huge cap radius overshoots below it
        let mut hi = 10.0_f64;
        while turn_before_cap(hi) >= PI || y_end(hi) <= 0.0 {
            hi *= 0.5;
            if hi < p.line_curvature {
                return Err(Error::InvalidScene("stadium cap cannot be closed".into()));
            }
        }
        let mut lo = hi;
        while y_end(lo) > 0.0 {
            lo *= 0.5;
            if lo < 1e-6 {
                return Err(Error::InvalidScene("stadium cap cannot be closed".into()));
            }
        }
        let k2 = bisect(y_end, lo, hi, 1e-16);
        let mut c = StadiumCurve::skeleton(params, k2);
        c.fill_turning();
        c.fill_panels();
        Ok(c)
    }

    fn skeleton(params: StadiumParams, k2: f64) -> Self {
        let a1 = params.eps - params.delta;
        let a2 = params.eps + params.delta;
        let a3 = a2 + params.line_length;
        let a4 = a3 + 2.0 * params.cap_blend;
        StadiumCurve {
            params,
            knots: [0.0, a1, a2, a3, a4, a4],
            turning: [0.0; 6],
            k2,
            panels: Vec::new(),
        }
    }

    fn fill_turning(&mut self) {
        let [_, a1, a2, a3, a4, _] = self.knots;
        let kl = self.params.line_curvature;
        let k2 = self.k2;
        let t1 = a1;
        let t2 = t1 + (a2 - a1) * (1.0 - 0.5 * (1.0 - kl));
        let t3 = t2 + kl * (a3 - a2);
        let t4 = t3 + (a4 - a3) * (kl + 0.5 * (k2 - kl));
        let big_a = a4 + (PI - t4) / k2;
        self.knots[5] = big_a;
        self.turning = [0.0, t1, t2, t3, t4, PI];
    }

    fn fill_panels(&mut self) {
        let mut panels = Vec::new();
        let (mut x, mut y) = (1.0, 0.0);
        for w in self.knots.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b <= a {
                continue;
            }
            let n = ((b - a) / PANEL).ceil().max(1.0) as usize;
            for k in 0..n {
                let lo = a + (b - a) * k as f64 / n as f64;
                let hi = a + (b - a) * (k + 1) as f64 / n as f64;
                panels.push((lo, x, y));
                x += gl_panel(|u| self.theta_half(u).cos(), lo, hi);
                y += gl_panel(|u| self.theta_half(u).sin(), lo, hi);
            }
        }
        panels.push((self.knots[5], x, y));
        self.panels = panels;
    }

    pub fn params(&self) -> &StadiumParams {
        &self.params
    }

    /// Half-length `A`; the full length is `2A`.
    pub fn half_length(&self) -> f64 {
        self.knots[5]
    }

    /// Curvature of the cap arc.
    pub fn cap_curvature(&self) -> f64 {
        self.k2
    }

    /// Curvature and its derivative for `u >= 0`.
    fn kappa_half(&self, u: f64) -> (f64, f64) {
        let [_, a1, a2, a3, a4, _] = self.knots;
        let kl = self.params.line_curvature;
        if u <= a1 {
            (1.0, 0.0)
        } else if u <= a2 {
            let w = a2 - a1;
            let x = (u - a1) / w;
            (1.0 - (1.0 - kl) * smoothstep(x), -(1.0 - kl) * smoothstep_d1(x) / w)
        } else if u <= a3 {
            (kl, 0.0)
        } else if u <= a4 {
            let w = a4 - a3;
            let x = (u - a3) / w;
            (
                kl + (self.k2 - kl) * smoothstep(x),
                (self.k2 - kl) * smoothstep_d1(x) / w,
            )
        } else {
            (self.k2, 0.0)
        }
    }

    /// Tangent angle for `u >= 0`.
    fn theta_half(&self, u: f64) -> f64 {
        let [_, a1, a2, a3, a4, _] = self.knots;
        let t = &self.turning;
        let kl = self.params.line_curvature;
        let turned = if u <= a1 {
            u
        } else if u <= a2 {
            let w = a2 - a1;
            t[1] + (u - a1) - (1.0 - kl) * w * smoothstep_integral((u - a1) / w)
        } else if u <= a3 {
            t[2] + kl * (u - a2)
        } else if u <= a4 {
            let w = a4 - a3;
            t[3] + kl * (u - a3) + (self.k2 - kl) * w * smoothstep_integral((u - a3) / w)
        } else {
            t[4] + self.k2 * (u - a4)
        };
        FRAC_PI_2 + turned
    }

    fn position_half(&self, u: f64) -> (f64, f64) {
        let idx = match self.panels.binary_search_by(|q| q.0.total_cmp(&u)) {
            Ok(i) => return (self.panels[i].1, self.panels[i].2),
            Err(0) => 0,
            Err(i) => i - 1,
        };
        let (lo, x, y) = self.panels[idx.min(self.panels.len() - 1)];
        (
            x + gl_panel(|v| self.theta_half(v).cos(), lo, u),
            y + gl_panel(|v| self.theta_half(v).sin(), lo, u),
        )
    }

    /// Curvature at signed arclength `s` (even in `s`).
    pub fn curvature(&self, s: f64) -> f64 {
        self.kappa_half(s.abs()).0
    }

    /// Planar position and first three derivatives at `s` in `[-A, A]`.
    pub fn jet(&self, s: f64) -> [[f64; 2]; 4] {
        let u = s.abs();
        let sign = if s < 0.0 { -1.0 } else { 1.0 };
        let (k, dk_half) = self.kappa_half(u);
        let dk = sign * dk_half;
        let th_half = self.theta_half(u);
        let theta = if s < 0.0 { PI - th_half } else { th_half };
        let (x, y) = self.position_half(u);
        let (sn, cs) = theta.sin_cos();
        [
            [x, sign * y],
            [cs, sn],
            [-k * sn, k * cs],
            [-dk * sn - k * k * cs, dk * cs - k * k * sn],
        ]
    }
}
