//! Weight functions `mu(s) > 0` along a component, in its arclength parameter.

use super::series::{Chebyshev, Fourier};
use crate::error::{Error, Result};
use crate::numeric::{gl_panel, smoothstep, smoothstep_d1};
use serde::{Deserialize, Serialize};

/// Declarative description of a weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightSpec {
    /// `mu = value`.
    Constant { value: f64 },
    /// `mu = amplitude * cos(frequency * s + phase) + offset`.
    Cosine {
        amplitude: f64,
        frequency: f64,
        #[serde(default)]
        phase: f64,
        #[serde(default)]
        offset: f64,
    },
    /// `mu = sum_k coeffs[k] s^k`.
    Polynomial { coeffs: Vec<f64> },
    /// Fourier series in `s` with the component length as period.
    Fourier { cos: Vec<f64>, sin: Vec<f64> },
    /// Chebyshev series over the component's arclength interval.
    Chebyshev { coeffs: Vec<f64> },
    /// Even profile that equals `cos(s/2)` for `|s| <= s1`, then bends over a
    /// blend width into a slow ramp that levels off to a constant.
    StadiumProfile { s1: f64, blend: f64, ramp: f64 },
}

/// Weight value and its first three arclength derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightJet {
    pub mu: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

#[derive(Debug, Clone)]
enum Kind {
    Constant(f64),
    Cosine {
        amp: f64,
        freq: f64,
        phase: f64,
        offset: f64,
    },
    Polynomial(Vec<f64>),
    Fourier {
        series: Fourier,
        origin: f64,
    },
    Chebyshev(Chebyshev),
    Stadium(StadiumProfile),
}

/// A weight bound to one component's arclength domain.
#[derive(Debug, Clone)]
pub struct WeightFunction {
    spec: WeightSpec,
    kind: Kind,
    /// Additive family parameter: the evaluated weight is `mu + shift`.
    shift: f64,
}

impl WeightFunction {
    /// Binds `spec` to a component with arclength domain `[s0, s0 + length]`.
    pub fn new(spec: &WeightSpec, s0: f64, length: f64) -> Result<Self> {
        let bad = |what: &str| Error::InvalidScene(format!("weight: {what}"));
        let kind = match spec {
            WeightSpec::Constant { value } => Kind::Constant(*value),
            WeightSpec::Cosine {
                amplitude,
                frequency,
                phase,
                offset,
            } => Kind::Cosine {
                amp: *amplitude,
                freq: *frequency,
                phase: *phase,
                offset: *offset,
            },
            WeightSpec::Polynomial { coeffs } => {
                if coeffs.is_empty() {
                    return Err(bad("polynomial needs at least one coefficient"));
                }
                Kind::Polynomial(coeffs.clone())
            }
            WeightSpec::Fourier { cos, sin } => {
                if cos.is_empty() {
                    return Err(bad("fourier needs a constant term"));
                }
                Kind::Fourier {
                    series: Fourier::new(cos.clone(), sin.clone(), 2.0 * std::f64::consts::PI / length),
                    origin: s0,
                }
            }
            WeightSpec::Chebyshev { coeffs } => {
                if coeffs.is_empty() {
                    return Err(bad("chebyshev needs at least one coefficient"));
                }
                Kind::Chebyshev(Chebyshev::new(coeffs.clone(), s0, s0 + length))
            }
            WeightSpec::StadiumProfile { s1, blend, ramp } => Kind::Stadium(StadiumProfile::new(*s1, *blend, *ramp)?),
        };
        let f = WeightFunction {
            spec: spec.clone(),
            kind,
            shift: 0.0,
        };
        if !f.params_finite() {
            return Err(bad("non-finite parameter"));
        }
        Ok(f)
    }

    fn params_finite(&self) -> bool {
        match &self.kind {
            Kind::Constant(c) => c.is_finite(),
            Kind::Cosine {
                amp,
                freq,
                phase,
                offset,
            } => [amp, freq, phase, offset].iter().all(|x| x.is_finite()),
            Kind::Polynomial(c) => c.iter().all(|x| x.is_finite()),
            Kind::Fourier { series, .. } => series.is_finite(),
            Kind::Chebyshev(c) => c.is_finite(),
            Kind::Stadium(_) => true,
        }
    }

    /// The same weight shifted by an additive constant `t`.
    pub fn shifted(&self, t: f64) -> Self {
        let mut out = self.clone();
        out.shift = t;
        out
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn spec(&self) -> &WeightSpec {
        &self.spec
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.kind, Kind::Constant(_))
    }

    /// Evaluates `(mu, mu', mu'', mu''')` at an in-domain arclength `s`.
    pub fn eval(&self, s: f64) -> WeightJet {
        let v = match &self.kind {
            Kind::Constant(c) => [*c, 0.0, 0.0, 0.0],
            Kind::Cosine {
                amp,
                freq,
                phase,
                offset,
            } => {
                let (sn, cs) = (freq * s + phase).sin_cos();
                [
                    amp * cs + offset,
                    -amp * freq * sn,
                    -amp * freq * freq * cs,
                    amp * freq * freq * freq * sn,
                ]
            }
            Kind::Polynomial(c) => poly4(c, s),
            Kind::Fourier { series, origin } => series.eval4(s - origin),
            Kind::Chebyshev(c) => c.eval4(s),
            Kind::Stadium(p) => p.eval(s),
        };
        WeightJet {
            mu: v[0] + self.shift,
            d1: v[1],
            d2: v[2],
            d3: v[3],
        }
    }
}

fn poly4(c: &[f64], x: f64) -> [f64; 4] {
    // Horner with derivative accumulation; q[k] ends up holding p^(k) / k!
    let mut q = [0.0; 4];
    for &ck in c.iter().rev() {
        q[3] = q[3] * x + q[2];
        q[2] = q[2] * x + q[1];
        q[1] = q[1] * x + q[0];
        q[0] = q[0] * x + ck;
    }
    [q[0], q[1], 2.0 * q[2], 6.0 * q[3]]
}

/// Even weight for the stadium: `cos(s/2)` near the small arc, then
/// `mu''` blends from `-cos(s/2)/4` to zero while a positive bump pushes
/// `mu'` back to zero, after which `mu` stays constant.
#[derive(Debug, Clone)]
struct StadiumProfile {
    s1: f64,
    blend: f64,
    ramp: f64,
    bump: f64,
    /// Panel starts beyond `s1` with `(mu, mu')` there.
    panels: Vec<(f64, f64, f64)>,
    plateau: f64,
}

const PROFILE_PANEL: f64 = 0.125;

impl StadiumProfile {
    fn new(s1: f64, blend: f64, ramp: f64) -> Result<Self> {
        if !(s1 > 0.0 && blend > 0.0 && ramp >= blend && s1 < std::f64::consts::PI) {
            return Err(Error::InvalidScene(
                "stadium_profile needs 0 < s1 < pi and 0 < blend <= ramp".into(),
            ));
        }
        let mut p = StadiumProfile {
            s1,
            blend,
            ramp,
            bump: 0.0,
            panels: Vec::new(),
            plateau: 0.0,
        };
        // choose the bump so that mu' returns exactly to zero at s1 + ramp;
        // the bump 140 x^3 (1-x)^3 integrates to `ramp` over the ramp
        let d1_start = -(0.5 * s1).sin() * 0.5;
        let bent: f64 = p
            .breakpoints()
            .windows(2)
            .map(|w| gl_panel(|u| p.bend(u), w[0], w[1]))
            .sum();
        p.bump = -(d1_start + bent) / ramp;
        let mut mu = (0.5 * s1).cos();
        let mut d1 = d1_start;
        let bps = p.breakpoints();
        for w in bps.windows(2) {
            let (a, b) = (w[0], w[1]);
            p.panels.push((a, mu, d1));
            mu += d1 * (b - a) + gl_panel(|u| (b - u) * p.d2_raw(u), a, b);
            d1 += gl_panel(|u| p.d2_raw(u), a, b);
        }
        p.plateau = mu;
        Ok(p)
    }

    fn breakpoints(&self) -> Vec<f64> {
        let end = self.s1 + self.ramp;
        let mut out = Vec::new();
        let add_piece = |a: f64, b: f64, out: &mut Vec<f64>| {
            let n = ((b - a) / PROFILE_PANEL).ceil().max(1.0) as usize;
            for k in 0..n {
                out.push(a + (b - a) * k as f64 / n as f64);
            }
        };
        add_piece(self.s1, self.s1 + self.blend, &mut out);
        if self.ramp > self.blend {
            add_piece(self.s1 + self.blend, end, &mut out);
        }
        out.push(end);
        out
    }

    /// The fading `cos` curvature term of `mu''`.
    fn bend(&self, u: f64) -> f64 {
        let x = (u - self.s1) / self.blend;
        (1.0 - smoothstep(x)) * (-0.25 * (0.5 * u).cos())
    }

    fn d2_raw(&self, u: f64) -> f64 {
        let x = (u - self.s1) / self.ramp;
        self.bend(u) + self.bump * smoothstep_d1(x)
    }

    fn d3_raw(&self, u: f64) -> f64 {
        let xb = (u - self.s1) / self.blend;
        let xr = (u - self.s1) / self.ramp;
        let bend_d = -smoothstep_d1(xb) / self.blend * (-0.25 * (0.5 * u).cos())
            + (1.0 - smoothstep(xb)) * (0.125 * (0.5 * u).sin());
        let bump_d = if (0.0..=1.0).contains(&xr) {
            self.bump * 420.0 * xr * xr * (1.0 - xr) * (1.0 - xr) * (1.0 - 2.0 * xr) / self.ramp
        } else {
            0.0
        };
        bend_d + bump_d
    }

    fn eval_half(&self, u: f64) -> [f64; 4] {
        if u <= self.s1 {
            let (sn, cs) = (0.5 * u).sin_cos();
            return [cs, -0.5 * sn, -0.25 * cs, 0.125 * sn];
        }
        if u >= self.s1 + self.ramp {
            return [self.plateau, 0.0, 0.0, 0.0];
        }
        let idx = match self.panels.binary_search_by(|q| q.0.total_cmp(&u)) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let (a, mu_a, d1_a) = self.panels[idx];
        let mu = mu_a + d1_a * (u - a) + gl_panel(|v| (u - v) * self.d2_raw(v), a, u);
        let d1 = d1_a + gl_panel(|v| self.d2_raw(v), a, u);
        [mu, d1, self.d2_raw(u), self.d3_raw(u)]
    }

    fn eval(&self, s: f64) -> [f64; 4] {
        let v = self.eval_half(s.abs());
        if s < 0.0 {
            [v[0], -v[1], v[2], -v[3]]
        } else {
            v
        }
    }
}

/// Checks positivity of `w` on a sample of `[s0, s0 + length]`.
pub(crate) fn check_positive(w: &WeightFunction, s0: f64, length: f64, samples: usize) -> Result<()> {
    let n = samples.max(2);
    let mut worst = (s0, f64::INFINITY);
    for k in 0..=n {
        let s = s0 + length * k as f64 / n as f64;
        let mu = w.eval(s).mu;
        if mu.is_nan() || mu < worst.1 {
            worst = (s, mu);
            if mu.is_nan() {
                break;
            }
        }
    }
    if !(worst.1 > 0.0 && worst.1.is_finite()) {
        return Err(Error::NonpositiveWeight {
            s: worst.0,
            value: worst.1,
        });
    }
    // refine around the sampled minimum in case the true minimum is lower
    let h = length / n as f64;
    let lo = (worst.0 - h).max(s0);
    let hi = (worst.0 + h).min(s0 + length);
    let (s, v) = crate::numeric::golden_min(|s| w.eval(s).mu, lo, hi, 1e-12 * length.max(1.0));
    if !(v > 0.0) {
        return Err(Error::NonpositiveWeight { s, value: v });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_derivatives() {
        // 1 - s^2/8 at s = 1 gives (7/8, -1/4, -1/4, 0)
        let w = WeightFunction::new(
            &WeightSpec::Polynomial {
                coeffs: vec![1.0, 0.0, -0.125],
            },
            -1.0,
            2.0,
        )
        .unwrap();
        let j = w.eval(1.0);
        assert_eq!((j.mu, j.d1, j.d2, j.d3), (0.875, -0.25, -0.25, 0.0));
        let cubic = WeightFunction::new(
            &WeightSpec::Polynomial {
                coeffs: vec![0.0, 0.0, 0.0, 2.0],
            },
            0.0,
            1.0,
        )
        .unwrap();
        let j = cubic.eval(0.5);
        assert_eq!((j.mu, j.d1, j.d2, j.d3), (0.25, 1.5, 6.0, 12.0));
    }

    #[test]
    fn stadium_profile_is_smooth_and_levels_off() {
        let w = WeightFunction::new(
            &WeightSpec::StadiumProfile {
                s1: 0.6,
                blend: 0.2,
                ramp: 8.0,
            },
            -30.0,
            60.0,
        )
        .unwrap();
        let h = 1e-5;
        for &s in &[-3.0, -0.5, 0.0, 0.59, 0.61, 0.7, 0.79, 0.81, 4.0, 8.55, 8.61, 12.0] {
            let j = w.eval(s);
            let jp = w.eval(s + h);
            let jm = w.eval(s - h);
            assert!(((jp.mu - jm.mu) / (2.0 * h) - j.d1).abs() < 1e-8, "s={s}");
            assert!(((jp.d1 - jm.d1) / (2.0 * h) - j.d2).abs() < 1e-8, "s={s}");
            assert!(((jp.d2 - jm.d2) / (2.0 * h) - j.d3).abs() < 1e-7, "s={s}");
        }
        let far = w.eval(20.0);
        let edge = w.eval(8.6 - 1e-9);
        assert!(edge.d1.abs() < 1e-12);
        assert!((edge.mu - far.mu).abs() < 1e-12);
        assert!(far.mu > 0.25 && far.mu < 0.8);
    }
}
