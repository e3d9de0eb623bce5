//! Truncated Fourier and Chebyshev series with exact derivatives.
//!
//! Both are used twice: per coordinate for raw curves and as scalar weight
//! profiles. Derivatives come from differentiating the coefficients, never
//! from finite differences.

/// A real Fourier series `c0 + sum_k (cos_k cos(k w x) + sin_k sin(k w x))`.
#[derive(Debug, Clone, PartialEq)]
pub struct Fourier {
    /// `cos[0]` is the constant term, `cos[k]` multiplies `cos(k w x)`.
    pub cos: Vec<f64>,
    /// `sin[k-1]` multiplies `sin(k w x)`.
    pub sin: Vec<f64>,
    /// Angular base frequency `w`.
    pub omega: f64,
}

impl Fourier {
    pub fn new(cos: Vec<f64>, sin: Vec<f64>, omega: f64) -> Self {
        Fourier { cos, sin, omega }
    }

    pub fn order(&self) -> usize {
        self.cos.len().saturating_sub(1).max(self.sin.len())
    }

    /// Value and first three derivatives at `x`.
    pub fn eval4(&self, x: f64) -> [f64; 4] {
        let mut out = [0.0; 4];
        out[0] = self.cos.first().copied().unwrap_or(0.0);
        let n = self.order();
        for k in 1..=n {
            let a = self.cos.get(k).copied().unwrap_or(0.0);
            let b = self.sin.get(k - 1).copied().unwrap_or(0.0);
            if a == 0.0 && b == 0.0 {
                continue;
            }
            let w = k as f64 * self.omega;
            let (s, c) = (w * x).sin_cos();
            let v = a * c + b * s;
            let d = -a * s + b * c;
            out[0] += v;
            out[1] += w * d;
            out[2] -= w * w * v;
            out[3] -= w * w * w * d;
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.cos.iter().chain(self.sin.iter()).all(|c| c.is_finite())
    }
}

/// A Chebyshev series `sum_k c_k T_k(u)` on the interval `[lo, hi]`, with
/// `u` the affine image of `x` in [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct Chebyshev {
    lo: f64,
    hi: f64,
    /// Coefficients of the function and of its first three `x`-derivatives.
    coeffs: [Vec<f64>; 4],
}

impl Chebyshev {
    pub fn new(coeffs: Vec<f64>, lo: f64, hi: f64) -> Self {
        let scale = 2.0 / (hi - lo);
        let d1 = derivative_coeffs(&coeffs, scale);
        let d2 = derivative_coeffs(&d1, scale);
        let d3 = derivative_coeffs(&d2, scale);
        Chebyshev {
            lo,
            hi,
            coeffs: [coeffs, d1, d2, d3],
        }
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs[0]
    }

    /// Value and first three derivatives at `x`.
    pub fn eval4(&self, x: f64) -> [f64; 4] {
        let u = (2.0 * x - self.lo - self.hi) / (self.hi - self.lo);
        [
            clenshaw(&self.coeffs[0], u),
            clenshaw(&self.coeffs[1], u),
            clenshaw(&self.coeffs[2], u),
            clenshaw(&self.coeffs[3], u),
        ]
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs[0].iter().all(|c| c.is_finite())
    }
}

fn clenshaw(c: &[f64], u: f64) -> f64 {
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for &ck in c.iter().skip(1).rev() {
        let b0 = 2.0 * u * b1 - b2 + ck;
        b2 = b1;
        b1 = b0;
    }
    c.first().copied().unwrap_or(0.0) + u * b1 - b2
}

/// Coefficients of d/dx of a Chebyshev series, where `scale = du/dx`.
fn derivative_coeffs(c: &[f64], scale: f64) -> Vec<f64> {
    let n = c.len();
    if n <= 1 {
        return vec![0.0];
    }
    let mut d = vec![0.0; n + 1];
    for k in (1..n).rev() {
        d[k - 1] = d[k + 1] + 2.0 * k as f64 * c[k];
    }
    d[0] *= 0.5;
    d.truncate(n - 1);
    d.iter().map(|x| x * scale).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chebyshev_matches_polynomial() {
        // T0 + 2 T1 + 3 T2 = 1 + 2u + 3(2u^2 - 1) on [0, 2], u = x - 1
        let ch = Chebyshev::new(vec![1.0, 2.0, 3.0], 0.0, 2.0);
        for &x in &[0.0, 0.3, 1.0, 1.7, 2.0] {
            let u = x - 1.0;
            let v = ch.eval4(x);
            assert!((v[0] - (1.0 + 2.0 * u + 3.0 * (2.0 * u * u - 1.0))).abs() < 1e-14);
            assert!((v[1] - (2.0 + 12.0 * u)).abs() < 1e-13);
            assert!((v[2] - 12.0).abs() < 1e-12);
            assert!(v[3].abs() < 1e-12);
        }
    }

    #[test]
    fn chebyshev_cubic_third_derivative() {
        // T3(u) = 4u^3 - 3u on [-1, 1]
        let ch = Chebyshev::new(vec![0.0, 0.0, 0.0, 1.0], -1.0, 1.0);
        let v = ch.eval4(0.4);
        assert!((v[0] - (4.0 * 0.064 - 1.2)).abs() < 1e-14);
        assert!((v[1] - (12.0 * 0.16 - 3.0)).abs() < 1e-13);
        assert!((v[2] - 24.0 * 0.4).abs() < 1e-12);
        assert!((v[3] - 24.0).abs() < 1e-12);
    }

    #[test]
    fn fourier_derivatives() {
        let f = Fourier::new(vec![0.5, 2.0], vec![1.0], 1.0);
        let x = 0.7_f64;
        let v = f.eval4(x);
        assert!((v[0] - (0.5 + 2.0 * x.cos() + x.sin())).abs() < 1e-15);
        assert!((v[1] - (-2.0 * x.sin() + x.cos())).abs() < 1e-15);
        assert!((v[2] - (-2.0 * x.cos() - x.sin())).abs() < 1e-15);
        assert!((v[3] - (2.0 * x.sin() - x.cos())).abs() < 1e-15);
    }
}
