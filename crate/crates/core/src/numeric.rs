//! One-dimensional numerical building blocks: Gauss–Legendre quadrature,
//! bracketed root finding, golden-section search, the septic smoothstep used
//! for curvature and weight transitions, and small dense linear algebra.

use std::sync::OnceLock;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on [-1, 1].
///
/// Nodes are computed by Newton iteration on the Legendre polynomial starting
/// from the Chebyshev-like initial guess; they come back sorted ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Cached 16-point rule.
pub fn gl16() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(16))
}

/// Integrates `f` over `[a, b]` with one panel of the 16-point rule.
pub fn gl_panel<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64) -> f64 {
    let (x, w) = gl16();
    let h = 0.5 * (b - a);
    let c = 0.5 * (a + b);
    let mut acc = 0.0;
    for (xi, wi) in x.iter().zip(w.iter()) {
        acc += wi * f(c + h * xi);
    }
    acc * h
}

/// Adaptive Gauss–Legendre integration by panel bisection.
///
/// Returns `None` when the panel budget runs out before the local error
/// estimate drops under `tol * max(1, |integral|)`.
pub fn adaptive_gl<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64, max_panels: usize) -> Option<f64> {
    let mut stack = vec![(a, b, gl_panel(&mut f, a, b), 0usize)];
    let mut total = 0.0;
    let mut panels = 0usize;
    let width = (b - a).abs().max(f64::MIN_POSITIVE);
    while let Some((lo, hi, whole, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = gl_panel(&mut f, lo, mid);
        let right = gl_panel(&mut f, mid, hi);
        panels += 2;
        if panels > max_panels || depth > 60 {
            return None;
        }
        let err = (left + right - whole).abs();
        let local_tol = tol * ((hi - lo).abs() / width).max(1e-3) * (1.0 + whole.abs());
        if err <= local_tol {
            total += left + right;
        } else {
            stack.push((mid, hi, right, depth + 1));
            stack.push((lo, mid, left, depth + 1));
        }
    }
    Some(total)
}

/// Bisection for a sign change of `f` on `[a, b]`.
///
/// Requires `f(a)` and `f(b)` to have opposite signs (or one of them zero).
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, xtol: f64) -> f64 {
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return a;
    }
    if fb == 0.0 {
        return b;
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (b - a).abs() <= xtol || m == a || m == b {
            return m;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Golden-section search for a minimum of `f` on `[a, b]`.
///
/// Returns the best abscissa seen together with its value. The bracket
/// endpoints are included among the candidates, so a monotone function
/// returns its smaller endpoint.
pub fn golden_min<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, xtol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut lo, mut hi) = (a.min(b), a.max(b));
    let mut best = (lo, f(lo));
    let fb = f(hi);
    if fb < best.1 {
        best = (hi, fb);
    }
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..200 {
        if f1 < best.1 {
            best = (x1, f1);
        }
        if f2 < best.1 {
            best = (x2, f2);
        }
        if (hi - lo) <= xtol {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    best
}

/// Golden-section search for a maximum.
pub fn golden_max<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, xtol: f64) -> (f64, f64) {
    let (x, v) = golden_min(|x| -f(x), a, b, xtol);
    (x, -v)
}

/// Septic smoothstep `H(x) = 35x^4 - 84x^5 + 70x^6 - 20x^7`, clamped outside
/// [0, 1]. It rises from 0 to 1 with three vanishing derivatives at both ends,
/// so any profile built from it stays C^3.
pub fn smoothstep(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        x.powi(4) * (35.0 + x * (-84.0 + x * (70.0 - 20.0 * x)))
    }
}

/// First derivative of [`smoothstep`]: `140 x^3 (1 - x)^3`.
pub fn smoothstep_d1(x: f64) -> f64 {
    if !(0.0..=1.0).contains(&x) {
        0.0
    } else {
        140.0 * x.powi(3) * (1.0 - x).powi(3)
    }
}

/// Second derivative of [`smoothstep`].
pub fn smoothstep_d2(x: f64) -> f64 {
    if !(0.0..=1.0).contains(&x) {
        0.0
    } else {
        420.0 * x * x * (1.0 - x) * (1.0 - x) * (1.0 - 2.0 * x)
    }
}

/// Antiderivative of [`smoothstep`] on [0, 1] normalised to vanish at 0.
/// Its value at 1 is 1/2.
pub fn smoothstep_integral(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        0.5 + (x - 1.0)
    } else {
        x.powi(5) * (7.0 + x * (-14.0 + x * (10.0 - 2.5 * x)))
    }
}

/// Solves the dense system `a x = b` in place by Gaussian elimination with
/// partial pivoting. Returns `None` for an exactly singular pivot.
#[allow(clippy::needless_range_loop)]
pub fn solve_dense(a: &mut [Vec<f64>], b: &mut [f64]) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col] == 0.0 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

/// Determinant of a small dense matrix by partial-pivot elimination.
#[allow(clippy::needless_range_loop)]
pub fn determinant(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut det = 1.0;
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap_or(col);
        if a[piv][col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            a.swap(col, piv);
            det = -det;
        }
        det *= a[col][col];
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(16);
        let sum: f64 = w.iter().sum();
        assert!((sum - 2.0).abs() < 1e-14);
        // degree 30 monomial: integral over [-1,1] is 2/31
        let q: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(30)).sum();
        assert!((q - 2.0 / 31.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_quadrature_matches_closed_form() {
        let v = adaptive_gl(|x| (x * 3.0).sin().exp(), 0.0, 7.0, 1e-13, 10_000).unwrap();
        // reference from a much finer fixed rule
        let mut fine = 0.0;
        let n = 2000;
        for k in 0..n {
            let a = 7.0 * k as f64 / n as f64;
            let b = 7.0 * (k + 1) as f64 / n as f64;
            fine += gl_panel(|x| (x * 3.0).sin().exp(), a, b);
        }
        assert!((v - fine).abs() < 1e-11);
    }

    #[test]
    fn smoothstep_is_consistent() {
        for k in 1..20 {
            let x = k as f64 / 20.0;
            let h = 1e-6;
            let fd = (smoothstep(x + h) - smoothstep(x - h)) / (2.0 * h);
            assert!((fd - smoothstep_d1(x)).abs() < 1e-8);
            let fd2 = (smoothstep_d1(x + h) - smoothstep_d1(x - h)) / (2.0 * h);
            assert!((fd2 - smoothstep_d2(x)).abs() < 1e-6);
            let int = gl_panel(smoothstep, 0.0, x);
            assert!((int - smoothstep_integral(x)).abs() < 1e-14);
        }
        assert_eq!(smoothstep_integral(1.0), 0.5);
    }

    #[test]
    fn golden_and_bisect() {
        let (x, v) = golden_min(|x| (x - 0.3).powi(2) + 1.0, -2.0, 2.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-6 && (v - 1.0).abs() < 1e-12);
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-15);
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn dense_solve_and_determinant() {
        let a = vec![vec![2.0, 1.0, 0.0], vec![1.0, 3.0, 1.0], vec![0.0, 1.0, 4.0]];
        let d = determinant(a.clone());
        assert!((d - 18.0).abs() < 1e-12);
        let mut m = a.clone();
        let mut b = vec![3.0, 5.0, 5.0];
        let x = solve_dense(&mut m, &mut b).unwrap();
        for (xi, e) in x.iter().zip([1.0, 1.0, 1.0]) {
            assert!((xi - e).abs() < 1e-12);
        }
    }
}
