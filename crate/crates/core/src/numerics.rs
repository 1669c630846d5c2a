//! Shared numerical kernels: Gauss-Legendre rules, adaptive Simpson quadrature
//! in one and two dimensions, compensated summation, and a Durand-Kerner
//! polynomial root finder for complex coefficients.

use num_complex::Complex64;

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
///
/// Newton iteration on the Legendre recurrence; exact for polynomials of
/// degree <= 2n - 1.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 1, "quadrature order must be positive");
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre P_n(x) and P_n'(x) by upward recurrence.
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { x } else { p1 };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((x, w));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// Integrates f over [a, b] with the given rule mapped onto the interval.
pub fn gl_integrate(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64, rule: &[(f64, f64)]) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = CompensatedSum::new();
    for &(x, w) in rule {
        acc.add(w * f(mid + half * x));
    }
    half * acc.value()
}

fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    h / 6.0 * (fa + 4.0 * fm + fb)
}

fn adaptive_step(
    f: &mut dyn FnMut(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + adaptive_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Adaptive Simpson integration of f over [a, b] to absolute tolerance tol.
///
/// Recursion depth is capped at 48; past the cap the local Richardson
/// estimate is accepted, so the tolerance is best-effort for non-smooth
/// integrands.
pub fn adaptive_simpson(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(fa, fm, fb, b - a);
    adaptive_step(&mut f, a, b, fa, fm, fb, whole, tol, 48)
}

/// Adaptive tensor quadrature of f over [ax, bx] x [ay, by].
///
/// Outer adaptive pass in x over inner adaptive slices in y; the inner
/// tolerance is scaled down so the total absolute error stays near tol.
pub fn adaptive_quad_2d(
    f: impl Fn(f64, f64) -> f64,
    ax: f64,
    bx: f64,
    ay: f64,
    by: f64,
    tol: f64,
) -> f64 {
    let inner_tol = tol / (4.0 * (bx - ax).abs().max(1.0));
    adaptive_simpson(
        |x| adaptive_simpson(|y| f(x, y), ay, by, inner_tol),
        ax,
        bx,
        0.5 * tol,
    )
}

/// Neumaier compensated accumulator; keeps a running error term so that
/// long alternating sums do not lose low-order bits.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Roots of a complex-coefficient polynomial c[0] + c[1] z + ... + c[d] z^d
/// by Durand-Kerner iteration. Leading zeros in the high coefficients are
/// trimmed; the zero polynomial and constants return no roots.
pub fn polynomial_roots(coefficients: &[Complex64]) -> Vec<Complex64> {
    let mut coeffs: Vec<Complex64> = coefficients.to_vec();
    while coeffs.len() > 1 && coeffs.last().map_or(false, |c| c.norm() == 0.0) {
        coeffs.pop();
    }
    let degree = coeffs.len().saturating_sub(1);
    if degree == 0 {
        return Vec::new();
    }
    let lead = coeffs[degree];
    let monic: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();
    let eval = |z: Complex64| {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in monic.iter().rev() {
            acc = acc * z + c;
        }
        acc
    };
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..degree).map(|k| seed.powu(k as u32 + 1)).collect();
    for _ in 0..600 {
        let mut max_step = 0.0f64;
        for i in 0..degree {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..degree {
                if i != j {
                    denom *= roots[i] - roots[j];
                }
            }
            if denom.norm() == 0.0 {
                // Collided estimates: nudge and keep iterating.
                roots[i] += Complex64::new(1e-8, 1e-8);
                continue;
            }
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
            max_step = max_step.max(step.norm());
        }
        if max_step < 1e-14 {
            break;
        }
    }
    roots
}

/// Least-squares slope of y against x. Returns 0 for fewer than two points
/// or a degenerate abscissa.
pub fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    if points.len() < 2 {
        return 0.0;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for &(x, y) in points {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_gauss_legendre_exact_on_polynomials() {
        let rule = gauss_legendre(5);
        // degree 8 <= 2*5 - 1
        let val = gl_integrate(&mut |x| x.powi(8), -1.0, 1.0, &rule);
        assert!((val - 2.0 / 9.0).abs() < 1e-14);
        let odd = gl_integrate(&mut |x| x.powi(9), -1.0, 1.0, &rule);
        assert!(odd.abs() < 1e-14);
    }

    #[test]
    fn test_gauss_legendre_weights_sum_to_two() {
        for n in [1, 2, 3, 8, 21, 64] {
            let rule = gauss_legendre(n);
            let total: f64 = rule.iter().map(|&(_, w)| w).sum();
            assert!((total - 2.0).abs() < 1e-12, "n = {n}: {total}");
        }
    }

    #[test]
    fn test_adaptive_simpson_smooth() {
        let v = adaptive_simpson(|x| x.exp(), 0.0, 1.0, 1e-12);
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-11);
        let s = adaptive_simpson(|x| x.sin(), 0.0, std::f64::consts::PI, 1e-12);
        assert!((s - 2.0).abs() < 1e-11);
    }

    #[test]
    fn test_adaptive_simpson_mild_singularity() {
        // integral of x^(-1/2) on (0,1] = 2; integrand clipped at the left endpoint
        let v = adaptive_simpson(|x| if x <= 0.0 { 0.0 } else { 1.0 / x.sqrt() }, 0.0, 1.0, 1e-9);
        assert!((v - 2.0).abs() < 1e-4, "{v}");
    }

    #[test]
    fn test_adaptive_quad_2d() {
        let v = adaptive_quad_2d(|x, y| x * y, 0.0, 1.0, 0.0, 1.0, 1e-12);
        assert!((v - 0.25).abs() < 1e-11);
        let g = adaptive_quad_2d(
            |x, y| (-x * x - y * y).exp(),
            -8.0,
            8.0,
            -8.0,
            8.0,
            1e-10,
        );
        assert!((g - std::f64::consts::PI).abs() < 1e-8, "{g}");
    }

    #[test]
    fn test_compensated_sum_recovers_small_addend() {
        let mut acc = CompensatedSum::new();
        acc.add(1e16);
        acc.add(1.0);
        acc.add(-1e16);
        assert_eq!(acc.value(), 1.0);
    }

    #[test]
    fn test_polynomial_roots_known_factors() {
        // (z - 1)(z + 2)(z - 3i) = -6i + (2 - 3i) z^2 ... build by convolution
        let factors = [
            Complex64::new(1.0, 0.0),
            Complex64::new(-2.0, 0.0),
            Complex64::new(0.0, 3.0),
        ];
        let mut coeffs = vec![Complex64::new(1.0, 0.0)];
        for r in factors {
            let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
            for (i, &c) in coeffs.iter().enumerate() {
                next[i] += -r * c;
                next[i + 1] += c;
            }
            coeffs = next;
        }
        let mut roots = polynomial_roots(&coeffs);
        roots.sort_by(|a, b| a.re.total_cmp(&b.re));
        let mut expected = factors.to_vec();
        expected.sort_by(|a, b| a.re.total_cmp(&b.re));
        for (r, e) in roots.iter().zip(expected.iter()) {
            assert!((r - e).norm() < 1e-9, "{r} vs {e}");
        }
    }

    #[test]
    fn test_polynomial_roots_trims_leading_zeros() {
        let coeffs = [
            Complex64::new(-1.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
        ];
        let roots = polynomial_roots(&coeffs);
        assert_eq!(roots.len(), 1);
        assert!((roots[0] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn test_least_squares_slope_exact_line() {
        let pts: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, 3.0 - 2.0 * i as f64)).collect();
        assert!((least_squares_slope(&pts) + 2.0).abs() < 1e-12);
    }
}
