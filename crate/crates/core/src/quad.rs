//! Quadrature for the Bessel-type integrals used throughout.
//!
//! Every integrand here decays doubly exponentially after the substitution
//! `l = e^σ`, so the plain trapezoid rule converges geometrically in the
//! step size. Steps are halved until two successive sums agree.

use std::f64::consts::PI;

/// `h·(g(0)/2 + Σ_{k≥1} g(kh))` for an integrand on `[0, ∞)` that decays
/// monotonically for large arguments.
fn half_line_sum(g: &impl Fn(f64) -> f64, h: f64) -> f64 {
    let mut acc = 0.5 * g(0.0);
    let mut k = 1;
    loop {
        let v = g(k as f64 * h);
        acc += v;
        if v.abs() <= 1e-18 * acc.abs() || v == 0.0 || k > 100_000 {
            break;
        }
        k += 1;
    }
    h * acc
}

/// `∫₀^∞ g(t) dt` by step-halving trapezoid.
pub fn half_line(g: impl Fn(f64) -> f64, rel_tol: f64) -> f64 {
    let mut h = 0.5;
    let mut prev = half_line_sum(&g, h);
    for _ in 0..12 {
        h *= 0.5;
        let cur = half_line_sum(&g, h);
        if (cur - prev).abs() <= rel_tol * cur.abs() {
            return cur;
        }
        prev = cur;
    }
    prev
}

/// `∫_{−∞}^{∞} g(t) dt`, summing both half lines independently.
pub fn real_line(g: impl Fn(f64) -> f64, rel_tol: f64) -> f64 {
    let pos = half_line(&g, rel_tol);
    let neg = half_line(|t| g(-t), rel_tol);
    pos + neg
}

/// Modified Bessel function `K_ν(z) = ∫₀^∞ e^{−z cosh t} cosh(νt) dt`, `z > 0`.
pub fn bessel_k(nu: f64, z: f64) -> f64 {
    assert!(z > 0.0, "bessel_k needs z > 0");
    // scale out e^{−z} so the tolerance stays relative for large z
    let scaled = half_line(|t| (-z * (t.cosh() - 1.0)).exp() * (nu * t).cosh(), 1e-15);
    scaled * (-z).exp()
}

/// `φ(x) = (1/2π) ∫₀^∞ e^{−x(l+1/l)} dl/l = K₀(2x)/π`.
pub fn phi(x: f64) -> f64 {
    assert!(x > 0.0, "phi needs x > 0");
    bessel_k(0.0, 2.0 * x) / PI
}

/// `φ` as the integral over the whole `σ`-line, `l = e^σ`, without using
/// the `l ↦ 1/l` symmetry.
pub fn phi_full_line(x: f64) -> f64 {
    real_line(|s| (-2.0 * x * s.cosh()).exp(), 1e-15) / (2.0 * PI)
}

/// `(1/2π)∫₁^∞ e^{−x(l+1/l)} dl/l`, half of `φ(x)`.
pub fn phi_upper_half(x: f64) -> f64 {
    half_line(|s| (-2.0 * x * s.cosh()).exp(), 1e-15) / (2.0 * PI)
}

/// Laplace asymptotic `½(πx)^{−1/2} e^{−2x}` of `φ`.
pub fn phi_laplace(x: f64) -> f64 {
    0.5 / (PI * x).sqrt() * (-2.0 * x).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bessel_reference_values() {
        // K₀(1), K₁(1), K₀(0.1) to 15 digits
        assert!((bessel_k(0.0, 1.0) - 0.421_024_438_240_708_3).abs() < 1e-14);
        assert!((bessel_k(1.0, 1.0) - 0.601_907_230_197_234_6).abs() < 1e-14);
        assert!((bessel_k(0.0, 0.1) - 2.427_069_024_702_017).abs() < 1e-13);
    }

    #[test]
    fn phi_positive_decreasing() {
        for x in [0.5, 1.0, 5.0] {
            assert!(phi(x) > 0.0 && phi(2.0 * x) < phi(x));
        }
    }

    #[test]
    fn phi_symmetry_and_laplace() {
        for x in [0.3, 1.0, 4.0] {
            let full = phi_full_line(x);
            assert!((2.0 * phi_upper_half(x) - full).abs() < 1e-13 * full);
            assert!((phi(x) - full).abs() < 1e-13 * full);
        }
        assert!((phi(10.0) / phi_laplace(10.0) - 1.0).abs() < 0.02);
    }
}
