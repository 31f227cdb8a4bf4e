//! Univariate polynomials. Coefficient vectors are stored leading first.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

pub fn eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().fold(0.0, |acc, c| acc * x + c)
}

pub fn eval_c(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs.iter().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}

pub fn eval_cc(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}

pub fn derivative(coeffs: &[f64]) -> Vec<f64> {
    let n = coeffs.len() - 1;
    coeffs[..n].iter().enumerate().map(|(i, c)| c * (n - i) as f64).collect()
}

/// All complex roots by Aberth–Ehrlich iteration.
pub fn roots_c(coeffs: &[Complex64]) -> Vec<Complex64> {
    let first = coeffs.iter().position(|c| c.norm() > 0.0).unwrap_or(coeffs.len());
    let coeffs = &coeffs[first..];
    let n = coeffs.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let lead = coeffs[0];
    let monic: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();
    let dmonic: Vec<Complex64> = monic[..n].iter().enumerate().map(|(i, c)| c * (n - i) as f64).collect();
    // Cauchy bound on the root moduli
    let radius = 1.0 + monic[1..].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(0.5 * radius, 2.0 * PI * k as f64 / n as f64 + 0.4))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let p = eval_cc(&monic, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / eval_cc(&dmonic, z[i]);
            let repulse: Complex64 = (0..n).filter(|&j| j != i).map(|j| Complex64::new(1.0, 0.0) / (z[i] - z[j])).sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * repulse);
            if w.is_finite() {
                z[i] -= w;
                moved = moved.max(w.norm() / (1.0 + z[i].norm()));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

pub fn roots(coeffs: &[f64]) -> Vec<Complex64> {
    let c: Vec<Complex64> = coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    roots_c(&c)
}

/// Roots of `x² + bx + c`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QuadRoots {
    Real { lo: f64, hi: f64 },
    Complex { re: f64, im: f64 },
}

pub fn quadratic_roots(b: f64, c: f64) -> QuadRoots {
    let disc = b * b - 4.0 * c;
    if disc < 0.0 {
        return QuadRoots::Complex { re: -b / 2.0, im: (-disc).sqrt() / 2.0 };
    }
    let sq = disc.sqrt();
    // avoid cancellation in the smaller root
    let q = -0.5 * (b + b.signum() * sq);
    let (r1, r2) = if q == 0.0 { (0.0, 0.0) } else { (q, c / q) };
    QuadRoots::Real { lo: r1.min(r2), hi: r1.max(r2) }
}

pub fn mul_i(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = vec![0i64; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Exact division by a monic divisor. Returns the quotient only when the
/// remainder vanishes.
pub fn div_exact_i(num: &[i64], den: &[i64]) -> Option<Vec<i64>> {
    assert_eq!(den[0], 1, "divisor must be monic");
    if num.len() < den.len() {
        return None;
    }
    let mut rem = num.to_vec();
    let qlen = num.len() - den.len() + 1;
    let mut q = vec![0i64; qlen];
    for i in 0..qlen {
        let f = rem[i];
        q[i] = f;
        if f != 0 {
            for (j, d) in den.iter().enumerate() {
                rem[i + j] -= f * d;
            }
        }
    }
    rem[qlen..].iter().all(|&r| r == 0).then_some(q)
}

/// The n-th cyclotomic polynomial Φₙ.
pub fn cyclotomic(n: u32) -> Vec<i64> {
    assert!(n >= 1);
    let mut p = vec![0i64; n as usize + 1];
    p[0] = 1;
    p[n as usize] = -1;
    for d in 1..n {
        if n.is_multiple_of(d) {
            p = div_exact_i(&p, &cyclotomic(d)).expect("Φ_d divides x^n - 1");
        }
    }
    p
}

/// Factors `p` into Φ₁…Φ₁₂ (with multiplicities) by trial division, up to a
/// sign of the leading coefficient. Returns `None` if anything is left over.
pub fn factor_cyclotomic(p: &[i64]) -> Option<(i64, Vec<(u32, u32)>)> {
    let sign = p[0].signum();
    if p[0].abs() != 1 {
        return None;
    }
    let mut rest: Vec<i64> = p.iter().map(|c| c * sign).collect();
    let mut out = Vec::new();
    for n in (1..=12).rev() {
        let phi = cyclotomic(n);
        let mut mult = 0;
        while rest.len() >= phi.len() {
            match div_exact_i(&rest, &phi) {
                Some(q) => {
                    rest = q;
                    mult += 1;
                }
                None => break,
            }
        }
        if mult > 0 {
            out.push((n, mult));
        }
    }
    out.sort();
    (rest == [1]).then_some((sign, out))
}

/// Rebuilds `sign · ∏ Φₙ^m`.
pub fn expand_cyclotomic(sign: i64, factors: &[(u32, u32)]) -> Vec<i64> {
    let mut p = vec![sign];
    for &(n, m) in factors {
        for _ in 0..m {
            p = mul_i(&p, &cyclotomic(n));
        }
    }
    p
}

/// Resultant via the Sylvester determinant.
pub fn resultant(p: &[f64], q: &[f64]) -> f64 {
    let m = p.len() - 1;
    let n = q.len() - 1;
    let size = m + n;
    let mut s = DMatrix::<f64>::zeros(size, size);
    for r in 0..n {
        for (j, c) in p.iter().enumerate() {
            s[(r, r + j)] = *c;
        }
    }
    for r in 0..m {
        for (j, c) in q.iter().enumerate() {
            s[(n + r, r + j)] = *c;
        }
    }
    s.determinant()
}

pub fn discriminant(p: &[f64]) -> f64 {
    let n = p.len() - 1;
    let sign = if (n * (n - 1) / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * resultant(p, &derivative(p)) / p[0]
}
