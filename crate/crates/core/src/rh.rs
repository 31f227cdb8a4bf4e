//! Riemann–Hilbert side of the 4a problem: jump matrices on the rotated
//! contour and on `Γ₃`, the leading-order `Y(0, x)` and the positivity
//! criterion for solvability.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use serde::Serialize;

use crate::case::Case;
use crate::error::{Error, Result};
use crate::linalg::{self, cx, eye, inv, CMat};
use crate::quad;
use crate::stokes::{const_matrix, q_matrix, MatrixName, StokesParams};

const ANGLE_TOL: f64 = 1e-9;

fn w(p: f64) -> Complex64 {
    Case::A4.omega_pow(p)
}

fn require_4a(s: &StokesParams, what: &'static str) -> Result<()> {
    if s.case == Case::A4 { Ok(()) } else { Err(Error::Unsupported { what, case: s.case }) }
}

/// `φ(x) = (1/2π) ∫₀^∞ e^{−x(l+1/l)} dl/l`.
pub fn phi(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::InvalidInput(format!("phi needs x > 0, got {x}")));
    }
    Ok(quad::phi(x))
}

#[derive(Debug, Clone, Serialize)]
pub struct JumpEval {
    pub ray_angle: f64,
    pub zeta_modulus: f64,
    #[serde(skip)]
    pub matrix: CMat,
    /// Residual against the independent construction, where one exists.
    pub cross_check: Option<f64>,
}

/// `e(ζ, x) = exp(x²ζ d₄ + ζ⁻¹ d₄⁻¹)` (diagonal).
pub fn e_factor(zeta: Complex64, x: f64) -> CMat {
    let mut m = eye(4);
    for j in 0..4 {
        let d = w(j as f64);
        m[(j, j)] = (x * x * zeta * d + d.inv() / zeta).exp();
    }
    m
}

/// Conjugation `e Ξ e⁻¹`, entrywise to avoid overflowing `e` itself.
fn conjugate_by_e(xi: &CMat, zeta: Complex64, x: f64) -> CMat {
    let ex: Vec<Complex64> = (0..4).map(|j| x * x * zeta * w(j as f64) + w(-(j as f64)) / zeta).collect();
    CMat::from_fn(4, 4, |i, j| {
        if xi[(i, j)] == cx(0.0, 0.0) {
            xi[(i, j)]
        } else {
            xi[(i, j)] * (ex[i] - ex[j]).exp()
        }
    })
}

/// Rays of `Γ₂′` as multiples of `π/4`, with the step of the Stokes
/// factor on each and whether it enters inverted (inward orientation).
const G2_RAYS: [(i32, i64, bool); 8] = [
    (-1, 10, true),
    (0, 11, false),
    (1, 4, false),
    (2, 5, false),
    (3, 6, false),
    (4, 7, true),
    (5, 8, true),
    (6, 9, true),
];

fn reduce_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(2.0 * PI);
    if t > 7.0 * PI / 4.0 + ANGLE_TOL { t - 2.0 * PI } else if t > 7.0 * PI / 4.0 - ANGLE_TOL { -PI / 4.0 } else { t }
}

fn g2_ray(theta: f64) -> Result<(i32, i64, bool)> {
    let t = reduce_angle(theta);
    G2_RAYS
        .iter()
        .copied()
        .find(|(m, _, _)| (t - *m as f64 * PI / 4.0).abs() < ANGLE_TOL)
        .ok_or(Error::NotOnContour { theta })
}

/// Angles of the eight rays of `Γ₂′`.
pub fn g2_ray_angles() -> [f64; 8] {
    std::array::from_fn(|i| G2_RAYS[i].0 as f64 * PI / 4.0)
}

/// `Ξ₂′` on the ray at angle `theta`.
fn g2_xi(theta: f64, s: &StokesParams) -> Result<CMat> {
    let (_, step, inverted) = g2_ray(theta)?;
    let q = q_matrix(step, s);
    Ok(if inverted { inv(&q) } else { q })
}

/// Jump of the rotated problem at `ζ = k e^{iθ}`. The off-diagonal
/// entries are `Ξ_ij e^{−√2x(l+1/l)}` (odd `i−j`) or `Ξ_ij e^{−2x(l+1/l)}`
/// (even) with `l = xk`; `cross_check` compares with that closed form.
pub fn jump_g2(theta: f64, k: f64, x: f64, s: &StokesParams) -> Result<JumpEval> {
    require_4a(s, "jump matrices")?;
    if !(k > 0.0 && x > 0.0) {
        return Err(Error::InvalidInput("jump_g2 needs k > 0 and x > 0".into()));
    }
    let xi = g2_xi(theta, s)?;
    let zeta = Complex64::from_polar(k, reduce_angle(theta));
    let matrix = conjugate_by_e(&xi, zeta, x);
    let l = x * k;
    let damp = |i: usize, j: usize| {
        let c = if (i + 4 - j) % 2 == 1 { SQRT_2 } else { 2.0 };
        (-c * x * (l + 1.0 / l)).exp()
    };
    let closed = CMat::from_fn(4, 4, |i, j| if i == j { xi[(i, j)] } else { xi[(i, j)] * damp(i, j) });
    Ok(JumpEval { ray_angle: theta, zeta_modulus: k, cross_check: Some(linalg::max_diff(&matrix, &closed)), matrix })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum G3Ray {
    /// `θ = π/8`.
    Pi8,
    /// `θ = 9π/8`.
    NinePi8,
}

impl G3Ray {
    pub fn angle(self) -> f64 {
        match self {
            G3Ray::Pi8 => PI / 8.0,
            G3Ray::NinePi8 => 9.0 * PI / 8.0,
        }
    }

    pub fn from_angle(theta: f64) -> Result<Self> {
        let t = theta.rem_euclid(2.0 * PI);
        if (t - PI / 8.0).abs() < ANGLE_TOL {
            Ok(G3Ray::Pi8)
        } else if (t - 9.0 * PI / 8.0).abs() < ANGLE_TOL {
            Ok(G3Ray::NinePi8)
        } else {
            Err(Error::NotOnContour { theta })
        }
    }
}

/// `exp(c(e^{iα}/k + x²k e^{−iα}))`, `α = m·π/8`.
fn damping(c: f64, m: f64, k: f64, x: f64) -> Complex64 {
    let a = Complex64::from_polar(1.0, m * PI / 8.0);
    (c * (a / k + x * x * k * a.conj())).exp()
}

/// `f₁ … f₄` of the `9π/8` ray.
pub fn f_factors(k: f64, x: f64) -> [Complex64; 4] {
    [
        damping(SQRT_2, -7.0, k, x),
        damping(2.0, -9.0, k, x),
        damping(SQRT_2, -11.0, k, x),
        damping(2.0, -5.0, k, x),
    ]
}

/// `g₁ … g₄` of the `π/8` ray.
pub fn g_factors(k: f64, x: f64) -> [Complex64; 4] {
    [
        damping(SQRT_2, 9.0, k, x),
        damping(2.0, 7.0, k, x),
        damping(SQRT_2, 5.0, k, x),
        damping(2.0, -5.0, k, x),
    ]
}

/// Product of Stokes factors whose conjugate by `e` is the `Γ₃` jump.
fn g3_xi(ray: G3Ray, s: &StokesParams) -> CMat {
    match ray {
        G3Ray::NinePi8 => q_matrix(6, s) * q_matrix(7, s) * q_matrix(8, s) * q_matrix(9, s),
        G3Ray::Pi8 => inv(&(q_matrix(2, s) * q_matrix(3, s) * q_matrix(4, s) * q_matrix(5, s))),
    }
}

/// The displayed triangular form of the `Γ₃` jump.
pub fn g3_explicit(ray: G3Ray, k: f64, x: f64, s: &StokesParams) -> CMat {
    let (s1, s2) = (s.s1, s.s2);
    let mut m = eye(4);
    match ray {
        G3Ray::NinePi8 => {
            let f = f_factors(k, x);
            m[(0, 1)] = w(0.5) * (s1 + s1 * s2) * f[0];
            m[(0, 2)] = w(3.0) * (s1 * s1 + s2) * f[1];
            m[(0, 3)] = w(1.5) * s1 * f[2];
            m[(1, 2)] = w(0.5) * s1 * f[2];
            m[(3, 1)] = w(3.0) * s2 * f[3];
            m[(3, 2)] = w(1.5) * s1 * f[0];
        }
        G3Ray::Pi8 => {
            let g = g_factors(k, x);
            m[(1, 0)] = w(-0.5) * (s1 + s1 * s2) * g[0];
            m[(1, 3)] = w(1.0) * s2 * g[3];
            m[(2, 0)] = w(1.0) * (s1 * s1 + s2) * g[1];
            m[(2, 1)] = w(-0.5) * s1 * g[2];
            m[(2, 3)] = w(-1.5) * s1 * g[0];
            m[(3, 0)] = w(-1.5) * s1 * g[2];
        }
    }
    m
}

/// `Γ₃` jump from the displayed form; `cross_check` is the distance to
/// `e·Ξ·e⁻¹` built from the Stokes factors, together with `max|gᵢ − fᵢ|`.
pub fn jump_g3(ray: G3Ray, k: f64, x: f64, s: &StokesParams) -> Result<JumpEval> {
    require_4a(s, "jump matrices")?;
    if !(k > 0.0 && x >= 0.0) {
        return Err(Error::InvalidInput("jump_g3 needs k > 0 and x ≥ 0".into()));
    }
    let matrix = g3_explicit(ray, k, x, s);
    let zeta = Complex64::from_polar(k, ray.angle());
    let via_q = conjugate_by_e(&g3_xi(ray, s), zeta, x);
    let (f, g) = (f_factors(k, x), g_factors(k, x));
    let fg = f.iter().zip(&g).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    let residual = linalg::max_diff(&matrix, &via_q).max(fg);
    Ok(JumpEval { ray_angle: ray.angle(), zeta_modulus: k, matrix, cross_check: Some(residual) })
}

#[derive(Debug, Clone, Serialize)]
pub struct Y0Leading {
    pub x: f64,
    /// First row `t₀ … t₃`; the matrix is the circulant it generates.
    #[serde(skip)]
    pub row: [Complex64; 4],
    pub a: f64,
    pub b: f64,
    /// Set when `e^{−4√2x}` is not small against the leading amplitudes.
    pub warn_truncation: bool,
}

impl Y0Leading {
    pub fn matrix(&self) -> CMat {
        CMat::from_fn(4, 4, |i, j| self.row[(j + 4 - i) % 4])
    }
}

/// Leading-order `Y(0, x)` from the rotated contour integral.
pub fn y0_leading(s: &StokesParams, x: f64) -> Result<Y0Leading> {
    require_4a(s, "leading-order Y(0)")?;
    let (p1, p2) = (phi(SQRT_2 * x)?, phi(2.0 * x)?);
    let (s1, s2) = (s.s1, s.s2);
    let row = [cx(1.0, 0.0), w(-0.5) * s1 * p1, cx(-s2 * p2, 0.0), w(0.5) * s1 * p1];
    // eigenvalues of the circulant on the Fourier vectors (1,1,1,1), (1,i,−1,−i)
    let ea = row[0] + row[1] + row[2] + row[3];
    let i = cx(0.0, 1.0);
    let eb = row[0] + i * row[1] - row[2] - i * row[3];
    if ea.im.abs() > 1e-12 || eb.im.abs() > 1e-12 {
        return Err(Error::InvalidInput(format!("Y(0) eigenvalues not real: {ea}, {eb}")));
    }
    let (a, b) = (ea.re, eb.re);
    if a <= 0.0 || b <= 0.0 {
        return Err(Error::NonPositiveEigenvalue { a, b });
    }
    let amplitudes = [(s1 * p1).abs(), (s2 * p2).abs()];
    let min_amp = amplitudes.iter().copied().filter(|v| *v > 0.0).fold(f64::INFINITY, f64::min);
    let warn_truncation = min_amp.is_finite() && (-4.0 * SQRT_2 * x).exp() >= 0.01 * min_amp;
    Ok(Y0Leading { x, row, a, b, warn_truncation })
}

/// `w₀ = −½ ln a`, `w₁ = −½ ln b`.
pub fn w_from_y0(y: &Y0Leading) -> Result<(f64, f64)> {
    if y.a <= 0.0 || y.b <= 0.0 {
        return Err(Error::NonPositiveEigenvalue { a: y.a, b: y.b });
    }
    Ok((-0.5 * y.a.ln(), -0.5 * y.b.ln()))
}

/// `Y(0)` as `I + (1/2πi) ∫ (G₂′ − I) dζ/ζ` over `Γ₂′` by quadrature,
/// an independent check on [`y0_leading`].
pub fn y0_from_contour(s: &StokesParams, x: f64) -> Result<CMat> {
    require_4a(s, "leading-order Y(0)")?;
    let mut acc = CMat::zeros(4, 4);
    for (m, _, inverted) in G2_RAYS {
        let theta = m as f64 * PI / 4.0;
        let orient = if inverted { -1.0 } else { 1.0 };
        for i in 0..4 {
            for j in 0..4 {
                if i == j {
                    continue;
                }
                // integrand in σ = ln k, dζ/ζ = dσ along the ray
                let entry = |sig: f64| -> Complex64 {
                    let k = sig.exp();
                    match jump_g2(theta, k, x, s) {
                        Ok(g) => g.matrix[(i, j)],
                        Err(_) => cx(0.0, 0.0),
                    }
                };
                if entry(-(x.ln())).norm() == 0.0 {
                    continue;
                }
                let re = quad::real_line(|t| entry(t).re, 1e-14);
                let im = quad::real_line(|t| entry(t).im, 1e-14);
                acc[(i, j)] += cx(re, im) * orient;
            }
        }
    }
    Ok(eye(4) + acc / cx(0.0, 2.0 * PI))
}

#[derive(Debug, Clone, Serialize)]
pub struct YSymmetry {
    /// Exact by construction.
    pub circulant: f64,
    pub commutes_with_pi: f64,
    pub reality: f64,
    /// `d₄⁻¹ Y^{−t} d₄ = Y` and `det Y = 1` hold only up to the
    /// truncation order of the leading-order formula.
    pub inverse_transpose: f64,
    pub det: f64,
    /// `(1 + |s₁| + |s₂|)² e^{−4√2x}`.
    pub truncation_floor: f64,
}

impl YSymmetry {
    pub fn max_exact(&self) -> f64 {
        self.circulant.max(self.commutes_with_pi).max(self.reality)
    }

    pub fn within_floor(&self) -> bool {
        self.inverse_transpose <= self.truncation_floor && self.det <= self.truncation_floor
    }
}

/// Residuals of the structural identities of the leading-order `Y(0)`.
pub fn y0_symmetries(y: &Y0Leading, s: &StokesParams) -> YSymmetry {
    let m = y.matrix();
    let pi = const_matrix(MatrixName::Pi, Case::A4);
    let d = const_matrix(MatrixName::D, Case::A4);
    let c = const_matrix(MatrixName::C, Case::A4);
    let circ = CMat::from_fn(4, 4, |i, j| m[(i, j)] - m[(0, (j + 4 - i) % 4)]);
    YSymmetry {
        circulant: linalg::max_abs(&circ),
        commutes_with_pi: linalg::max_diff(&(&pi * &m), &(&m * &pi)),
        reality: linalg::max_diff(&(&c * linalg::conj(&m) * &c), &m),
        inverse_transpose: linalg::max_diff(&(inv(&d) * linalg::inv_t(&m) * &d), &m),
        det: (linalg::det(&m) - cx(1.0, 0.0)).norm(),
        truncation_floor: (1.0 + s.s1.abs() + s.s2.abs()).powi(2) * (-4.0 * SQRT_2 * y.x).exp(),
    }
}

/// Closed-form worst-case (`l = 1`) values of `X₂, X₃, X₄` at radius `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Positivity {
    pub x: f64,
    pub x2: f64,
    pub x3: f64,
    pub x4: f64,
}

impl Positivity {
    pub fn holds(&self, tol: f64) -> bool {
        self.x2 > -tol && self.x3 > -tol && self.x4 > -tol
    }

    pub fn strict(&self) -> bool {
        self.x2 > 0.0 && self.x3 > 0.0 && self.x4 > 0.0
    }

    pub fn min(&self) -> f64 {
        self.x2.min(self.x3).min(self.x4)
    }
}

/// `X₂, X₃, X₄` from the squared moduli `|g₁|², |g₂|², |g₃|², |g₄|²`.
pub fn x_minors_from_moduli(s: &StokesParams, g: [f64; 4]) -> [f64; 3] {
    let (s1, s2) = (s.s1, s.s2);
    let [g1, g2, g3, g4] = g;
    let (a2, b2) = (s1 * s1, s2 * s2);
    let x2 = 4.0 - g1 * a2;
    let x3 = 8.0 - 2.0 * a2 * s2 * g1 - 2.0 * a2 * (g1 + g3) - 2.0 * b2 * g4;
    let x4 = 16.0 - 8.0 * a2 * (g1 + g3) - 8.0 * a2 * s2 * (g1 + g2) - 4.0 * b2 * (g2 + g4)
        - 2.0 * a2 * b2 * (g2 + g1 * g1)
        + a2 * a2 * (g1 * g1 + g3 * g3 - 2.0 * g2)
        + b2 * b2 * g1 * g1;
    [x2, x3, x4]
}

/// `|gᵢ|²` at `l = xk`.
pub fn g_moduli(x: f64, l: f64) -> [f64; 4] {
    let r = x * (l + 1.0 / l);
    let (c, sn) = ((PI / 8.0).cos(), (PI / 8.0).sin());
    [
        (-2.0 * SQRT_2 * r * c).exp(),
        (-4.0 * r * c).exp(),
        (-2.0 * SQRT_2 * r * sn).exp(),
        (-4.0 * r * sn).exp(),
    ]
}

/// Worst case `l + 1/l = 2`, written in `c = e^{−4x cos π/8}`, `s = e^{−4x sin π/8}`.
pub fn positivity_x(s: &StokesParams, x: f64) -> Result<Positivity> {
    require_4a(s, "positivity criterion")?;
    if !(x >= 0.0) {
        return Err(Error::InvalidInput(format!("x must be ≥ 0, got {x}")));
    }
    let c = (-4.0 * x * (PI / 8.0).cos()).exp();
    let sn = (-4.0 * x * (PI / 8.0).sin()).exp();
    let (a2, b2) = (s.s1 * s.s1, s.s2 * s.s2);
    let s2 = s.s2;
    let x2 = 4.0 - c * sn * a2;
    let x3 = 8.0 - 2.0 * (c * sn + c / sn) * a2 - 2.0 * sn * sn * b2 - 2.0 * c * sn * a2 * s2;
    let x4 = 16.0 - 8.0 * (c * sn + c / sn) * a2 - 4.0 * (c * c + sn * sn) * b2 - 8.0 * (c * sn + c * c) * a2 * s2
        + (c * c / (sn * sn) + c * c * sn * sn - 2.0 * c * c) * a2 * a2
        - 2.0 * (c * c + c * c * sn * sn) * a2 * b2
        + c * c * sn * sn * b2 * b2;
    Ok(Positivity { x, x2, x3, x4 })
}

/// Factored values of `X₂, X₃, X₄` at `x = 0`.
pub fn positivity_factored_at_zero(s: &StokesParams) -> [f64; 3] {
    let (s1, s2) = (s.s1, s.s2);
    [
        (2.0 - s1) * (2.0 + s1),
        2.0 * (2.0 + s2) * (2.0 - s1 * s1 - s2),
        (2.0 + s2).powi(2) * (2.0 + 2.0 * s1 - s2) * (2.0 - 2.0 * s1 - s2),
    ]
}

/// Leading principal minors `X₂, X₃, X₄` of `G₃ + G₃ᴴ` on the `π/8` ray,
/// taken from the bottom-right corner.
pub fn x_minors_from_jump(s: &StokesParams, x: f64, k: f64) -> Result<[f64; 3]> {
    let g = jump_g3(G3Ray::Pi8, k, x, s)?.matrix;
    let xm = &g + g.adjoint();
    Ok(std::array::from_fn(|i| {
        let size = i + 2;
        let start = 4 - size;
        linalg::det(&xm.view((start, start), (size, size)).into_owned()).re
    }))
}

pub const THRESHOLD_TOL: f64 = 1e-6;
const ZERO_TOL: f64 = 1e-12;

/// Infimum of the radii `x*` with all three conditions holding on `[x*, ∞)`.
/// Zero exactly on the closure of region (b).
pub fn solvable_from(s: &StokesParams) -> Result<f64> {
    require_4a(s, "positivity criterion")?;
    if !(s.s1.is_finite() && s.s2.is_finite()) {
        return Err(Error::InvalidInput("Stokes parameters must be finite".into()));
    }
    let scale = 1.0 + s.s1.abs().powi(4) + s.s2.abs().powi(4);
    let ok = |x: f64| positivity_x(s, x).map(|p| p.strict());
    if positivity_x(s, 0.0)?.holds(ZERO_TOL * scale) {
        return Ok(0.0);
    }
    let mut lo = 0.0;
    let mut hi = 0.125;
    while !ok(hi)? {
        lo = hi;
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::NoThreshold);
        }
    }
    while hi - lo > THRESHOLD_TOL {
        let mid = 0.5 * (lo + hi);
        if ok(mid)? { hi = mid } else { lo = mid }
    }
    Ok(hi)
}
