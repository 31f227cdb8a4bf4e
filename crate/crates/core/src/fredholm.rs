//! Fredholm-determinant representation of the 4a solutions.
//!
//! `q_k(t) = log det(I − K_k) − log det(I − K_{k−1})` with the integrable
//! kernel
//!
//! ```text
//! K_k(u, v) = Σ_j ω_j^k c_j e^{−t[(1−ω_j)u + (1−ω_j⁻¹)u⁻¹]} / (−ω_j u + v)
//! ```
//!
//! on `(0, ∞)`, discretised by Nyström on `u = e^σ`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::case::Case;
use crate::error::{Error, Result};
use crate::linalg::{self, cx, CMat};
use crate::poly;
use crate::stokes::StokesParams;

pub const DEFAULT_NODES: usize = 240;
/// Smallest radius accepted; the determinants degrade below it.
pub const T_MIN: f64 = 1e-3;
pub const REALITY_TOL: f64 = 1e-8;
pub const REFINEMENT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Branch {
    I,
    II,
}

/// Kernel coefficients `c₁, c₂, c₃` (`c₄ = 0`) with `λ` folded in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TWParams {
    pub c: [Complex64; 3],
}

impl TWParams {
    /// Builds the parameters from `c₁, c₂`; `c₃ = −i·c₁`.
    pub fn new(c1: Complex64, c2: Complex64) -> Self {
        Self { c: [c1, c2, cx(0.0, -1.0) * c1] }
    }

    pub fn zero() -> Self {
        Self::new(cx(0.0, 0.0), cx(0.0, 0.0))
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|c| c.norm() == 0.0)
    }
}

fn omega(j: i32) -> Complex64 {
    Case::A4.omega_pow(j as f64)
}

pub fn c_from_stokes(s: &StokesParams, branch: Branch) -> Result<TWParams> {
    if s.case != Case::A4 {
        return Err(Error::Unsupported { what: "Fredholm representation", case: s.case });
    }
    let c1 = Complex64::from_polar(s.s1 / (2.0 * PI), PI / 4.0);
    let c1 = match branch {
        Branch::I => c1,
        Branch::II => -c1,
    };
    Ok(TWParams::new(c1, cx(-s.s2 / (2.0 * PI), 0.0)))
}

pub fn kernel_value(k: i32, u: f64, v: f64, t: f64, p: &TWParams) -> Complex64 {
    let mut acc = cx(0.0, 0.0);
    for j in 1..=3 {
        let w = omega(j);
        let ex = -t * ((cx(1.0, 0.0) - w) * u + (cx(1.0, 0.0) - w.inv()) / u);
        acc += omega(j * k) * p.c[(j - 1) as usize] * ex.exp() / (-w * u + v);
    }
    acc
}

#[derive(Debug, Clone, Serialize)]
pub struct NystromGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub map: &'static str,
}

impl NystromGrid {
    /// Trapezoid on `σ ∈ [−L, L]`, `u = e^σ`, with `L = ln(60/t) + 1`.
    pub fn for_radius(t: f64, n: usize) -> Result<Self> {
        if !(t > 0.0) || n < 2 {
            return Err(Error::InvalidInput(format!("need t > 0 and n ≥ 2, got t = {t}, n = {n}")));
        }
        let half = (60.0 / t).ln().max(1.0) + 1.0;
        let h = 2.0 * half / (n - 1) as f64;
        let nodes: Vec<f64> = (0..n).map(|i| (-half + i as f64 * h).exp()).collect();
        let weights = nodes.iter().map(|u| h * u).collect();
        Ok(Self { nodes, weights, map: "u = exp(sigma), trapezoid on [-L, L]" })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

fn nystrom_matrix(k: i32, t: f64, p: &TWParams, g: &NystromGrid) -> CMat {
    let n = g.len();
    let sw: Vec<f64> = g.weights.iter().map(|w| w.sqrt()).collect();
    let rows: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|a| {
            (0..n)
                .map(|b| {
                    let m = sw[a] * sw[b] * kernel_value(k, g.nodes[a], g.nodes[b], t, p);
                    if a == b { cx(1.0, 0.0) - m } else { -m }
                })
                .collect()
        })
        .collect();
    CMat::from_fn(n, n, |a, b| rows[a][b])
}

fn log_det_checked(m: CMat, k: usize) -> Result<Complex64> {
    if linalg::min_pivot(&m) < 1e-13 {
        return Err(Error::DeterminantNearZero { k });
    }
    Ok(linalg::log_det(&m))
}

#[derive(Debug, Clone, Serialize)]
pub struct FredholmResult {
    pub t: f64,
    /// Real parts of `q₁ … q₄`.
    pub q: [f64; 4],
    pub node_count: usize,
    pub max_imag: f64,
    /// `|q₁ + q₂|`, `|q₃ + q₄|`.
    pub antisymmetry: [f64; 2],
    /// Change under node doubling, when requested.
    pub refinement: Option<f64>,
}

/// `q₁ … q₄` at radius `t` on the given grid.
pub fn fredholm_q(t: f64, p: &TWParams, grid: &NystromGrid) -> Result<FredholmResult> {
    if t < T_MIN {
        return Err(Error::InvalidInput(format!("t = {t} below the supported range t ≥ {T_MIN}")));
    }
    let mut ld = [cx(0.0, 0.0); 5];
    if !p.is_zero() {
        // K₄ = K₀, so only four determinants are needed
        for (k, slot) in ld.iter_mut().take(4).enumerate() {
            *slot = log_det_checked(nystrom_matrix(k as i32, t, p, grid), k)?;
        }
        ld[4] = ld[0];
    }
    let mut q = [cx(0.0, 0.0); 4];
    for k in 1..=4 {
        let d = ld[k] - ld[k - 1];
        // log det branches differ by 2πi
        let im = d.im - 2.0 * PI * (d.im / (2.0 * PI)).round();
        q[k - 1] = cx(d.re, im);
    }
    let max_imag = q.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let res = FredholmResult {
        t,
        q: [q[0].re, q[1].re, q[2].re, q[3].re],
        node_count: grid.len(),
        max_imag,
        antisymmetry: [(q[0] + q[1]).norm(), (q[2] + q[3]).norm()],
        refinement: None,
    };
    if max_imag > REALITY_TOL {
        return Err(Error::InvalidInput(format!("q has imaginary part {max_imag:.3e}; parameters not real")));
    }
    Ok(res)
}

/// [`fredholm_q`] with a node-doubling check.
pub fn fredholm_q_refined(t: f64, p: &TWParams, n: usize) -> Result<FredholmResult> {
    let coarse = fredholm_q(t, p, &NystromGrid::for_radius(t, n)?)?;
    let fine = fredholm_q(t, p, &NystromGrid::for_radius(t, 2 * n)?)?;
    let change = coarse.q.iter().zip(&fine.q).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    if change > REFINEMENT_TOL {
        return Err(Error::GridInsufficient { change });
    }
    Ok(FredholmResult { refinement: Some(change), ..coarse })
}

fn alpha_poly(p: &TWParams, lambda: Complex64) -> Vec<Complex64> {
    // y⁴ + 2πiλ Σ c_j ω_j⁻¹ y^j − 1 in y = z², leading first
    let f = cx(0.0, 2.0 * PI) * lambda;
    vec![
        cx(1.0, 0.0),
        f * p.c[2] * omega(-3),
        f * p.c[1] * omega(-2),
        f * p.c[0] * omega(-1),
        cx(-1.0, 0.0),
    ]
}

/// `α₁ … α₄` with `y_k = e^{πiα_k/2}` the roots of the `α`-polynomial.
///
/// The roots are first tracked from `y_k = i^k` along `λ ∈ [0, 1]`, bending
/// into the complex `λ` plane when two roots collide. The result must be
/// ordered, paired (`α₁ + α₂ = 3`, `α₃ + α₄ = 7`) and span at most 4. When
/// the continuation leaves that set, the unique admissible lift of the
/// final root phases is returned instead.
pub fn alpha_from_params(p: &TWParams) -> Result<[f64; 4]> {
    for bend in [0.0, 0.5, -0.5] {
        if let Ok(mut alpha) = track_alpha(p, bend) {
            alpha.sort_by(f64::total_cmp);
            if admissible(&alpha) {
                return Ok(alpha);
            }
        }
    }
    let phases: Vec<f64> =
        poly::roots_c(&alpha_poly(p, cx(1.0, 0.0))).iter().map(|y| (y.arg() * 2.0 / PI).rem_euclid(4.0)).collect();
    let mut found: Vec<[f64; 4]> = Vec::new();
    for code in 0..4usize.pow(4) {
        let mut alpha: [f64; 4] = std::array::from_fn(|k| phases[k] + 4.0 * ((code / 4usize.pow(k as u32)) % 4) as f64 - 4.0);
        alpha.sort_by(f64::total_cmp);
        if admissible(&alpha) && !found.iter().any(|f| f.iter().zip(&alpha).all(|(a, b)| (a - b).abs() < 1e-8)) {
            found.push(alpha);
        }
    }
    match found.as_slice() {
        [alpha] => Ok(*alpha),
        _ => Err(Error::PathObstruction { lambda: 1.0 }),
    }
}

fn admissible(alpha: &[f64; 4]) -> bool {
    let ordered = alpha.windows(2).all(|w| w[1] - w[0] > 1e-9);
    let paired = (alpha[0] + alpha[1] - 3.0).abs() < 1e-8 && (alpha[2] + alpha[3] - 7.0).abs() < 1e-8;
    ordered && paired && alpha[3] - alpha[0] <= 4.0 + 1e-9
}

/// Root tracking along `λ(τ) = τ + i·bend·τ(1 − τ)`.
fn track_alpha(p: &TWParams, bend: f64) -> Result<[f64; 4]> {
    let mut y: [Complex64; 4] = std::array::from_fn(|k| omega(k as i32 + 1));
    let mut alpha = [1.0, 2.0, 3.0, 4.0];
    let mut lam = 0.0f64;
    let mut h = 1.0 / 64.0;
    while lam < 1.0 {
        let next = (lam + h).min(1.0);
        let roots = poly::roots_c(&alpha_poly(p, cx(next, bend * next * (1.0 - next))));
        let mut matched = [cx(0.0, 0.0); 4];
        let mut ambiguous = false;
        let mut used = [false; 4];
        for k in 0..4 {
            let mut d: Vec<(f64, usize)> = roots.iter().enumerate().map(|(i, r)| ((r - y[k]).norm(), i)).collect();
            d.sort_by(|a, b| a.0.total_cmp(&b.0));
            // nearest root must be unclaimed and clearly nearer than the runner-up
            if used[d[0].1] || d[0].0 > 0.5 * d[1].0 {
                ambiguous = true;
                break;
            }
            used[d[0].1] = true;
            matched[k] = roots[d[0].1];
        }
        if ambiguous {
            h *= 0.5;
            if h < 1e-8 {
                return Err(Error::PathObstruction { lambda: lam });
            }
            continue;
        }
        for k in 0..4 {
            alpha[k] += (matched[k] / y[k]).arg() * 2.0 / PI;
        }
        y = matched;
        lam = next;
        h = (2.0 * h).min(1.0 / 64.0);
    }
    Ok(alpha)
}

/// `γ₀ = 2(α₂ − 2)`, `γ₁ = 2(α₃ − 3)` (branch I).
pub fn gammas_from_alpha(alpha: &[f64; 4]) -> (f64, f64) {
    (2.0 * (alpha[1] - 2.0), 2.0 * (alpha[2] - 3.0))
}

#[derive(Debug, Clone, Serialize)]
pub struct SmallTSlope {
    pub t: f64,
    /// `d q_k / d ln t`, by a one-sided difference over a factor `1.1`.
    pub slope: [f64; 4],
    pub target: [f64; 4],
    pub relative_error: [f64; 4],
}

/// Compares the small-`t` logarithmic slope of `q_k` with `2(α_k − k)`.
pub fn small_t_slope(p: &TWParams, t: f64, n: usize) -> Result<SmallTSlope> {
    let alpha = alpha_from_params(p)?;
    let a = fredholm_q(t, p, &NystromGrid::for_radius(t, n)?)?;
    let t2 = 1.1 * t;
    let b = fredholm_q(t2, p, &NystromGrid::for_radius(t2, n)?)?;
    let slope: [f64; 4] = std::array::from_fn(|k| (b.q[k] - a.q[k]) / 1.1f64.ln());
    let target: [f64; 4] = std::array::from_fn(|k| 2.0 * (alpha[k] - (k + 1) as f64));
    let relative_error = std::array::from_fn(|k| (slope[k] - target[k]).abs() / target[k].abs().max(1e-2));
    Ok(SmallTSlope { t, slope, target, relative_error })
}
