//! Asymptotic data ↔ Stokes data, and the two parameter regions.
//!
//! Region (a) (global smoothness) is decided by the reduced quadratic
//! `P(x)` obtained from the palindromic quartic factor of `p(μ)` through
//! `x = μ + 1/μ`: both roots must be real and lie in `[−2, 2]`. Region (b)
//! (positivity of `S + Sᵗ`) is the open set where the roots
//! `e^{±iθ₁}, e^{±iθ₂}` interlace with three fixed roots of unity.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::case::Case;
use crate::error::{Error, Result};
use crate::linalg;
use crate::poly::{self, QuadRoots};
use crate::stokes::{self, StokesParams};

/// Boundary tolerance for the strict and non-strict inequalities.
pub const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticData {
    pub gamma0: f64,
    pub gamma1: f64,
    pub case: Case,
}

impl AsymptoticData {
    pub fn new(gamma0: f64, gamma1: f64, case: Case) -> Self {
        Self { gamma0, gamma1, case }
    }

    /// Whether `γ` lies in the closed fundamental domain of the case.
    pub fn in_domain(&self) -> bool {
        let (lo0, hi1) = match self.case {
            Case::A4 => (-1.0, 1.0),
            Case::A5 => (-1.0, 2.0),
            Case::A6 => (-2.0, 2.0),
        };
        let t = 1e-12;
        self.gamma0 >= lo0 - t && self.gamma1 <= hi1 + t && self.gamma0 - self.gamma1 <= 2.0 + t
    }

    /// Distance to the boundary of the fundamental domain, in units of the
    /// exponents `2γ₀+2, 2 − (γ₀−γ₁), 2 − 2γ₁` (4a scaling).
    pub fn margin(&self) -> f64 {
        let (lo0, hi1) = match self.case {
            Case::A4 => (-1.0, 1.0),
            Case::A5 => (-1.0, 2.0),
            Case::A6 => (-2.0, 2.0),
        };
        (2.0 * (self.gamma0 - lo0)).min(2.0 - (self.gamma0 - self.gamma1)).min(2.0 * (hi1 - self.gamma1))
    }
}

/// `P(x) = x² + bx + c`, returned as `(b, c)`.
pub fn reduced_quadratic(s: &StokesParams) -> (f64, f64) {
    let (s1, s2) = (s.s1, s.s2);
    match s.case {
        Case::A4 => (s1, -(2.0 + s2)),
        Case::A5 => (1.0 - s1, -(1.0 + s1 + s2)),
        Case::A6 => (s1, -(1.0 + s2)),
    }
}

pub fn eval_p(s: &StokesParams, x: f64) -> f64 {
    let (b, c) = reduced_quadratic(s);
    x * x + b * x + c
}

/// Angles of the roots of unity the interlacing refers to, increasing.
pub fn interlace_angles(case: Case) -> [f64; 3] {
    match case {
        Case::A4 => [0.0, PI / 2.0, PI],
        Case::A5 => [PI / 5.0, 3.0 * PI / 5.0, PI],
        Case::A6 => [PI / 6.0, PI / 2.0, 5.0 * PI / 6.0],
    }
}

/// The boundary inequalities of region (a), `disc P ≥ 0, P(2) ≥ 0, P(−2) ≥ 0`.
pub fn a_inequalities(s: &StokesParams) -> [f64; 3] {
    let (s1, s2) = (s.s1, s.s2);
    match s.case {
        Case::A4 => [s1 * s1 + 4.0 * s2 + 8.0, 2.0 + 2.0 * s1 - s2, 2.0 - 2.0 * s1 - s2],
        Case::A5 => [s1 * s1 + 2.0 * s1 + 4.0 * s2 + 5.0, 5.0 - 3.0 * s1 - s2, 1.0 + s1 - s2],
        Case::A6 => [s1 * s1 + 4.0 * s2 + 4.0, 3.0 - 2.0 * s1 - s2, 3.0 + 2.0 * s1 - s2],
    }
}

/// The strict region-(b) inequalities.
pub fn b_inequalities(s: &StokesParams) -> [f64; 3] {
    let (s1, s2) = (s.s1, s.s2);
    let r5 = 5f64.sqrt();
    let r3 = 3f64.sqrt();
    match s.case {
        Case::A4 => [2.0 + s2, 2.0 + 2.0 * s1 - s2, 2.0 - 2.0 * s1 - s2],
        Case::A5 => [
            2.0 + 0.5 * (-1.0 - r5) * s1 + 0.5 * (1.0 - r5) * s2,
            2.0 + 0.5 * (-1.0 + r5) * s1 + 0.5 * (1.0 + r5) * s2,
            2.0 + 2.0 * s1 - 2.0 * s2,
        ],
        Case::A6 => [2.0 + r3 * s1 - s2, 2.0 + 2.0 * s2, 2.0 - r3 * s1 - s2],
    }
}

/// `P(2cos φ)` at the three interlacing angles; region (b) needs the
/// signs `(+, −, +)`.
pub fn root_of_unity_values(s: &StokesParams) -> [f64; 3] {
    interlace_angles(s.case).map(|a| eval_p(s, 2.0 * a.cos()))
}

/// The three characterisations of region (b) evaluated separately.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BChecks {
    pub inequalities: bool,
    pub root_of_unity_signs: bool,
    pub interlacing: bool,
    pub positive_definite: bool,
}

impl BChecks {
    pub fn agree(&self) -> bool {
        let v = self.inequalities;
        self.root_of_unity_signs == v && self.interlacing == v && self.positive_definite == v
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionVerdict {
    pub s1: f64,
    pub s2: f64,
    pub case: Case,
    pub in_a: bool,
    pub in_b: bool,
    pub quadratic_roots: QuadRoots,
    /// `(θ₁, θ₂)` with `0 ≤ θ₁ ≤ θ₂ ≤ π`, present iff `in_a`.
    pub thetas: Option<(f64, f64)>,
    /// Whether the region-(a) inequalities give the same answer.
    pub a_inequalities_agree: bool,
    pub b_checks: BChecks,
    pub witness: String,
}

fn scale(s: &StokesParams) -> f64 {
    1.0 + s.s1.abs() + s.s2.abs()
}

fn roots_in_interval(s: &StokesParams) -> (QuadRoots, Option<(f64, f64)>, String) {
    let (b, c) = reduced_quadratic(s);
    let tol = BOUNDARY_TOL * scale(s);
    let disc = b * b - 4.0 * c;
    // near-zero negative discriminant is a double root
    let roots = if disc < 0.0 && disc >= -tol * scale(s) {
        QuadRoots::Real { lo: -b / 2.0, hi: -b / 2.0 }
    } else {
        poly::quadratic_roots(b, c)
    };
    match roots {
        QuadRoots::Complex { .. } => (roots, None, "P has complex roots".to_string()),
        QuadRoots::Real { lo, hi } => {
            if lo < -2.0 - tol {
                (roots, None, format!("root {lo:.6} of P lies below -2"))
            } else if hi > 2.0 + tol {
                (roots, None, format!("root {hi:.6} of P lies above 2"))
            } else {
                let t1 = (hi / 2.0).clamp(-1.0, 1.0).acos();
                let t2 = (lo / 2.0).clamp(-1.0, 1.0).acos();
                (roots, Some((t1, t2)), "both roots of P lie in [-2, 2]".to_string())
            }
        }
    }
}

/// Strict interlacing in cosine space: with angles `a₀ < a₁ < a₂`,
/// `a₀ < θ₁ < a₁ < θ₂ < a₂`.
fn interlaces(case: Case, roots: &QuadRoots, tol: f64) -> bool {
    let QuadRoots::Real { lo, hi } = *roots else { return false };
    let [a0, a1, a2] = interlace_angles(case).map(|a| 2.0 * a.cos());
    hi < a0 - tol && hi > a1 + tol && lo < a1 - tol && lo > a2 + tol
}

fn positive_definite(s: &StokesParams) -> bool {
    let sm = linalg::real_part(&stokes::stokes_matrix(s));
    let sym = &sm + sm.transpose();
    let norm = sym.iter().map(|v| v.abs()).fold(0.0, f64::max);
    linalg::min_sym_eigenvalue(&sym) > BOUNDARY_TOL * norm.max(1.0)
}

/// Classifies `s` into regions (a) and (b).
pub fn classify(s: &StokesParams) -> RegionVerdict {
    let tol = BOUNDARY_TOL * scale(s);
    let (roots, thetas, mut witness) = roots_in_interval(s);
    let in_a = thetas.is_some();
    let by_ineq = a_inequalities(s).iter().all(|&v| v >= -tol);
    let a_inequalities_agree = by_ineq == in_a;
    if !a_inequalities_agree {
        witness.push_str("; boundary inequalities disagree (vertex of P outside [-2, 2])");
    }
    let ineq = b_inequalities(s).iter().all(|&v| v > tol);
    let [v0, v1, v2] = root_of_unity_values(s);
    let signs = v0 > tol && v1 < -tol && v2 > tol;
    let b_checks = BChecks {
        inequalities: ineq,
        root_of_unity_signs: signs,
        interlacing: interlaces(s.case, &roots, tol),
        positive_definite: positive_definite(s),
    };
    if in_a && !ineq {
        let failed: Vec<String> = b_inequalities(s)
            .iter()
            .enumerate()
            .filter(|(_, &v)| v <= tol)
            .map(|(i, v)| format!("b-inequality {} = {v:.6}", i + 1))
            .collect();
        witness.push_str(&format!("; not in (b): {}", failed.join(", ")));
    }
    RegionVerdict {
        s1: s.s1,
        s2: s.s2,
        case: s.case,
        in_a,
        in_b: ineq,
        quadratic_roots: roots,
        thetas,
        a_inequalities_agree,
        b_checks,
        witness,
    }
}

pub fn in_region_a(s: &StokesParams) -> RegionVerdict {
    classify(s)
}

pub fn in_region_b(s: &StokesParams) -> RegionVerdict {
    classify(s)
}

/// `(θ₁, θ₂)` on the unit circle for given `γ` (fundamental branch).
pub fn gamma_angles(g: &AsymptoticData) -> (f64, f64) {
    let (g0, g1) = (g.gamma0, g.gamma1);
    match g.case {
        Case::A4 => (PI * (g0 + 1.0) / 4.0, PI * (g1 + 3.0) / 4.0),
        Case::A5 => (PI * (g0 + 6.0) / 5.0, PI * (g1 + 8.0) / 5.0),
        Case::A6 => (PI * (g0 + 2.0) / 6.0, PI * (g1 + 4.0) / 6.0),
    }
}

pub fn gamma_to_stokes(g: &AsymptoticData) -> StokesParams {
    let (t1, t2) = gamma_angles(g);
    let (c1, c2) = (t1.cos(), t2.cos());
    let (s1, s2) = match g.case {
        Case::A4 => (-2.0 * (c1 + c2), -2.0 - 4.0 * c1 * c2),
        Case::A5 => {
            let s1 = 1.0 + 2.0 * (c1 + c2);
            (s1, -1.0 - s1 - 4.0 * c1 * c2)
        }
        Case::A6 => (-2.0 * (c1 + c2), -1.0 - 4.0 * c1 * c2),
    };
    StokesParams::new(s1, s2, g.case)
}

/// Inverse of [`gamma_to_stokes`] on the fundamental domain.
pub fn stokes_to_gammas(s: &StokesParams) -> Result<AsymptoticData> {
    let (_, thetas, witness) = roots_in_interval(s);
    let Some((ta, tb)) = thetas else {
        return Err(Error::NotInRegionA { s1: s.s1, s2: s.s2, reason: witness });
    };
    let (g0, g1) = match s.case {
        Case::A4 => (4.0 * ta / PI - 1.0, 4.0 * tb / PI - 3.0),
        // θ ↦ 2π − θ folds the angles into [0, π]
        Case::A5 => (4.0 - 5.0 * tb / PI, 2.0 - 5.0 * ta / PI),
        Case::A6 => (6.0 * ta / PI - 2.0, 6.0 * tb / PI - 4.0),
    };
    Ok(AsymptoticData::new(g0, g1, s.case))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegerPoint {
    pub s1: i64,
    pub s2: i64,
    /// Leading sign and `(n, multiplicity)` pairs for `Φₙ`.
    pub sign: i64,
    pub factors: Vec<(u32, u32)>,
    pub reconstructs: bool,
}

impl IntegerPoint {
    pub fn factorization(&self) -> String {
        let body: Vec<String> = self
            .factors
            .iter()
            .map(|&(n, m)| if m == 1 { format!("Phi{n}") } else { format!("Phi{n}^{m}") })
            .collect();
        let sign = if self.sign < 0 { "-" } else { "" };
        format!("{sign}{}", body.join("*"))
    }
}

fn integer_char_poly(case: Case, s1: i64, s2: i64) -> Vec<i64> {
    match case {
        Case::A4 => vec![1, s1, -s2, s1, 1],
        Case::A5 => vec![-1, s1, s2, -s2, -s1, 1],
        Case::A6 => vec![1, s1, -s2, 0, s2, -s1, -1],
    }
}

/// Cyclotomic factorisation of `p` at integer parameters.
pub fn factor_integer_point(case: Case, s1: i64, s2: i64) -> Option<IntegerPoint> {
    let p = integer_char_poly(case, s1, s2);
    let (sign, factors) = poly::factor_cyclotomic(&p)?;
    let reconstructs = poly::expand_cyclotomic(sign, &factors) == p;
    Some(IntegerPoint { s1, s2, sign, factors, reconstructs })
}

/// Box that contains region (a): `|s₁| ≤ 4` (vertex condition) and the
/// `s₂` range spanned by the parabola and the two lines.
fn region_a_box(case: Case) -> (i64, i64, i64, i64) {
    match case {
        Case::A4 => (-4, 4, -6, 2),
        Case::A5 => (-3, 5, -6, 3),
        Case::A6 => (-4, 4, -5, 3),
    }
}

/// All integer points of region (a), with cyclotomic factorisations.
pub fn integer_points(case: Case) -> Vec<IntegerPoint> {
    let (s1lo, s1hi, s2lo, s2hi) = region_a_box(case);
    let mut out = Vec::new();
    // scan a generous margin so a too-small box would show up in tests
    for s1 in s1lo - 3..=s1hi + 3 {
        for s2 in s2lo - 3..=s2hi + 3 {
            let s = StokesParams::new(s1 as f64, s2 as f64, case);
            if classify(&s).in_a {
                out.push(factor_integer_point(case, s1, s2).unwrap_or(IntegerPoint {
                    s1,
                    s2,
                    sign: 0,
                    factors: Vec::new(),
                    reconstructs: false,
                }));
            }
        }
    }
    out
}

/// Integer points where the region-(a) inequalities hold but the
/// root criterion fails, for `|s₁| ≤ half_width`. Their solution set is
/// unbounded along the two lines, so the search must be boxed.
pub fn inequality_only_points(case: Case, half_width: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    for s1 in -half_width..=half_width {
        for s2 in -4 * half_width - 10..=4 * half_width + 10 {
            let s = StokesParams::new(s1 as f64, s2 as f64, case);
            let by_ineq = a_inequalities(&s).iter().all(|&v| v >= 0.0);
            if by_ineq && !classify(&s).in_a {
                out.push((s1, s2));
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridRow {
    pub s1: f64,
    pub s2: f64,
    pub in_a: bool,
    pub in_b: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub s1_min: f64,
    pub s1_max: f64,
    pub s2_min: f64,
    pub s2_max: f64,
}

/// Grid values `lo, lo + step, …` up to `hi` (inclusive within 1e-9).
pub fn grid_axis(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    if !(step > 0.0) || hi < lo {
        return Vec::new();
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| lo + i as f64 * step).collect()
}

/// Region grid in row-major order (`s₂` outer, `s₁` inner).
pub fn region_grid(case: Case, bounds: Bounds, step: f64) -> Result<Vec<GridRow>> {
    if !(step > 0.0) {
        return Err(Error::InvalidInput(format!("step must be positive, got {step}")));
    }
    let xs = grid_axis(bounds.s1_min, bounds.s1_max, step);
    let ys = grid_axis(bounds.s2_min, bounds.s2_max, step);
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let pts: Vec<(f64, f64)> = ys.iter().flat_map(|&y| xs.iter().map(move |&x| (x, y))).collect();
    Ok(pts
        .par_iter()
        .map(|&(s1, s2)| {
            let v = classify(&StokesParams::new(s1, s2, case));
            GridRow { s1, s2, in_a: v.in_a, in_b: v.in_b }
        })
        .collect())
}
