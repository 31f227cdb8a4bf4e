//! Constant matrices, Stokes factors, Stokes and monodromy matrices,
//! characteristic polynomials and connection matrices.
//!
//! Stokes factors are indexed by an integer `step` with `k = step / N`.
//! For 4a the factors `Q^{(∞)}_k` come from the explicit table; for 5a and
//! 6a the real (tilde) factors are built from two base factors and the
//! cyclic symmetry, and `Q^{(∞)}_k = d_∞ Q̃_k d_∞⁻¹`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::case::Case;
use crate::error::{Error, Result};
use crate::linalg::{self, conj, cx, eye, inv, inv_t, max_diff, mat_pow, CMat};
use crate::poly;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StokesParams {
    pub s1: f64,
    pub s2: f64,
    pub case: Case,
}

impl StokesParams {
    pub fn new(s1: f64, s2: f64, case: Case) -> Self {
        Self { s1, s2, case }
    }

    pub fn zero(case: Case) -> Self {
        Self::new(0.0, 0.0, case)
    }

    /// Complexified parameters `(ω^{3/2} s₁, ω³ s₂)` (4a convention).
    pub fn complexified(&self) -> (Complex64, Complex64) {
        let c = Case::A4;
        (c.omega_pow(1.5) * self.s1, c.omega_pow(3.0) * self.s2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MatrixName {
    Pi,
    Omega,
    D,
    Delta,
    C,
    D0,
    Dinf,
    PiTilde,
    PiHat,
    CTilde,
}

impl MatrixName {
    pub const ALL: [MatrixName; 10] = [
        MatrixName::Pi,
        MatrixName::Omega,
        MatrixName::D,
        MatrixName::Delta,
        MatrixName::C,
        MatrixName::D0,
        MatrixName::Dinf,
        MatrixName::PiTilde,
        MatrixName::PiHat,
        MatrixName::CTilde,
    ];
}

impl fmt::Display for MatrixName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for MatrixName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        MatrixName::ALL
            .into_iter()
            .find(|m| m.to_string().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::UnknownMatrix(s.to_string()))
    }
}

fn diag(case: Case, f: impl Fn(usize) -> Complex64) -> CMat {
    let n = case.dim();
    CMat::from_fn(n, n, |i, j| if i == j { f(i) } else { cx(0.0, 0.0) })
}

/// Exponent `e` with `d_(0) = diag(ω^{e·k})`.
fn d0_exponent(case: Case) -> f64 {
    match case {
        Case::A4 => 0.5,
        Case::A5 => 3.0,
        Case::A6 => 1.0,
    }
}

pub fn const_matrix(name: MatrixName, case: Case) -> CMat {
    let n = case.dim();
    let one = cx(1.0, 0.0);
    let zero = cx(0.0, 0.0);
    match name {
        MatrixName::Pi => CMat::from_fn(n, n, |i, j| if j == (i + 1) % n { one } else { zero }),
        MatrixName::Omega => CMat::from_fn(n, n, |i, j| case.omega_pow(((i * j) % n) as f64)),
        MatrixName::D => diag(case, |k| case.omega_pow(k as f64)),
        MatrixName::Delta => CMat::from_fn(n, n, |i, j| if i + j == n - 1 { one } else { zero }),
        MatrixName::C => CMat::from_fn(n, n, |i, j| if (i + j) % n == 0 { one } else { zero }),
        MatrixName::D0 => {
            let e = d0_exponent(case);
            diag(case, |k| case.omega_pow(e * k as f64))
        }
        MatrixName::Dinf => {
            let e = d0_exponent(case);
            diag(case, |k| case.omega_pow(-e * k as f64))
        }
        MatrixName::PiTilde => {
            let dinf = const_matrix(MatrixName::Dinf, case);
            inv(&dinf) * const_matrix(MatrixName::Pi, case) * dinf
        }
        MatrixName::PiHat => match case {
            Case::A4 => const_matrix(MatrixName::PiTilde, case) * case.omega_pow(0.5),
            _ => const_matrix(MatrixName::Pi, case),
        },
        MatrixName::CTilde => {
            let dinf_inv = const_matrix(MatrixName::D0, case);
            &dinf_inv * const_matrix(MatrixName::C, case) * &dinf_inv
        }
    }
}

/// The 4a table of `Q^{(∞)}_k`, `k = step/4`, reduced to `1 ≤ k < 3`.
fn q_table_4a(step: i64, s: &StokesParams) -> CMat {
    let c = Case::A4;
    let a = c.omega_pow(1.5) * s.s1;
    let b = c.omega_pow(0.5) * s.s1;
    let g = c.omega_pow(3.0) * s.s2;
    let mut q = eye(4);
    match 4 + (step - 4).rem_euclid(8) {
        4 => {
            q[(1, 0)] = a;
            q[(2, 3)] = b;
        }
        5 => q[(1, 3)] = g,
        6 => {
            q[(0, 3)] = a;
            q[(1, 2)] = b;
        }
        7 => q[(0, 2)] = g,
        8 => {
            q[(0, 1)] = b;
            q[(3, 2)] = a;
        }
        9 => q[(3, 1)] = g,
        10 => {
            q[(2, 1)] = a;
            q[(3, 0)] = b;
        }
        11 => q[(2, 0)] = g,
        _ => unreachable!(),
    }
    q
}

/// Real base factors `(Q̃_1, Q̃_{1+1/N})`.
pub fn tilde_base(s: &StokesParams) -> (CMat, CMat) {
    let n = s.case.dim();
    let r = |v: f64| cx(v, 0.0);
    let with = |entries: &[(usize, usize, f64)]| {
        let mut m = eye(n);
        for &(i, j, v) in entries {
            m[(i, j)] += r(v);
        }
        m
    };
    let (s1, s2) = (s.s1, s.s2);
    match s.case {
        Case::A4 => (with(&[(1, 0, -s1), (2, 3, s1)]), with(&[(1, 3, -s2)])),
        Case::A5 => (with(&[(1, 0, s1), (2, 4, -s2)]), with(&[(1, 4, s2), (2, 3, -s1)])),
        Case::A6 => (with(&[(1, 0, -s1), (3, 4, s1)]), with(&[(1, 5, s2), (2, 4, -s2)])),
    }
}

/// Generates `Q̃_k` from the base pair by conjugation with `Π̂`.
pub fn tilde_q_generated(step: i64, s: &StokesParams) -> CMat {
    let n = s.case.dim() as i64;
    let r = (step - n).rem_euclid(2 * n);
    let (q1, q2) = tilde_base(s);
    let base = if r % 2 == 0 { q1 } else { q2 };
    let p = mat_pow(&const_matrix(MatrixName::PiHat, s.case), (r / 2) as u32);
    &p * base * inv(&p)
}

/// `Q^{(∞)}_k` with `k = step / N`.
pub fn q_matrix(step: i64, s: &StokesParams) -> CMat {
    match s.case {
        Case::A4 => q_table_4a(step, s),
        _ => {
            let d = const_matrix(MatrixName::Dinf, s.case);
            &d * tilde_q_generated(step, s) * inv(&d)
        }
    }
}

/// `Q^{(0)}_k = d Q^{(∞)}_k d⁻¹`.
pub fn q_zero_matrix(step: i64, s: &StokesParams) -> CMat {
    let d = const_matrix(MatrixName::D, s.case);
    &d * q_matrix(step, s) * inv(&d)
}

/// `Q̃_k = d_∞⁻¹ Q^{(∞)}_k d_∞`, real up to rounding.
pub fn tilde_q_matrix(step: i64, s: &StokesParams) -> CMat {
    match s.case {
        Case::A4 => {
            let d = const_matrix(MatrixName::Dinf, s.case);
            inv(&d) * q_table_4a(step, s) * d
        }
        _ => tilde_q_generated(step, s),
    }
}

/// `S = Q̃_1 Q̃_{1+1/N} ⋯ Q̃_{2−1/N}` (real).
pub fn stokes_matrix(s: &StokesParams) -> CMat {
    let n = s.case.dim() as i64;
    (n..2 * n).fold(eye(n as usize), |acc, m| acc * tilde_q_matrix(m, s))
}

/// `S̃₂ = S^{-t}`.
pub fn stokes_matrix_2(s: &StokesParams) -> CMat {
    inv_t(&stokes_matrix(s))
}

/// `A = Q̃_1 Q̃_{1+1/N} Π̂`, whose characteristic polynomial is `p`.
pub fn cyclic_factor(s: &StokesParams) -> CMat {
    let n = s.case.dim() as i64;
    tilde_q_matrix(n, s) * tilde_q_matrix(n + 1, s) * const_matrix(MatrixName::PiHat, s.case)
}

/// Sign with `S S^{-t} = sign · A^N`.
pub fn monodromy_sign(case: Case) -> f64 {
    match case {
        Case::A4 => -1.0,
        _ => 1.0,
    }
}

/// `M = S S^{-t}`.
pub fn monodromy(s: &StokesParams) -> CMat {
    let sm = stokes_matrix(s);
    let st = inv_t(&sm);
    sm * st
}

/// Eigenvalues of the monodromy. Computed from the factor `A` rather than
/// `M` itself: `M = ±A^N` and the eigenvalues of `A` are well conditioned
/// away from repeated roots.
pub fn monodromy_eigenvalues(s: &StokesParams) -> Vec<Complex64> {
    let n = s.case.dim() as u32;
    let sign = monodromy_sign(s.case);
    linalg::eigenvalues(&cyclic_factor(s)).into_iter().map(|mu| mu.powu(n) * sign).collect()
}

/// Outcome of the unit-circle test on the monodromy spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UnitCircleTest {
    pub unimodular: bool,
    /// Largest of `|y| − 2` and `|Im y|` over the reduced roots.
    pub excess: f64,
}

/// Tests whether every eigenvalue of `M = S S^{-t}` lies on the unit circle.
///
/// Raw eigenvalues of `M` are only accurate to `√ε` at the Jordan blocks on
/// the boundary lines, so the test runs on the characteristic polynomial of
/// `M`: the trivial `λ = 1` factors are divided out and the remaining
/// palindromic quartic is reduced to a quadratic in `y = λ + 1/λ`. All `λ`
/// are unimodular iff both `y` are real with `|y| ≤ 2`.
pub fn monodromy_unit_circle(s: &StokesParams, tol: f64) -> UnitCircleTest {
    let m = monodromy(s);
    let mut cp: Vec<f64> = linalg::char_poly(&m).into_iter().map(|c| c.re).collect();
    for _ in 0..s.case.dim() - 4 {
        // synthetic division by (λ − 1)
        let mut q = Vec::with_capacity(cp.len() - 1);
        let mut acc = 0.0;
        for c in &cp[..cp.len() - 1] {
            acc += c;
            q.push(acc);
        }
        cp = q;
    }
    let (b, c) = (0.5 * (cp[1] + cp[3]), cp[2] - 2.0);
    let scale = 1.0 + b * b + c.abs();
    let disc = b * b - 4.0 * c;
    let excess = if disc >= -tol * scale {
        let sq = disc.max(0.0).sqrt();
        ((-b + sq) / 2.0).abs().max(((-b - sq) / 2.0).abs()) - 2.0
    } else {
        (-disc).sqrt() / 2.0
    };
    UnitCircleTest { unimodular: disc >= -tol * scale && excess <= tol, excess }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PalindromicPoly {
    pub degree: usize,
    /// Leading coefficient first.
    pub coeffs: Vec<f64>,
    /// `+1` palindromic, `−1` anti-palindromic.
    pub sign: i32,
}

impl PalindromicPoly {
    pub fn eval(&self, mu: f64) -> f64 {
        poly::eval(&self.coeffs, mu)
    }

    pub fn eval_c(&self, mu: Complex64) -> Complex64 {
        poly::eval_c(&self.coeffs, mu)
    }

    pub fn roots(&self) -> Vec<Complex64> {
        poly::roots(&self.coeffs)
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.degree;
        (0..=n).all(|k| self.coeffs[k] == self.sign as f64 * self.coeffs[n - k])
    }

    /// Monic palindromic quartic left after removing the trivial `μ ∓ 1` factors.
    pub fn quartic_factor(&self) -> [f64; 5] {
        let c = &self.coeffs;
        match self.degree {
            4 => [c[0], c[1], c[2], c[3], c[4]],
            5 => {
                // p = (1 − μ)·q, q monic
                let (s1, s2) = (c[1], c[2]);
                [1.0, 1.0 - s1, 1.0 - s1 - s2, 1.0 - s1, 1.0]
            }
            6 => {
                // p = (μ² − 1)·q
                let (s1, s2) = (c[1], -c[2]);
                [1.0, s1, 1.0 - s2, s1, 1.0]
            }
            _ => unreachable!("only degrees 4, 5, 6 occur"),
        }
    }
}

/// Closed-form `p(μ) = det(A − μI)`.
pub fn char_poly(s: &StokesParams) -> PalindromicPoly {
    let (s1, s2) = (s.s1, s.s2);
    let (coeffs, sign) = match s.case {
        Case::A4 => (vec![1.0, s1, -s2, s1, 1.0], 1),
        Case::A5 => (vec![-1.0, s1, s2, -s2, -s1, 1.0], -1),
        Case::A6 => (vec![1.0, s1, -s2, 0.0, s2, -s1, -1.0], -1),
    };
    PalindromicPoly { degree: coeffs.len() - 1, coeffs, sign }
}

/// `det(A − μI)` computed from the matrix `A`.
pub fn char_poly_numeric(s: &StokesParams) -> Vec<f64> {
    let a = cyclic_factor(s);
    let sign = if a.nrows().is_multiple_of(2) { 1.0 } else { -1.0 };
    linalg::char_poly(&a).into_iter().map(|c| sign * c.re).collect()
}

fn require_4a(case: Case, what: &'static str) -> Result<()> {
    if case == Case::A4 {
        Ok(())
    } else {
        Err(Error::Unsupported { what, case })
    }
}

/// `E_k` with `k = step / 4`, from `E₁ = ¼ C Q_{3/4}` and the recursion
/// `d⁻¹E_k = Q_{k−¼}⁻¹ d⁻¹ E_{k−¼} Q_{k−¼}`.
pub fn connection_matrix(step: i64, s: &StokesParams) -> Result<CMat> {
    require_4a(s.case, "connection_matrix")?;
    let d = const_matrix(MatrixName::D, s.case);
    let di = inv(&d);
    let mut e = const_matrix(MatrixName::C, s.case) * q_matrix(3, s) * cx(0.25, 0.0);
    let mut k = 4;
    while k < step {
        k += 1;
        let q = q_matrix(k - 1, s);
        e = &d * inv(&q) * &di * e * q;
    }
    while k > step {
        let q = q_matrix(k - 1, s);
        e = &d * &q * &di * e * inv(&q);
        k -= 1;
    }
    Ok(e)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub residual: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct IdentityReport {
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn push(&mut self, name: impl Into<String>, residual: f64) {
        self.checks.push(IdentityCheck { name: name.into(), residual });
    }

    pub fn max_residual(&self) -> f64 {
        self.checks.iter().map(|c| c.residual).fold(0.0, f64::max)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.checks.iter().all(|c| c.residual < tol)
    }

    pub fn failures(&self, tol: f64) -> Vec<&IdentityCheck> {
        self.checks.iter().filter(|c| !(c.residual < tol)).collect()
    }

    pub fn extend(&mut self, other: IdentityReport) {
        self.checks.extend(other.checks);
    }
}

/// Jumps on the circle, `J_k = (E_{7/4−k} Q_{7/4−k} ⋯ Q_{k−¼})⁻¹`, for
/// `k = 1, 1¼, …, 2½`. Each should equal `4C`.
pub fn circle_jumps(s: &StokesParams) -> Result<Vec<(i64, CMat)>> {
    require_4a(s.case, "circle_jumps")?;
    (4..=10)
        .map(|m| {
            let lo = 7 - m;
            let mut p = connection_matrix(lo, s)?;
            for j in lo..m {
                p *= q_matrix(j, s);
            }
            Ok((m, inv(&p)))
        })
        .collect()
}

pub fn verify_circle_jumps(s: &StokesParams) -> Result<IdentityReport> {
    let four_c = const_matrix(MatrixName::C, s.case) * cx(4.0, 0.0);
    let mut rep = IdentityReport::default();
    for (m, j) in circle_jumps(s)? {
        rep.push(format!("J_{m}/4 = 4C"), max_diff(&j, &four_c));
    }
    Ok(rep)
}

/// The constant-matrix identities and their structural analogues for 5a/6a.
pub fn verify_identities(case: Case) -> IdentityReport {
    use MatrixName as M;
    let n = case.dim();
    let nf = cx(n as f64, 0.0);
    let w = case.omega();
    let pi = const_matrix(M::Pi, case);
    let om = const_matrix(M::Omega, case);
    let d = const_matrix(M::D, case);
    let delta = const_matrix(M::Delta, case);
    let c = const_matrix(M::C, case);
    let id = eye(n);
    let mut r = IdentityReport::default();
    r.push("F1 conj(Omega) Omega = N I", max_diff(&(conj(&om) * &om), &(&id * nf)));
    r.push("F2 Pi Omega = Omega d", max_diff(&(&pi * &om), &(&om * &d)));
    r.push("F3 Pi C = Delta", max_diff(&(&pi * &c), &delta));
    r.push("F3 C Pi^-1 = Delta", max_diff(&(&c * inv(&pi)), &delta));
    r.push("F4 d C d = C", max_diff(&(&d * &c * &d), &c));
    r.push("F5 Omega d Omega = N Delta", max_diff(&(&om * &d * &om), &(&delta * nf)));
    r.push("F5 Omega Delta Omega = N d^-1", max_diff(&(&om * &delta * &om), &(inv(&d) * nf)));
    r.push("F6 C = Omega conj(Omega)^-1", max_diff(&c, &(&om * inv(&conj(&om)))));
    r.push("F6 C = Omega^2 / N", max_diff(&c, &(&om * &om / nf)));
    r.push("F6 C = N Omega^-2", max_diff(&c, &(inv(&(&om * &om)) * nf)));
    r.push("F7 Pi d = omega d Pi", max_diff(&(&pi * &d), &(&d * &pi * w)));
    let pi2 = &pi * &pi;
    r.push("F7 Pi^2 d = omega^2 d Pi^2", max_diff(&(&pi2 * &d), &(&d * &pi2 * w * w)));
    let dinf = const_matrix(M::Dinf, case);
    r.push("d_inf = d_0^-1", max_diff(&(&dinf * const_matrix(M::D0, case)), &id));
    let pt = const_matrix(M::PiTilde, case);
    let ph = const_matrix(M::PiHat, case);
    let scale = pt[(0, 1)];
    r.push("Pi tilde is a scalar multiple of Pi hat", max_diff(&pt, &(&ph * scale)));
    r.push("C tilde real", linalg::max_imag(&const_matrix(M::CTilde, case)));
    r
}

/// Cyclic, anti-symmetry and reality relations of the Stokes factors at
/// steps `lo..hi`, both untilded and tilde forms.
pub fn verify_q_symmetries(s: &StokesParams) -> IdentityReport {
    use MatrixName as M;
    let case = s.case;
    let n = case.dim() as i64;
    let pi = const_matrix(M::Pi, case);
    let pii = inv(&pi);
    let c = const_matrix(M::C, case);
    let d = const_matrix(M::D, case);
    let dinf = const_matrix(M::Dinf, case);
    let dinf2 = &dinf * &dinf;
    let pt = const_matrix(M::PiTilde, case);
    let pti = inv(&pt);
    let ct = const_matrix(M::CTilde, case);
    // k ↔ 1 + 2/N − k
    let refl = n + 2;
    // every step touched below lies in [lo, 5n]
    let lo = -3 * n + 2;
    let table = |f: fn(i64, &StokesParams) -> CMat| -> Vec<CMat> { (lo..=5 * n).map(|m| f(m, s)).collect() };
    let (qs, q0s, qts) = (table(q_matrix), table(q_zero_matrix), table(tilde_q_matrix));
    let at = |v: &[CMat], m: i64| v[(m - lo) as usize].clone();
    let dd = &d * &dinf2 * &d;
    let ddi = inv(&dd);
    let dinf2i = inv(&dinf2);
    let mut worst = [0.0f64; 10];
    for m in -2 * n..4 * n {
        let upd = |w: &mut f64, v: f64| *w = w.max(v);
        let q = at(&qs, m);
        upd(&mut worst[0], max_diff(&at(&qs, m + 2), &(&pi * &q * &pii)));
        upd(&mut worst[1], max_diff(&at(&qs, m + n), &(&dinf2 * inv_t(&q) * &dinf2i)));
        upd(&mut worst[2], max_diff(&q, &(&c * inv(&conj(&at(&qs, refl - m))) * &c)));
        let q0 = at(&q0s, m);
        upd(&mut worst[3], max_diff(&at(&q0s, m + 2), &(&pi * &q0 * &pii)));
        upd(&mut worst[4], max_diff(&at(&q0s, m + n), &(&dd * inv_t(&q0) * &ddi)));
        upd(&mut worst[5], max_diff(&q0, &(&c * inv(&conj(&at(&q0s, refl - m))) * &c)));
        let qt = at(&qts, m);
        upd(&mut worst[6], max_diff(&at(&qts, m + 2), &(&pt * &qt * &pti)));
        upd(&mut worst[7], max_diff(&at(&qts, m + n), &inv_t(&qt)));
        upd(&mut worst[8], max_diff(&qt, &(&ct * inv(&conj(&at(&qts, refl - m))) * &ct)));
        upd(&mut worst[9], linalg::max_imag(&qt));
    }
    let names = [
        "Q_{k+2/N} = Pi Q_k Pi^-1",
        "Q_{k+1} = d_inf^2 Q_k^-t d_inf^-2",
        "Q_k = C conj(Q_{r-k})^-1 C",
        "Q0_{k+2/N} = Pi Q0_k Pi^-1",
        "Q0_{k+1} anti-symmetry",
        "Q0_k = C conj(Q0_{r-k})^-1 C",
        "tilde (1) Q_{k+2/N} = Pi~ Q_k Pi~^-1",
        "tilde (2) Q_{k+1} = Q_k^-t",
        "tilde (3) Q_k = C~ conj(Q_{r-k})^-1 C~",
        "tilde Q real",
    ];
    let mut r = IdentityReport::default();
    for (name, w) in names.iter().zip(worst) {
        r.push(*name, w);
    }
    r
}

/// Relations of the connection matrices (4a).
pub fn verify_connection_symmetries(s: &StokesParams) -> Result<IdentityReport> {
    require_4a(s.case, "connection symmetries")?;
    use MatrixName as M;
    let case = s.case;
    let w = case.omega();
    let pi = const_matrix(M::Pi, case);
    let c = const_matrix(M::C, case);
    let d = const_matrix(M::D, case);
    let di = inv(&d);
    let b = &di * &pi * &pi;
    let bi = inv(&b);
    let mut r = IdentityReport::default();
    let e1 = connection_matrix(4, s)?;
    r.push("det E_1 = -1/256", (linalg::det(&e1) - cx(-1.0 / 256.0, 0.0)).norm());
    let mut cyc = 0.0f64;
    let mut anti = 0.0f64;
    let mut real = 0.0f64;
    // E_k loses accuracy like (1 + |s|)^{2|4k − 4|}, so stay next to E_1.
    for m in 3..=5 {
        let e = connection_matrix(m, s)?;
        let a = &di * &e;
        let x = q_matrix(m, s) * q_matrix(m + 1, s) * &pi;
        cyc = cyc.max(max_diff(&a, &(&x * &a * &x * w)));
        anti = anti.max(max_diff(&a, &(&b * inv_t(&a) * &bi * cx(-1.0 / 16.0, 0.0))));
        real = real.max(max_diff(&e, &(&c * conj(&connection_matrix(7 - m, s)?) * &c)));
    }
    r.push("E cyclic symmetry", cyc);
    r.push("E anti-symmetry", anti);
    r.push("E reality", real);
    let q34 = q_matrix(3, s);
    r.push("d Q_{3/4} d^-1 = Q_{3/4}^-1", max_diff(&(&d * &q34 * &di), &inv(&q34)));
    r.push("Q_{3/4}^-1 = conj(Q_{3/4})", max_diff(&inv(&q34), &conj(&q34)));
    Ok(r)
}

/// Stokes/monodromy relations: real S, product formula, `M = ±A^N`, and
/// agreement of the two characteristic polynomials.
pub fn verify_stokes_relations(s: &StokesParams) -> IdentityReport {
    let case = s.case;
    let n = case.dim();
    let sm = stokes_matrix(s);
    let mut r = IdentityReport::default();
    r.push("S real", linalg::max_imag(&sm));
    let second = (2 * n as i64..3 * n as i64).fold(eye(n), |acc, m| acc * tilde_q_matrix(m, s));
    r.push("S_2 = S^-t", max_diff(&second, &inv_t(&sm)));
    let pt = const_matrix(MatrixName::PiTilde, case);
    let at = tilde_q_matrix(n as i64, s) * tilde_q_matrix(n as i64 + 1, s) * &pt;
    let half = n as u32 / 2;
    let formula = if n.is_multiple_of(2) {
        mat_pow(&at, half) * inv(&mat_pow(&pt, half))
    } else {
        mat_pow(&at, half) * tilde_q_matrix(n as i64, s) * inv(&mat_pow(&pt, half))
    };
    r.push("S = (Q~ Q~ Pi~)^.. product form", max_diff(&sm, &formula));
    let m = monodromy(s);
    // M has entries of size |s|^{2N}; compare relative to its norm
    let mscale = linalg::max_abs(&m).max(1.0);
    r.push("M = (Q~ Q~ Pi~)^N (relative)", max_diff(&m, &mat_pow(&at, n as u32)) / mscale);
    let ah = cyclic_factor(s);
    let signed = mat_pow(&ah, n as u32) * cx(monodromy_sign(case), 0.0);
    r.push("M = sign (Q~ Q~ Pi^)^N (relative)", max_diff(&m, &signed) / mscale);
    let closed = char_poly(s);
    let numeric = char_poly_numeric(s);
    let cp = closed.coeffs.iter().zip(&numeric).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    r.push("char poly closed form = matrix", cp);
    r
}

/// Draws `count` parameter pairs uniformly from `[-h, h]²` with a fixed seed.
pub fn random_params(case: Case, count: usize, half_width: f64, seed: u64) -> Vec<StokesParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = half_width;
    (0..count).map(|_| StokesParams::new(rng.random_range(-h..h), rng.random_range(-h..h), case)).collect()
}

/// Full identity suite: constants for all cases, factor and Stokes
/// relations on `[-5, 5]²`, and the 4a connection relations on `[-1, 1]²`
/// where the recursion for `E_k` keeps double precision.
pub fn identity_suite(draws: usize, seed: u64) -> IdentityReport {
    let mut rep = IdentityReport::default();
    for case in Case::ALL {
        rep.extend(verify_identities(case));
        let parts: Vec<IdentityReport> = random_params(case, draws, 5.0, seed)
            .par_iter()
            .map(|s| {
                let mut r = verify_q_symmetries(s);
                r.extend(verify_stokes_relations(s));
                r
            })
            .collect();
        parts.into_iter().for_each(|r| rep.extend(r));
    }
    let parts: Vec<IdentityReport> = random_params(Case::A4, draws, 1.0, seed ^ 0x9e37)
        .par_iter()
        .map(|s| {
            let mut r = verify_connection_symmetries(s).expect("4a");
            r.extend(verify_circle_jumps(s).expect("4a"));
            r
        })
        .collect();
    parts.into_iter().for_each(|r| rep.extend(r));
    rep
}
