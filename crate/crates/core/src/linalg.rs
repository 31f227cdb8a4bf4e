//! Small dense complex linear algebra on top of `nalgebra`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;

#[inline]
pub fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn eye(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// `I + v·E_{ij}`.
pub fn elementary(n: usize, i: usize, j: usize, v: Complex64) -> CMat {
    let mut m = eye(n);
    m[(i, j)] += v;
    m
}

/// Inverse of a matrix known to be nonsingular (unipotent factors,
/// permutations, connection matrices).
///
/// # Panics
/// If the matrix is numerically singular.
pub fn inv(m: &CMat) -> CMat {
    m.clone().try_inverse().expect("matrix is singular")
}

pub fn inv_t(m: &CMat) -> CMat {
    inv(m).transpose()
}

pub fn conj(m: &CMat) -> CMat {
    m.map(|z| z.conj())
}

pub fn mat_pow(m: &CMat, p: u32) -> CMat {
    let mut out = eye(m.nrows());
    for _ in 0..p {
        out *= m;
    }
    out
}

pub fn product<'a, I: IntoIterator<Item = &'a CMat>>(n: usize, it: I) -> CMat {
    it.into_iter().fold(eye(n), |acc, m| acc * m)
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_diff(a: &CMat, b: &CMat) -> f64 {
    max_abs(&(a - b))
}

pub fn max_imag(m: &CMat) -> f64 {
    m.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
}

pub fn real_part(m: &CMat) -> DMatrix<f64> {
    m.map(|z| z.re)
}

pub fn det(m: &CMat) -> Complex64 {
    m.determinant()
}

/// `log det m` via partial-pivot LU, summing logs of the pivots so large
/// systems never overflow. The imaginary part is reduced to (−π, π].
pub fn log_det(m: &CMat) -> Complex64 {
    let lu = m.clone().lu();
    let u = lu.u();
    let sign: Complex64 = lu.p().determinant();
    let mut acc = sign.ln();
    for i in 0..u.nrows() {
        acc += u[(i, i)].ln();
    }
    let im = acc.im.rem_euclid(2.0 * std::f64::consts::PI);
    let im = if im > std::f64::consts::PI { im - 2.0 * std::f64::consts::PI } else { im };
    cx(acc.re, im)
}

/// Smallest absolute pivot of the LU factorisation, a cheap singularity probe.
pub fn min_pivot(m: &CMat) -> f64 {
    let u = m.clone().lu().u();
    (0..u.nrows()).map(|i| u[(i, i)].norm()).fold(f64::INFINITY, f64::min)
}

/// Coefficients of `det(λI − A)`, leading first, by Faddeev–LeVerrier.
pub fn char_poly(a: &CMat) -> Vec<Complex64> {
    let n = a.nrows();
    let mut coeffs = vec![Complex64::new(1.0, 0.0)];
    let mut m = CMat::zeros(n, n);
    let id = eye(n);
    let mut c = Complex64::new(1.0, 0.0);
    for k in 1..=n {
        m = a * &m + &id * c;
        let am = a * &m;
        c = -am.trace() / k as f64;
        coeffs.push(c);
    }
    coeffs
}

/// Eigenvalues from the complex Schur form. Permutation-like inputs can
/// stall the shifted QR sweep; those fall back to the roots of the
/// characteristic polynomial.
pub fn eigenvalues(a: &CMat) -> Vec<Complex64> {
    let n = a.nrows();
    match nalgebra::Schur::try_new(a.clone(), 1e-15, 200 * n.max(1)) {
        Some(schur) => {
            let (_, t) = schur.unpack();
            (0..n).map(|i| t[(i, i)]).collect()
        }
        None => crate::poly::roots_c(&char_poly(a)),
    }
}

/// Smallest eigenvalue of a real symmetric matrix.
pub fn min_sym_eigenvalue(a: &DMatrix<f64>) -> f64 {
    let sym = (a + a.transpose()) * 0.5;
    SymmetricEigen::new(sym).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}
