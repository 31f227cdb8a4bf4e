//! Independent reference computations and published values.

use std::f64::consts::PI;

use tttoda::fredholm::{self, Branch};
use tttoda::quad;
use tttoda::region;
use tttoda::rh;
use tttoda::stokes::{self, StokesParams};
use tttoda::toda::{self, InitModel, OdeConfig};
use tttoda::{AsymptoticData, Case};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `K₀` from its ascending series; accurate for small arguments.
fn k0_series(z: f64) -> f64 {
    let q = z * z / 4.0;
    let (mut term, mut i0, mut acc, mut harmonic) = (1.0, 1.0, 0.0, 0.0);
    for k in 1..60 {
        term *= q / (k * k) as f64;
        harmonic += 1.0 / k as f64;
        i0 += term;
        acc += term * harmonic;
    }
    -((z / 2.0).ln() + EULER_GAMMA) * i0 + acc
}

/// `K_ν` from the Hankel expansion; accurate for large arguments.
fn k_hankel(nu: f64, z: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let (mut term, mut sum) = (1.0, 1.0);
    for k in 1..12 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * 8.0 * z);
        sum += term;
    }
    (PI / (2.0 * z)).sqrt() * (-z).exp() * sum
}

#[test]
fn bessel_k0_against_series() {
    for z in [0.01, 0.1, 0.5, 1.0, 2.0] {
        let (got, want) = (quad::bessel_k(0.0, z), k0_series(z));
        assert!((got - want).abs() < 1e-12 * want, "z = {z}: {got} vs {want}");
    }
}

#[test]
fn bessel_k_against_hankel() {
    for z in [16.97, 24.0, 30.0] {
        for nu in [0.0, 1.0] {
            let (got, want) = (quad::bessel_k(nu, z), k_hankel(nu, z));
            assert!((got - want).abs() < 1e-10 * want, "K_{nu}({z}): {got} vs {want}");
        }
    }
}

#[test]
fn initial_data_uses_bessel_profiles() {
    let s = StokesParams::new(0.7, -0.4, Case::A4);
    let x = 6.0;
    let [u, v, _, _] = toda::asymptotic_init(&s, x, InitModel::Bessel).unwrap();
    let a = -2f64.sqrt() / PI * s.s1 * k_hankel(0.0, 2.0 * 2f64.sqrt() * x);
    let b = s.s2 / PI * k_hankel(0.0, 4.0 * x);
    assert!((0.5 * (u + v) - a).abs() < 1e-10 * a.abs());
    assert!((0.5 * (u - v) - b).abs() < 1e-10 * b.abs());
}

/// `w₀″ + w₀′/x = 2(e^{4w₀} − e^{2w₁−2w₀})`, `w₁″ + w₁′/x = 2(e^{2w₁−2w₀} − e^{−4w₁})`.
fn toda_w(x: f64, y: [f64; 4]) -> [f64; 4] {
    let [w0, w1, d0, d1] = y;
    let mid = (2.0 * w1 - 2.0 * w0).exp();
    [d0, d1, 2.0 * ((4.0 * w0).exp() - mid) - d0 / x, 2.0 * (mid - (-4.0 * w1).exp()) - d1 / x]
}

/// Classical fixed-step RK4 from `x0` down to `x1`.
fn rk4(mut y: [f64; 4], x0: f64, x1: f64, steps: usize) -> [f64; 4] {
    let h = (x1 - x0) / steps as f64;
    let add = |y: [f64; 4], k: [f64; 4], c: f64| -> [f64; 4] { std::array::from_fn(|i| y[i] + c * k[i]) };
    for i in 0..steps {
        let x = x0 + i as f64 * h;
        let k1 = toda_w(x, y);
        let k2 = toda_w(x + h / 2.0, add(y, k1, h / 2.0));
        let k3 = toda_w(x + h / 2.0, add(y, k2, h / 2.0));
        let k4 = toda_w(x + h, add(y, k3, h));
        y = std::array::from_fn(|j| y[j] + h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]));
    }
    y
}

#[test]
fn ode_against_fixed_step_rk4() {
    let s = StokesParams::new(0.9, -0.6, Case::A4);
    let cfg = OdeConfig::default();
    let sol = toda::solve(&s, &cfg).unwrap();
    let [u, v, du, dv] = toda::asymptotic_init(&s, cfg.x_start, cfg.init).unwrap();
    let mut y = [u / 2.0, v / 2.0, du / 2.0, dv / 2.0];
    let mut x = cfg.x_start;
    for target in [2.0, 1.0, 0.5, 0.2] {
        // compare on output nodes so interpolation error stays out
        let i = sol.xs.iter().position(|&xi| xi <= target).unwrap();
        y = rk4(y, x, sol.xs[i], 40_000);
        x = sol.xs[i];
        let (w0, w1) = (sol.w0[i], sol.w1[i]);
        // inward integration amplifies local errors by about e^{4(x_start − x)}
        let scale = w0.abs().max(w1.abs());
        assert!((w0 - y[0]).abs() < 2e-6 * scale, "x = {x}: w0 {w0} vs {}", y[0]);
        assert!((w1 - y[1]).abs() < 2e-6 * scale, "x = {x}: w1 {w1} vs {}", y[1]);
    }
}

#[test]
fn alpha_closed_form() {
    for (g0, g1) in [(0.5, -0.5), (1.0, 0.3), (-0.4, 0.4), (0.2, -1.5), (2.0, 0.5)] {
        let g = AsymptoticData::new(g0, g1, Case::A4);
        let p = fredholm::c_from_stokes(&region::gamma_to_stokes(&g), Branch::I).unwrap();
        let alpha = fredholm::alpha_from_params(&p).unwrap();
        let want = [1.0 - g0 / 2.0, 2.0 + g0 / 2.0, 3.0 + g1 / 2.0, 4.0 - g1 / 2.0];
        for (a, w) in alpha.iter().zip(want) {
            assert!((a - w).abs() < 1e-9, "γ = ({g0}, {g1}): {alpha:?}");
        }
    }
}

#[test]
fn zero_parameters_give_trivial_alpha() {
    let alpha = fredholm::alpha_from_params(&fredholm::TWParams::zero()).unwrap();
    assert_eq!(alpha, [1.0, 2.0, 3.0, 4.0]);
}

/// Sylvester's criterion on `S + Sᵗ`, with the minors expanded by hand.
fn sylvester_4a(s1: f64, s2: f64) -> bool {
    let sm = tttoda::linalg::real_part(&stokes::stokes_matrix(&StokesParams::new(s1, s2, Case::A4)));
    let a = &sm + sm.transpose();
    let m = |i: usize, j: usize| a[(i, j)];
    let d1 = m(0, 0);
    let d2 = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    let d3 = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
        + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    let d4 = a.determinant();
    d1 > 0.0 && d2 > 0.0 && d3 > 0.0 && d4 > 0.0
}

#[test]
fn region_b_against_sylvester() {
    let mut inside = 0;
    for i in 0..=60 {
        for j in 0..=60 {
            let (s1, s2) = (-3.0 + 0.1 * i as f64 + 0.013, -5.0 + 0.15 * j as f64 + 0.007);
            let v = region::classify(&StokesParams::new(s1, s2, Case::A4));
            assert_eq!(v.in_b, sylvester_4a(s1, s2), "({s1}, {s2})");
            inside += usize::from(v.in_b);
        }
    }
    assert!(inside > 100);
}

/// Threshold by a downward scan of the `G₃ + G₃ᴴ` minors at `l = 1`.
fn scan_threshold(s: &StokesParams, step: f64) -> f64 {
    let mut x: f64 = 3.0;
    while x > 0.0 {
        let minors = rh::x_minors_from_jump(s, x, 1.0 / x).unwrap();
        if minors.iter().any(|&m| m <= 0.0) {
            return x + step;
        }
        x -= step;
    }
    0.0
}

#[test]
fn threshold_against_scan() {
    for (s1, s2) in [(2.5, -1.0), (0.0, 2.5), (1.5, 0.5), (-3.0, -3.0), (0.5, -2.5)] {
        let s = StokesParams::new(s1, s2, Case::A4);
        let fast = rh::solvable_from(&s).unwrap();
        let slow = scan_threshold(&s, 1e-3);
        assert!(fast > 0.0);
        assert!((fast - slow).abs() <= 1e-3 + 1e-9, "({s1}, {s2}): {fast} vs {slow}");
    }
}

#[test]
fn threshold_zero_in_region_b() {
    for (s1, s2) in [(0.0, 0.0), (0.5, -0.5), (0.8, 0.0), (-1.2, -1.0)] {
        let s = StokesParams::new(s1, s2, Case::A4);
        assert!(region::classify(&s).in_b);
        assert_eq!(rh::solvable_from(&s).unwrap(), 0.0);
        assert_eq!(scan_threshold(&s, 1e-2), 0.0);
    }
}

#[test]
fn published_integer_points() {
    let pts = region::integer_points(Case::A4);
    assert_eq!(pts.len(), 19);
    assert!(pts.iter().all(|p| p.reconstructs));
    let origin = pts.iter().find(|p| (p.s1, p.s2) == (0, 0)).unwrap();
    assert_eq!(origin.factorization(), "Phi8");
    let corner = pts.iter().find(|p| (p.s1, p.s2) == (4, -6)).unwrap();
    assert_eq!(corner.factorization(), "Phi2^4");
    // the inequality triple is unbounded along its two lines; the sliver is the part nearest the region
    let mut sliver = region::inequality_only_points(Case::A4, 5);
    sliver.sort();
    assert_eq!(sliver, vec![(-5, -8), (5, -8)]);
}

#[test]
fn published_connection_constants() {
    for case in Case::ALL {
        let rep = stokes::verify_identities(case);
        assert!(rep.passes(1e-12), "{case}: {:?}", rep.failures(1e-12));
    }
    let s = StokesParams::new(0.3, -0.7, Case::A4);
    let e1 = stokes::connection_matrix(4, &s).unwrap();
    let det = tttoda::linalg::det(&e1);
    assert!((det.re + 1.0 / 256.0).abs() < 1e-15 && det.im.abs() < 1e-15);
    let rep = stokes::verify_circle_jumps(&s).unwrap();
    assert!(rep.passes(1e-12), "{:?}", rep.failures(1e-12));
}

#[test]
fn sinh_gordon_reduction() {
    let s = region::gamma_to_stokes(&AsymptoticData::new(1.0, -1.0, Case::A4));
    assert!(s.s1.abs() < 1e-12 && (s.s2 + 2.0).abs() < 1e-12);
    let want = -1.0 / (2.0 * 2f64.sqrt()) * (PI / 2.0).sin() * (4.0 * PI).powf(-0.5) * (-16.0f64).exp();
    assert!((toda::sinh_gordon_amplitude(1.0, 4.0) - want).abs() < 1e-15 * want.abs());
}

#[test]
fn sinh_gordon_fredholm_matches_ode() {
    let s = StokesParams::new(0.0, -2.0, Case::A4);
    let sol = toda::solve(&s, &OdeConfig::default()).unwrap();
    let (w0, w1) = sol.at(1.0).unwrap();
    assert!((w0 + w1).abs() < 1e-9 * w0.abs());
    let p = fredholm::c_from_stokes(&s, Branch::I).unwrap();
    let r = fredholm::fredholm_q(1.0, &p, &fredholm::NystromGrid::for_radius(1.0, 240).unwrap()).unwrap();
    assert!((r.q[1] - 2.0 * w0).abs() < 0.01 * (2.0 * w0).abs(), "{} vs {}", r.q[1], 2.0 * w0);
    assert!((r.q[2] - 2.0 * w1).abs() < 0.01 * (2.0 * w1).abs());
}

#[test]
fn sinh_gordon_y0_is_antisymmetric() {
    let s = StokesParams::new(0.0, -2.0, Case::A4);
    let (w0, w1) = rh::w_from_y0(&rh::y0_leading(&s, 3.0).unwrap()).unwrap();
    assert!((w0 + w1).abs() < 1e-12, "{w0} {w1}");
    // the sinh-Gordon solution is negative for γ = 1
    assert!(w0 < 0.0);
}
