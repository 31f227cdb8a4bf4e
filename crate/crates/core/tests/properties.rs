//! Property tests for the structural invariants.

use num_complex::Complex64;
use proptest::prelude::*;

use tttoda::fredholm::{self, Branch, NystromGrid};
use tttoda::linalg::{self, cx};
use tttoda::region;
use tttoda::rh::{self, G3Ray};
use tttoda::stokes::{self, StokesParams};
use tttoda::toda::{self, OdeConfig};
use tttoda::{AsymptoticData, Case};

fn any_case() -> impl Strategy<Value = Case> {
    prop_oneof![Just(Case::A4), Just(Case::A5), Just(Case::A6)]
}

fn params(h: f64) -> impl Strategy<Value = (f64, f64)> {
    (-h..h, -h..h)
}

/// `γ` strictly inside the fundamental domain, `margin` away from its edges.
fn interior_gamma(case: Case, margin: f64) -> impl Strategy<Value = AsymptoticData> {
    (0.0f64..1.0, 0.0f64..1.0).prop_filter_map("outside domain", move |(u, v)| {
        let (lo0, hi1) = match case {
            Case::A4 => (-1.0, 1.0),
            Case::A5 => (-1.0, 2.0),
            Case::A6 => (-2.0, 2.0),
        };
        // γ₀ ∈ [lo0, lo0 + 2 + (hi1 − lo0)], γ₁ ∈ [lo0 − 2, hi1]
        let span = 2.0 + hi1 - lo0;
        let g = AsymptoticData::new(lo0 + u * span, hi1 - v * span, case);
        (g.margin() > margin).then_some(g)
    })
}

fn minor_dets(m: &nalgebra::DMatrix<f64>) -> Vec<f64> {
    (1..=m.nrows()).map(|k| m.view((0, 0), (k, k)).determinant()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn q_symmetries_hold(case in any_case(), (s1, s2) in params(5.0)) {
        let rep = stokes::verify_q_symmetries(&StokesParams::new(s1, s2, case));
        prop_assert!(rep.passes(1e-12), "{:?}", rep.failures(1e-12));
    }

    #[test]
    fn char_poly_matches_matrix(case in any_case(), (s1, s2) in params(5.0)) {
        let s = StokesParams::new(s1, s2, case);
        let closed = stokes::char_poly(&s);
        prop_assert!(closed.is_symmetric());
        let numeric = stokes::char_poly_numeric(&s);
        for (a, b) in closed.coeffs.iter().zip(&numeric) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn inverse_form_positivity_agrees(case in any_case(), (s1, s2) in params(5.0)) {
        let s = StokesParams::new(s1, s2, case);
        let sm = linalg::real_part(&stokes::stokes_matrix(&s));
        let si = sm.clone().try_inverse().unwrap();
        let a = &sm + sm.transpose();
        let b = &si + si.transpose();
        let (ea, eb) = (linalg::min_sym_eigenvalue(&a), linalg::min_sym_eigenvalue(&b));
        // skip the boundary, where both are singular
        prop_assume!(ea.abs() > 1e-8 && eb.abs() > 1e-8);
        prop_assert_eq!(ea > 0.0, eb > 0.0);
    }

    #[test]
    fn det_of_inverse_form_4a((s1, s2) in params(5.0)) {
        let s = StokesParams::new(s1, s2, Case::A4);
        let sm = linalg::real_part(&stokes::stokes_matrix(&s));
        let si = sm.try_inverse().unwrap();
        let det = (&si + si.transpose()).determinant();
        let want = (2.0 + 2.0 * s1 - s2) * (2.0 + s2).powi(2) * (2.0 - 2.0 * s1 - s2);
        prop_assert!((det - want).abs() <= 1e-10 * want.abs().max(1.0), "{} vs {}", det, want);
    }

    #[test]
    fn unimodular_monodromy_iff_region_a(case in any_case(), (s1, s2) in params(6.0)) {
        let s = StokesParams::new(s1, s2, case);
        let v = region::classify(&s);
        prop_assert_eq!(stokes::monodromy_unit_circle(&s, 1e-8).unimodular, v.in_a);
    }

    #[test]
    fn region_b_iff_positive_definite(case in any_case(), (s1, s2) in params(5.0)) {
        let v = region::classify(&StokesParams::new(s1, s2, case));
        prop_assert!(v.b_checks.agree(), "{:?}", v.b_checks);
        prop_assert_eq!(v.in_b, v.b_checks.positive_definite);
    }

    #[test]
    fn principal_minors_decide_positivity((s1, s2) in params(4.0)) {
        let s = StokesParams::new(s1, s2, Case::A4);
        let sm = linalg::real_part(&stokes::stokes_matrix(&s));
        let sym = &sm + sm.transpose();
        let minors = minor_dets(&sym);
        prop_assume!(minors.iter().all(|m| m.abs() > 1e-8));
        prop_assert_eq!(minors.iter().all(|&m| m > 0.0), region::classify(&s).in_b);
    }

    #[test]
    fn discriminant_closed_form_4a((s1, s2) in params(5.0)) {
        let s = StokesParams::new(s1, s2, Case::A4);
        let generic = tttoda::poly::discriminant(&stokes::char_poly(&s).coeffs);
        let want = (s1 * s1 + 4.0 * s2 + 8.0).powi(2) * (2.0 + 2.0 * s1 - s2) * (2.0 - 2.0 * s1 - s2);
        let scale = (1.0 + s1.abs() + s2.abs()).powi(6);
        prop_assert!((generic - want).abs() <= 1e-9 * scale, "{} vs {}", generic, want);
    }

    #[test]
    fn region_b_6a_interlacing((s1, s2) in params(4.0)) {
        let v = region::classify(&StokesParams::new(s1, s2, Case::A6));
        prop_assert_eq!(v.b_checks.inequalities, v.b_checks.interlacing);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn gamma_round_trip_4a(g in interior_gamma(Case::A4, 1e-3)) {
        round_trip(g)?;
    }

    #[test]
    fn gamma_round_trip_5a(g in interior_gamma(Case::A5, 1e-3)) {
        round_trip(g)?;
    }

    #[test]
    fn gamma_round_trip_6a(g in interior_gamma(Case::A6, 1e-3)) {
        round_trip(g)?;
    }

    #[test]
    fn char_poly_roots_from_gammas(g in interior_gamma(Case::A4, 1e-2)) {
        let s = region::gamma_to_stokes(&g);
        let mut roots = stokes::char_poly(&s).roots();
        let (t1, t2) = region::gamma_angles(&g);
        for t in [t1, -t1, t2, -t2] {
            let z = Complex64::from_polar(1.0, t);
            let (i, d) = roots
                .iter()
                .enumerate()
                .map(|(i, r)| (i, (r - z).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            // double roots only resolve to about √ε
            prop_assert!(d < 1e-10_f64.max(1e-6 * (t1 - t2).abs().recip().min(1.0)), "{d}");
            roots.remove(i);
        }
    }
}

fn round_trip(g: AsymptoticData) -> Result<(), TestCaseError> {
    let s = region::gamma_to_stokes(&g);
    let back = region::stokes_to_gammas(&s).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let again = region::gamma_to_stokes(&back);
    prop_assert!((again.s1 - s.s1).abs() < 1e-10 && (again.s2 - s.s2).abs() < 1e-10);
    prop_assert!((back.gamma0 - g.gamma0).abs() < 1e-6 && (back.gamma1 - g.gamma1).abs() < 1e-6);
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn connection_symmetries_growth_scaled((s1, s2) in params(2.0)) {
        // the recursion for E loses about (1 + |s|)^14 ulps
        let s = StokesParams::new(s1, s2, Case::A4);
        let tol = 1e-14 * (1.0 + s1.abs() + s2.abs()).powi(14);
        let mut rep = stokes::verify_connection_symmetries(&s).unwrap();
        rep.extend(stokes::verify_circle_jumps(&s).unwrap());
        prop_assert!(rep.passes(tol.max(1e-12)), "{:?}", rep.failures(tol));
    }

    #[test]
    fn g3_matches_stokes_product((s1, s2) in params(3.0), k in 0.05f64..5.0, x in 0.0f64..1.5) {
        let s = StokesParams::new(s1, s2, Case::A4);
        for ray in [G3Ray::Pi8, G3Ray::NinePi8] {
            let r = rh::jump_g3(ray, k, x, &s).unwrap().cross_check.unwrap();
            prop_assert!(r < 1e-12, "{:?} {}", ray, r);
        }
    }

    #[test]
    fn g2_unimodular((s1, s2) in params(3.0), k in 0.05f64..5.0, x in 0.05f64..2.0, ray in 0usize..8) {
        let s = StokesParams::new(s1, s2, Case::A4);
        let g = rh::jump_g2(rh::g2_ray_angles()[ray], k, x, &s).unwrap();
        prop_assert!((linalg::det(&g.matrix) - cx(1.0, 0.0)).norm() < 1e-12);
        prop_assert!(g.cross_check.unwrap() < 1e-12);
    }

    #[test]
    fn positivity_closed_form_is_worst_case((s1, s2) in params(4.0), x in 0.0f64..2.0, l in 0.05f64..20.0) {
        let s = StokesParams::new(s1, s2, Case::A4);
        let p = rh::positivity_x(&s, x).unwrap();
        let at_one = rh::x_minors_from_moduli(&s, rh::g_moduli(x, 1.0));
        let scale = 1.0 + s1.powi(4) + s2.powi(4);
        prop_assert!((p.x2 - at_one[0]).abs() < 1e-12 * scale);
        prop_assert!((p.x3 - at_one[1]).abs() < 1e-12 * scale);
        prop_assert!((p.x4 - at_one[2]).abs() < 1e-12 * scale);
        // positivity at l = 1 implies positivity at every l
        if p.strict() {
            let other = rh::x_minors_from_moduli(&s, rh::g_moduli(x, l));
            prop_assert!(other.iter().all(|&v| v > -1e-12 * scale));
        }
    }

    #[test]
    fn fredholm_antisymmetric_and_real((s1, s2) in params(1.5), t in 0.5f64..3.0) {
        let s = StokesParams::new(s1, s2, Case::A4);
        let p = fredholm::c_from_stokes(&s, Branch::I).unwrap();
        let r = fredholm::fredholm_q(t, &p, &NystromGrid::for_radius(t, 80).unwrap()).unwrap();
        prop_assert!(r.max_imag < 1e-8);
        prop_assert!(r.antisymmetry[0] < 1e-8 && r.antisymmetry[1] < 1e-8);
    }

    #[test]
    fn y0_exact_symmetries((s1, s2) in params(2.0), x in 1.0f64..6.0) {
        let s = StokesParams::new(s1, s2, Case::A4);
        if let Ok(y) = rh::y0_leading(&s, x) {
            let r = rh::y0_symmetries(&y, &s);
            prop_assert!(r.max_exact() < 1e-12, "{:?}", r);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn ode_reflection_symmetry(g in interior_gamma(Case::A4, 0.5)) {
        let cfg = OdeConfig::default();
        let mirrored = AsymptoticData::new(-g.gamma1, -g.gamma0, Case::A4);
        prop_assume!(mirrored.in_domain());
        let a = toda::solve(&region::gamma_to_stokes(&g), &cfg).unwrap();
        let b = toda::solve(&region::gamma_to_stokes(&mirrored), &cfg).unwrap();
        for i in 0..a.len() {
            let scale = a.w0[i].abs().max(1e-12);
            prop_assert!((a.w0[i] + b.w1[i]).abs() < 1e-5 * scale.max(1.0), "x = {} {} {}", a.xs[i], a.w0[i], b.w1[i]);
        }
    }

    #[test]
    fn ode_sum_negative(g in interior_gamma(Case::A4, 0.3)) {
        prop_assume!(g.gamma0 + g.gamma1 > 0.05);
        let sol = toda::solve(&region::gamma_to_stokes(&g), &OdeConfig::default()).unwrap();
        prop_assert!(sol.w0.iter().zip(&sol.w1).all(|(a, b)| a + b < 0.0));
    }

    #[test]
    fn ode_tolerance_convergence(g in interior_gamma(Case::A4, 1.0)) {
        let s = region::gamma_to_stokes(&g);
        let cfg = OdeConfig::default();
        let a = toda::extract_gammas(&toda::solve(&s, &cfg).unwrap()).unwrap().gammas;
        let fine = OdeConfig { rel_tol: cfg.rel_tol / 2.0, ..cfg };
        let b = toda::extract_gammas(&toda::solve(&s, &fine).unwrap()).unwrap().gammas;
        for (x, y) in [(a.gamma0, b.gamma0), (a.gamma1, b.gamma1)] {
            prop_assert!((x - y).abs() <= 1e-3 * x.abs().max(1e-2));
        }
    }

    #[test]
    fn alpha_matches_gammas(g in interior_gamma(Case::A4, 0.2)) {
        let s = region::gamma_to_stokes(&g);
        let p = fredholm::c_from_stokes(&s, Branch::I).unwrap();
        let alpha = fredholm::alpha_from_params(&p).unwrap();
        let (g0, g1) = fredholm::gammas_from_alpha(&alpha);
        prop_assert!((g0 - g.gamma0).abs() < 1e-8 && (g1 - g.gamma1).abs() < 1e-8, "{:?}", alpha);
        prop_assert!(alpha.windows(2).all(|w| w[0] < w[1]));
    }
}
