use proptest::prelude::*;

use gcalabi::matching;
use gcalabi::ode;
use gcalabi::specfun::{self, HypParams};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn gamma_recurrence(x in 0.01f64..50.0) {
        let g = specfun::gamma_fn(x).unwrap();
        let g1 = specfun::gamma_fn(x + 1.0).unwrap();
        prop_assert!((g1 / (x * g) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pochhammer_is_gamma_ratio(a in 0.1f64..10.0, k in 0usize..15) {
        let p = specfun::pochhammer(a, k);
        let want = specfun::gamma_fn(a + k as f64).unwrap() / specfun::gamma_fn(a).unwrap();
        prop_assert!((p / want - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hyp_approaches_gauss_value(a in -1.0f64..1.0, b in -1.0f64..1.0, excess in 0.5f64..2.0) {
        // the gap closes like (1-z)^(c-a-b); keep c - a - b >= 0.5 and non-integer
        let c = a + b + excess + 0.01;
        prop_assume!(c > 0.05 && (c - a - b).fract().abs() > 1e-3);
        let at_one = specfun::gauss_at_one(a, b, c).unwrap();
        let near = specfun::hyp2f1(HypParams::new(a, b, c, 1.0 - 1e-12)).unwrap();
        prop_assert!((near - at_one).abs() < 1e-4 * at_one.abs().max(1.0));
    }

    #[test]
    fn profile_monotone_and_above_chord(x in 1.0001f64..100.0, dx in 1e-3f64..1.0, n in 3u32..9) {
        let f = specfun::f_profile(x, n).unwrap();
        let f2 = specfun::f_profile(x + dx, n).unwrap();
        prop_assert!(f2 > f);
        prop_assert!(f >= x - 1.0 - 1e-14);
    }

    #[test]
    fn substitution_roundtrip(v in 0.01f64..100.0, vp in -10.0f64..10.0, vpp in 0.01f64..10.0, n in 3u32..9) {
        let (w, wp, wpp) = ode::w_derivatives(v, vp, vpp, n);
        prop_assume!(w > 0.0);
        let (v2, vp2, vpp2) = ode::v_derivatives(w, wp, wpp, n);
        prop_assert!((v2 - v).abs() < 1e-12 * v);
        prop_assert!((vp2 - vp).abs() < 1e-11 * (1.0 + vp.abs()));
        prop_assert!((vpp2 - vpp).abs() < 1e-10 * (1.0 + vpp.abs() + vp * vp / v));
    }

    #[test]
    fn residual_forms_agree(t in 0.01f64..5.0, w in 0.2f64..5.0, wp in -1.0f64..1.0, n in 3u32..9) {
        // with w'' solved from the w form, the v form vanishes too
        let class = w + (1.0 - t) * wp;
        prop_assume!(class > 0.05);
        let wpp = ode::w_second_derivative(t, w, wp, n);
        let (v, vp, vpp) = ode::v_derivatives(w, wp, wpp, n);
        prop_assert!(ode::ode_residual_w(t, w, wp, wpp, n).abs() < 1e-12);
        prop_assert!(ode::ode_residual_v(t, v, vp, vpp, n).abs() < 1e-10 * ode::v_ode_constant(n).max(1.0) * v.powi(4));
    }

    #[test]
    fn legendre_involution(e in -3.0f64..4.0, n in 3u32..7, w0 in 0.5f64..2.0) {
        // 𝔴*(𝔴'(s)) = s 𝔴'(s) - 𝔴(s) on the exact solution
        let s_val = 1.0 + 10f64.powf(e);
        let exact = ode::frak_implicit(s_val, n, w0).unwrap();
        let prof = matching::LegendreProfile::new(n, w0).unwrap();
        let star = prof.conjugate(exact.frak_wp).unwrap();
        let want = s_val * exact.frak_wp - exact.frak_w;
        prop_assert!((star - want).abs() < 1e-9 * exact.frak_w, "{star} vs {want}");
    }
}

#[test]
fn implicit_vs_integrated() {
    for n in [3, 4, 5, 6] {
        for w0 in [0.5, 1.0, 2.0] {
            let traj = ode::integrate_frak(n, w0, 1.0 + 1e-6, 50.0, 1e-12).unwrap();
            for s in traj.iter().step_by(7) {
                let exact = ode::frak_implicit(s.s, n, w0).unwrap();
                assert!(
                    (exact.frak_w - s.frak_w).abs() < 1e-8 * s.frak_w,
                    "n={n} w0={w0} s={}",
                    s.s
                );
            }
        }
    }
}

#[test]
fn route_independence() {
    for n in 3..=8 {
        let m = matching::shoot_w0(n, matching::DEFAULT_BRACKET, 1e-9).unwrap();
        assert!(m.route_gap() < 1e-9, "n={n}: {}", m.route_gap());
        let (w1, wp1) = matching::w_boundary_values(n, m.w0_closed).unwrap();
        assert!((w1 - m.w_at_one).abs() < 1e-8);
        assert!((wp1 - m.wp_at_one).abs() < 1e-8);
    }
}

#[test]
fn expansion_converges_with_order() {
    use gcalabi::potential::{boundary_expansion_u, sample_potential, ModelParams};
    let params = ModelParams::new(4, 2, 1).unwrap();
    let sol = matching::matched_solution(4, 1e-3, 1e-9).unwrap();
    let ser = ode::series_near_one(4, sol.w0, ode::SEED_ORDER).unwrap();
    let (x1, x2) = (500.0, 25.0);
    let exact = sample_potential(&params, &sol, x1, x2).unwrap().u;
    let errs: Vec<f64> = (1..=5)
        .map(|k| ((boundary_expansion_u(&params, &ser, x1, x2, k).unwrap() - exact) / exact).abs())
        .collect();
    for w in errs.windows(2) {
        assert!(w[1] < w[0], "{errs:?}");
    }
}
