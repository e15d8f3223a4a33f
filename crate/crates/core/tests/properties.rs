use proptest::prelude::*;

use stiffness_lab::certificates::{in_chetaev_cone, Certificate};
use stiffness_lab::criteria::{
    all_hold, negdef_check, thm1_pointwise, thm2_pointwise, vdot_matrix_thm1, vdot_matrix_thm2,
    SymmetricMatrix2,
};
use stiffness_lab::integrator::{integrate, IntegrationConfig, PlanarState};
use stiffness_lab::CoefficientProfile;

fn pure_profile() -> impl Strategy<Value = CoefficientProfile> {
    prop_oneof![
        (0.01f64..10.0).prop_map(CoefficientProfile::constant),
        (0.01f64..10.0, -4.0f64..3.0).prop_map(|(a, p)| CoefficientProfile::power_law(a, p)),
        (0.01f64..10.0, -2.0f64..1.0).prop_map(|(a, r)| CoefficientProfile::exponential(a, r)),
    ]
}

fn signed_profile() -> impl Strategy<Value = CoefficientProfile> {
    (pure_profile(), any::<bool>()).prop_map(|(p, neg)| if neg { CoefficientProfile::scaled(-1.0, p) } else { p })
}

proptest! {
    #[test]
    fn derivative_matches_central_difference(p in pure_profile(), t in 1.0f64..5.0) {
        let h = 1e-5 * t;
        let fd = (p.value(t + h).unwrap() - p.value(t - h).unwrap()) / (2.0 * h);
        let d = p.derivative(t).unwrap();
        prop_assert!((fd - d).abs() <= 1e-6 * d.abs().max(p.value(t).unwrap().abs()).max(1.0));
    }

    #[test]
    fn sum_and_scale_are_linear(p in pure_profile(), q in pure_profile(), c in -3.0f64..3.0, t in 1.0f64..5.0) {
        let combo = CoefficientProfile::sum(vec![CoefficientProfile::scaled(c, p.clone()), q.clone()]);
        let (v, d) = combo.eval(t).unwrap();
        let (pv, pd) = p.eval(t).unwrap();
        let (qv, qd) = q.eval(t).unwrap();
        prop_assert!((v - (c * pv + qv)).abs() <= 1e-12 * (c * pv).abs().max(qv.abs()).max(1.0));
        prop_assert!((d - (c * pd + qd)).abs() <= 1e-12 * (c * pd).abs().max(qd.abs()).max(1.0));
    }

    #[test]
    fn damping_conditions_iff_definite(beta in -1.0f64..10.0, k in pure_profile(), t in 1.0f64..50.0) {
        let conds = all_hold(&thm1_pointwise(beta, &k, t).unwrap());
        prop_assert_eq!(conds, negdef_check(&vdot_matrix_thm1(beta, &k, t).unwrap()));
    }

    #[test]
    fn stiffness_conditions_iff_definite(omega in 0.0f64..3.0, alpha in signed_profile(), t in 1.0f64..50.0) {
        let conds = all_hold(&thm2_pointwise(omega, &alpha, t).unwrap());
        prop_assert_eq!(conds, negdef_check(&vdot_matrix_thm2(omega, &alpha, t).unwrap()));
    }

    #[test]
    fn definite_matrix_has_negative_quadratic_form(
        a11 in -10.0f64..10.0, a12 in -10.0f64..10.0, a22 in -10.0f64..10.0,
        angle in 0.0f64..std::f64::consts::TAU,
    ) {
        let m = SymmetricMatrix2::new(a11, a12, a22);
        if negdef_check(&m) {
            prop_assert!(m.quad_form(angle.cos(), angle.sin()) < 0.0);
        }
    }

    #[test]
    fn lyapunov_derivative_is_the_matrix_form(
        beta in 0.1f64..5.0, k in pure_profile(), t in 1.0f64..20.0, x1 in -5.0f64..5.0, x2 in -5.0f64..5.0,
    ) {
        let cert = Certificate::lyapunov_k(k.clone(), beta);
        let s = PlanarState::new(t, x1, x2);
        let direct = cert.vdot_eval(&s).unwrap();
        let quad = vdot_matrix_thm1(beta, &k, t).unwrap().quad_form(x1, x2);
        prop_assert!((direct - quad).abs() <= 1e-12 * direct.abs().max(1.0));
    }

    #[test]
    fn lyapunov_derivative_matches_chain_rule(
        beta in 0.1f64..5.0, k in pure_profile(), t in 1.0f64..20.0, x1 in -5.0f64..5.0, x2 in -5.0f64..5.0,
    ) {
        // V̇ = ∂V/∂t + ∇V·f for V = ½k x1² + ½x2²
        let cert = Certificate::lyapunov_k(k.clone(), beta);
        let (kv, kd) = k.eval(t).unwrap();
        let expected = 0.5 * kd * x1 * x1 + kv * x1 * x2 + x2 * (kv * x1 - beta * x2);
        let got = cert.vdot_eval(&PlanarState::new(t, x1, x2)).unwrap();
        prop_assert!((got - expected).abs() <= 1e-12 * expected.abs().max(1.0));
    }

    #[test]
    fn chetaev_function_positive_in_cone(
        beta in 0.1f64..5.0, c in 0.5f64..4.0, slope in 0.1f64..2.0, t in 0.0f64..10.0,
        angle in -1.0f64..1.0, r in 1e-4f64..1.0,
    ) {
        let k = CoefficientProfile::sum(vec![CoefficientProfile::constant(c), CoefficientProfile::power_law(slope, 1.0)]);
        let cert = Certificate::chetaev(k.clone(), beta);
        let kt = k.value(t).unwrap();
        let theta = angle * kt.sqrt().atan();
        let (x1, x2) = (r * theta.cos(), r * theta.sin());
        prop_assume!(in_chetaev_cone(kt, 1.0, x1, x2));
        let s = PlanarState::new(t, x1, x2);
        prop_assert!(cert.v_eval(&s).unwrap() > 0.0);
        prop_assert!(cert.vdot_eval(&s).unwrap() > 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn flow_is_linear_in_initial_data(
        beta in 0.1f64..3.0, k in pure_profile(), a in -2.0f64..2.0, b in -2.0f64..2.0,
        u in (-1.0f64..1.0, -1.0f64..1.0), v in (-1.0f64..1.0, -1.0f64..1.0),
    ) {
        let alpha = CoefficientProfile::constant(beta);
        let cfg = IntegrationConfig::default()
            .with_horizon(3.0)
            .with_tolerances(1e-11, 1e-13)
            .with_r_escape(1e200);
        let end = |x1: f64, x2: f64| {
            let s = *integrate(&alpha, &k, PlanarState::new(1.0, x1, x2), &cfg).unwrap().last();
            (s.x1, s.x2)
        };
        let eu = end(u.0, u.1);
        let ev = end(v.0, v.1);
        let ec = end(a * u.0 + b * v.0, a * u.1 + b * v.1);
        let scale = 1.0 + (a * eu.0).abs() + (b * ev.0).abs() + (a * eu.1).abs() + (b * ev.1).abs();
        prop_assert!((ec.0 - (a * eu.0 + b * ev.0)).abs() <= 1e-8 * scale);
        prop_assert!((ec.1 - (a * eu.1 + b * ev.1)).abs() <= 1e-8 * scale);
    }
}
