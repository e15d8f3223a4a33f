use proptest::prelude::*;

use stiffness_lab::coefficients::{log_grid, Window};
use stiffness_lab::criteria::{all_hold, thm1_pointwise, thm2_pointwise};
use stiffness_lab::integrator::IntegrationConfig;
use stiffness_lab::transform::{base_problem, corollary_pointwise, equivalence_check, reparametrize};
use stiffness_lab::{CoefficientProfile, Gauge, GaugeDirection};

#[test]
fn equivalence_for_power_gauges() {
    let cfg = IntegrationConfig::default();
    let cases = [
        (Gauge::thm1(CoefficientProfile::power_law(1.0, -1.0), 1.0).unwrap(), Window::new(1.0, 4.0).unwrap()),
        (Gauge::thm1(CoefficientProfile::exponential(2.0, -0.5), 1.5).unwrap(), Window::new(0.0, 3.0).unwrap()),
        (Gauge::thm2(CoefficientProfile::power_law(1.0, 0.5), 1.0).unwrap(), Window::new(1.0, 4.0).unwrap()),
        (Gauge::thm2(CoefficientProfile::exponential(1.0, 0.3), 2.0).unwrap(), Window::new(0.0, 2.0).unwrap()),
    ];
    for (gauge, window) in cases {
        let (report, _, _) = equivalence_check(&gauge, 1.2, 0.8, window, (1.0, -0.3), &cfg).unwrap();
        assert!(report.max_rel_diff < 1e-6, "{gauge:?}: {}", report.max_rel_diff);
        assert!(report.samples.len() > 5);
    }
}

#[test]
fn time_map_inverse_round_trip() {
    let gauge = Gauge::thm2(CoefficientProfile::power_law(1.0, 1.0), 2.0).unwrap();
    for tau in [0.7, 1.0, 2.5, 6.0] {
        let t = gauge.time_map(0.5, tau).unwrap();
        let back = gauge.inverse_time_map(0.5, t).unwrap();
        assert!((back - tau).abs() < 1e-9 * tau, "{tau} -> {t} -> {back}");
    }
}

#[test]
fn base_problem_is_constant_damping_or_stiffness() {
    let f = Gauge::thm1(CoefficientProfile::exponential(1.0, -1.0), 2.0).unwrap();
    let (alpha, k) = base_problem(&f, 1.5, 0.7, 0.0).unwrap();
    for t in [0.0, 0.3, 0.9] {
        assert!((alpha.value(t).unwrap() - 1.5).abs() < 1e-15);
        // f = e^{−τ} with dτ/dt = e^{τ}: τ(t) = −ln(1 − t), so K = ω²(1 − t)
        assert!((k.value(t).unwrap() - 0.49 * (1.0 - t)).abs() < 1e-9, "t = {t}");
    }
    let g = Gauge::thm2(CoefficientProfile::power_law(1.0, 1.0), 2.0).unwrap();
    let (alpha, k) = base_problem(&g, 1.5, 0.7, 1.0).unwrap();
    assert!((k.value(0.5).unwrap() - 0.49).abs() < 1e-15);
    // dτ/dt = 1/τ: τ(t) = √(1 + 2t), α = β√(1 + 2t)
    assert!((alpha.value(0.5).unwrap() - 1.5 * 2f64.sqrt()).abs() < 1e-9);
    let g = Gauge::thm2(CoefficientProfile::power_law(1.0, 1.0), -2.0).unwrap();
    let (alpha, _) = base_problem(&g, 1.5, 0.7, 1.0).unwrap();
    // dτ/dt = τ: τ(t) = e^t
    assert!((alpha.value(0.5).unwrap() - 1.5 * 0.5f64.exp()).abs() < 1e-9);
}

#[test]
fn rejects_bad_gauges() {
    assert!(Gauge::new(CoefficientProfile::power_law(1.0, 1.0), f64::NAN, GaugeDirection::Thm1Base).is_err());
    assert!(Gauge::thm1(CoefficientProfile::power_law(1.0, 1.0), 2.0).unwrap().check_hypotheses().is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn decreasing_gauge_condition_pulls_back(
        p in 0.2f64..3.0, n in 0.5f64..3.0, beta in 0.1f64..5.0, omega in 0.1f64..2.0, tau in 1.0f64..20.0,
    ) {
        let gauge = Gauge::thm1(CoefficientProfile::power_law(1.0, -p), n).unwrap();
        let direct = all_hold(&corollary_pointwise(&gauge, beta, omega, tau).unwrap());
        // Base problem at the matching time has K(t) = ω²f(τ), K̇ = ω²f′(τ)·dτ/dt.
        let f = tau.powf(-p);
        let fp = -p * tau.powf(-p - 1.0);
        let rate = f.powf(-n / 2.0);
        let k_value = omega * omega * f;
        let k_slope = omega * omega * fp * rate;
        let base = CoefficientProfile::sum(vec![
            CoefficientProfile::constant(k_value),
            CoefficientProfile::power_law_from(k_slope, 1.0, 0.0),
        ]);
        let pulled = all_hold(&thm1_pointwise(beta, &base, 0.0).unwrap());
        let lhs = -fp * f.powf(-n / 2.0 - 2.0);
        let rhs = 2.0 * omega * omega / beta;
        prop_assume!((lhs - rhs).abs() > 1e-9 * rhs);
        prop_assert_eq!(direct, pulled);
    }

    #[test]
    fn increasing_gauge_condition_pulls_back(
        p in 0.2f64..3.0, n in 0.5f64..3.0, beta in 0.1f64..5.0, omega in 0.0f64..2.0, tau in 1.0f64..20.0,
    ) {
        let gauge = Gauge::thm2(CoefficientProfile::power_law(1.0, p), n).unwrap();
        let direct = all_hold(&corollary_pointwise(&gauge, beta, omega, tau).unwrap());
        let g = tau.powf(p);
        let gp = p * tau.powf(p - 1.0);
        let rate = g.powf(-n / 2.0);
        let base = CoefficientProfile::sum(vec![
            CoefficientProfile::constant(beta * g),
            CoefficientProfile::power_law_from(beta * gp * rate, 1.0, 0.0),
        ]);
        let pulled = all_hold(&thm2_pointwise(omega, &base, 0.0).unwrap());
        let lhs = gp / g;
        let rhs = 0.5 * g.powf(n / 2.0) * (1.0 / (beta * g) + omega * omega).powi(2);
        prop_assume!((lhs - rhs).abs() > 1e-9 * rhs);
        prop_assert_eq!(direct, pulled);
    }

    #[test]
    fn reparametrized_coefficients_are_positive_stiffness(
        p in 0.2f64..3.0, n in 0.5f64..3.0, beta in 0.1f64..5.0, omega in 0.1f64..2.0,
    ) {
        let gauge = Gauge::thm1(CoefficientProfile::power_law(1.0, -p), n).unwrap();
        let (_, k) = reparametrize(&gauge, beta, omega).unwrap();
        for tau in log_grid(Window::new(1.0, 10.0).unwrap(), 16) {
            prop_assert!(k.value(tau).unwrap() > 0.0);
        }
    }
}
