//! Acceptance checks. Run with `cargo test -p stiffness-lab --test acceptance`.
//!
//! Prints one PASS/FAIL line per check and exits nonzero if any check fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use stiffness_lab::certificates::{in_chetaev_cone, trace_along, Certificate};
use stiffness_lab::coefficients::{log_grid, CoefficientProfile, Window};
use stiffness_lab::criteria::{
    all_hold, negdef_check, thm1_check, thm1_pointwise, thm2_check, thm2_pointwise, vdot_matrix_thm1,
    vdot_matrix_thm2, ConditionStatus,
};
use stiffness_lab::families::ExampleFamily;
use stiffness_lab::integrator::{integrate, Classification, IntegrationConfig, PlanarState};
use stiffness_lab::oracles::bessel::{bessel_i_scaled_deriv, bessel_k_scaled_deriv};
use stiffness_lab::oracles::{
    bessel_i, bessel_i_scaled, bessel_k, bessel_k_scaled, gamma_fn, ClosedFormFamily, ClosedFormSolution,
};
use stiffness_lab::parallel::{map, Execution};
use stiffness_lab::transform::{equivalence_check, reparametrize, Gauge};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

fn random_pure(rng: &mut ChaCha8Rng, allow_negative: bool) -> CoefficientProfile {
    let mut amp = 10f64.powf(rng.gen_range(-2.0..1.0));
    if allow_negative && rng.gen_bool(0.2) {
        amp = -amp;
    }
    match rng.gen_range(0..3) {
        0 => CoefficientProfile::constant(amp),
        1 => CoefficientProfile::power_law(amp, rng.gen_range(-4.0..3.0)),
        _ => CoefficientProfile::exponential(amp, rng.gen_range(-2.0..1.0)),
    }
}

// ---------------------------------------------------------------------------

fn damping_matrix_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let draws: Vec<(f64, CoefficientProfile)> = (0..500)
        .map(|_| (10f64.powf(rng.gen_range(-1.5..1.0)), random_pure(&mut rng, false)))
        .collect();
    let times = log_grid(Window::new(1.0, 50.0).unwrap(), 512);
    let results = map(&draws, Execution::Parallel, |(beta, k)| {
        let mut disagree = 0usize;
        let mut holds = 0usize;
        for &t in &times {
            let conds = all_hold(&thm1_pointwise(*beta, k, t).unwrap());
            let negdef = negdef_check(&vdot_matrix_thm1(*beta, k, t).unwrap());
            disagree += usize::from(conds != negdef);
            holds += usize::from(conds);
        }
        (disagree, holds)
    });
    let disagreements: usize = results.iter().map(|r| r.0).sum();
    let holds: usize = results.iter().map(|r| r.1).sum();
    outcome(
        disagreements == 0,
        format!("{disagreements} disagreements over {} points ({holds} where all conditions hold)", 500 * 512),
    )
}

fn stiffness_matrix_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    let draws: Vec<(f64, CoefficientProfile)> = (0..500)
        .map(|_| (rng.gen_range(0.0..2.0), random_pure(&mut rng, true)))
        .collect();
    let times = log_grid(Window::new(1.0, 50.0).unwrap(), 512);
    let results = map(&draws, Execution::Parallel, |(omega, alpha)| {
        let mut disagree = 0usize;
        let mut holds = 0usize;
        for &t in &times {
            let conds = all_hold(&thm2_pointwise(*omega, alpha, t).unwrap());
            let negdef = negdef_check(&vdot_matrix_thm2(*omega, alpha, t).unwrap());
            disagree += usize::from(conds != negdef);
            holds += usize::from(conds);
        }
        (disagree, holds)
    });
    let disagreements: usize = results.iter().map(|r| r.0).sum();
    let holds: usize = results.iter().map(|r| r.1).sum();
    outcome(
        disagreements == 0,
        format!("{disagreements} disagreements over {} points ({holds} where all conditions hold)", 500 * 512),
    )
}

fn inverse_power_boundary() -> Outcome {
    let betas = [1.0, 1.5, 1.9, 2.1, 3.0, 5.0];
    let window = Window::new(1.0, 200.0).unwrap();
    let cfg = IntegrationConfig::default().with_horizon(200.0);
    let rows = map(&betas, Execution::Parallel, |&beta| {
        let fam = ExampleFamily::Ex3 { beta, omega: 1.0, m: 1.0 };
        let (alpha, k) = fam.coefficients();
        let report = thm1_check(beta, &k, window, 512).unwrap();
        let traj = integrate(&alpha, &k, PlanarState::new(1.0, 1.0, 0.0), &cfg).unwrap();
        (beta, report.condition(2).status, traj.classification, traj.stats.max_norm)
    });
    let mut pass = true;
    let mut parts = Vec::new();
    for (beta, status, class, max_norm) in rows {
        let cond_ok = (status == ConditionStatus::Holds) == (beta > 2.0);
        let class_ok = beta <= 2.0 || class == Classification::Bounded;
        pass &= cond_ok && class_ok;
        parts.push(format!("beta={beta}: {status:?}/{class:?}/max|x|={max_norm:.3}"));
    }
    outcome(pass, parts.join("; "))
}

fn inverse_square_asymptotics() -> Outcome {
    let fam = ExampleFamily::Ex3 { beta: 1.0, omega: 1.0, m: 2.0 };
    let (alpha, k) = fam.coefficients();
    let x0 = PlanarState::new(1.0, 1.0, 0.0);
    let traj = integrate(&alpha, &k, x0, &IntegrationConfig::default().with_horizon(100.0)).unwrap();
    let x50 = traj.interpolate(50.0).unwrap().x1;
    let x100 = traj.interpolate(100.0).unwrap().x1;
    let drift = (x100 - x50).abs();
    let drift_ok = drift <= 1e-6 * (1.0 + x50.abs());

    let sol = ClosedFormSolution::fitted(ClosedFormFamily::Ex3m2 { beta: 1.0, omega: 1.0 }, &x0).unwrap();
    let worst = (0..=200)
        .map(|i| 1.0 + 0.1 * i as f64)
        .map(|t| rel_diff(sol.solution_eval(t).unwrap(), traj.interpolate(t).unwrap().x1))
        .fold(0.0, f64::max);
    let closed_ok = worst <= 1e-6;
    outcome(
        drift_ok && closed_ok,
        format!(
            "|x(100)-x(50)| = {drift:.3e} vs bound {:.3e}; limit {:.6}; closed form vs integrator on [1,21]: max rel {worst:.2e}",
            1e-6 * (1.0 + x50.abs()),
            sol.asymptotic_limit().unwrap()
        ),
    )
}

fn exponential_decay_oracle() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (beta, omega, m) in [(1.0, 1.0, 1.0), (2.0, 1.0, 0.5)] {
        let fam = ClosedFormFamily::Ex4 { beta, omega, m };
        let x0 = PlanarState::new(0.0, 1.0, 0.0);
        let sol = ClosedFormSolution::fitted(fam, &x0).unwrap();
        let (alpha, k) = fam.coefficients();
        let x = |t: f64| sol.solution_eval(t).unwrap();
        let h = 1e-3;
        let max_resid = (0..10)
            .map(|i| 0.5 + 2.0 * i as f64)
            .map(|t| {
                let xdd = (x(t + h) - 2.0 * x(t) + x(t - h)) / (h * h);
                let xd = (x(t + h) - x(t - h)) / (2.0 * h);
                (xdd + alpha.value(t).unwrap() * xd - k.value(t).unwrap() * x(t)).abs()
            })
            .fold(0.0, f64::max);
        let limit = 0.5 * sol.c1 * gamma_fn(beta / m).unwrap() * (omega / m).powf(-beta / m);
        let traj = integrate(&alpha, &k, x0, &IntegrationConfig::default().with_horizon(40.0)).unwrap();
        let approach = rel_diff(traj.last().x1, limit);
        let ok = max_resid <= 1e-6 && approach <= 1e-4;
        pass &= ok;
        parts.push(format!(
            "(beta,omega,m)=({beta},{omega},{m}): residual {max_resid:.2e}, limit {limit:.8}, |x(40)-limit|/limit {approach:.2e}"
        ));
    }
    outcome(pass, parts.join("; "))
}

fn polynomial_damping_divergence() -> Outcome {
    let cases = [(1.0, 1.0, 1.0), (1.0, 1.0, 3.0)];
    let rows = map(&cases, Execution::Parallel, |&(beta, omega, m)| {
        let fam = ExampleFamily::Ex5 { beta, omega, m };
        let (alpha, k) = fam.coefficients();
        let report = thm2_check(omega, &alpha, Window::new(1.0, 500.0).unwrap(), 512).unwrap();
        let c3 = report.condition(2).clone();
        let cfg = IntegrationConfig::default().with_horizon(500.0).with_r_escape(1e6);
        let run = integrate(&alpha, &k, PlanarState::new(1.0, 1.0, 1.0), &cfg);
        (m, c3, run)
    });
    let mut pass = true;
    let mut parts = Vec::new();
    for (m, c3, run) in rows {
        let witness_ok = c3.status == ConditionStatus::Fails && c3.first_violation_time.is_some_and(f64::is_finite);
        let (escaped, what) = match run {
            Ok(traj) => (
                matches!(traj.classification, Classification::Escaped { .. }),
                format!(
                    "{:?}, max|x| = {:.4e} at t = {}",
                    traj.classification,
                    traj.stats.max_norm,
                    traj.last().t
                ),
            ),
            Err(e) => (false, format!("integration error: {e}")),
        };
        pass &= witness_ok && escaped;
        parts.push(format!(
            "m={m}: condition fails first at t={:?}; {what}",
            c3.first_violation_time
        ));
    }
    outcome(pass, parts.join("; "))
}

fn exponential_damping_bounded() -> Outcome {
    let fam = ClosedFormFamily::Ex5x { beta: 1.0, omega: 1.0, m: 1.0 };
    let (beta, m) = (1.0_f64, 1.0_f64);
    let x0 = PlanarState::new(0.0, 1.0, 0.0);
    let sol = ClosedFormSolution::fitted(fam, &x0).unwrap();
    let limit = sol.c1 / PI.sqrt() * (m / beta).sqrt();
    let (alpha, k) = fam.coefficients();
    let cfg = IntegrationConfig {
        horizon: 20.0,
        max_steps: 500_000_000,
        sample_dt: Some(0.01),
        ..IntegrationConfig::default()
    };
    let start = Instant::now();
    match integrate(&alpha, &k, x0, &cfg) {
        Ok(traj) => {
            let bounded = traj.classification == Classification::Bounded;
            let approach = rel_diff(traj.last().x1, limit);
            outcome(
                bounded && approach <= 1e-4,
                format!(
                    "{:?} after {} steps ({:.1} s); x(20) = {:.10}, limit {:.10}, rel diff {approach:.2e}",
                    traj.classification,
                    traj.stats.steps_accepted,
                    start.elapsed().as_secs_f64(),
                    traj.last().x1,
                    limit
                ),
            )
        }
        Err(e) => outcome(false, format!("integration error: {e}")),
    }
}

fn chetaev_escape() -> Outcome {
    let k = CoefficientProfile::sum(vec![
        CoefficientProfile::constant(1.0),
        CoefficientProfile::power_law(1.0, 1.0),
    ]);
    let alpha = CoefficientProfile::constant(1.0);
    let cert = Certificate::chetaev(k.clone(), 1.0);
    let k0 = k.value(0.0).unwrap();
    let radius = 1e-3;
    let angles = [0.0, 0.5, -0.5, PI, PI + 0.3];
    let cfg = IntegrationConfig::default().with_horizon(100.0).with_r_escape(1e6);
    let mut pass = true;
    let mut parts = Vec::new();
    for theta in angles {
        let (x1, x2) = (radius * theta.cos(), radius * theta.sin());
        let inside = in_chetaev_cone(k0, radius * (1.0 + 1e-12), x1, x2);
        let traj = integrate(&alpha, &k, PlanarState::new(0.0, x1, x2), &cfg).unwrap();
        let trace = trace_along(&cert, &traj).unwrap();
        let escaped = matches!(traj.classification, Classification::Escaped { .. });
        pass &= inside && escaped && trace.monotone_increasing;
        parts.push(format!(
            "theta={theta:.2}: {:?}, V increasing {}",
            traj.classification, trace.monotone_increasing
        ));
    }
    outcome(pass, parts.join("; "))
}

fn reparametrization_equivalence() -> Outcome {
    let cfg = IntegrationConfig::default();
    let f = Gauge::thm1(CoefficientProfile::exponential(1.0, -1.0), 2.0).unwrap();
    let (r1, _, _) = equivalence_check(&f, 1.0, 1.0, Window::new(0.0, 5.0).unwrap(), (1.0, 0.0), &cfg).unwrap();

    let g = Gauge::thm2(CoefficientProfile::power_law(1.0, 1.0), 2.0).unwrap();
    let window = Window::new(0.5, 3.0).unwrap();
    let (r2, _, _) = equivalence_check(&g, 1.0, 1.0, window, (1.0, 0.0), &cfg).unwrap();
    let (alpha_tau, _) = reparametrize(&g, 1.0, 1.0).unwrap();
    let negative_below_one = log_grid(Window::new(0.5, 0.999).unwrap(), 64)
        .iter()
        .all(|&tau| alpha_tau.value(tau).unwrap() < 0.0);

    let pass = r1.max_rel_diff <= 1e-6
        && r2.max_rel_diff <= 1e-6
        && negative_below_one
        && r2.transformed == Classification::Bounded;
    outcome(
        pass,
        format!(
            "decreasing gauge: max rel diff {:.2e} over {} samples; increasing gauge: max rel diff {:.2e}, damping < 0 on [0.5,1): {negative_below_one}, {:?}",
            r1.max_rel_diff,
            r1.samples.len(),
            r2.max_rel_diff,
            r2.transformed
        ),
    )
}

fn special_functions() -> Outcome {
    let mut worst_wronskian = 0.0_f64;
    for i in 0..=20 {
        let nu = 0.25 * i as f64;
        for z in log_grid(Window::new(0.1, 50.0).unwrap(), 40) {
            let is = bessel_i_scaled(nu, z).unwrap();
            let ks = bessel_k_scaled(nu, z).unwrap();
            let isd = bessel_i_scaled_deriv(nu, z).unwrap();
            let ksd = bessel_k_scaled_deriv(nu, z).unwrap();
            let w = is * ksd - isd * ks;
            worst_wronskian = worst_wronskian.max(rel_diff(w, -1.0 / z));
        }
    }
    let mut worst_half = 0.0_f64;
    for z in log_grid(Window::new(0.5, 50.0).unwrap(), 30) {
        let c = (2.0 / (PI * z)).sqrt();
        let e = (PI / (2.0 * z)).sqrt() * (-z).exp();
        let pairs = [
            (bessel_i(0.5, z).unwrap(), c * z.sinh()),
            (bessel_i(-0.5, z).unwrap(), c * z.cosh()),
            (bessel_i(1.5, z).unwrap(), c * (z.cosh() - z.sinh() / z)),
            (bessel_k(0.5, z).unwrap(), e),
            (bessel_k(1.5, z).unwrap(), e * (1.0 + 1.0 / z)),
        ];
        for (got, want) in pairs {
            worst_half = worst_half.max(rel_diff(got, want));
        }
    }
    let mut worst_gamma = 0.0_f64;
    for i in 0..400 {
        let x = 0.1 + 0.4 * i as f64;
        worst_gamma = worst_gamma.max(rel_diff(gamma_fn(x + 1.0).unwrap(), x * gamma_fn(x).unwrap()));
    }
    outcome(
        worst_wronskian <= 1e-9 && worst_half <= 1e-10 && worst_gamma <= 1e-12,
        format!("Wronskian {worst_wronskian:.2e}, half-integer forms {worst_half:.2e}, gamma recurrence {worst_gamma:.2e}"),
    )
}

/// `x(T)` for constant `α`, `k` from the eigenvalues of `[[0, 1], [k, −α]]`.
fn constant_coefficient_exact(alpha: f64, k: f64, x0: (f64, f64), t: f64) -> (f64, f64) {
    let disc = alpha * alpha + 4.0 * k;
    if disc > 0.0 {
        let r = disc.sqrt();
        let (l1, l2) = (-0.5 * alpha + 0.5 * r, -0.5 * alpha - 0.5 * r);
        // x = a e^{l1 t} + b e^{l2 t}
        let a = (x0.1 - l2 * x0.0) / (l1 - l2);
        let b = x0.0 - a;
        (
            a * (l1 * t).exp() + b * (l2 * t).exp(),
            a * l1 * (l1 * t).exp() + b * l2 * (l2 * t).exp(),
        )
    } else {
        let s = -0.5 * alpha;
        let w = 0.5 * (-disc).sqrt();
        // x = e^{st}(A cos wt + B sin wt)
        let a = x0.0;
        let b = (x0.1 - s * a) / w;
        let (c, sn, e) = ((w * t).cos(), (w * t).sin(), (s * t).exp());
        (
            e * (a * c + b * sn),
            e * (s * (a * c + b * sn) + w * (b * c - a * sn)),
        )
    }
}

fn integrator_baseline() -> Outcome {
    let zero = CoefficientProfile::constant(0.0);
    let minus_one = CoefficientProfile::constant(-1.0);
    let cfg = IntegrationConfig::default().with_horizon(20.0 * PI);
    let traj = integrate(&zero, &minus_one, PlanarState::new(0.0, 1.0, 0.0), &cfg).unwrap();
    let drift = traj
        .states
        .iter()
        .map(|s| (s.x1 * s.x1 + s.x2 * s.x2 - 1.0).abs())
        .fold(0.0, f64::max);

    let cases = [(1.0, 1.0), (2.0, 4.0), (0.5, -4.0), (3.0, -1.0), (0.0, 0.25)];
    let mut worst = 0.0_f64;
    for (alpha, k) in cases {
        let x0 = (1.0, -0.5);
        let traj = integrate(
            &CoefficientProfile::constant(alpha),
            &CoefficientProfile::constant(k),
            PlanarState::new(0.0, x0.0, x0.1),
            &IntegrationConfig::default().with_horizon(10.0),
        )
        .unwrap();
        let (e1, e2) = constant_coefficient_exact(alpha, k, x0, 10.0);
        let end = traj.last();
        let err = (end.x1 - e1).hypot(end.x2 - e2) / e1.hypot(e2);
        worst = worst.max(err);
    }
    outcome(
        drift <= 1e-6 && worst <= 1e-7,
        format!("rotation drift {drift:.2e} over 20*pi; constant-coefficient end states max rel err {worst:.2e}"),
    )
}

type Check = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let checks: [Check; 11] = [
        ("constant-damping conditions match matrix definiteness", damping_matrix_equivalence),
        ("constant-stiffness conditions match matrix definiteness", stiffness_matrix_equivalence),
        ("inverse-power stiffness threshold beta > 2 omega^2", inverse_power_boundary),
        ("inverse-square stiffness converges to a constant", inverse_square_asymptotics),
        ("exponentially decaying stiffness closed form and limit", exponential_decay_oracle),
        ("polynomial damping diverges", polynomial_damping_divergence),
        ("exponential damping stays bounded and converges", exponential_damping_bounded),
        ("increasing stiffness escapes from the cone", chetaev_escape),
        ("reparametrized trajectories match base trajectories", reparametrization_equivalence),
        ("special-function identities", special_functions),
        ("integrator baseline", integrator_baseline),
    ];
    let total = Instant::now();
    let mut failed = 0;
    for (name, check) in checks {
        let start = Instant::now();
        let r = check();
        let tag = if r.pass { "PASS" } else { "FAIL" };
        failed += usize::from(!r.pass);
        println!("{tag} {name} ({:.2} s): {}", start.elapsed().as_secs_f64(), r.detail);
    }
    println!(
        "{} of {} checks passed in {:.1} s",
        checks.len() - failed,
        checks.len(),
        total.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
