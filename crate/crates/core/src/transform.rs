//! Time reparametrizations `dτ/dt = f(τ)^{−n/2}` that turn a one-coefficient
//! problem in `t` into a problem in `τ` where both coefficients vary.
//!
//! With `Thm1Base` the base problem is `ẍ + βẋ − ω²f(τ(t))x = 0`; with
//! `Thm2Base` it is `ẍ + βg(τ(t))ẋ − ω²x = 0`. In both cases `x(t) = y(τ(t))`
//! where `y` solves the transformed equation returned by [`reparametrize`].

use serde::{Deserialize, Serialize};

use crate::coefficients::{log_grid, CoefficientProfile, Window};
use crate::criteria::{fold_statuses, strictly_greater, ConditionResult, ConditionStatus, CriterionReport};
use crate::error::{Error, Result};
use crate::integrator::{integrate, Classification, IntegrationConfig, PlanarState, Trajectory};

/// Absolute accuracy requested from the time-map quadrature.
pub const QUAD_TOL: f64 = 1e-12;
/// Tolerance on `τ` when inverting the time map.
pub const INVERSE_TOL: f64 = 1e-12;

const MAX_SUBINTERVALS: usize = 4000;
const MAX_BRACKET_EXPANSIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GaugeDirection {
    /// Base problem has constant damping; requires `f > 0`, `f′ < 0`.
    Thm1Base,
    /// Base problem has constant stiffness; requires `g > 0`, `g′ > 0`.
    Thm2Base,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gauge {
    pub profile: CoefficientProfile,
    pub n: f64,
    pub direction: GaugeDirection,
}

impl Gauge {
    /// Requires a pure profile (constant, power law or exponential) and a
    /// finite `n`. `n = 0` is the identity reparametrization; negative `n`
    /// reverses the sense in which the gauge stretches time.
    pub fn new(profile: CoefficientProfile, n: f64, direction: GaugeDirection) -> Result<Self> {
        if !profile.is_pure() {
            return Err(Error::InvalidArgument(
                "gauge profile must be a constant, power law or exponential".into(),
            ));
        }
        if !n.is_finite() {
            return Err(Error::InvalidArgument(format!("gauge exponent n must be finite, got {n}")));
        }
        Ok(Self {
            profile,
            n,
            direction,
        })
    }

    pub fn thm1(f: CoefficientProfile, n: f64) -> Result<Self> {
        Self::new(f, n, GaugeDirection::Thm1Base)
    }

    pub fn thm2(g: CoefficientProfile, n: f64) -> Result<Self> {
        Self::new(g, n, GaugeDirection::Thm2Base)
    }

    /// `dt/dτ = f(τ)^{n/2}`.
    pub fn rate(&self, tau: f64) -> Result<f64> {
        let f = self.profile.value(tau)?;
        if f <= 0.0 {
            return Err(Error::Hypothesis(format!(
                "gauge profile must be positive, found {f} at tau = {tau}"
            )));
        }
        let r = f.powf(0.5 * self.n);
        if !r.is_finite() || r == 0.0 {
            return Err(Error::NonFinite {
                what: "gauge rate",
                t: tau,
            });
        }
        Ok(r)
    }

    /// Exact sign analysis of the gauge hypotheses on `τ ≥ domain_start`.
    pub fn check_hypotheses(&self) -> Result<()> {
        let (positive, slope) = match self.profile {
            CoefficientProfile::Constant { c } => (c > 0.0, 0.0),
            CoefficientProfile::PowerLaw { a, p, .. } => (a > 0.0, a * p),
            CoefficientProfile::Exponential { a, r, .. } => (a > 0.0, a * r),
            _ => unreachable!("gauges hold pure profiles"),
        };
        let (name, ok_slope) = match self.direction {
            GaugeDirection::Thm1Base => ("f", slope < 0.0),
            GaugeDirection::Thm2Base => ("g", slope > 0.0),
        };
        if !positive {
            return Err(Error::Hypothesis(format!("gauge profile {name} must be positive")));
        }
        if !ok_slope {
            let want = match self.direction {
                GaugeDirection::Thm1Base => "decreasing",
                GaugeDirection::Thm2Base => "increasing",
            };
            return Err(Error::Hypothesis(format!("gauge profile {name} must be strictly {want}")));
        }
        Ok(())
    }

    /// `∫_{a}^{b} f(s)^{n/2} ds` by adaptive Gauss–Kronrod quadrature.
    pub fn integrate_rate(&self, a: f64, b: f64) -> Result<f64> {
        if a == b {
            return Ok(0.0);
        }
        if b < a {
            return Ok(-self.integrate_rate(b, a)?);
        }
        if self.n == 0.0 {
            return Ok(b - a);
        }
        adaptive_gk(|s| self.rate(s), a, b, QUAD_TOL)
    }

    /// `t(τ) = ∫_{τ0}^{τ} f(s)^{n/2} ds`.
    pub fn time_map(&self, tau0: f64, tau: f64) -> Result<f64> {
        self.integrate_rate(tau0, tau)
    }

    /// Supremum of `t(τ)` as `τ → ∞`, when it is finite.
    pub fn time_range_end(&self, tau0: f64) -> Option<f64> {
        let h = 0.5 * self.n;
        match self.profile {
            CoefficientProfile::Exponential { a, r, .. } if a > 0.0 && r * h < 0.0 => {
                let q = r * h;
                Some(a.powf(h) * (q * tau0).exp() / -q)
            }
            CoefficientProfile::PowerLaw { a, p, .. } if a > 0.0 && tau0 > 0.0 && p * h < -1.0 => {
                let q = p * h;
                Some(a.powf(h) * tau0.powf(q + 1.0) / -(q + 1.0))
            }
            _ => None,
        }
    }

    /// `τ(t)` with `τ(0) = τ0`, for `t ≥ 0`.
    pub fn inverse_time_map(&self, tau0: f64, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::Domain { t, start: 0.0 });
        }
        if t == 0.0 {
            return Ok(tau0);
        }
        if let Some(end) = self.time_range_end(tau0) {
            if t >= end {
                return Err(Error::BeyondRange { t, end });
            }
        }
        let bracket_err = |_| Error::Bracket { t };

        // expand [lo, hi] until t(hi) ≥ t
        let mut lo = tau0;
        let mut t_lo = 0.0;
        let mut h = t / self.rate(tau0)?;
        let (mut hi, mut t_hi);
        let mut expansions = 0;
        loop {
            hi = lo + h;
            t_hi = t_lo + self.integrate_rate(lo, hi).map_err(bracket_err)?;
            if t_hi >= t {
                break;
            }
            lo = hi;
            t_lo = t_hi;
            h *= 2.0;
            expansions += 1;
            if expansions > MAX_BRACKET_EXPANSIONS || !hi.is_finite() {
                return Err(Error::Bracket { t });
            }
        }

        // safeguarded Newton; the time map's derivative is the rate
        let mut x = lo + (t - t_lo) / self.rate(lo)?;
        if !(x > lo && x < hi) {
            x = 0.5 * (lo + hi);
        }
        for _ in 0..100 {
            let t_x = t_lo + self.integrate_rate(lo, x)?;
            let resid = t_x - t;
            if resid == 0.0 {
                return Ok(x);
            }
            if resid < 0.0 {
                lo = x;
                t_lo = t_x;
            } else {
                hi = x;
            }
            let mut next = x - resid / self.rate(x)?;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - x).abs() <= INVERSE_TOL * x.abs().max(1.0) || hi - lo <= INVERSE_TOL * x.abs().max(1.0) {
                return Ok(next);
            }
            x = next;
        }
        Err(Error::NoConvergence("inverse time map"))
    }
}

/// Gauss–Kronrod 7/15 nodes on [0, 1] (positive half) and weights.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15(f: &impl Fn(f64) -> Result<f64>, a: f64, b: f64) -> Result<(f64, f64)> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx)? + f(c + dx)?;
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    Ok((kronrod * h, ((kronrod - gauss) * h).abs()))
}

/// Adaptive bisection on the interval with the largest error estimate.
pub(crate) fn adaptive_gk(f: impl Fn(f64) -> Result<f64>, a: f64, b: f64, tol: f64) -> Result<f64> {
    let (v, e) = gk15(&f, a, b)?;
    let mut parts = vec![(a, b, v, e)];
    let mut total = v;
    let mut err = e;
    while err > tol.max(1e-15 * total.abs()) {
        if parts.len() >= MAX_SUBINTERVALS {
            return Err(Error::NoConvergence("time-map quadrature"));
        }
        let (i, _) = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("nonempty");
        let (lo, hi, v0, e0) = parts.swap_remove(i);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Err(Error::NoConvergence("time-map quadrature"));
        }
        let (v1, e1) = gk15(&f, lo, mid)?;
        let (v2, e2) = gk15(&f, mid, hi)?;
        total += v1 + v2 - v0;
        err += e1 + e2 - e0;
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
    }
    // resum to shed the drift of incremental updates
    Ok(parts.iter().map(|p| p.2).sum())
}

/// Multiplies a pure profile by `c`, folding the factor into its amplitude.
fn scale_pure(c: f64, p: CoefficientProfile) -> CoefficientProfile {
    match p {
        CoefficientProfile::Constant { c: v } => CoefficientProfile::constant(c * v),
        CoefficientProfile::PowerLaw { a, p, t0 } => CoefficientProfile::PowerLaw { a: c * a, p, t0 },
        CoefficientProfile::Exponential { a, r, t0 } => {
            CoefficientProfile::Exponential { a: c * a, r, t0 }
        }
        other => CoefficientProfile::scaled(c, other),
    }
}

fn is_zero(p: &CoefficientProfile) -> bool {
    match *p {
        CoefficientProfile::Constant { c } => c == 0.0,
        CoefficientProfile::PowerLaw { a, .. } | CoefficientProfile::Exponential { a, .. } => a == 0.0,
        _ => false,
    }
}

/// Collapses zero exponents and rates into constants.
fn tidy(p: CoefficientProfile) -> CoefficientProfile {
    match p {
        CoefficientProfile::PowerLaw { a, p: 0.0, .. } => CoefficientProfile::constant(a),
        CoefficientProfile::Exponential { a, r: 0.0, .. } => CoefficientProfile::constant(a),
        other => other,
    }
}

fn sum_nonzero(terms: Vec<CoefficientProfile>) -> CoefficientProfile {
    let mut kept: Vec<_> = terms.into_iter().map(tidy).filter(|p| !is_zero(p)).collect();
    match kept.len() {
        0 => CoefficientProfile::constant(0.0),
        1 => kept.pop().expect("one term"),
        _ => CoefficientProfile::sum(kept),
    }
}

/// Coefficients `(α(τ), k(τ))` of the transformed equation
/// `y″ + α(τ)y′ − k(τ)y = 0`.
pub fn reparametrize(
    gauge: &Gauge,
    beta: f64,
    omega: f64,
) -> Result<(CoefficientProfile, CoefficientProfile)> {
    if !(beta.is_finite() && omega.is_finite()) {
        return Err(Error::InvalidArgument("beta and omega must be finite".into()));
    }
    gauge.check_hypotheses()?;
    let f = &gauge.profile;
    let n = gauge.n;
    let w2 = omega * omega;
    let pow = |q: f64| f.pure_power(q).expect("positive pure profile");
    let log_d = f.log_derivative().expect("pure profile");
    let (damp_power, stiff_power) = match gauge.direction {
        GaugeDirection::Thm1Base => (0.5 * n, n + 1.0),
        GaugeDirection::Thm2Base => (0.5 * n + 1.0, n),
    };
    let alpha = sum_nonzero(vec![
        scale_pure(beta, pow(damp_power)),
        scale_pure(-0.5 * n, log_d),
    ]);
    let k = tidy(scale_pure(w2, pow(stiff_power)));
    Ok((alpha, k))
}

/// The base problem `(α(t), k(t))` in the original time, with `t = 0` at `τ0`.
pub fn base_problem(
    gauge: &Gauge,
    beta: f64,
    omega: f64,
    tau0: f64,
) -> Result<(CoefficientProfile, CoefficientProfile)> {
    gauge.check_hypotheses()?;
    let pulled = |scale: f64| CoefficientProfile::Reparametrized {
        base: Box::new(scale_pure(scale, gauge.profile.clone())),
        gauge: Box::new(gauge.clone()),
        tau0,
    };
    Ok(match gauge.direction {
        GaugeDirection::Thm1Base => (CoefficientProfile::constant(beta), pulled(omega * omega)),
        GaugeDirection::Thm2Base => (pulled(beta), CoefficientProfile::constant(omega * omega)),
    })
}

/// Pointwise statuses of the reparametrized condition set at `τ`.
pub fn corollary_pointwise(
    gauge: &Gauge,
    beta: f64,
    omega: f64,
    tau: f64,
) -> Result<[ConditionStatus; 3]> {
    let (f, fd) = gauge.profile.eval(tau)?;
    let positive = |x: f64| {
        if x > 0.0 {
            ConditionStatus::Holds
        } else {
            ConditionStatus::Fails
        }
    };
    let w2 = omega * omega;
    let half_n = 0.5 * gauge.n;
    Ok(match gauge.direction {
        GaugeDirection::Thm1Base => {
            let c3 = if beta > 0.0 && f > 0.0 {
                // f^{−n/2}·(1/f)′ = −f′·f^{−n/2−2}
                strictly_greater(-fd * f.powf(-half_n - 2.0), 2.0 * w2 / beta)
            } else {
                ConditionStatus::Fails
            };
            [positive(beta), positive(-fd), c3]
        }
        GaugeDirection::Thm2Base => {
            let c3 = if beta * f > 0.0 && f > 0.0 {
                let bracket = 1.0 / (beta * f) + w2;
                strictly_greater(fd / f, 0.5 * f.powf(half_n) * bracket * bracket)
            } else {
                ConditionStatus::Fails
            };
            [positive(beta * f), positive(fd), c3]
        }
    })
}

/// The reparametrized condition set on a `τ` window.
pub fn corollary_condition_check(
    gauge: &Gauge,
    beta: f64,
    omega: f64,
    window: Window,
    grid: usize,
) -> Result<CriterionReport> {
    if !(beta.is_finite() && omega.is_finite()) {
        return Err(Error::InvalidArgument("beta and omega must be finite".into()));
    }
    gauge.profile.eval(window.start)?;
    let times = log_grid(window, grid);
    let (name, labels, necessary) = match gauge.direction {
        GaugeDirection::Thm1Base => (
            "time-reparametrized constant damping",
            [
                "beta > 0",
                "df/dtau < 0",
                "f^(-n/2) d/dtau[1/f] > 2 omega^2 / beta",
            ],
            [true, true, false],
        ),
        GaugeDirection::Thm2Base => (
            "time-reparametrized constant stiffness",
            [
                "beta g > 0",
                "dg/dtau > 0",
                "d/dtau ln g > g^(n/2) (1/(beta g) + omega^2)^2 / 2",
            ],
            [false, false, false],
        ),
    };
    let mut conditions = Vec::with_capacity(3);
    for i in 0..3 {
        let (status, first) =
            fold_statuses(&times, |tau| Ok(corollary_pointwise(gauge, beta, omega, tau)?[i]))?;
        conditions.push(ConditionResult {
            label: labels[i].into(),
            necessary: necessary[i],
            sufficient: true,
            status,
            first_violation_time: first,
            tail: None,
            note: None,
        });
    }
    let mut notes = vec![format!("n = {}", gauge.n)];
    if omega == 0.0 {
        notes.push("omega = 0: the transformed stiffness vanishes identically".into());
    }
    Ok(CriterionReport::assemble(name, window, grid, conditions, notes))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceSample {
    pub tau: f64,
    pub t: f64,
    pub y: f64,
    pub x_base: f64,
    pub rel_diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub window: Window,
    pub base_horizon: f64,
    pub samples: Vec<EquivalenceSample>,
    /// `max |y(τ) − x(t(τ))| / max(1, |y|, |x|)` over the transformed grid.
    pub max_rel_diff: f64,
    pub transformed: Classification,
    pub base: Classification,
    /// Whether the transformed damping is negative somewhere on the grid.
    pub negative_damping_seen: bool,
}

/// Integrates both sides from matched data and compares `y(τ)` with `x(t(τ))`
/// on the transformed integration's own grid.
///
/// `y0 = (y(τ0), y′(τ0))`; the base starts from `(y(τ0), y′(τ0)/rate(τ0))`.
pub fn equivalence_check(
    gauge: &Gauge,
    beta: f64,
    omega: f64,
    window: Window,
    y0: (f64, f64),
    cfg: &IntegrationConfig,
) -> Result<(EquivalenceReport, Trajectory, Trajectory)> {
    let (alpha_tau, k_tau) = reparametrize(gauge, beta, omega)?;
    let (alpha_t, k_t) = base_problem(gauge, beta, omega, window.start)?;
    let base_horizon = gauge.time_map(window.start, window.end)?;

    let y_traj = integrate(
        &alpha_tau,
        &k_tau,
        PlanarState::new(window.start, y0.0, y0.1),
        &cfg.with_horizon(window.end),
    )?;
    let x0 = PlanarState::new(0.0, y0.0, y0.1 / gauge.rate(window.start)?);
    let x_traj = integrate(&alpha_t, &k_t, x0, &cfg.with_horizon(base_horizon))?;

    let mut samples = Vec::with_capacity(y_traj.states.len());
    let mut max_rel = 0.0_f64;
    let mut negative = false;
    let (mut tau_prev, mut t_prev) = (window.start, 0.0);
    for s in &y_traj.states {
        let t = t_prev + gauge.integrate_rate(tau_prev, s.t)?;
        tau_prev = s.t;
        t_prev = t;
        negative |= alpha_tau.value(s.t)? < 0.0;
        let Some(xs) = x_traj.interpolate(t.min(x_traj.last().t)) else {
            continue;
        };
        let rel = (s.x1 - xs.x1).abs() / s.x1.abs().max(xs.x1.abs()).max(1.0);
        max_rel = max_rel.max(rel);
        samples.push(EquivalenceSample {
            tau: s.t,
            t,
            y: s.x1,
            x_base: xs.x1,
            rel_diff: rel,
        });
    }
    let report = EquivalenceReport {
        window,
        base_horizon,
        samples,
        max_rel_diff: max_rel,
        transformed: y_traj.classification,
        base: x_traj.classification,
        negative_damping_seen: negative,
    };
    Ok((report, y_traj, x_traj))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp_gauge(n: f64) -> Gauge {
        Gauge::thm1(CoefficientProfile::exponential(1.0, -1.0), n).unwrap()
    }

    #[test]
    fn corollary_one_coefficients() {
        let (alpha, k) = reparametrize(&exp_gauge(2.0), 1.0, 1.0).unwrap();
        for tau in [0.0, 0.5, 3.0] {
            assert!((k.value(tau).unwrap() - (-3.0 * tau).exp()).abs() < 1e-15);
            assert!((alpha.value(tau).unwrap() - ((-tau).exp() + 1.0)).abs() < 1e-15);
        }
    }

    #[test]
    fn corollary_two_damping_changes_sign() {
        let g = Gauge::thm2(CoefficientProfile::power_law(1.0, 1.0), 2.0).unwrap();
        let (alpha, k) = reparametrize(&g, 1.0, 1.0).unwrap();
        for tau in [0.25, 1.0, 4.0] {
            assert!((k.value(tau).unwrap() - tau * tau).abs() < 1e-14);
            assert!((alpha.value(tau).unwrap() - (tau * tau - 1.0 / tau)).abs() < 1e-13);
        }
        assert!(alpha.value(0.5).unwrap() < 0.0);
        let verdict = alpha
            .sign_on_window(Window::new(0.5, 10.0).unwrap(), 256)
            .unwrap();
        assert_eq!(verdict, crate::coefficients::SignVerdict::ChangesSign);
    }

    #[test]
    fn zero_exponent_is_untransformed() {
        let (alpha, k) = reparametrize(&exp_gauge(0.0), 1.5, 2.0).unwrap();
        assert_eq!(alpha, CoefficientProfile::constant(1.5));
        assert!((k.value(1.0).unwrap() - 4.0 * (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn hypotheses_rejected() {
        let rising = Gauge::thm1(CoefficientProfile::exponential(1.0, 1.0), 2.0).unwrap();
        assert!(matches!(reparametrize(&rising, 1.0, 1.0), Err(Error::Hypothesis(_))));
        let falling = Gauge::thm2(CoefficientProfile::power_law(1.0, -1.0), 2.0).unwrap();
        assert!(matches!(reparametrize(&falling, 1.0, 1.0), Err(Error::Hypothesis(_))));
        let sum = CoefficientProfile::sum(vec![CoefficientProfile::constant(1.0)]);
        assert!(Gauge::thm1(sum, 1.0).is_err());
        assert!(Gauge::thm1(CoefficientProfile::constant(1.0), f64::NAN).is_err());
    }

    #[test]
    fn time_map_examples() {
        let unit = Gauge::thm1(CoefficientProfile::constant(1.0), 2.0).unwrap();
        assert!((unit.time_map(0.3, 2.3).unwrap() - 2.0).abs() < 1e-12);
        let g = exp_gauge(2.0);
        for (tau0, tau) in [(0.0_f64, 1.0_f64), (0.5, 4.0), (1.0, 30.0)] {
            let want = (-tau0).exp() - (-tau).exp();
            assert!((g.time_map(tau0, tau).unwrap() - want).abs() < 1e-12);
        }
        assert_eq!(g.time_range_end(0.0), Some(1.0));
    }

    #[test]
    fn inverse_round_trip() {
        let g = exp_gauge(2.0);
        for tau in [1e-3, 0.7, 5.0, 10.0] {
            let t = g.time_map(0.0, tau).unwrap();
            assert!((g.inverse_time_map(0.0, t).unwrap() - tau).abs() < 1e-9 * tau.max(1.0));
        }
        assert!(matches!(g.inverse_time_map(0.0, 1.0), Err(Error::BeyondRange { .. })));
        let lin = Gauge::thm2(CoefficientProfile::power_law(1.0, 1.0), 2.0).unwrap();
        let t = lin.time_map(0.5, 3.0).unwrap();
        assert!((t - (9.0 - 0.25) / 2.0).abs() < 1e-12);
        assert!((lin.inverse_time_map(0.5, t).unwrap() - 3.0).abs() < 1e-9);
    }

    #[test]
    fn corollary_checks() {
        let r = corollary_condition_check(&exp_gauge(2.0), 1.0, 1.0, Window::new(1.0, 100.0).unwrap(), 512)
            .unwrap();
        assert_eq!(r.overall, crate::criteria::Overall::SufficientForBounded);

        let g = Gauge::thm2(CoefficientProfile::power_law(1.0, 1.0), 2.0).unwrap();
        let r = corollary_condition_check(&g, 1.0, 1.0, Window::new(0.1, 10.0).unwrap(), 512).unwrap();
        assert_eq!(r.condition(2).status, ConditionStatus::Fails);
        let witness = r.condition(2).first_violation_time.unwrap();
        // 2 > (1 + τ)² fails past √2 − 1
        assert!(witness > 2f64.sqrt() - 1.0 && witness < 0.5);

        let r = corollary_condition_check(&exp_gauge(2.0), 1.0, 0.0, Window::new(0.0, 10.0).unwrap(), 64)
            .unwrap();
        assert_eq!(r.condition(2).status, ConditionStatus::Holds);
        assert!(r.notes.iter().any(|n| n.contains("omega = 0")));
    }

    #[test]
    fn pulled_back_stiffness_is_linear_in_t() {
        // f = e^{−τ}, n = 2, τ0 = 0 gives t = 1 − e^{−τ}, so K(t) = 1 − t
        let (_, k) = base_problem(&exp_gauge(2.0), 1.0, 1.0, 0.0).unwrap();
        for t in [0.0, 0.2, 0.9] {
            let (v, d) = k.eval(t).unwrap();
            assert!((v - (1.0 - t)).abs() < 1e-10);
            assert!((d + 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn adaptive_quadrature_handles_peaks() {
        let v = adaptive_gk(|x| Ok(1.0 / (1e-4 + x * x)), -1.0, 1.0, 1e-12).unwrap();
        let want = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert!((v - want).abs() < 1e-9 * want);
    }
}
