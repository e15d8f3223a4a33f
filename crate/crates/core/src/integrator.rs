//! Adaptive Dormand–Prince 5(4) integration of the planar system
//! `ẋ₁ = x₂`, `ẋ₂ = k(t)x₁ − α(t)x₂`.
//!
//! Accepted steps carry cubic Hermite dense output, which is used both for
//! locating the escape event `‖x‖ = R_escape` by bisection and for
//! interpolating trajectories after the fact.

use serde::{Deserialize, Serialize};

use crate::certificates::CertificateTrace;
use crate::coefficients::CoefficientProfile;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanarState {
    pub t: f64,
    pub x1: f64,
    pub x2: f64,
}

impl PlanarState {
    pub fn new(t: f64, x1: f64, x2: f64) -> Self {
        Self { t, x1, x2 }
    }

    pub fn norm(&self) -> f64 {
        self.x1.hypot(self.x2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrationConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// End time `T` of the integration.
    pub horizon: f64,
    /// Escape radius; `None` means `1e6·max(1, ‖x0‖)`.
    pub r_escape: Option<f64>,
    /// `B_bound` of the boundedness heuristic.
    pub bound_factor: f64,
    pub max_steps: u64,
    /// Record states on a uniform grid of this spacing instead of at every
    /// accepted step.
    pub sample_dt: Option<f64>,
}

impl Default for IntegrationConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            horizon: 100.0,
            r_escape: None,
            bound_factor: 10.0,
            max_steps: 10_000_000,
            sample_dt: None,
        }
    }
}

impl IntegrationConfig {
    pub fn with_horizon(mut self, horizon: f64) -> Self {
        self.horizon = horizon;
        self
    }

    pub fn with_tolerances(mut self, rel_tol: f64, abs_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        self
    }

    pub fn with_r_escape(mut self, r: f64) -> Self {
        self.r_escape = Some(r);
        self
    }

    pub fn resolved_r_escape(&self, x0: &PlanarState) -> f64 {
        self.r_escape.unwrap_or(1e6 * x0.norm().max(1.0))
    }

    fn validate(&self, x0: &PlanarState) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return bad("tolerances must be positive".into());
        }
        if !(self.horizon > x0.t) || !self.horizon.is_finite() {
            return bad(format!("horizon {} must exceed t0 = {}", self.horizon, x0.t));
        }
        if let Some(r) = self.r_escape {
            if !(r > 0.0) {
                return bad("escape radius must be positive".into());
            }
        }
        if let Some(dt) = self.sample_dt {
            if !(dt > 0.0) {
                return bad("sample spacing must be positive".into());
            }
        }
        if !(self.bound_factor > 0.0) {
            return bad("bound factor must be positive".into());
        }
        if !(x0.x1.is_finite() && x0.x2.is_finite() && x0.t.is_finite()) {
            return bad("initial state must be finite".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Classification {
    Bounded,
    Escaped { t_escape: f64 },
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct IntegrationStats {
    pub steps_accepted: u64,
    pub steps_rejected: u64,
    pub rhs_evals: u64,
    pub max_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub states: Vec<PlanarState>,
    /// `(ẋ₁, ẋ₂)` at each stored state, for Hermite interpolation.
    #[serde(skip)]
    pub derivatives: Vec<(f64, f64)>,
    pub classification: Classification,
    pub stats: IntegrationStats,
    pub t0: f64,
    pub horizon: f64,
    pub r_escape: f64,
    pub escape_time: Option<f64>,
}

impl Trajectory {
    pub fn initial(&self) -> &PlanarState {
        &self.states[0]
    }

    pub fn last(&self) -> &PlanarState {
        self.states.last().expect("trajectory is never empty")
    }

    pub fn reached_horizon(&self) -> bool {
        self.escape_time.is_none() && self.last().t >= self.horizon
    }

    /// Cubic Hermite interpolation between stored states.
    pub fn interpolate(&self, t: f64) -> Option<PlanarState> {
        let first = self.states.first()?.t;
        let last = self.last().t;
        if !(t >= first && t <= last) {
            return None;
        }
        let i = match self
            .states
            .binary_search_by(|s| s.t.partial_cmp(&t).expect("finite times"))
        {
            Ok(i) => return Some(self.states[i]),
            Err(i) => i,
        };
        let (a, b) = (&self.states[i - 1], &self.states[i]);
        let (fa, fb) = (self.derivatives[i - 1], self.derivatives[i]);
        let h = b.t - a.t;
        let theta = (t - a.t) / h;
        let (x1, x2) = hermite([a.x1, a.x2], [fa.0, fa.1], [b.x1, b.x2], [fb.0, fb.1], h, theta);
        Some(PlanarState::new(t, x1, x2))
    }

    pub fn times(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.t).collect()
    }

    pub fn summary_json(&self, config: &IntegrationConfig) -> String {
        #[derive(Serialize)]
        struct Summary<'a> {
            classification: &'a Classification,
            heuristic: &'static str,
            stats: &'a IntegrationStats,
            t0: f64,
            horizon: f64,
            r_escape: f64,
            escape_time: Option<f64>,
            initial: &'a PlanarState,
            last: &'a PlanarState,
            config: &'a IntegrationConfig,
        }
        serde_json::to_string_pretty(&Summary {
            classification: &self.classification,
            heuristic: "finite-horizon heuristic: Bounded means max |x| over the final half \
                        of the horizon <= bound_factor * |x0| and no escape",
            stats: &self.stats,
            t0: self.t0,
            horizon: self.horizon,
            r_escape: self.r_escape,
            escape_time: self.escape_time,
            initial: self.initial(),
            last: self.last(),
            config,
        })
        .expect("summary serialization is infallible")
    }
}

/// Right-hand side of the planar system: `(x₂, k(t)x₁ − α(t)x₂)`.
pub fn rhs(
    state: &PlanarState,
    alpha: &CoefficientProfile,
    k: &CoefficientProfile,
) -> Result<(f64, f64)> {
    let a = alpha.value(state.t)?;
    let kv = k.value(state.t)?;
    Ok((state.x2, kv * state.x1 - a * state.x2))
}

fn hermite(ya: [f64; 2], fa: [f64; 2], yb: [f64; 2], fb: [f64; 2], h: f64, theta: f64) -> (f64, f64) {
    let t2 = theta * theta;
    let t3 = t2 * theta;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + theta;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    let c = |i: usize| h00 * ya[i] + h10 * h * fa[i] + h01 * yb[i] + h11 * h * fb[i];
    (c(0), c(1))
}

fn hermite_derivative(
    ya: [f64; 2],
    fa: [f64; 2],
    yb: [f64; 2],
    fb: [f64; 2],
    h: f64,
    theta: f64,
) -> (f64, f64) {
    let t2 = theta * theta;
    let d00 = (6.0 * t2 - 6.0 * theta) / h;
    let d10 = 3.0 * t2 - 4.0 * theta + 1.0;
    let d01 = (-6.0 * t2 + 6.0 * theta) / h;
    let d11 = 3.0 * t2 - 2.0 * theta;
    let c = |i: usize| d00 * ya[i] + d10 * fa[i] + d01 * yb[i] + d11 * fb[i];
    (c(0), c(1))
}

// Dormand–Prince 5(4) tableau
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// 5th minus embedded 4th order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 5.0;

struct Rhs<'a> {
    alpha: &'a CoefficientProfile,
    k: &'a CoefficientProfile,
    evals: u64,
}

impl Rhs<'_> {
    fn call(&mut self, t: f64, y: [f64; 2]) -> Result<[f64; 2]> {
        self.evals += 1;
        let (d1, d2) = rhs(&PlanarState::new(t, y[0], y[1]), self.alpha, self.k)?;
        Ok([d1, d2])
    }
}

fn axpy(y: [f64; 2], terms: &[(f64, [f64; 2])], h: f64) -> [f64; 2] {
    let mut out = y;
    for (c, k) in terms {
        out[0] += h * c * k[0];
        out[1] += h * c * k[1];
    }
    out
}

fn norm2(y: [f64; 2]) -> f64 {
    y[0].hypot(y[1])
}

/// Integrates from `x0` to `cfg.horizon`, stopping early on escape.
pub fn integrate(
    alpha: &CoefficientProfile,
    k: &CoefficientProfile,
    x0: PlanarState,
    cfg: &IntegrationConfig,
) -> Result<Trajectory> {
    cfg.validate(&x0)?;
    let r_escape = cfg.resolved_r_escape(&x0);
    let t_end = cfg.horizon;
    let mut f_rhs = Rhs { alpha, k, evals: 0 };

    let mut t = x0.t;
    let mut y = [x0.x1, x0.x2];
    let mut f = f_rhs.call(t, y)?;

    let mut states = vec![x0];
    let mut derivatives = vec![(f[0], f[1])];
    let mut stats = IntegrationStats {
        max_norm: x0.norm(),
        ..Default::default()
    };
    let mut next_sample = cfg.sample_dt.map(|dt| (1u64, dt));
    let mut escape_time = None;

    if norm2(y) >= r_escape {
        escape_time = Some(t);
    }

    let mut h = initial_step(&mut f_rhs, t, y, f, cfg, t_end)?;
    let mut reject_streak = false;

    while escape_time.is_none() && t < t_end {
        if stats.steps_accepted + stats.steps_rejected >= cfg.max_steps {
            return Err(Error::MaxStepsExceeded {
                max_steps: cfg.max_steps,
                t,
            });
        }
        let last_step = t + h >= t_end;
        if last_step {
            h = t_end - t;
        }

        let k1 = f;
        let k2 = f_rhs.call(t + C2 * h, axpy(y, &[(A21, k1)], h))?;
        let k3 = f_rhs.call(t + C3 * h, axpy(y, &[(A31, k1), (A32, k2)], h))?;
        let k4 = f_rhs.call(t + C4 * h, axpy(y, &[(A41, k1), (A42, k2), (A43, k3)], h))?;
        let k5 = f_rhs.call(
            t + C5 * h,
            axpy(y, &[(A51, k1), (A52, k2), (A53, k3), (A54, k4)], h),
        )?;
        let t_new = if last_step { t_end } else { t + h };
        let k6 = f_rhs.call(
            t_new,
            axpy(y, &[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)], h),
        )?;
        let y_new = axpy(y, &[(A71, k1), (A73, k3), (A74, k4), (A75, k5), (A76, k6)], h);
        let k7 = if y_new.iter().all(|v| v.is_finite()) {
            f_rhs.call(t_new, y_new)?
        } else {
            [f64::NAN; 2]
        };

        let err_vec = axpy(
            [0.0, 0.0],
            &[(E1, k1), (E3, k3), (E4, k4), (E5, k5), (E6, k6), (E7, k7)],
            h,
        );
        let scale = cfg.abs_tol + cfg.rel_tol * norm2(y).max(norm2(y_new));
        let err = norm2(err_vec) / scale;

        if err <= 1.0 {
            stats.steps_accepted += 1;
            let h_taken = t_new - t;

            if norm2(y_new) >= r_escape {
                let (te, ye) = locate_escape(t, y, k1, t_new, y_new, k7, r_escape);
                let fe = hermite_derivative(y, k1, y_new, k7, h_taken, (te - t) / h_taken);
                escape_time = Some(te);
                states.push(PlanarState::new(te, ye[0], ye[1]));
                derivatives.push(fe);
                break;
            }

            match next_sample.as_mut() {
                None => {
                    states.push(PlanarState::new(t_new, y_new[0], y_new[1]));
                    derivatives.push((k7[0], k7[1]));
                }
                Some((j, dt)) => {
                    loop {
                        let ts = x0.t + *j as f64 * *dt;
                        if ts >= t_new || ts > t_end {
                            break;
                        }
                        let theta = (ts - t) / h_taken;
                        let ys = hermite(y, k1, y_new, k7, h_taken, theta);
                        let fs = hermite_derivative(y, k1, y_new, k7, h_taken, theta);
                        states.push(PlanarState::new(ts, ys.0, ys.1));
                        derivatives.push(fs);
                        *j += 1;
                    }
                    if t_new >= t_end {
                        states.push(PlanarState::new(t_new, y_new[0], y_new[1]));
                        derivatives.push((k7[0], k7[1]));
                    }
                }
            }

            t = t_new;
            y = y_new;
            f = k7;

            let mut fac = if err == 0.0 {
                FAC_MAX
            } else {
                (SAFETY * err.powf(-0.2)).clamp(FAC_MIN, FAC_MAX)
            };
            if reject_streak {
                fac = fac.min(1.0);
            }
            reject_streak = false;
            if !last_step {
                h *= fac;
            }
        } else {
            stats.steps_rejected += 1;
            reject_streak = true;
            let fac = if err.is_finite() {
                (SAFETY * err.powf(-0.2)).clamp(FAC_MIN, 1.0)
            } else {
                FAC_MIN
            };
            h *= fac;
        }

        if h < 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepUnderflow { h, t });
        }
    }

    stats.rhs_evals = f_rhs.evals;
    stats.max_norm = states.iter().map(PlanarState::norm).fold(0.0, f64::max);
    let mut traj = Trajectory {
        states,
        derivatives,
        classification: Classification::Inconclusive,
        stats,
        t0: x0.t,
        horizon: t_end,
        r_escape,
        escape_time,
    };
    traj.classification = classify(&traj, None, cfg.bound_factor);
    Ok(traj)
}

fn initial_step(
    f_rhs: &mut Rhs<'_>,
    t: f64,
    y: [f64; 2],
    f: [f64; 2],
    cfg: &IntegrationConfig,
    t_end: f64,
) -> Result<f64> {
    let span = t_end - t;
    let sc = cfg.abs_tol + cfg.rel_tol * norm2(y);
    let d0 = norm2(y) / sc;
    let d1 = norm2(f) / sc;
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    }
    .min(span);
    let y1 = axpy(y, &[(1.0, f)], h0);
    let f1 = f_rhs.call(t + h0, y1)?;
    let d2 = norm2([f1[0] - f[0], f1[1] - f[1]]) / sc / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    Ok((100.0 * h0).min(h1).min(span))
}

/// Bisects the Hermite interpolant for `‖x‖ = r` to 1e-10 relative in time;
/// returns the upper end of the final bracket so that `‖x‖ ≥ r` there.
fn locate_escape(
    ta: f64,
    ya: [f64; 2],
    fa: [f64; 2],
    tb: f64,
    yb: [f64; 2],
    fb: [f64; 2],
    r: f64,
) -> (f64, [f64; 2]) {
    let h = tb - ta;
    let tol = 1e-10 * ta.abs().max(tb.abs()).max(1.0);
    let norm_at = |theta: f64| {
        let (a, b) = hermite(ya, fa, yb, fb, h, theta);
        a.hypot(b)
    };
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while (hi - lo) * h > tol {
        let mid = 0.5 * (lo + hi);
        if norm_at(mid) >= r {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let (a, b) = hermite(ya, fa, yb, fb, h, hi);
    if hi == 1.0 || a.hypot(b) < r {
        return (tb, yb);
    }
    (ta + hi * h, [a, b])
}

/// Three-way finite-horizon classification.
///
/// `Escaped` when the escape event fired; `Bounded` when the horizon was
/// reached, the state norm over the final half of the horizon stayed within
/// `bound_factor·‖x0‖`, and the certificate trace (if given) is monotone
/// non-increasing; `Inconclusive` otherwise.
pub fn classify(
    traj: &Trajectory,
    cert_trace: Option<&CertificateTrace>,
    bound_factor: f64,
) -> Classification {
    if let Some(t_escape) = traj.escape_time {
        return Classification::Escaped { t_escape };
    }
    if !traj.reached_horizon() {
        return Classification::Inconclusive;
    }
    let half = traj.t0 + 0.5 * (traj.horizon - traj.t0);
    let limit = bound_factor * traj.initial().norm();
    let late_max = traj
        .states
        .iter()
        .filter(|s| s.t >= half)
        .map(PlanarState::norm)
        .fold(0.0, f64::max);
    let certified = cert_trace.is_none_or(|c| c.monotone_decreasing);
    if late_max <= limit && certified {
        Classification::Bounded
    } else {
        Classification::Inconclusive
    }
}
