//! Boundedness and instability conditions for the two one-coefficient cases:
//! constant damping with time-varying stiffness (`ẍ + βẋ − k(t)x = 0`) and
//! constant stiffness with time-varying damping (`ẍ + α(t)ẋ − ω²x = 0`).
//!
//! Each condition set is checked pointwise on a log-spaced grid over a finite
//! window. Pure coefficient families additionally get an exact verdict on the
//! behaviour as `t → ∞`.

use serde::{Deserialize, Serialize};

use crate::coefficients::{log_grid, CoefficientProfile, SignVerdict, Window};
use crate::error::{Error, Result};

/// Relative margin for strict inequalities; anything closer is `Marginal`.
pub const COND_EPS: f64 = 1e-12;

pub const DEFAULT_CRITERIA_GRID: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConditionStatus {
    Holds,
    Fails,
    Marginal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Asymptotic {
    HoldsEventually,
    FailsEventually,
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Overall {
    SufficientForBounded,
    NecessaryViolated,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionResult {
    pub label: String,
    pub necessary: bool,
    pub sufficient: bool,
    pub status: ConditionStatus,
    pub first_violation_time: Option<f64>,
    /// Exact large-`t` behaviour, when the coefficient family allows it.
    pub tail: Option<Asymptotic>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub criterion: String,
    pub window: Window,
    pub grid: usize,
    pub conditions: Vec<ConditionResult>,
    pub overall: Overall,
    pub notes: Vec<String>,
}

impl CriterionReport {
    pub(crate) fn assemble(
        criterion: &str,
        window: Window,
        grid: usize,
        conditions: Vec<ConditionResult>,
        notes: Vec<String>,
    ) -> Self {
        let overall = if conditions
            .iter()
            .filter(|c| c.sufficient)
            .all(|c| c.status == ConditionStatus::Holds)
        {
            Overall::SufficientForBounded
        } else if conditions
            .iter()
            .any(|c| c.necessary && c.status == ConditionStatus::Fails)
        {
            Overall::NecessaryViolated
        } else {
            Overall::Inconclusive
        };
        Self {
            criterion: criterion.to_string(),
            window,
            grid,
            conditions,
            overall,
            notes,
        }
    }

    pub fn condition(&self, index: usize) -> &ConditionResult {
        &self.conditions[index]
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization is infallible")
    }
}

/// Symmetric 2×2 matrix `[[a11, a12], [a12, a22]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetricMatrix2 {
    pub a11: f64,
    pub a12: f64,
    pub a22: f64,
}

impl SymmetricMatrix2 {
    pub fn new(a11: f64, a12: f64, a22: f64) -> Self {
        Self { a11, a12, a22 }
    }

    pub fn det(&self) -> f64 {
        self.a11 * self.a22 - self.a12 * self.a12
    }

    /// `vᵀ M v`
    pub fn quad_form(&self, x1: f64, x2: f64) -> f64 {
        self.a11 * x1 * x1 + 2.0 * self.a12 * x1 * x2 + self.a22 * x2 * x2
    }
}

/// Leading-principal-minor test: `a11 < 0` and `det > 0`.
pub fn negdef_check(m: &SymmetricMatrix2) -> bool {
    m.a11 < 0.0 && m.det() > 0.0
}

/// Strict `lhs > rhs` with the relative margin [`COND_EPS`].
pub fn strictly_greater(lhs: f64, rhs: f64) -> ConditionStatus {
    let diff = lhs - rhs;
    let margin = COND_EPS * lhs.abs().max(rhs.abs());
    if diff.is_nan() {
        ConditionStatus::Fails
    } else if diff > margin {
        ConditionStatus::Holds
    } else if diff < -margin {
        ConditionStatus::Fails
    } else {
        ConditionStatus::Marginal
    }
}

/// Sign conditions are exact: zero fails a strict sign test.
fn positive(x: f64) -> ConditionStatus {
    if x > 0.0 {
        ConditionStatus::Holds
    } else {
        ConditionStatus::Fails
    }
}

/// Matrix of `dV/dt` for `V = ½k x₁² + ½x₂²` along `ẍ + βẋ − k x = 0`.
pub fn vdot_matrix_thm1(beta: f64, k: &CoefficientProfile, t: f64) -> Result<SymmetricMatrix2> {
    let (kv, kd) = k.eval(t)?;
    Ok(SymmetricMatrix2::new(0.5 * kd, kv, -beta))
}

/// Matrix of `dV/dt` for `V = ½x₁²/α + ½x₂²` along `ẍ + α(t)ẋ − ω²x = 0`.
pub fn vdot_matrix_thm2(omega: f64, alpha: &CoefficientProfile, t: f64) -> Result<SymmetricMatrix2> {
    let (av, ad) = alpha.eval(t)?;
    if av == 0.0 {
        return Err(Error::Division(format!("damping vanishes at t = {t}")));
    }
    let inv = 1.0 / av;
    // d/dt (1/α) = −α̇/α²
    let a11 = -0.5 * ad * inv * inv;
    let a12 = 0.5 * (inv + omega * omega);
    Ok(SymmetricMatrix2::new(a11, a12, -av))
}

/// Pointwise statuses of `β > 0`, `k̇ < 0`, `−k̇/k² > 2/β`.
pub fn thm1_pointwise(beta: f64, k: &CoefficientProfile, t: f64) -> Result<[ConditionStatus; 3]> {
    let (kv, kd) = k.eval(t)?;
    let c3 = if beta == 0.0 || kv == 0.0 {
        ConditionStatus::Fails
    } else {
        strictly_greater(-kd / (kv * kv), 2.0 / beta)
    };
    Ok([positive(beta), positive(-kd), c3])
}

/// Pointwise statuses of `α > 0`, `α̇ > 0`, `d/dt ln α > ½(1/α + ω²)²`.
pub fn thm2_pointwise(omega: f64, alpha: &CoefficientProfile, t: f64) -> Result<[ConditionStatus; 3]> {
    let (av, ad) = alpha.eval(t)?;
    if av == 0.0 {
        return Ok([ConditionStatus::Fails; 3]);
    }
    let rhs = 0.5 * (1.0 / av + omega * omega).powi(2);
    Ok([positive(av), positive(ad), strictly_greater(ad / av, rhs)])
}

pub fn all_hold(statuses: &[ConditionStatus]) -> bool {
    statuses.iter().all(|s| *s == ConditionStatus::Holds)
}

/// Folds pointwise statuses at `times` into a window verdict.
pub(crate) fn fold_statuses(
    times: &[f64],
    mut status_at: impl FnMut(f64) -> Result<ConditionStatus>,
) -> Result<(ConditionStatus, Option<f64>)> {
    let mut marginal = false;
    for &t in times {
        match status_at(t)? {
            ConditionStatus::Fails => return Ok((ConditionStatus::Fails, Some(t))),
            ConditionStatus::Marginal => marginal = true,
            ConditionStatus::Holds => {}
        }
    }
    Ok(if marginal {
        (ConditionStatus::Marginal, None)
    } else {
        (ConditionStatus::Holds, None)
    })
}

fn tail_from(eventually_holds: Option<bool>) -> Option<Asymptotic> {
    eventually_holds.map(|h| {
        if h {
            Asymptotic::HoldsEventually
        } else {
            Asymptotic::FailsEventually
        }
    })
}

/// Large-`t` sign of `k̇` and of `−k̇/k² − 2/β` for pure families with `k > 0`.
fn thm1_tails(beta: f64, k: &CoefficientProfile) -> (Option<Asymptotic>, Option<Asymptotic>) {
    let two_over_beta = 2.0 / beta;
    match *k {
        CoefficientProfile::Constant { .. } => (tail_from(Some(false)), tail_from(Some(false))),
        CoefficientProfile::PowerLaw { a, p, .. } => {
            // −k̇/k² = (−p/a)·t^{−p−1}
            let coef = -p / a;
            let expo = -p - 1.0;
            let c3 = if coef <= 0.0 {
                Some(false)
            } else if expo > 0.0 {
                Some(true)
            } else if expo < 0.0 {
                Some(false)
            } else {
                match strictly_greater(coef, two_over_beta) {
                    ConditionStatus::Holds => Some(true),
                    ConditionStatus::Fails => Some(false),
                    ConditionStatus::Marginal => None,
                }
            };
            (
                tail_from(Some(p < 0.0)),
                c3.map_or(Some(Asymptotic::Undetermined), |h| tail_from(Some(h))),
            )
        }
        CoefficientProfile::Exponential { r, .. } => {
            // −k̇/k² = (−r/a)·e^{−r t}
            (tail_from(Some(r < 0.0)), tail_from(Some(r < 0.0)))
        }
        _ => (None, None),
    }
}

/// Large-`t` behaviour of the three damping conditions for pure families.
fn thm2_tails(omega: f64, alpha: &CoefficientProfile) -> [Option<Asymptotic>; 3] {
    let w4 = omega.powi(4);
    match *alpha {
        CoefficientProfile::Constant { c } => {
            [tail_from(Some(c > 0.0)), tail_from(Some(false)), tail_from(Some(false))]
        }
        CoefficientProfile::PowerLaw { a, p, .. } => {
            let c3 = if a <= 0.0 || p <= 0.0 {
                Some(false)
            } else if w4 > 0.0 {
                // p/t → 0 while the right side → ½ω⁴
                Some(false)
            } else if 2.0 * p > 1.0 {
                // p/t against 1/(2a²t^{2p})
                Some(true)
            } else if 2.0 * p < 1.0 {
                Some(false)
            } else {
                match strictly_greater(p, 0.5 / (a * a)) {
                    ConditionStatus::Holds => Some(true),
                    ConditionStatus::Fails => Some(false),
                    ConditionStatus::Marginal => None,
                }
            };
            [
                tail_from(Some(a > 0.0)),
                tail_from(Some(a * p > 0.0)),
                c3.map_or(Some(Asymptotic::Undetermined), |h| tail_from(Some(h))),
            ]
        }
        CoefficientProfile::Exponential { a, r, .. } => {
            let c3 = if a <= 0.0 || r <= 0.0 {
                Some(false)
            } else {
                match strictly_greater(r, 0.5 * w4) {
                    ConditionStatus::Holds => Some(true),
                    ConditionStatus::Fails => Some(false),
                    ConditionStatus::Marginal => None,
                }
            };
            [
                tail_from(Some(a > 0.0)),
                tail_from(Some(a * r > 0.0)),
                c3.map_or(Some(Asymptotic::Undetermined), |h| tail_from(Some(h))),
            ]
        }
        _ => [None, None, None],
    }
}

fn require_finite(name: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be finite, got {x}")))
    }
}

/// Conditions for `ẍ + βẋ − k(t)x = 0` with `k > 0` on the window.
///
/// `β > 0` and `k̇ < 0` are necessary for stability of the origin; together
/// with `d/dt[1/k] > 2/β` they are sufficient for bounded solutions.
pub fn thm1_check(
    beta: f64,
    k: &CoefficientProfile,
    window: Window,
    grid: usize,
) -> Result<CriterionReport> {
    require_finite("beta", beta)?;
    match k.sign_on_window(window, grid.max(2))? {
        SignVerdict::StrictlyPositive => {}
        other => {
            return Err(Error::Hypothesis(format!(
                "k(t) must be strictly positive on [{}, {}], found {other:?}",
                window.start, window.end
            )))
        }
    }
    let times = log_grid(window, grid);
    let (tail2, tail3) = if beta > 0.0 { thm1_tails(beta, k) } else { (None, None) };

    let mut notes = Vec::new();
    let c1 = ConditionResult {
        label: "beta > 0".into(),
        necessary: true,
        sufficient: true,
        status: positive(beta),
        first_violation_time: (beta <= 0.0).then_some(window.start),
        tail: None,
        note: (beta == 0.0).then(|| {
            "beta = 0: no damping, solutions blow up linearly even as k -> 0+".to_string()
        }),
    };

    let (s2, v2) = fold_statuses(&times, |t| Ok(positive(-k.derivative(t)?)))?;
    let c2 = ConditionResult {
        label: "dk/dt < 0".into(),
        necessary: true,
        sufficient: true,
        status: s2,
        first_violation_time: v2,
        tail: tail2,
        note: None,
    };

    let (s3, v3) = fold_statuses(&times, |t| Ok(thm1_pointwise(beta, k, t)?[2]))?;
    let c3 = ConditionResult {
        label: "d/dt[1/k] > 2/beta".into(),
        necessary: false,
        sufficient: true,
        status: s3,
        first_violation_time: v3,
        tail: tail3,
        note: None,
    };

    if s2 == ConditionStatus::Fails {
        if let Ok(kd) = k.derivative(window.start) {
            if kd > 0.0 && beta > 0.0 {
                notes.push("dk/dt > 0 at window start: see the Chetaev instability check".into());
            }
        }
    }
    Ok(CriterionReport::assemble(
        "constant damping, time-varying stiffness",
        window,
        grid,
        vec![c1, c2, c3],
        notes,
    ))
}

/// Sufficient conditions for `ẍ + α(t)ẋ − ω²x = 0` to have bounded solutions.
pub fn thm2_check(
    omega: f64,
    alpha: &CoefficientProfile,
    window: Window,
    grid: usize,
) -> Result<CriterionReport> {
    require_finite("omega", omega)?;
    alpha.eval(window.start)?;
    let times = log_grid(window, grid);
    let tails = thm2_tails(omega, alpha);
    let labels = [
        "alpha > 0",
        "dalpha/dt > 0",
        "d/dt ln alpha > (1/alpha + omega^2)^2 / 2",
    ];
    let mut conditions = Vec::with_capacity(3);
    for (i, label) in labels.iter().enumerate() {
        let (status, first) = fold_statuses(&times, |t| Ok(thm2_pointwise(omega, alpha, t)?[i]))?;
        conditions.push(ConditionResult {
            label: (*label).into(),
            necessary: false,
            sufficient: true,
            status,
            first_violation_time: first,
            tail: tails[i],
            note: None,
        });
    }
    let mut notes = Vec::new();
    if omega == 0.0 {
        notes.push("omega = 0: no stiffness term".into());
    }
    Ok(CriterionReport::assemble(
        "constant stiffness, time-varying damping",
        window,
        grid,
        conditions,
        notes,
    ))
}

/// Eigenvalues `−α/2 ± ½√(α² + 4k)` of the frozen-time planar system;
/// `None` when they are complex.
pub fn frozen_eigenvalues(alpha: f64, k: f64) -> Option<(f64, f64)> {
    let disc = alpha * alpha + 4.0 * k;
    if disc < 0.0 {
        return None;
    }
    let root = disc.sqrt();
    Some((-0.5 * alpha - 0.5 * root, -0.5 * alpha + 0.5 * root))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChetaevReport {
    pub unstable_certified: bool,
    /// Slope `√k(t0)` of the cone `x₂ = ±√k(t0)·x₁` bounding the region where `V_χ > 0`.
    pub cone_slope: f64,
    pub beta_positive: bool,
    pub k_increasing: ConditionStatus,
    pub first_violation_time: Option<f64>,
    /// `dV_χ/dt > 0` at sampled nonzero cone states.
    pub vdot_positive_on_cone: bool,
    /// Frozen-time eigenvalues at `t0`.
    pub frozen_eigenvalues: Option<(f64, f64)>,
    /// One positive and one negative frozen eigenvalue at `t0`.
    pub frozen_saddle: bool,
    pub window: Window,
}

/// Chetaev instability test for `ẍ + βẋ − k(t)x = 0` with `V_χ = ½k x₁² − ½x₂²`.
pub fn chetaev_instability_check(
    beta: f64,
    k: &CoefficientProfile,
    window: Window,
    grid: usize,
) -> Result<ChetaevReport> {
    require_finite("beta", beta)?;
    if k.sign_on_window(window, grid.max(2))? != SignVerdict::StrictlyPositive {
        return Err(Error::Hypothesis(format!(
            "k(t) must be positive on [{}, {}]",
            window.start, window.end
        )));
    }
    let k0 = k.value(window.start)?;
    let cone_slope = k0.sqrt();
    let times = log_grid(window, grid);
    let (k_increasing, first_violation_time) =
        fold_statuses(&times, |t| Ok(positive(k.derivative(t)?)))?;

    // dV_χ/dt = ½k̇x₁² + βx₂² on a fan of states strictly inside the cone
    let mut vdot_positive = true;
    'outer: for &t in &times {
        let kd = k.derivative(t)?;
        for j in 0..8 {
            let s = cone_slope * (-0.875 + 0.25 * j as f64);
            let (x1, x2) = (1.0, s);
            if 0.5 * kd * x1 * x1 + beta * x2 * x2 <= 0.0 {
                vdot_positive = false;
                break 'outer;
            }
        }
    }
    let beta_positive = beta > 0.0;
    let eig = frozen_eigenvalues(beta, k0);
    let frozen_saddle = matches!(eig, Some((lo, hi)) if lo < 0.0 && hi > 0.0);
    Ok(ChetaevReport {
        unstable_certified: beta_positive && k_increasing == ConditionStatus::Holds && vdot_positive,
        cone_slope,
        beta_positive,
        k_increasing,
        first_violation_time,
        vdot_positive_on_cone: vdot_positive,
        frozen_eigenvalues: eig,
        frozen_saddle,
        window,
    })
}
