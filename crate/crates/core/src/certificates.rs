//! Lyapunov and Chetaev functions and their derivatives along the flow.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::coefficients::CoefficientProfile;
use crate::criteria::vdot_matrix_thm2;
use crate::error::{Error, Result};
use crate::integrator::{PlanarState, Trajectory};

/// Per-step growth allowed before a trace stops counting as non-increasing.
pub const MONOTONE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertificateKind {
    /// `½k(t)x₁² + ½x₂²` for constant damping `β`.
    LyapunovK,
    /// `½x₁²/α(t) + ½x₂²` for constant stiffness `ω²`.
    LyapunovAlpha,
    /// `½k(t)x₁² − ½x₂²` for constant damping `β`.
    Chetaev,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    /// `k(t)` for `LyapunovK`/`Chetaev`, `α(t)` for `LyapunovAlpha`.
    pub profile: CoefficientProfile,
    /// `β` for `LyapunovK`/`Chetaev`, `ω` for `LyapunovAlpha`.
    pub constant: f64,
}

impl Certificate {
    pub fn lyapunov_k(k: CoefficientProfile, beta: f64) -> Self {
        Self {
            kind: CertificateKind::LyapunovK,
            profile: k,
            constant: beta,
        }
    }

    pub fn lyapunov_alpha(alpha: CoefficientProfile, omega: f64) -> Self {
        Self {
            kind: CertificateKind::LyapunovAlpha,
            profile: alpha,
            constant: omega,
        }
    }

    pub fn chetaev(k: CoefficientProfile, beta: f64) -> Self {
        Self {
            kind: CertificateKind::Chetaev,
            profile: k,
            constant: beta,
        }
    }

    /// The `(α, k)` pair of the planar system this certificate is built for.
    pub fn system(&self) -> (CoefficientProfile, CoefficientProfile) {
        match self.kind {
            CertificateKind::LyapunovK | CertificateKind::Chetaev => {
                (CoefficientProfile::constant(self.constant), self.profile.clone())
            }
            CertificateKind::LyapunovAlpha => (
                self.profile.clone(),
                CoefficientProfile::constant(self.constant * self.constant),
            ),
        }
    }

    pub fn v_eval(&self, s: &PlanarState) -> Result<f64> {
        let (x1, x2) = (s.x1, s.x2);
        match self.kind {
            CertificateKind::LyapunovK => {
                let k = self.profile.value(s.t)?;
                Ok(0.5 * k * x1 * x1 + 0.5 * x2 * x2)
            }
            CertificateKind::Chetaev => {
                let k = self.profile.value(s.t)?;
                Ok(0.5 * k * x1 * x1 - 0.5 * x2 * x2)
            }
            CertificateKind::LyapunovAlpha => {
                let a = self.profile.value(s.t)?;
                if a == 0.0 {
                    return Err(Error::Division(format!("damping vanishes at t = {}", s.t)));
                }
                Ok(0.5 * x1 * x1 / a + 0.5 * x2 * x2)
            }
        }
    }

    /// `dV/dt` along the vector field of [`Certificate::system`].
    pub fn vdot_eval(&self, s: &PlanarState) -> Result<f64> {
        let (x1, x2) = (s.x1, s.x2);
        let beta = self.constant;
        match self.kind {
            CertificateKind::Chetaev => {
                let kd = self.profile.derivative(s.t)?;
                Ok(0.5 * kd * x1 * x1 + beta * x2 * x2)
            }
            CertificateKind::LyapunovK => {
                let (k, kd) = self.profile.eval(s.t)?;
                Ok(0.5 * kd * x1 * x1 + 2.0 * k * x1 * x2 - beta * x2 * x2)
            }
            CertificateKind::LyapunovAlpha => {
                Ok(vdot_matrix_thm2(self.constant, &self.profile, s.t)?.quad_form(x1, x2))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceSample {
    pub t: f64,
    pub v: f64,
    pub dvdt_analytic: f64,
    pub dvdt_numeric: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateTrace {
    pub kind: CertificateKind,
    pub samples: Vec<TraceSample>,
    pub monotone_decreasing: bool,
    pub monotone_increasing: bool,
}

impl CertificateTrace {
    /// Writes `t,V,dVdt_analytic,dVdt_numeric` with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "t,V,dVdt_analytic,dVdt_numeric")?;
        for s in &self.samples {
            writeln!(
                out,
                "{},{},{},{}",
                crate::io::fmt17(s.t),
                crate::io::fmt17(s.v),
                crate::io::fmt17(s.dvdt_analytic),
                crate::io::fmt17(s.dvdt_numeric)
            )?;
        }
        Ok(())
    }

    /// Largest relative per-step change against the monotonicity tolerance
    /// (positive when V grew).
    pub fn worst_increase(&self) -> f64 {
        self.samples
            .windows(2)
            .map(|w| (w[1].v - w[0].v) / w[0].v.abs().max(1.0))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Second-order finite-difference derivative on a non-uniform grid.
fn numeric_derivative(t: &[f64], v: &[f64]) -> Vec<f64> {
    let n = t.len();
    if n < 2 {
        return vec![f64::NAN; n];
    }
    if n == 2 {
        let d = (v[1] - v[0]) / (t[1] - t[0]);
        return vec![d, d];
    }
    let mut out = vec![0.0; n];
    for i in 1..n - 1 {
        let h0 = t[i] - t[i - 1];
        let h1 = t[i + 1] - t[i];
        out[i] = (-h1 / (h0 * (h0 + h1))) * v[i - 1]
            + ((h1 - h0) / (h0 * h1)) * v[i]
            + (h0 / (h1 * (h0 + h1))) * v[i + 1];
    }
    // one-sided three-point stencils at the ends
    let (h0, h1) = (t[1] - t[0], t[2] - t[1]);
    out[0] = (-(2.0 * h0 + h1) / (h0 * (h0 + h1))) * v[0] + ((h0 + h1) / (h0 * h1)) * v[1]
        - (h0 / (h1 * (h0 + h1))) * v[2];
    let (h0, h1) = (t[n - 2] - t[n - 3], t[n - 1] - t[n - 2]);
    out[n - 1] = (h1 / (h0 * (h0 + h1))) * v[n - 3] - ((h0 + h1) / (h0 * h1)) * v[n - 2]
        + ((2.0 * h1 + h0) / (h1 * (h0 + h1))) * v[n - 1];
    out
}

/// Samples `V` and `dV/dt` (analytic and finite-difference) along `traj`.
pub fn trace_along(cert: &Certificate, traj: &Trajectory) -> Result<CertificateTrace> {
    trace_states(cert, &traj.states)
}

pub fn trace_states(cert: &Certificate, states: &[PlanarState]) -> Result<CertificateTrace> {
    if states.is_empty() {
        return Err(Error::InvalidArgument("empty trajectory".into()));
    }
    let times: Vec<f64> = states.iter().map(|s| s.t).collect();
    let values = states
        .iter()
        .map(|s| cert.v_eval(s))
        .collect::<Result<Vec<_>>>()?;
    let analytic = states
        .iter()
        .map(|s| cert.vdot_eval(s))
        .collect::<Result<Vec<_>>>()?;
    let numeric = numeric_derivative(&times, &values);
    let samples: Vec<TraceSample> = (0..states.len())
        .map(|i| TraceSample {
            t: times[i],
            v: values[i],
            dvdt_analytic: analytic[i],
            dvdt_numeric: numeric[i],
        })
        .collect();
    let monotone_decreasing = values
        .windows(2)
        .all(|w| w[1] - w[0] <= MONOTONE_TOL * w[0].abs().max(1.0));
    let monotone_increasing = values
        .windows(2)
        .all(|w| w[0] - w[1] <= MONOTONE_TOL * w[0].abs().max(1.0));
    Ok(CertificateTrace {
        kind: cert.kind,
        samples,
        monotone_decreasing,
        monotone_increasing,
    })
}

/// Whether `(x1, x2)` lies in the Chetaev region `{k(t0)x₁² > x₂²} ∩ {‖x‖ ≤ radius}`.
pub fn in_chetaev_cone(k_t0: f64, radius: f64, x1: f64, x2: f64) -> bool {
    k_t0 * x1 * x1 > x2 * x2 && x1.hypot(x2) <= radius
}
