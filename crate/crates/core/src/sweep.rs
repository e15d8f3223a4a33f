//! Parameter scans over `(β, ω²)` for one example family.
//!
//! Each grid point runs the family's condition set and one integration; the
//! points are independent and are evaluated through [`crate::parallel::map`].

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::coefficients::Window;
use crate::criteria::{ConditionStatus, Overall, DEFAULT_CRITERIA_GRID};
use crate::error::{Error, Result};
use crate::families::ExampleFamily;
use crate::integrator::{integrate, Classification, IntegrationConfig, PlanarState};
use crate::io::fmt17;
use crate::parallel::{map, Execution};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub template: ExampleFamily,
    pub betas: Vec<f64>,
    pub omega2s: Vec<f64>,
    /// `(x(t0), ẋ(t0))` with `t0` the family default.
    pub x0: (f64, f64),
    pub config: IntegrationConfig,
    /// Window for the condition check; defaults to `[t0, horizon]`.
    pub window: Option<Window>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub beta: f64,
    pub omega2: f64,
    pub overall: Option<Overall>,
    pub condition3: Option<ConditionStatus>,
    pub classification: Option<Classification>,
    pub max_norm: f64,
    pub steps_accepted: u64,
    pub error: Option<String>,
}

impl SweepSpec {
    pub fn points(&self) -> Vec<(f64, f64)> {
        self.betas
            .iter()
            .flat_map(|&b| self.omega2s.iter().map(move |&w| (b, w)))
            .collect()
    }
}

fn run_point(spec: &SweepSpec, beta: f64, omega2: f64) -> SweepRow {
    let mut row = SweepRow {
        beta,
        omega2,
        overall: None,
        condition3: None,
        classification: None,
        max_norm: f64::NAN,
        steps_accepted: 0,
        error: None,
    };
    let result = (|| -> Result<()> {
        if omega2 < 0.0 {
            return Err(Error::InvalidArgument(format!("omega^2 must be >= 0, got {omega2}")));
        }
        let fam = spec.template.with_beta_omega(beta, omega2.sqrt());
        fam.validate()?;
        let t0 = fam.t0();
        let window = match spec.window {
            Some(w) => w,
            None => Window::new(t0, spec.config.horizon)?,
        };
        let report = fam.criterion(window, DEFAULT_CRITERIA_GRID)?;
        row.overall = Some(report.overall);
        row.condition3 = report.conditions.get(2).map(|c| c.status);
        let (alpha, k) = fam.coefficients();
        let traj = integrate(&alpha, &k, PlanarState::new(t0, spec.x0.0, spec.x0.1), &spec.config)?;
        row.classification = Some(traj.classification);
        row.max_norm = traj.stats.max_norm;
        row.steps_accepted = traj.stats.steps_accepted;
        Ok(())
    })();
    if let Err(e) = result {
        row.error = Some(e.kind().to_string());
    }
    row
}

pub fn run_sweep(spec: &SweepSpec, exec: Execution) -> Vec<SweepRow> {
    map(&spec.points(), exec, |&(b, w)| run_point(spec, b, w))
}

fn classification_label(c: &Option<Classification>) -> (&'static str, f64) {
    match c {
        Some(Classification::Bounded) => ("Bounded", f64::NAN),
        Some(Classification::Escaped { t_escape }) => ("Escaped", *t_escape),
        Some(Classification::Inconclusive) => ("Inconclusive", f64::NAN),
        None => ("", f64::NAN),
    }
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut out: W) -> std::io::Result<()> {
    writeln!(
        out,
        "beta,omega2,overall,condition3,classification,t_escape,max_norm,steps_accepted,error"
    )?;
    for r in rows {
        let (class, t_esc) = classification_label(&r.classification);
        let overall = r.overall.map(|o| format!("{o:?}")).unwrap_or_default();
        let c3 = r.condition3.map(|c| format!("{c:?}")).unwrap_or_default();
        let t_esc = if t_esc.is_nan() { String::new() } else { fmt17(t_esc) };
        let norm = if r.max_norm.is_nan() { String::new() } else { fmt17(r.max_norm) };
        writeln!(
            out,
            "{},{},{overall},{c3},{class},{t_esc},{norm},{},{}",
            fmt17(r.beta),
            fmt17(r.omega2),
            r.steps_accepted,
            r.error.as_deref().unwrap_or("")
        )?;
    }
    Ok(())
}
