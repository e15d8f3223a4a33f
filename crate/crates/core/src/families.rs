//! The worked example equations, each with its natural start time and the
//! condition set that applies to it.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::coefficients::{CoefficientProfile, Window};
use crate::criteria::{thm1_check, thm2_check, CriterionReport};
use crate::error::{Error, Result};
use crate::oracles::ClosedFormFamily;
use crate::transform::{corollary_condition_check, Gauge};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum ExampleFamily {
    /// `ẍ + βẋ − ω²t^{−m}x = 0`
    Ex3 { beta: f64, omega: f64, m: f64 },
    /// `ẍ + βẋ − ω²e^{−mt}x = 0`
    Ex4 { beta: f64, omega: f64, m: f64 },
    /// `ẍ + βt^m ẋ − ω²x = 0`
    Ex5 { beta: f64, omega: f64, m: f64 },
    /// `ẍ + βe^{mt}ẋ − ω²x = 0`
    Ex5x { beta: f64, omega: f64, m: f64 },
    /// `x″ + (β+1)τ^{−1}x′ − ω²τ^{−(m+2)}x = 0`, `Ex4` under `t = ln τ`
    Ex6 { beta: f64, omega: f64, m: f64 },
    /// `x″ + (βτ^m + 1)τ^{−1}x′ − ω²τ^{−2}x = 0`, `Ex5x` under `t = ln τ`
    Ex7 { beta: f64, omega: f64, m: f64 },
}

impl ExampleFamily {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Ex3 { .. } => "ex3",
            Self::Ex4 { .. } => "ex4",
            Self::Ex5 { .. } => "ex5",
            Self::Ex5x { .. } => "ex5x",
            Self::Ex6 { .. } => "ex6",
            Self::Ex7 { .. } => "ex7",
        }
    }

    /// `(β, ω, m)`
    pub fn params(&self) -> (f64, f64, f64) {
        match *self {
            Self::Ex3 { beta, omega, m }
            | Self::Ex4 { beta, omega, m }
            | Self::Ex5 { beta, omega, m }
            | Self::Ex5x { beta, omega, m }
            | Self::Ex6 { beta, omega, m }
            | Self::Ex7 { beta, omega, m } => (beta, omega, m),
        }
    }

    /// Same family with `β` and `ω` replaced.
    pub fn with_beta_omega(&self, beta: f64, omega: f64) -> Self {
        let m = self.params().2;
        match self {
            Self::Ex3 { .. } => Self::Ex3 { beta, omega, m },
            Self::Ex4 { .. } => Self::Ex4 { beta, omega, m },
            Self::Ex5 { .. } => Self::Ex5 { beta, omega, m },
            Self::Ex5x { .. } => Self::Ex5x { beta, omega, m },
            Self::Ex6 { .. } => Self::Ex6 { beta, omega, m },
            Self::Ex7 { .. } => Self::Ex7 { beta, omega, m },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (beta, omega, m) = self.params();
        if !(beta.is_finite() && omega.is_finite() && m.is_finite()) {
            return Err(Error::InvalidArgument("family parameters must be finite".into()));
        }
        if !(m > 0.0) {
            return Err(Error::InvalidArgument(format!("{} needs m > 0, got {m}", self.name())));
        }
        Ok(())
    }

    /// `(α, k)` in the family's own independent variable.
    pub fn coefficients(&self) -> (CoefficientProfile, CoefficientProfile) {
        use CoefficientProfile as P;
        let (beta, omega, m) = self.params();
        let w2 = omega * omega;
        match self {
            Self::Ex3 { .. } => (P::constant(beta), P::power_law(w2, -m)),
            Self::Ex4 { .. } => (P::constant(beta), P::exponential(w2, -m)),
            Self::Ex5 { .. } => (P::power_law(beta, m), P::constant(w2)),
            Self::Ex5x { .. } => (P::exponential(beta, m), P::constant(w2)),
            Self::Ex6 { .. } => (P::power_law(beta + 1.0, -1.0), P::power_law(w2, -(m + 2.0))),
            Self::Ex7 { .. } => (
                P::sum(vec![P::power_law_from(beta, m - 1.0, 1.0), P::power_law(1.0, -1.0)]),
                P::power_law(w2, -2.0),
            ),
        }
    }

    /// Default initial time.
    pub fn t0(&self) -> f64 {
        match self {
            Self::Ex3 { .. } | Self::Ex5 { .. } | Self::Ex6 { .. } | Self::Ex7 { .. } => 1.0,
            Self::Ex4 { .. } | Self::Ex5x { .. } => 0.0,
        }
    }

    /// The reparametrization `dτ/dt = τ` that produces `Ex6`/`Ex7` from
    /// `Ex4`/`Ex5x`.
    pub fn gauge(&self) -> Option<Gauge> {
        let (_, _, m) = self.params();
        match self {
            Self::Ex6 { .. } => Gauge::thm1(CoefficientProfile::power_law(1.0, -m), 2.0 / m).ok(),
            Self::Ex7 { .. } => Gauge::thm2(CoefficientProfile::power_law(1.0, m), -2.0 / m).ok(),
            _ => None,
        }
    }

    /// The condition set that applies: constant damping for `Ex3`/`Ex4`,
    /// constant stiffness for `Ex5`/`Ex5x`, and the reparametrized versions
    /// for `Ex6`/`Ex7`.
    pub fn criterion(&self, window: Window, grid: usize) -> Result<CriterionReport> {
        self.validate()?;
        let (beta, omega, _) = self.params();
        let (alpha, k) = self.coefficients();
        match self {
            Self::Ex3 { .. } | Self::Ex4 { .. } => thm1_check(beta, &k, window, grid),
            Self::Ex5 { .. } | Self::Ex5x { .. } => thm2_check(omega, &alpha, window, grid),
            Self::Ex6 { .. } | Self::Ex7 { .. } => {
                let gauge = self.gauge().expect("m > 0 gives a valid gauge");
                corollary_condition_check(&gauge, beta, omega, window, grid)
            }
        }
    }

    /// Closed-form solution family, where one exists.
    pub fn closed_form(&self) -> Option<ClosedFormFamily> {
        let (beta, omega, m) = self.params();
        match self {
            Self::Ex3 { .. } if m == 2.0 => Some(ClosedFormFamily::Ex3m2 { beta, omega }),
            Self::Ex4 { .. } => Some(ClosedFormFamily::Ex4 { beta, omega, m }),
            Self::Ex5x { .. } => Some(ClosedFormFamily::Ex5x { beta, omega, m }),
            _ => None,
        }
    }
}

impl fmt::Display for ExampleFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (beta, omega, m) = self.params();
        write!(f, "{} beta={beta} omega={omega} m={m}", self.name())
    }
}

/// Parses `"ex3 beta=3 omega=1 m=1"`; missing parameters default to 1.
impl FromStr for ExampleFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split_whitespace();
        let name = parts
            .next()
            .ok_or_else(|| Error::InvalidArgument("empty family spec".into()))?
            .to_ascii_lowercase();
        let (mut beta, mut omega, mut m) = (1.0, 1.0, 1.0);
        for part in parts {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::InvalidArgument(format!("expected key=value, got {part:?}")))?;
            let v: f64 = value
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad number {value:?} for {key}")))?;
            match key {
                "beta" => beta = v,
                "omega" => omega = v,
                "m" => m = v,
                _ => return Err(Error::InvalidArgument(format!("unknown family parameter {key:?}"))),
            }
        }
        let fam = match name.as_str() {
            "ex3" => Self::Ex3 { beta, omega, m },
            "ex4" => Self::Ex4 { beta, omega, m },
            "ex5" => Self::Ex5 { beta, omega, m },
            "ex5x" => Self::Ex5x { beta, omega, m },
            "ex6" => Self::Ex6 { beta, omega, m },
            "ex7" => Self::Ex7 { beta, omega, m },
            other => return Err(Error::InvalidArgument(format!("unknown family {other:?}"))),
        };
        fam.validate()?;
        Ok(fam)
    }
}
