//! Closed-form time-varying coefficients with exact first derivatives.
//!
//! Every damping `α(t)` and stiffness scale `k(t)` in the crate is a
//! [`CoefficientProfile`]. Profiles serialize to a small JSON schema,
//! e.g. `{"family":"powerlaw","a":1.0,"p":-2.0,"t0":1.0}`, and compose
//! through `{"family":"sum","terms":[...]}`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::transform::Gauge;

/// Magnitudes above this are reported as non-finite rather than saturated.
pub const OVERFLOW_LIMIT: f64 = 1e308;

/// Grid size used by [`CoefficientProfile::sign_on_window`] callers that do not choose one.
pub const DEFAULT_SIGN_GRID: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum CoefficientProfile {
    Constant {
        c: f64,
    },
    /// `a·t^p`
    #[serde(rename = "powerlaw")]
    PowerLaw {
        a: f64,
        p: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        t0: Option<f64>,
    },
    /// `a·e^{r·t}`
    Exponential {
        a: f64,
        r: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        t0: Option<f64>,
    },
    Sum {
        terms: Vec<CoefficientProfile>,
    },
    Scaled {
        by: f64,
        profile: Box<CoefficientProfile>,
    },
    /// `base(τ(t))` where `τ(t)` inverts the gauge's time map started at `tau0`
    /// (so `t = 0` corresponds to `τ = tau0`).
    Reparametrized {
        base: Box<CoefficientProfile>,
        gauge: Box<Gauge>,
        tau0: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignVerdict {
    StrictlyPositive,
    StrictlyNegative,
    ChangesSign,
    NonStrict,
}

/// Closed time interval `[start, end]` with `end > start`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub start: f64,
    pub end: f64,
}

impl Window {
    pub fn new(start: f64, end: f64) -> Result<Self> {
        if !(start.is_finite() && end.is_finite()) || end <= start {
            return Err(Error::InvalidArgument(format!(
                "window [{start}, {end}] must be finite with end > start"
            )));
        }
        Ok(Self { start, end })
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.start && t <= self.end
    }
}

/// Log-spaced sample times covering `window`, endpoints included.
///
/// Windows starting at or below zero are shifted so that `start` maps to 1
/// before taking logarithms; the spacing is then geometric in `t - start + 1`.
pub fn log_grid(window: Window, n: usize) -> Vec<f64> {
    let n = n.max(2);
    let shift = if window.start > 0.0 {
        0.0
    } else {
        1.0 - window.start
    };
    let lo = (window.start + shift).ln();
    let hi = (window.end + shift).ln();
    let mut grid: Vec<f64> = (0..n)
        .map(|i| {
            let s = i as f64 / (n - 1) as f64;
            (lo + s * (hi - lo)).exp() - shift
        })
        .collect();
    grid[0] = window.start;
    grid[n - 1] = window.end;
    grid
}

fn checked(value: f64, derivative: f64, t: f64) -> Result<(f64, f64)> {
    if !value.is_finite() || value.abs() > OVERFLOW_LIMIT {
        return Err(Error::NonFinite {
            what: "coefficient value",
            t,
        });
    }
    if !derivative.is_finite() || derivative.abs() > OVERFLOW_LIMIT {
        return Err(Error::NonFinite {
            what: "coefficient derivative",
            t,
        });
    }
    Ok((value, derivative))
}

impl CoefficientProfile {
    pub fn constant(c: f64) -> Self {
        Self::Constant { c }
    }

    pub fn power_law(a: f64, p: f64) -> Self {
        Self::PowerLaw { a, p, t0: None }
    }

    pub fn power_law_from(a: f64, p: f64, t0: f64) -> Self {
        Self::PowerLaw { a, p, t0: Some(t0) }
    }

    pub fn exponential(a: f64, r: f64) -> Self {
        Self::Exponential { a, r, t0: None }
    }

    pub fn sum(terms: Vec<CoefficientProfile>) -> Self {
        Self::Sum { terms }
    }

    pub fn scaled(by: f64, profile: CoefficientProfile) -> Self {
        Self::Scaled {
            by,
            profile: Box::new(profile),
        }
    }

    /// First time at which the profile may be evaluated.
    pub fn domain_start(&self) -> f64 {
        match self {
            Self::Constant { .. } => f64::NEG_INFINITY,
            Self::PowerLaw { p, t0, .. } => t0.unwrap_or(if *p < 0.0 { 1.0 } else { 0.0 }),
            Self::Exponential { t0, .. } => t0.unwrap_or(f64::NEG_INFINITY),
            Self::Sum { terms } => terms
                .iter()
                .map(Self::domain_start)
                .fold(f64::NEG_INFINITY, f64::max),
            Self::Scaled { profile, .. } => profile.domain_start(),
            Self::Reparametrized { .. } => 0.0,
        }
    }

    /// `(c(t), ċ(t))`.
    pub fn eval(&self, t: f64) -> Result<(f64, f64)> {
        let start = self.domain_start();
        if t.is_nan() || t < start {
            return Err(Error::Domain { t, start });
        }
        let (v, d) = match self {
            Self::Constant { c } => (*c, 0.0),
            Self::PowerLaw { a, p, .. } => {
                if *a == 0.0 {
                    (0.0, 0.0)
                } else if *p == 0.0 {
                    (*a, 0.0)
                } else {
                    let v = a * t.powf(*p);
                    let d = if *p == 1.0 {
                        *a
                    } else {
                        a * p * t.powf(p - 1.0)
                    };
                    (v, d)
                }
            }
            Self::Exponential { a, r, .. } => {
                let v = a * (r * t).exp();
                (v, r * v)
            }
            Self::Sum { terms } => {
                let mut acc = (0.0, 0.0);
                for term in terms {
                    let (v, d) = term.eval(t)?;
                    acc.0 += v;
                    acc.1 += d;
                }
                acc
            }
            Self::Scaled { by, profile } => {
                let (v, d) = profile.eval(t)?;
                (by * v, by * d)
            }
            Self::Reparametrized { base, gauge, tau0 } => {
                let tau = gauge.inverse_time_map(*tau0, t)?;
                let (v, d) = base.eval(tau)?;
                // dτ/dt = f(τ)^{-n/2}
                let rate = gauge.rate(tau)?;
                (v, d / rate)
            }
        };
        checked(v, d, t)
    }

    pub fn value(&self, t: f64) -> Result<f64> {
        Ok(self.eval(t)?.0)
    }

    pub fn derivative(&self, t: f64) -> Result<f64> {
        Ok(self.eval(t)?.1)
    }

    /// True for `Constant`, `PowerLaw` and `Exponential`.
    pub fn is_pure(&self) -> bool {
        matches!(
            self,
            Self::Constant { .. } | Self::PowerLaw { .. } | Self::Exponential { .. }
        )
    }

    /// Sign of the profile on `window`.
    ///
    /// Pure families are decided exactly; everything else is sampled on a
    /// log-spaced grid of `grid` points.
    pub fn sign_on_window(&self, window: Window, grid: usize) -> Result<SignVerdict> {
        if grid < 2 {
            return Err(Error::InvalidArgument("sign grid needs at least 2 points".into()));
        }
        // surface domain errors before any shortcut
        self.eval(window.start)?;
        self.eval(window.end)?;
        let from_sign = |x: f64| {
            if x > 0.0 {
                SignVerdict::StrictlyPositive
            } else if x < 0.0 {
                SignVerdict::StrictlyNegative
            } else {
                SignVerdict::NonStrict
            }
        };
        match self {
            Self::Constant { c } => return Ok(from_sign(*c)),
            Self::Exponential { a, .. } => return Ok(from_sign(*a)),
            Self::PowerLaw { a, p, .. } if window.start > 0.0 || *p == 0.0 => {
                return Ok(from_sign(*a))
            }
            // vanishes at the left endpoint
            Self::PowerLaw { p, .. } if window.start == 0.0 && *p > 0.0 => {
                return Ok(SignVerdict::NonStrict)
            }
            _ => {}
        }
        let mut pos = false;
        let mut neg = false;
        let mut zero = false;
        for t in log_grid(window, grid) {
            let v = self.value(t)?;
            if v > 0.0 {
                pos = true;
            } else if v < 0.0 {
                neg = true;
            } else {
                zero = true;
            }
        }
        Ok(match (pos, neg, zero) {
            (true, true, _) => SignVerdict::ChangesSign,
            (true, false, false) => SignVerdict::StrictlyPositive,
            (false, true, false) => SignVerdict::StrictlyNegative,
            _ => SignVerdict::NonStrict,
        })
    }

    /// Closed-form derivative profile, when one exists in the same schema.
    pub fn derivative_profile(&self) -> Option<CoefficientProfile> {
        Some(match self {
            Self::Constant { .. } => Self::constant(0.0),
            Self::PowerLaw { a, p, t0 } => {
                if *p == 0.0 {
                    Self::constant(0.0)
                } else {
                    Self::PowerLaw {
                        a: a * p,
                        p: p - 1.0,
                        t0: Some(t0.unwrap_or(self.domain_start())),
                    }
                }
            }
            Self::Exponential { a, r, t0 } => Self::Exponential {
                a: a * r,
                r: *r,
                t0: *t0,
            },
            Self::Sum { terms } => Self::Sum {
                terms: terms
                    .iter()
                    .map(Self::derivative_profile)
                    .collect::<Option<Vec<_>>>()?,
            },
            Self::Scaled { by, profile } => Self::scaled(*by, profile.derivative_profile()?),
            Self::Reparametrized { .. } => return None,
        })
    }

    /// `self^q` for a pure family with positive values; `None` otherwise.
    pub fn pure_power(&self, q: f64) -> Option<CoefficientProfile> {
        match self {
            Self::Constant { c } if *c > 0.0 => Some(Self::constant(c.powf(q))),
            Self::PowerLaw { a, p, .. } if *a > 0.0 => Some(Self::PowerLaw {
                a: a.powf(q),
                p: p * q,
                t0: Some(self.domain_start()),
            }),
            Self::Exponential { a, r, t0 } if *a > 0.0 => Some(Self::Exponential {
                a: a.powf(q),
                r: r * q,
                t0: *t0,
            }),
            _ => None,
        }
    }

    /// `ċ/c` for a pure family; `None` otherwise.
    pub fn log_derivative(&self) -> Option<CoefficientProfile> {
        match self {
            Self::Constant { .. } => Some(Self::constant(0.0)),
            Self::PowerLaw { p, .. } => Some(if *p == 0.0 {
                Self::constant(0.0)
            } else {
                Self::PowerLaw {
                    a: *p,
                    p: -1.0,
                    t0: Some(self.domain_start()),
                }
            }),
            Self::Exponential { r, .. } => Some(Self::constant(*r)),
            _ => None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("profile serialization is infallible")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::InvalidArgument(format!("bad profile JSON: {e}")))
    }
}

/// Accepts either the JSON schema or the inline form
/// `"<family> key=value ..."`, e.g. `"powerlaw a=1 p=-1"` or `"constant c=3"`.
impl FromStr for CoefficientProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('{') {
            return Self::from_json(s);
        }
        let mut parts = s.split_whitespace();
        let family = parts
            .next()
            .ok_or_else(|| Error::InvalidArgument("empty profile".into()))?
            .to_ascii_lowercase();
        let mut a = None;
        let mut p = None;
        let mut r = None;
        let mut c = None;
        let mut t0 = None;
        for kv in parts {
            let (key, value) = kv
                .split_once('=')
                .ok_or_else(|| Error::InvalidArgument(format!("expected key=value, got {kv:?}")))?;
            let value: f64 = value
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad number in {kv:?}")))?;
            match key {
                "a" => a = Some(value),
                "p" => p = Some(value),
                "r" => r = Some(value),
                "c" => c = Some(value),
                "t0" => t0 = Some(value),
                other => {
                    return Err(Error::InvalidArgument(format!("unknown profile key {other:?}")))
                }
            }
        }
        let need = |x: Option<f64>, name: &str| {
            x.ok_or_else(|| Error::InvalidArgument(format!("{family} profile needs {name}=")))
        };
        match family.as_str() {
            "constant" => Ok(Self::constant(need(c.or(a), "c")?)),
            "powerlaw" => Ok(Self::PowerLaw {
                a: need(a, "a")?,
                p: need(p, "p")?,
                t0,
            }),
            "exponential" => Ok(Self::Exponential {
                a: need(a, "a")?,
                r: need(r, "r")?,
                t0,
            }),
            other => Err(Error::InvalidArgument(format!(
                "unknown inline family {other:?} (use JSON for sums)"
            ))),
        }
    }
}

impl fmt::Display for CoefficientProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant { c } => write!(f, "{c}"),
            Self::PowerLaw { a, p, .. } => write!(f, "{a}·t^{p}"),
            Self::Exponential { a, r, .. } => write!(f, "{a}·exp({r}·t)"),
            Self::Sum { terms } => {
                for (i, term) in terms.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    write!(f, "{term}")?;
                }
                Ok(())
            }
            Self::Scaled { by, profile } => write!(f, "{by}·({profile})"),
            Self::Reparametrized { base, tau0, .. } => write!(f, "({base})∘τ(t; τ0={tau0})"),
        }
    }
}
