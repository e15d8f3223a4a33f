//! Exact solutions of three solvable examples in terms of `I_ν`, `K_ν`.
//!
//! | family | equation | basis (C1, C2) |
//! |--------|----------|----------------|
//! | `Ex3m2` | `ẍ + βẋ − ω²t⁻²x = 0` | `√t e^{−z} I_a(z)`, `√t e^{−z} K_a(z)`, `z = βt/2`, `a = √(1+4ω²)/2` |
//! | `Ex4` | `ẍ + βẋ − ω²e^{−mt}x = 0` | `e^{−βt/2} K_p(z)`, `e^{−βt/2} I_p(z)`, `z = (2ω/m)e^{−mt/2}`, `p = β/m` |
//! | `Ex5x` | `ẍ + βe^{mt}ẋ − ω²x = 0` | `½e^{mt/2−y}[I_{ω/m−½} + I_{ω/m+½}](y)`, `e^{mt/2−y}[K_{½−ω/m} − K_{½+ω/m}](y)`, `y = (β/2m)e^{mt}` |
//!
//! The C1 basis of each family is the one carrying the nonzero limit as
//! `t → ∞`; every term is evaluated through exponentially scaled Bessel
//! functions so that large arguments neither overflow nor underflow.

use serde::{Deserialize, Serialize};

use super::bessel::{bessel_i_scaled, bessel_i_scaled_deriv, bessel_k_scaled, bessel_k_scaled_deriv};
use super::gamma::gamma_fn;
use crate::coefficients::CoefficientProfile;
use crate::error::{Error, Result};
use crate::integrator::PlanarState;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family")]
pub enum ClosedFormFamily {
    Ex3m2 { beta: f64, omega: f64 },
    Ex4 { beta: f64, omega: f64, m: f64 },
    Ex5x { beta: f64, omega: f64, m: f64 },
}

/// `(φ(t), φ′(t))` for the two basis solutions.
pub type BasisValues = [(f64, f64); 2];

impl ClosedFormFamily {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidArgument(msg.to_string()));
        match *self {
            Self::Ex3m2 { beta, omega } => {
                if !(beta > 0.0 && beta.is_finite() && omega.is_finite()) {
                    return bad("Ex3m2 needs beta > 0 and finite omega");
                }
            }
            Self::Ex4 { beta, omega, m } => {
                if !(beta > 0.0 && beta.is_finite() && m > 0.0 && m.is_finite()) {
                    return bad("Ex4 needs beta > 0 and m > 0");
                }
                if !(omega > 0.0 && omega.is_finite()) {
                    return bad("Ex4 needs omega > 0");
                }
            }
            Self::Ex5x { beta, omega, m } => {
                if !(beta > 0.0 && beta.is_finite() && m > 0.0 && m.is_finite() && omega.is_finite()) {
                    return bad("Ex5x needs beta > 0, m > 0 and finite omega");
                }
            }
        }
        Ok(())
    }

    /// `(α(t), k(t))` of the equation this family solves.
    pub fn coefficients(&self) -> (CoefficientProfile, CoefficientProfile) {
        match *self {
            Self::Ex3m2 { beta, omega } => (
                CoefficientProfile::constant(beta),
                CoefficientProfile::power_law(omega * omega, -2.0),
            ),
            Self::Ex4 { beta, omega, m } => (
                CoefficientProfile::constant(beta),
                CoefficientProfile::exponential(omega * omega, -m),
            ),
            Self::Ex5x { beta, omega, m } => (
                CoefficientProfile::exponential(beta, m),
                CoefficientProfile::constant(omega * omega),
            ),
        }
    }

    fn check_time(&self, t: f64) -> Result<()> {
        match self {
            Self::Ex3m2 { .. } if !(t > 0.0) => Err(Error::Domain { t, start: 0.0 }),
            _ if !t.is_finite() => Err(Error::InvalidArgument(format!("time must be finite, got {t}"))),
            _ => Ok(()),
        }
    }

    /// Values and derivatives of the C1 and C2 basis solutions at `t`.
    pub fn basis(&self, t: f64) -> Result<BasisValues> {
        self.validate()?;
        self.check_time(t)?;
        let out = match *self {
            Self::Ex3m2 { beta, omega } => {
                let a = (1.0 + 4.0 * omega * omega).sqrt() / 2.0;
                let z = 0.5 * beta * t;
                let rt = t.sqrt();
                let is = bessel_i_scaled(a, z)?;
                let isd = bessel_i_scaled_deriv(a, z)?;
                let ks = bessel_k_scaled(a, z)?;
                let ksd = bessel_k_scaled_deriv(a, z)?;
                let damp = (-2.0 * z).exp();
                let phi1 = rt * is;
                let dphi1 = is / (2.0 * rt) + rt * 0.5 * beta * (isd - is);
                let phi2 = damp * rt * ks;
                let dphi2 = damp * (ks / (2.0 * rt) + rt * 0.5 * beta * (ksd - ks));
                [(phi1, dphi1), (phi2, dphi2)]
            }
            Self::Ex4 { beta, omega, m } => {
                let p = beta / m;
                let z = 2.0 * omega / m * (-0.5 * m * t).exp();
                if !(z > 0.0) {
                    return Err(Error::NonFinite {
                        what: "Bessel argument underflow",
                        t,
                    });
                }
                let dz = -0.5 * m * z;
                let ks = bessel_k_scaled(p, z)?;
                let ksd = bessel_k_scaled_deriv(p, z)?;
                let is = bessel_i_scaled(p, z)?;
                let isd = bessel_i_scaled_deriv(p, z)?;
                let ek = (-0.5 * beta * t - z).exp();
                let ei = (-0.5 * beta * t + z).exp();
                let phi1 = ek * ks;
                let phi2 = ei * is;
                [
                    (phi1, -0.5 * beta * phi1 + dz * ek * ksd),
                    (phi2, -0.5 * beta * phi2 + dz * ei * isd),
                ]
            }
            Self::Ex5x { beta, omega, m } => {
                let a = omega / m - 0.5;
                let b = omega / m + 0.5;
                let y = beta / (2.0 * m) * (m * t).exp();
                let lead = (0.5 * m * t).exp();
                let dy = m * y;
                let (ia, ib) = (bessel_i_scaled(a, y)?, bessel_i_scaled(b, y)?);
                let (iad, ibd) = (bessel_i_scaled_deriv(a, y)?, bessel_i_scaled_deriv(b, y)?);
                let (ka, kb) = (bessel_k_scaled(a, y)?, bessel_k_scaled(b, y)?);
                let (kad, kbd) = (bessel_k_scaled_deriv(a, y)?, bessel_k_scaled_deriv(b, y)?);
                // F(y) = e^{−y}·[…], x = e^{mt/2}·F(y)
                let f1 = 0.5 * (ia + ib);
                let f1d = 0.5 * ((iad - ia) + (ibd - ib));
                let damp = (-2.0 * y).exp();
                let f2 = damp * (ka - kb);
                let f2d = damp * ((kad - ka) - (kbd - kb));
                let phi1 = lead * f1;
                let phi2 = lead * f2;
                [
                    (phi1, 0.5 * m * phi1 + lead * dy * f1d),
                    (phi2, 0.5 * m * phi2 + lead * dy * f2d),
                ]
            }
        };
        for (v, d) in out {
            if !v.is_finite() || !d.is_finite() {
                return Err(Error::NonFinite {
                    what: "closed-form basis",
                    t,
                });
            }
        }
        Ok(out)
    }

    /// `lim_{t→∞} x(t)` as a function of `C1` (the C2 basis decays).
    pub fn asymptotic_limit(&self, c1: f64) -> Result<f64> {
        self.validate()?;
        let pi = std::f64::consts::PI;
        Ok(match *self {
            Self::Ex3m2 { beta, .. } => c1 / (pi * beta).sqrt(),
            Self::Ex4 { beta, omega, m } => {
                let p = beta / m;
                0.5 * c1 * gamma_fn(p)? * (omega / m).powf(-p)
            }
            Self::Ex5x { beta, m, .. } => c1 * (m / (pi * beta)).sqrt(),
        })
    }

    /// Decay rate of `|x(t) − limit|`, where it is exponential in `t`.
    pub fn decay_rate(&self) -> Option<f64> {
        match *self {
            Self::Ex4 { beta, m, .. } => Some(beta.min(m)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormSolution {
    pub family: ClosedFormFamily,
    pub c1: f64,
    pub c2: f64,
}

impl ClosedFormSolution {
    pub fn new(family: ClosedFormFamily, c1: f64, c2: f64) -> Result<Self> {
        family.validate()?;
        if !(c1.is_finite() && c2.is_finite()) {
            return Err(Error::InvalidArgument("integration constants must be finite".into()));
        }
        Ok(Self { family, c1, c2 })
    }

    /// Fits `C1`, `C2` to the initial state.
    pub fn fitted(family: ClosedFormFamily, x0: &PlanarState) -> Result<Self> {
        let (c1, c2) = fit_constants(family, x0)?;
        Self::new(family, c1, c2)
    }

    pub fn solution_eval(&self, t: f64) -> Result<f64> {
        Ok(self.state(t)?.x1)
    }

    pub fn state(&self, t: f64) -> Result<PlanarState> {
        let [(p1, d1), (p2, d2)] = self.family.basis(t)?;
        // skip a zero constant so an underflowed basis cannot produce 0·∞
        let mix = |c: f64, v: f64| if c == 0.0 { 0.0 } else { c * v };
        Ok(PlanarState::new(t, mix(self.c1, p1) + mix(self.c2, p2), mix(self.c1, d1) + mix(self.c2, d2)))
    }

    pub fn asymptotic_limit(&self) -> Result<f64> {
        self.family.asymptotic_limit(self.c1)
    }
}

/// Solves for `(C1, C2)` so the closed form matches `x0` in value and slope.
pub fn fit_constants(family: ClosedFormFamily, x0: &PlanarState) -> Result<(f64, f64)> {
    let [(p1, d1), (p2, d2)] = family.basis(x0.t)?;
    let det = p1 * d2 - p2 * d1;
    let scale = (p1 * d2).abs() + (p2 * d1).abs();
    if !(det.abs() > 1e-13 * scale) || det == 0.0 {
        return Err(Error::SingularSystem { det });
    }
    let c1 = (x0.x1 * d2 - p2 * x0.x2) / det;
    let c2 = (p1 * x0.x2 - d1 * x0.x1) / det;
    Ok((c1, c2))
}
