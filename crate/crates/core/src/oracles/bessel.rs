//! Modified Bessel functions `I_ν(z)`, `K_ν(z)` of real order for `z > 0`.
//!
//! `K` comes from Temme's series (`z < 2`) or Steed's continued fraction
//! at the reduced order `|μ| ≤ ½`, followed by forward recurrence. `I` uses
//! its power series up to `z = max(20, 2|ν|)`, the large-argument expansion
//! for very large `z`, and otherwise the ratio continued fraction combined
//! with the Wronskian. Negative orders go through reflection.

use std::f64::consts::PI;

use super::gamma::{ln_gamma, sin_pi};
use crate::error::{Error, Result};

pub const MAX_ORDER: f64 = 100.0;

const EPS: f64 = 1e-16;
const FPMIN: f64 = 1e-300;
const MAX_ITER: usize = 200_000;
const TEMME_SWITCH: f64 = 2.0;
const LN_MAX: f64 = 709.78;

/// Taylor coefficients of `1/Γ(1+x)` about zero.
const RGAMMA1: [f64; 30] = [
    1.0,
    0.577_215_664_901_532_860_61,
    -0.655_878_071_520_253_881_08,
    -0.042_002_635_034_095_235_529,
    0.166_538_611_382_291_489_5,
    -0.042_197_734_555_544_336_748,
    -0.009_621_971_527_876_973_562_1,
    0.007_218_943_246_663_099_542_4,
    -0.001_165_167_591_859_065_112_1,
    -0.000_215_241_674_114_950_972_82,
    0.000_128_050_282_388_116_186_15,
    -0.000_020_134_854_780_788_238_656,
    -1.250_493_482_142_670_657_3e-6,
    1.133_027_231_981_695_882_4e-6,
    -2.056_338_416_977_607_103_5e-7,
    6.116_095_104_481_415_817_9e-9,
    5.002_007_644_469_222_930_1e-9,
    -1.181_274_570_487_020_144_6e-9,
    1.043_426_711_691_100_510_5e-10,
    7.782_263_439_905_071_254e-12,
    -3.696_805_618_642_205_708_2e-12,
    5.100_370_287_454_475_979e-13,
    -2.058_326_053_566_506_783_2e-14,
    -5.348_122_539_423_017_982_4e-15,
    1.226_778_628_238_260_790_2e-15,
    -1.181_259_301_697_458_769_5e-16,
    1.186_692_254_751_600_332_6e-18,
    1.412_380_655_318_031_781_6e-18,
    -2.298_745_684_435_370_206_6e-19,
    1.714_406_321_927_337_433_4e-20,
];

fn check_args(nu: f64, z: f64) -> Result<()> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::InvalidArgument(format!("Bessel argument must be finite and > 0, got {z}")));
    }
    if !nu.is_finite() || nu.abs() > MAX_ORDER {
        return Err(Error::InvalidArgument(format!(
            "Bessel order {nu} outside the supported range |nu| <= {MAX_ORDER}"
        )));
    }
    Ok(())
}

/// `(1/Γ(1+μ), 1/Γ(1−μ), Γ₁(μ), Γ₂(μ))` for `|μ| ≤ ½`.
fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    let x2 = mu * mu;
    let mut even = 0.0;
    let mut odd = 0.0;
    for j in (0..15).rev() {
        even = even * x2 + RGAMMA1[2 * j];
        odd = odd * x2 + RGAMMA1[2 * j + 1];
    }
    // 1/Γ(1±μ) = even ± μ·odd
    (even + mu * odd, even - mu * odd, -odd, even)
}

/// Unscaled `(K_μ, K_{μ+1})` by Temme's series, `|μ| ≤ ½`, `x < 2`.
fn temme_k(mu: f64, x: f64) -> Result<(f64, f64)> {
    let x2 = 0.5 * x;
    let pimu = PI * mu;
    let fact = if pimu.abs() < EPS { 1.0 } else { pimu / pimu.sin() };
    let d = -x2.ln();
    let e = mu * d;
    let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
    let (gampl, gammi, gam1, gam2) = temme_gammas(mu);
    let mut ff = fact * (gam1 * e.cosh() + gam2 * fact2 * d);
    let mut sum = ff;
    let ee = e.exp();
    let mut p = 0.5 * ee / gampl;
    let mut q = 0.5 / (ee * gammi);
    let mut c = 1.0;
    let dd = x2 * x2;
    let mut sum1 = p;
    let mu2 = mu * mu;
    for i in 1..MAX_ITER {
        let fi = i as f64;
        ff = (fi * ff + p + q) / (fi * fi - mu2);
        c *= dd / fi;
        p /= fi - mu;
        q /= fi + mu;
        let del = c * ff;
        sum += del;
        sum1 += c * (p - fi * ff);
        if del.abs() < sum.abs() * EPS {
            return Ok((sum, sum1 * 2.0 / x));
        }
    }
    Err(Error::NoConvergence("Temme series for K"))
}

/// Scaled `(e^x K_μ, e^x K_{μ+1})` by Steed's continued fraction, `x ≥ 2`.
fn steed_k_scaled(mu: f64, x: f64) -> Result<(f64, f64)> {
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25 - mu * mu;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..MAX_ITER {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < EPS {
            let h = a1 * h;
            let kmu = (PI / (2.0 * x)).sqrt() / s;
            let k1 = kmu * (mu + x + 0.5 - h) / x;
            return Ok((kmu, k1));
        }
    }
    Err(Error::NoConvergence("Steed continued fraction for K"))
}

/// Scaled `(e^x K_μ, e^x K_{μ+1})` for `|μ| ≤ ½`.
fn k_reduced_scaled(mu: f64, x: f64) -> Result<(f64, f64)> {
    if x < TEMME_SWITCH {
        let (k0, k1) = temme_k(mu, x)?;
        let e = x.exp();
        Ok((k0 * e, k1 * e))
    } else {
        steed_k_scaled(mu, x)
    }
}

fn split_order(nu: f64) -> (usize, f64) {
    let nl = (nu + 0.5).floor();
    (nl as usize, nu - nl)
}

/// Scaled `(e^x K_ν, e^x K_{ν+1})` for `ν ≥ 0`.
fn k_scaled_pair(nu: f64, x: f64) -> Result<(f64, f64)> {
    let (nl, mu) = split_order(nu);
    let (mut kmu, mut k1) = k_reduced_scaled(mu, x)?;
    let xi2 = 2.0 / x;
    for i in 1..=nl {
        let next = (mu + i as f64) * xi2 * k1 + kmu;
        kmu = k1;
        k1 = next;
    }
    if !kmu.is_finite() {
        return Err(Error::Overflow {
            function: "bessel_k",
            nu,
            z: x,
        });
    }
    Ok((kmu, k1))
}

/// `e^{-x} I_ν(x)` by the power series, with a log-scaled leading term.
fn i_scaled_series(nu: f64, x: f64) -> Result<f64> {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..MAX_ITER {
        let fk = k as f64;
        term *= q / (fk * (nu + fk));
        sum += term;
        if term < EPS * sum {
            let log_lead = nu * (0.5 * x).ln() - ln_gamma(nu + 1.0)? - x;
            return Ok((log_lead + sum.ln()).exp());
        }
    }
    Err(Error::NoConvergence("power series for I"))
}

/// `e^{-x} I_ν(x)` from the large-argument expansion.
fn i_scaled_asymptotic(nu: f64, x: f64) -> Result<f64> {
    let mu4 = 4.0 * nu * nu;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        let next = -term * (mu4 - odd * odd) / (8.0 * k as f64 * x);
        if next.abs() > term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() < EPS * sum.abs() {
            return Ok(sum / (2.0 * PI * x).sqrt());
        }
    }
    Err(Error::NoConvergence("large-argument expansion for I"))
}

/// `e^{-x} I_ν(x)` from the ratio continued fraction and the Wronskian.
fn i_scaled_wronskian(nu: f64, x: f64) -> Result<f64> {
    let (nl, mu) = split_order(nu);
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;

    // I'_ν/I_ν by modified Lentz
    let mut h = (nu * xi).max(FPMIN);
    let mut b = xi2 * nu;
    let mut d = 0.0;
    let mut c = h;
    let mut converged = false;
    for _ in 1..MAX_ITER {
        b += xi2;
        d = 1.0 / (b + d);
        c = b + 1.0 / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < EPS {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence("continued fraction for I'/I"));
    }

    // downward recurrence of (I, I') from ν to μ, rescaling to avoid overflow
    let mut ril = 1.0_f64;
    let mut ripl = h;
    let mut fact = nu * xi;
    let mut log_scale = 0.0;
    for _ in 0..nl {
        let temp = fact * ril + ripl;
        fact -= xi;
        ripl = fact * temp + ril;
        ril = temp;
        if ril.abs() > 1e200 {
            ril *= 1e-200;
            ripl *= 1e-200;
            log_scale += 200.0 * std::f64::consts::LN_10;
        }
    }
    let f = ripl / ril;
    let (kmu, k1) = k_reduced_scaled(mu, x)?;
    let kmup = mu * xi * kmu - k1;
    let imu = xi / (f * kmu - kmup);
    Ok(imu * (-(ril.abs().ln() + log_scale)).exp() * ril.signum())
}

/// `e^{-x} I_ν(x)` for `ν ≥ 0`.
fn i_scaled_nonneg(nu: f64, x: f64) -> Result<f64> {
    if x <= 20f64.max(2.0 * nu) {
        i_scaled_series(nu, x)
    } else if x >= 1000f64.max(nu * nu) {
        i_scaled_asymptotic(nu, x)
    } else {
        i_scaled_wronskian(nu, x)
    }
}

fn k_scaled_any(nu: f64, x: f64) -> Result<f64> {
    Ok(k_scaled_pair(nu.abs(), x)?.0)
}

fn i_scaled_any(nu: f64, x: f64) -> Result<f64> {
    if nu >= 0.0 {
        return i_scaled_nonneg(nu, x);
    }
    let a = -nu;
    let base = i_scaled_nonneg(a, x)?;
    let s = sin_pi(a);
    if s == 0.0 {
        return Ok(base);
    }
    // I_{−a} = I_a + (2/π) sin(πa) K_a
    let ks = match k_scaled_pair(a, x) {
        Ok((k, _)) => k,
        Err(Error::Overflow { .. }) => {
            return Err(Error::Overflow {
                function: "bessel_i",
                nu,
                z: x,
            })
        }
        Err(e) => return Err(e),
    };
    Ok(base + 2.0 / PI * s * (ks.ln() - 2.0 * x).exp())
}

/// `e^{-z} I_ν(z)`.
pub fn bessel_i_scaled(nu: f64, z: f64) -> Result<f64> {
    check_args(nu, z)?;
    i_scaled_any(nu, z)
}

/// `e^{z} K_ν(z)`.
pub fn bessel_k_scaled(nu: f64, z: f64) -> Result<f64> {
    check_args(nu, z)?;
    k_scaled_any(nu, z)
}

fn unscale(scaled: f64, shift: f64, function: &'static str, nu: f64, z: f64) -> Result<f64> {
    if scaled == 0.0 {
        return Ok(0.0);
    }
    let log = scaled.abs().ln() + shift;
    if log > LN_MAX {
        return Err(Error::Overflow { function, nu, z });
    }
    Ok(scaled.signum() * log.exp())
}

pub fn bessel_i(nu: f64, z: f64) -> Result<f64> {
    check_args(nu, z)?;
    unscale(i_scaled_any(nu, z)?, z, "bessel_i", nu, z)
}

pub fn bessel_k(nu: f64, z: f64) -> Result<f64> {
    check_args(nu, z)?;
    unscale(k_scaled_any(nu, z)?, -z, "bessel_k", nu, z)
}

/// `e^{-z} I′_ν(z) = ½e^{-z}(I_{ν−1} + I_{ν+1})`.
pub fn bessel_i_scaled_deriv(nu: f64, z: f64) -> Result<f64> {
    check_args(nu, z)?;
    Ok(0.5 * (i_scaled_any(nu - 1.0, z)? + i_scaled_any(nu + 1.0, z)?))
}

/// `e^{z} K′_ν(z) = −½e^{z}(K_{ν−1} + K_{ν+1})`.
pub fn bessel_k_scaled_deriv(nu: f64, z: f64) -> Result<f64> {
    check_args(nu, z)?;
    Ok(-0.5 * (k_scaled_any(nu - 1.0, z)? + k_scaled_any(nu + 1.0, z)?))
}

pub fn bessel_i_deriv(nu: f64, z: f64) -> Result<f64> {
    unscale(bessel_i_scaled_deriv(nu, z)?, z, "bessel_i", nu, z)
}

pub fn bessel_k_deriv(nu: f64, z: f64) -> Result<f64> {
    unscale(bessel_k_scaled_deriv(nu, z)?, -z, "bessel_k", nu, z)
}
