//! Mittag-Leffler and generalized exponential functions by series summation.

use statrs::function::gamma::{gamma, ln_gamma};

use crate::error::{Error, Result};

/// Largest |z| accepted by [`mittag_leffler`].
pub const ML_MAX_ABS_Z: f64 = 50.0;

const REL_TOL: f64 = 1e-15;
const MIN_TERMS: usize = 5;
const MAX_TERMS: usize = 100_000;

/// `z^n / Gamma(s)` through logarithms, keeping the sign of `z^n`.
fn ratio(z: f64, n: f64, s: f64) -> f64 {
    if z == 0.0 {
        return if n == 0.0 { recip_gamma(s) } else { 0.0 };
    }
    if s <= 0.0 && s == s.round() {
        return 0.0;
    }
    if s < 170.0 && n < 300.0 {
        let direct = z.powi(n as i32) / gamma(s);
        if direct.is_finite() {
            return direct;
        }
    }
    let sign_z = if z < 0.0 && (n as i64) % 2 != 0 { -1.0 } else { 1.0 };
    let sign_g = gamma_sign(s);
    sign_z * sign_g * (n * z.abs().ln() - ln_gamma(s)).exp()
}

fn recip_gamma(s: f64) -> f64 {
    if s <= 0.0 && s == s.round() {
        0.0
    } else {
        gamma_sign(s) * (-ln_gamma(s)).exp()
    }
}

/// Sign of Gamma(s) for non-pole `s`.
fn gamma_sign(s: f64) -> f64 {
    if s > 0.0 {
        1.0
    } else {
        // Gamma alternates sign between consecutive negative integers.
        if (s.floor() as i64) % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

fn sum_series(term: impl Fn(usize) -> f64) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for k in 0..MAX_TERMS {
        let t = term(k);
        // Kahan summation keeps the alternating series for negative z accurate.
        let y = t - c;
        let s = sum + y;
        c = (s - sum) - y;
        sum = s;
        if k + 1 >= MIN_TERMS && t.abs() < REL_TOL * sum.abs() {
            break;
        }
    }
    sum
}

/// `E_{alpha,beta}(z) = sum_n z^n / Gamma(alpha n + beta)` for |z| <= 50.
pub fn mittag_leffler(alpha: f64, beta: f64, z: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidOrder {
            order: alpha,
            reason: "Mittag-Leffler alpha must be positive".into(),
        });
    }
    if !z.is_finite() || z.abs() > ML_MAX_ABS_Z {
        return Err(Error::DomainRestriction(format!(
            "|z| = {} exceeds the series limit {ML_MAX_ABS_Z}",
            z.abs()
        )));
    }
    if !beta.is_finite() {
        return Err(Error::InvalidInput(format!("beta = {beta} is not finite")));
    }
    Ok(sum_series(|k| {
        let kf = k as f64;
        ratio(z, kf, alpha * kf + beta)
    }))
}

/// `E^z_alpha = sum_n z^(n+alpha) / Gamma(1 + alpha + n)` for z > 0.
pub fn generalized_exp(alpha: f64, z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::DomainRestriction(format!(
            "generalized exponential needs z > 0, got {z}"
        )));
    }
    if !(alpha > -1.0) {
        return Err(Error::InvalidOrder {
            order: alpha,
            reason: "generalized exponential needs alpha > -1".into(),
        });
    }
    let lz = z.ln();
    Ok(sum_series(|k| {
        let e = k as f64 + alpha;
        (e * lz - ln_gamma(1.0 + e)).exp()
    }))
}
