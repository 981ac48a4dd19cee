//! Closed-form fractional derivatives of elementary functions.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

/// Elementary functions with a closed fractional-derivative rule.
///
/// Exponential, sine and cosine are taken in the left Weyl sense; powers and
/// constants use the finite terminal `a = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum AnalyticKind {
    /// `exp(rate * x + shift)`.
    Exponential { rate: f64, shift: f64 },
    /// `sin(rate * x)`.
    Sine { rate: f64 },
    /// `cos(rate * x)`.
    Cosine { rate: f64 },
    /// `x^beta` on `x > 0`.
    Power { beta: f64 },
    /// The constant `c`.
    Constant { c: f64 },
}

/// A closed-form result, evaluable pointwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum AnalyticResult {
    /// `coefficient * exp(rate * x + shift)`.
    Exponential {
        coefficient: f64,
        rate: f64,
        shift: f64,
    },
    /// `amplitude * sin(rate * x + phase)`.
    Sinusoid {
        amplitude: f64,
        rate: f64,
        phase: f64,
    },
    /// `coefficient * x^exponent`.
    Power { coefficient: f64, exponent: f64 },
}

impl AnalyticResult {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            AnalyticResult::Exponential {
                coefficient,
                rate,
                shift,
            } => coefficient * (rate * x + shift).exp(),
            AnalyticResult::Sinusoid {
                amplitude,
                rate,
                phase,
            } => amplitude * (rate * x + phase).sin(),
            AnalyticResult::Power {
                coefficient,
                exponent,
            } => coefficient * x.powf(exponent),
        }
    }
}

/// `1 / Gamma(z)`, zero at the poles.
fn recip_gamma(z: f64) -> f64 {
    if z <= 0.0 && z == z.round() {
        0.0
    } else {
        1.0 / gamma(z)
    }
}

/// Derivative of order `order` (negative orders are integrals).
///
/// The constant rule is the Riemann-Liouville one, `c x^(-order) / Gamma(1-order)`;
/// the Caputo derivative of a constant is zero.
pub fn analytic_frac_derivative(kind: AnalyticKind, order: f64) -> Result<AnalyticResult> {
    if !order.is_finite() {
        return Err(Error::InvalidOrder {
            order,
            reason: "order must be finite".into(),
        });
    }
    match kind {
        AnalyticKind::Exponential { rate, shift } => {
            if !(rate > 0.0) {
                return Err(Error::InvalidInput(format!(
                    "exponential rate {rate} must be positive"
                )));
            }
            Ok(AnalyticResult::Exponential {
                coefficient: rate.powf(order),
                rate,
                shift,
            })
        }
        AnalyticKind::Sine { rate } | AnalyticKind::Cosine { rate } => {
            if !(rate > 0.0) {
                return Err(Error::InvalidInput(format!(
                    "sinusoid rate {rate} must be positive"
                )));
            }
            if order <= -1.0 {
                return Err(Error::UnsupportedOrder {
                    order,
                    what: "sine/cosine (use the integral property instead)".into(),
                });
            }
            let base = if matches!(kind, AnalyticKind::Cosine { .. }) {
                FRAC_PI_2
            } else {
                0.0
            };
            Ok(AnalyticResult::Sinusoid {
                amplitude: rate.powf(order),
                rate,
                phase: base + FRAC_PI_2 * order,
            })
        }
        AnalyticKind::Power { beta } => {
            if beta <= -1.0 {
                return Err(Error::UnsupportedOrder {
                    order,
                    what: format!("power x^{beta} (needs beta > -1)"),
                });
            }
            Ok(AnalyticResult::Power {
                coefficient: gamma(beta + 1.0) * recip_gamma(beta + 1.0 - order),
                exponent: beta - order,
            })
        }
        AnalyticKind::Constant { c } => Ok(AnalyticResult::Power {
            coefficient: c * recip_gamma(1.0 - order),
            exponent: -order,
        }),
    }
}
