//! Quadrature weights for the power-law and logarithmic kernels.
//!
//! The second differences of `m^(mu+1)` lose most of their digits to
//! cancellation once `m` is large, so beyond `SERIES_FROM` they are summed
//! from their binomial expansion instead.

const SERIES_FROM: usize = 16;
const SERIES_TERMS: usize = 12;

/// Generalized binomial coefficients `C(nu, k)` for `k < len`.
fn binomials(nu: f64, len: usize) -> Vec<f64> {
    let mut c = Vec::with_capacity(len);
    let mut cur = 1.0;
    for k in 0..len {
        c.push(cur);
        cur *= (nu - k as f64) / (k as f64 + 1.0);
    }
    c
}

/// Product-trapezoid kernel for the fractional integral of order `mu`.
///
/// Interior weights `a_m = (m+1)^(mu+1) - 2 m^(mu+1) + (m-1)^(mu+1)` with
/// `a_0 = 1`, and the first-node weights
/// `c_i = (i-1)^(mu+1) - (i-1-mu) i^mu`. Both carry the common factor
/// `h^mu / Gamma(mu+2)`, which is left to the caller.
pub struct TrapezoidWeights {
    pub interior: Vec<f64>,
    pub first: Vec<f64>,
}

pub fn trapezoid_weights(mu: f64, n: usize) -> TrapezoidWeights {
    let nu = mu + 1.0;
    let binom = binomials(nu, 2 * SERIES_TERMS + 2);
    let mut interior = vec![0.0; n];
    let mut first = vec![0.0; n];
    if n == 0 {
        return TrapezoidWeights { interior, first };
    }
    interior[0] = 1.0;
    for (m, w) in interior.iter_mut().enumerate().skip(1) {
        let mf = m as f64;
        *w = if m < SERIES_FROM {
            (mf + 1.0).powf(nu) - 2.0 * mf.powf(nu) + (mf - 1.0).powf(nu)
        } else {
            // 2 m^nu * sum_{k>=1} C(nu, 2k) m^(-2k)
            let s2 = 1.0 / (mf * mf);
            let mut acc = 0.0;
            let mut pw = s2;
            for k in 1..=SERIES_TERMS {
                acc += binom[2 * k] * pw;
                pw *= s2;
            }
            2.0 * mf.powf(nu) * acc
        };
    }
    for (i, w) in first.iter_mut().enumerate().skip(1) {
        let f = i as f64;
        *w = if i < SERIES_FROM {
            (f - 1.0).powf(nu) - (f - 1.0 - mu) * f.powf(mu)
        } else {
            // i^nu * sum_{k>=2} C(nu, k) (-1/i)^k
            let s = -1.0 / f;
            let mut acc = 0.0;
            let mut pw = s * s;
            for c in binom.iter().take(2 * SERIES_TERMS + 2).skip(2) {
                acc += c * pw;
                pw *= s;
            }
            f.powf(nu) * acc
        };
    }
    TrapezoidWeights { interior, first }
}

/// L1 weights `b_k = (k+1)^(1-beta) - k^(1-beta)`.
pub fn l1_weights(beta: f64, n: usize) -> Vec<f64> {
    let e = 1.0 - beta;
    (0..n)
        .map(|k| {
            if k == 0 {
                1.0
            } else {
                let kf = k as f64;
                kf.powf(e) * (e * (1.0 / kf).ln_1p()).exp_m1()
            }
        })
        .collect()
}

/// Unit-cell integrals of the log kernel, `W_k = int_k^{k+1} ln(s) ds`.
pub fn log_weights(n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| {
            if k == 0 {
                -1.0
            } else {
                let kf = k as f64;
                // (k+1) ln(k+1) - k ln k - 1, rearranged to avoid cancellation
                kf * (1.0 / kf).ln_1p() + (kf + 1.0).ln() - 1.0
            }
        })
        .collect()
}
