#![allow(dead_code)]

use statrs::function::gamma::gamma;

/// `I^alpha f(x)` from terminal `a` by the substitution `u = (x - xi)^alpha`,
/// which removes the kernel singularity; composite Simpson on `u`.
pub fn rl_integral_quad(f: impl Fn(f64) -> f64, a: f64, x: f64, alpha: f64) -> f64 {
    if x <= a {
        return 0.0;
    }
    let m = 4000;
    let umax = (x - a).powf(alpha);
    let hu = umax / m as f64;
    let g = |u: f64| f(x - u.powf(1.0 / alpha));
    let mut s = g(0.0) + g(umax);
    for k in 1..m {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        s += w * g(k as f64 * hu);
    }
    s * hu / 3.0 / (alpha * gamma(alpha))
}

/// Norm-relative error over an index range.
pub fn rel_err(got: &[f64], want: &[f64], range: std::ops::Range<usize>) -> f64 {
    let mut num = 0.0f64;
    let mut den = 0.0f64;
    for i in range {
        num = num.max((got[i] - want[i]).abs());
        den = den.max(want[i].abs());
    }
    num / den
}
