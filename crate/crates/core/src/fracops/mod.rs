//! Fractional integrals and derivatives on uniform grids.
//!
//! Left-sided operators integrate from the terminal `a` up to `x`; right-sided
//! ones are obtained by reflecting the samples, applying the left operator and
//! reflecting back, so the right derivative of order 1 is `-d/dx`.
//!
//! A terminal strictly outside the grid is handled by extending the samples
//! with their value at the nearest grid end. [`Terminal::Unbounded`] is the
//! Weyl sense for fields that are flat at that end: the grid end acts as the
//! truncation point. [`Terminal::Periodic`] is the Weyl sense for periodic
//! samples and is evaluated spectrally.

mod analytic;
mod conv;
mod nonlocal;
mod special;
pub(crate) mod weights;

pub use analytic::{analytic_frac_derivative, AnalyticKind, AnalyticResult};
pub use conv::{CausalKernel, ConvMethod, FFT_THRESHOLD};
pub use nonlocal::{nonlocal_log_operator, EULER_GAMMA};
pub use special::{generalized_exp, mittag_leffler, ML_MAX_ABS_Z};

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::grid::{centered_derivative, sup_norm, Field, Grid};

/// Relative tail size tolerated when a Weyl integral truncates at the grid end.
pub const WEYL_TAIL_TOLERANCE: f64 = 1e-8;
/// Relative deviation from a common end constant tolerated by the Riesz operator.
pub const RIESZ_TAIL_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Kind {
    Caputo,
    RiemannLiouville,
    Riesz,
    Integral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Side {
    #[default]
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub enum Terminal {
    /// Finite lower terminal (upper terminal for right-sided operators).
    At(f64),
    /// Weyl sense, truncated at the grid end.
    #[default]
    Unbounded,
    /// Weyl sense for periodic samples (period `n * dx`).
    Periodic,
}

/// Discretization of Caputo derivatives of order in (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Scheme {
    /// Centered derivative of the product-trapezoid integral of `f - f(a)`,
    /// O(dx^2).
    #[default]
    ProductTrapezoid,
    /// Classical L1 scheme, O(dx^(2-order)).
    L1,
}

/// Descriptor of a fractional operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FracSpec {
    pub order: f64,
    pub kind: Kind,
    pub side: Side,
    pub terminal: Terminal,
    /// Length scale `lambda`; derivatives are multiplied by `lambda^(order-1)`.
    pub length_scale: f64,
    pub scheme: Scheme,
}

impl FracSpec {
    pub fn new(kind: Kind, order: f64) -> Self {
        Self {
            order,
            kind,
            side: Side::Left,
            terminal: Terminal::Unbounded,
            length_scale: 1.0,
            scheme: Scheme::ProductTrapezoid,
        }
    }

    pub fn caputo(order: f64) -> Self {
        Self::new(Kind::Caputo, order)
    }

    pub fn riemann_liouville(order: f64) -> Self {
        Self::new(Kind::RiemannLiouville, order)
    }

    pub fn integral(order: f64) -> Self {
        Self::new(Kind::Integral, order)
    }

    pub fn riesz(order: f64) -> Self {
        Self::new(Kind::Riesz, order)
    }

    pub fn side(mut self, side: Side) -> Self {
        self.side = side;
        self
    }

    pub fn terminal(mut self, terminal: Terminal) -> Self {
        self.terminal = terminal;
        self
    }

    pub fn length_scale(mut self, lambda: f64) -> Self {
        self.length_scale = lambda;
        self
    }

    pub fn scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    fn validate(&self) -> Result<()> {
        let o = self.order;
        let bad = |reason: &str| {
            Err(Error::InvalidOrder {
                order: o,
                reason: reason.to_string(),
            })
        };
        if !o.is_finite() {
            return bad("order must be finite");
        }
        match self.kind {
            Kind::Integral if o <= 0.0 => return bad("integral order must be positive"),
            Kind::Caputo | Kind::RiemannLiouville if !(0.0..2.0).contains(&o) => {
                return bad("derivative order must lie in [0, 2)")
            }
            Kind::Riesz if !(0.0..=2.0).contains(&o) => {
                return bad("Riesz order must lie in [0, 2]")
            }
            _ => {}
        }
        if !(self.length_scale > 0.0 && self.length_scale.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "length scale {} must be positive",
                self.length_scale
            )));
        }
        Ok(())
    }
}

/// Power-law integral on oriented samples (terminal side first).
#[derive(Debug, Clone)]
struct TrapezoidIntegral {
    kernel: CausalKernel,
    first_correction: Vec<f64>,
    scale: f64,
    /// Contribution of the constant extension between terminal and grid, per unit f(x0).
    extension: Option<Vec<f64>>,
}

impl TrapezoidIntegral {
    fn new(mu: f64, n: usize, h: f64, offset: f64) -> Self {
        let w = weights::trapezoid_weights(mu, n);
        let first_correction: Vec<f64> = (0..n)
            .map(|i| if i == 0 { 0.0 } else { w.first[i] - w.interior[i] })
            .collect();
        let extension = (offset > 0.0).then(|| {
            let g = gamma(mu + 1.0);
            (0..n)
                .map(|i| {
                    let s = i as f64 * h;
                    ((offset + s).powf(mu) - s.powf(mu)) / g
                })
                .collect()
        });
        Self {
            kernel: CausalKernel::new(w.interior),
            first_correction,
            scale: h.powf(mu) / gamma(mu + 2.0),
            extension,
        }
    }

    fn apply(&self, v: &[f64], method: ConvMethod) -> Vec<f64> {
        let mut y = self.kernel.apply_with(v, method);
        y[0] = 0.0;
        for (yi, c) in y.iter_mut().zip(&self.first_correction).skip(1) {
            *yi = self.scale * (*yi + c * v[0]);
        }
        if let Some(ext) = &self.extension {
            for (yi, e) in y.iter_mut().zip(ext) {
                *yi += e * v[0];
            }
        }
        y
    }

    fn apply_at(&self, v: &[f64], i: usize) -> f64 {
        let mut y = if i == 0 {
            0.0
        } else {
            self.scale * (self.kernel.apply_at(v, i) + self.first_correction[i] * v[0])
        };
        if let Some(ext) = &self.extension {
            y += ext[i] * v[0];
        }
        y
    }
}

#[derive(Debug, Clone)]
struct L1Derivative {
    kernel: CausalKernel,
    scale: f64,
}

impl L1Derivative {
    fn new(beta: f64, n: usize, h: f64) -> Self {
        Self {
            kernel: CausalKernel::new(weights::l1_weights(beta, n)),
            scale: h.powf(-beta) / gamma(2.0 - beta),
        }
    }

    /// Shifted differences `e_0 = 0`, `e_m = f_m - f_{m-1}`.
    fn differences(f: &[f64]) -> Vec<f64> {
        let mut e = vec![0.0; f.len()];
        for m in 1..f.len() {
            e[m] = f[m] - f[m - 1];
        }
        e
    }

    fn apply(&self, f: &[f64], method: ConvMethod) -> Vec<f64> {
        let e = Self::differences(f);
        let mut y = self.kernel.apply_with(&e, method);
        for v in &mut y {
            *v *= self.scale;
        }
        y
    }
}

#[derive(Debug, Clone)]
enum Inner {
    PtIntegral(TrapezoidIntegral),
    L1(L1Derivative),
}

/// Riemann-Liouville boundary terms on oriented samples.
#[derive(Debug, Clone)]
struct RlTerms {
    /// Multiplies f(a).
    value: Vec<f64>,
    /// Multiplies f'(a); present for orders in (1, 2).
    slope: Option<Vec<f64>>,
}

#[derive(Debug, Clone)]
enum Plan {
    Identity,
    Derivative {
        /// Number of centered derivatives applied before `inner`.
        pre: usize,
        inner: Option<Inner>,
        rl: Option<RlTerms>,
        scale: f64,
    },
    Integral(TrapezoidIntegral),
    Spectral(Vec<Complex<f64>>),
}

/// A fractional operator prepared for one grid.
///
/// Construction computes weights and kernel spectra once; [`apply`](Self::apply)
/// can then be called repeatedly, which is what the time stepper does.
#[derive(Debug, Clone)]
pub struct FracOperator {
    spec: FracSpec,
    grid: Grid,
    plan: Plan,
    method: ConvMethod,
    riesz_tail_check: bool,
    weyl_integral: bool,
}

impl FracOperator {
    pub fn new(spec: FracSpec, grid: Grid) -> Result<Self> {
        spec.validate()?;
        let n = grid.n();
        let h = grid.dx();
        let offset = terminal_offset(&spec, &grid)?;
        let weyl_integral = spec.kind == Kind::Integral && spec.terminal == Terminal::Unbounded;
        let mut riesz_tail_check = false;
        let o = spec.order;

        let plan = match (spec.kind, spec.terminal) {
            (Kind::Integral, Terminal::Periodic) => {
                Plan::Spectral(periodic_symbol(n, h, -o, spec.side))
            }
            (Kind::Integral, _) => Plan::Integral(TrapezoidIntegral::new(o, n, h, offset)),
            (_, _) if o == 0.0 => Plan::Identity,
            (Kind::Riesz, terminal) => {
                riesz_tail_check = terminal != Terminal::Periodic;
                Plan::Spectral(riesz_symbol(n, h, o))
            }
            (_, Terminal::Periodic) => {
                let mut sym = periodic_symbol(n, h, o, spec.side);
                let s = spec.length_scale.powf(o - 1.0);
                for c in &mut sym {
                    *c *= s;
                }
                Plan::Spectral(sym)
            }
            (kind, _) => {
                let (pre, inner_order) = if o < 1.0 { (0, o) } else { (1, o - 1.0) };
                let inner = if inner_order == 0.0 {
                    None
                } else {
                    match spec.scheme {
                        Scheme::ProductTrapezoid => Some(Inner::PtIntegral(TrapezoidIntegral::new(
                            1.0 - inner_order,
                            n,
                            h,
                            0.0,
                        ))),
                        Scheme::L1 => Some(Inner::L1(L1Derivative::new(inner_order, n, h))),
                    }
                };
                let rl = (kind == Kind::RiemannLiouville && spec.terminal != Terminal::Unbounded)
                    .then(|| rl_terms(o, n, h, offset));
                Plan::Derivative {
                    pre,
                    inner,
                    rl,
                    scale: spec.length_scale.powf(o - 1.0),
                }
            }
        };
        Ok(Self {
            spec,
            grid,
            plan,
            method: ConvMethod::Auto,
            riesz_tail_check,
            weyl_integral,
        })
    }

    /// Forces direct or FFT convolution (for benchmarks and cross-checks).
    pub fn with_method(mut self, method: ConvMethod) -> Self {
        self.method = method;
        self
    }

    pub fn spec(&self) -> &FracSpec {
        &self.spec
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn apply_field(&self, f: &Field) -> Result<Field> {
        if !self.grid.matches(f.grid()) {
            return Err(Error::InvalidInput(
                "field grid differs from the operator grid".into(),
            ));
        }
        f.with_values(self.apply(f.values())?)
    }

    pub fn apply(&self, f: &[f64]) -> Result<Vec<f64>> {
        self.check_input(f)?;
        Ok(match &self.plan {
            Plan::Identity => f.to_vec(),
            Plan::Spectral(sym) => spectral_apply(f, sym),
            _ => {
                let oriented = self.orient(f);
                let y = self.apply_oriented(&oriented);
                self.orient(&y)
            }
        })
    }

    /// Value at sample `i` only; O(n) for real-space plans.
    pub fn apply_at(&self, f: &[f64], i: usize) -> Result<f64> {
        self.check_input(f)?;
        let n = f.len();
        Ok(match &self.plan {
            Plan::Identity => f[i],
            Plan::Spectral(sym) => spectral_apply(f, sym)[i],
            Plan::Integral(pt) => {
                let o = self.orient(f);
                pt.apply_at(&o, self.oriented_index(i, n))
            }
            Plan::Derivative {
                pre,
                inner,
                rl,
                scale,
            } => {
                let o = self.orient(f);
                let j = self.oriented_index(i, n);
                let mut v = o.clone();
                let h = self.grid.dx();
                for _ in 0..*pre {
                    v = centered_derivative(&v, h);
                }
                let mut y = match inner {
                    None => v[j],
                    Some(Inner::PtIntegral(pt)) => {
                        let w = anchored(&v);
                        let at = |k: usize| pt.apply_at(&w, k);
                        if j == 0 || j == n - 1 {
                            let m = n.min(5);
                            let idx: Vec<usize> = if j == 0 {
                                (0..m).collect()
                            } else {
                                (n - m..n).collect()
                            };
                            let local: Vec<f64> = idx.iter().map(|&k| at(k)).collect();
                            let d = outer_derivative(&local, h);
                            if j == 0 { d[0] } else { d[m - 1] }
                        } else {
                            (at(j + 1) - at(j - 1)) * 0.5 / h
                        }
                    }
                    Some(Inner::L1(l1)) => {
                        l1.scale * l1.kernel.apply_at(&L1Derivative::differences(&v), j)
                    }
                };
                if let Some(rl) = rl {
                    y += rl_value(rl, &o, h, j);
                }
                y * scale
            }
        })
    }

    fn check_input(&self, f: &[f64]) -> Result<()> {
        if f.len() != self.grid.n() {
            return Err(Error::InvalidField(format!(
                "{} samples for an operator on {} points",
                f.len(),
                self.grid.n()
            )));
        }
        if let Some(i) = f.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidField(format!(
                "non-finite value at x = {}",
                self.grid.x(i)
            )));
        }
        let scale = sup_norm(f);
        if self.riesz_tail_check {
            let n = f.len();
            let c = 0.5 * (f[0] + f[n - 1]);
            let dev = (f[0] - c).abs().max((f[n - 1] - c).abs());
            if dev > RIESZ_TAIL_TOLERANCE * scale.max(f64::MIN_POSITIVE) {
                return Err(Error::TailViolation(format!(
                    "ends differ by {} (scale {scale}); the periodic extension is not admissible",
                    2.0 * dev
                )));
            }
        }
        if self.weyl_integral {
            let tail = match self.spec.side {
                Side::Left => f[0],
                Side::Right => f[f.len() - 1],
            };
            if tail.abs() > WEYL_TAIL_TOLERANCE * scale.max(f64::MIN_POSITIVE) {
                return Err(Error::TailViolation(format!(
                    "Weyl integral needs a vanishing tail, found {tail} at the terminal end"
                )));
            }
        }
        Ok(())
    }

    fn orient(&self, f: &[f64]) -> Vec<f64> {
        match self.spec.side {
            Side::Left => f.to_vec(),
            Side::Right => f.iter().rev().copied().collect(),
        }
    }

    fn oriented_index(&self, i: usize, n: usize) -> usize {
        match self.spec.side {
            Side::Left => i,
            Side::Right => n - 1 - i,
        }
    }

    fn apply_oriented(&self, f: &[f64]) -> Vec<f64> {
        let h = self.grid.dx();
        match &self.plan {
            Plan::Integral(pt) => pt.apply(f, self.method),
            Plan::Derivative {
                pre,
                inner,
                rl,
                scale,
            } => {
                let mut v = f.to_vec();
                for _ in 0..*pre {
                    v = centered_derivative(&v, h);
                }
                let mut y = match inner {
                    None => v,
                    Some(Inner::PtIntegral(pt)) => {
                        outer_derivative(&pt.apply(&anchored(&v), self.method), h)
                    }
                    Some(Inner::L1(l1)) => l1.apply(&v, self.method),
                };
                if let Some(rl) = rl {
                    for (j, yj) in y.iter_mut().enumerate() {
                        *yj += rl_value(rl, f, h, j);
                    }
                }
                if *scale != 1.0 {
                    for yj in &mut y {
                        *yj *= scale;
                    }
                }
                y
            }
            Plan::Identity | Plan::Spectral(_) => unreachable!("handled by apply"),
        }
    }
}

/// Centered first difference with fourth-order one-sided end stencils.
///
/// The integral being differentiated grows away from the terminal, so the
/// second-order end stencil would leave the last sample visibly off.
fn outer_derivative(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    if n < 5 {
        return centered_derivative(f, h);
    }
    let mut g = centered_derivative(f, h);
    let inv = 1.0 / (12.0 * h);
    g[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) * inv;
    g[n - 1] = (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4]
        + 3.0 * f[n - 5])
        * inv;
    g
}

/// Oriented samples minus their terminal value.
fn anchored(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| x - v[0]).collect()
}

/// Distance from the terminal to the nearest grid end, validated.
fn terminal_offset(spec: &FracSpec, grid: &Grid) -> Result<f64> {
    let a = match spec.terminal {
        Terminal::At(a) => a,
        _ => return Ok(0.0),
    };
    if spec.kind == Kind::Riesz {
        return Ok(0.0);
    }
    if !a.is_finite() {
        return Err(Error::InvalidTerminal(format!("terminal {a} is not finite")));
    }
    let tol = 1e-9 * grid.dx();
    let offset = match spec.side {
        Side::Left => grid.x0() - a,
        Side::Right => a - grid.x_max(),
    };
    if offset < -tol {
        return Err(Error::InvalidTerminal(format!(
            "terminal {a} lies inside the grid [{}, {}] for a {:?}-sided operator",
            grid.x0(),
            grid.x_max(),
            spec.side
        )));
    }
    Ok(offset.max(0.0))
}

fn rl_terms(order: f64, n: usize, h: f64, offset: f64) -> RlTerms {
    let dist = |i: usize| offset + i as f64 * h;
    let term = |e: f64| -> Vec<f64> {
        let g = gamma(1.0 - e);
        (0..n)
            .map(|i| {
                let d = dist(i);
                // At the terminal itself the boundary term is singular; it is omitted there.
                if d == 0.0 {
                    0.0
                } else {
                    d.powf(-e) / g
                }
            })
            .collect()
    };
    let value = term(order);
    let slope = (order > 1.0 && offset == 0.0).then(|| term(order - 1.0));
    RlTerms { value, slope }
}

fn rl_value(rl: &RlTerms, f: &[f64], h: f64, j: usize) -> f64 {
    let mut y = rl.value[j] * f[0];
    if let Some(s) = &rl.slope {
        let d0 = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
        y += s[j] * d0;
    }
    y
}

fn wavenumbers(n: usize, h: f64) -> Vec<f64> {
    let l = n as f64 * h;
    (0..n)
        .map(|j| {
            let m = if j <= n / 2 { j as f64 } else { j as f64 - n as f64 };
            2.0 * std::f64::consts::PI * m / l
        })
        .collect()
}

/// Symbol `(i k)^s` (left) or `(-i k)^s` (right); the zero mode maps to 0.
fn periodic_symbol(n: usize, h: f64, s: f64, side: Side) -> Vec<Complex<f64>> {
    let sign = match side {
        Side::Left => 1.0,
        Side::Right => -1.0,
    };
    let ks = wavenumbers(n, h);
    ks.iter()
        .enumerate()
        .map(|(j, &k)| {
            if k == 0.0 {
                Complex::new(0.0, 0.0)
            } else if n % 2 == 0 && j == n / 2 {
                // Nyquist mode has no sign; keep the result real.
                Complex::new(k.abs().powf(s) * (std::f64::consts::FRAC_PI_2 * s).cos(), 0.0)
            } else {
                let phase = std::f64::consts::FRAC_PI_2 * s * (sign * k).signum();
                Complex::from_polar(k.abs().powf(s), phase)
            }
        })
        .collect()
}

fn riesz_symbol(n: usize, h: f64, s: f64) -> Vec<Complex<f64>> {
    wavenumbers(n, h)
        .into_iter()
        .map(|k| Complex::new(if k == 0.0 { 0.0 } else { k.abs().powf(s) }, 0.0))
        .collect()
}

fn spectral_apply(f: &[f64], symbol: &[Complex<f64>]) -> Vec<f64> {
    let n = f.len();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mut buf: Vec<Complex<f64>> = f.iter().map(|&x| Complex::new(x, 0.0)).collect();
    fwd.process(&mut buf);
    for (b, s) in buf.iter_mut().zip(symbol) {
        *b *= s;
    }
    inv.process(&mut buf);
    let scale = 1.0 / n as f64;
    buf.iter().map(|c| c.re * scale).collect()
}

/// Fractional integral `I^order` of `f` (`spec.kind` must be `Integral`).
pub fn frac_integral(f: &Field, spec: FracSpec) -> Result<Field> {
    if spec.kind != Kind::Integral {
        return Err(Error::InvalidInput(format!(
            "frac_integral needs an Integral spec, got {:?}",
            spec.kind
        )));
    }
    FracOperator::new(spec, *f.grid())?.apply_field(f)
}

/// Caputo or Riemann-Liouville derivative of `f`, order in [0, 2).
pub fn frac_derivative(f: &Field, spec: FracSpec) -> Result<Field> {
    if !matches!(spec.kind, Kind::Caputo | Kind::RiemannLiouville) {
        return Err(Error::InvalidInput(format!(
            "frac_derivative needs a Caputo or Riemann-Liouville spec, got {:?}",
            spec.kind
        )));
    }
    FracOperator::new(spec, *f.grid())?.apply_field(f)
}

/// Riesz derivative (symbol `|k|^order`) of a field that settles to one
/// constant at both ends.
pub fn frac_derivative_riesz(f: &Field, order: f64) -> Result<Field> {
    if !(order > 0.0 && order <= 2.0) {
        return Err(Error::InvalidOrder {
            order,
            reason: "Riesz order must lie in (0, 2]".into(),
        });
    }
    FracOperator::new(FracSpec::riesz(order), *f.grid())?.apply_field(f)
}

/// Riesz derivative of samples of a periodic function (period `n * dx`).
pub fn frac_derivative_riesz_periodic(f: &Field, order: f64) -> Result<Field> {
    if !(order > 0.0 && order <= 2.0) {
        return Err(Error::InvalidOrder {
            order,
            reason: "Riesz order must lie in (0, 2]".into(),
        });
    }
    let spec = FracSpec::riesz(order).terminal(Terminal::Periodic);
    FracOperator::new(spec, *f.grid())?.apply_field(f)
}
