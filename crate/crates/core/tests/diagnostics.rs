use std::f64::consts::PI;
use std::sync::Arc;

use fracburgers::diagnostics::{
    asymptotic_profile_fit, conservation_report, decay_conditions_hold, dissipation_rate, energy, from_normalized,
    mass_invariant, normalize, reynolds_number, to_normalized, RawCoefficients,
};
use fracburgers::error::Error;
use fracburgers::fbenn::{integrate_with, Boundary, IntegrateOptions, TravellingWave};
use fracburgers::grid::max_abs_diff;
use fracburgers::hopfcole::transform_log;
use fracburgers::{Field, Grid, ModelParams, Terminal, Trajectory};

fn erfc(x: f64) -> f64 {
    statrs::function::erf::erfc(x)
}

/// Transform of `log(1 + (e - 1)/2 erfc(x / sqrt(4 alpha (t + 1))))`: a kink
/// whose fractional gradient decays at both ends.
fn kink(g: Grid, params: &ModelParams, t: f64) -> fracburgers::Result<Field> {
    let a = std::f64::consts::E - 1.0;
    let s = (4.0 * params.alpha * (t + 1.0)).sqrt();
    let l = Field::from_fn(g, t, |x| (1.0 + 0.5 * a * erfc(x / s)).ln())?;
    transform_log(&l, params)
}

fn kink_run(p: f64, n: usize, save_every: usize) -> (Trajectory, ModelParams) {
    let g = Grid::spanning(-20.0, 30.0, n).unwrap();
    let params = ModelParams::new(1.0, p).unwrap();
    let trace = move |t: f64| {
        let f = kink(g, &params, t)?;
        let v = f.values();
        Ok((v[0], v[v.len() - 1]))
    };
    let opts = IntegrateOptions {
        boundary: Boundary::Trace(Arc::new(trace)),
        save_every,
        ..IntegrateOptions::default()
    };
    let phi0 = kink(g, &params, 0.0).unwrap();
    let dt = 0.25 * g.dx() * g.dx();
    (integrate_with(&phi0, &params, 0.5, dt, &opts).unwrap(), params)
}

#[test]
fn mass_of_simple_fields() {
    let g = Grid::spanning(-3.0, 5.0, 200).unwrap();
    let zero = Field::constant(g, 0.0, 0.0).unwrap();
    for &p in &[0.0, 0.5, 1.0] {
        let params = ModelParams::new(1.0, p).unwrap();
        assert_eq!(mass_invariant(&zero, &params, p).unwrap(), 0.0);
    }
    let phi = Field::from_fn(g, 0.0, |x| x.tanh() + 0.1 * x).unwrap();
    let params = ModelParams::new(1.0, 0.0).unwrap();
    let want = phi.values()[g.n() - 1] - phi.values()[0];
    assert!((mass_invariant(&phi, &params, 0.0).unwrap() - want).abs() < 1e-8);
}

#[test]
fn energy_of_simple_fields() {
    let g = Grid::spanning(-8.0, 8.0, 1024).unwrap();
    let c = Field::constant(g, 0.0, 3.0).unwrap();
    for &p in &[0.0, 0.5] {
        let params = ModelParams::new(1.0, p).unwrap();
        assert!(energy(&c, &params).unwrap().abs() < 1e-20);
    }
    let gauss = Field::from_fn(g, 0.0, |x| (-x * x).exp()).unwrap();
    let k = energy(&gauss, &ModelParams::new(1.0, 1.0).unwrap()).unwrap();
    // (1/2) int e^(-2 x^2) dx
    let want = 0.5 * (PI / 2.0).sqrt();
    assert!((k - want).abs() < 1e-6 * want, "{k} vs {want}");
}

#[test]
fn kink_keeps_its_mass_and_loses_energy() {
    for &p in &[0.0, 0.5, 1.0] {
        let (tr, params) = kink_run(p, 1024, 1);
        assert!(decay_conditions_hold(tr.first().unwrap(), &params).unwrap(), "p = {p}");
        let rep = conservation_report(&tr, &params).unwrap();
        assert!(rep.decay_ok, "p = {p}");
        assert!(rep.mass_drift <= 1e-3, "p = {p}: drift {:e}", rep.mass_drift);
        assert!(rep.energy_monotone, "p = {p}");
        assert_eq!(rep.times.len(), rep.mass.len());
        assert_eq!(rep.times.len(), rep.energy.len());
    }
}

#[test]
fn energy_decays_at_the_dissipation_rate() {
    for &p in &[0.0, 0.5, 1.0] {
        let (tr, params) = kink_run(p, 1024, 1);
        let s = tr.slices();
        let mut worst = 0.0f64;
        for k in (1..s.len() - 1).step_by(97) {
            let dk = energy(&s[k + 1], &params).unwrap() - energy(&s[k - 1], &params).unwrap();
            let rate = -dk / (s[k + 1].t() - s[k - 1].t());
            let d = dissipation_rate(&s[k], &params).unwrap();
            worst = worst.max((rate - d).abs() / d);
        }
        assert!(worst <= 0.05, "p = {p}: relative mismatch {worst:e}");
    }
}

#[test]
fn reynolds_numbers() {
    let unit = ModelParams::new(1.0, 1.0).unwrap();
    assert_eq!(reynolds_number(1.0, 1.0, &unit).unwrap(), 1.0);
    let burgers = ModelParams::new(0.25, 1.0).unwrap();
    assert!((reynolds_number(3.0, 2.0, &burgers).unwrap() - 3.0 * 2.0 / 0.25).abs() < 1e-12);
    let half = ModelParams::new(1.0, 0.5).unwrap();
    assert!((reynolds_number(2.0, 4.0, &half).unwrap() - 4.0).abs() < 1e-12);
    assert!(matches!(
        reynolds_number(0.0, 1.0, &half),
        Err(Error::InvalidInput(_))
    ));
}

#[test]
fn small_reynolds_number_is_pure_diffusion() {
    let g = Grid::spanning(-5.0, 5.0, 512).unwrap();
    for &p in &[0.0, 0.5, 1.0] {
        let params = ModelParams::new(1.0, p).unwrap();
        let amp = 0.01;
        assert!(reynolds_number(amp, 1.0, &params).unwrap() <= 0.01);
        let phi0 = Field::from_fn(g, 0.0, |x| amp * (-x * x).exp()).unwrap();
        let dt = 0.25 * g.dx() * g.dx();
        let full = integrate_with(&phi0, &params, 0.1, dt, &IntegrateOptions::default()).unwrap();
        let lin = IntegrateOptions {
            diffusion_only: true,
            ..IntegrateOptions::default()
        };
        let heat = integrate_with(&phi0, &params, 0.1, dt, &lin).unwrap();
        for (a, b) in full.slices().iter().zip(heat.slices()) {
            let gap = max_abs_diff(a.values(), b.values(), 0..g.n());
            assert!(gap <= 0.01 * b.sup_norm(), "p = {p}: gap {gap:e}");
        }
    }
}

#[test]
fn fit_of_an_exact_power_law() {
    let g = Grid::spanning(0.0, 4.0, 401).unwrap();
    let params = ModelParams::new(1.0, 0.0)
        .unwrap()
        .with_terminal(Terminal::At(0.0));
    let slices = (1..=10)
        .map(|k| {
            let t = 0.1 * k as f64;
            Field::from_fn(g, t, |x| x * x / (2.0 * t)).unwrap()
        })
        .collect();
    let fit = asymptotic_profile_fit(&Trajectory::new(slices).unwrap(), &params).unwrap();
    assert!((fit.exponent_x - 2.0).abs() <= 0.01, "{fit:?}");
    assert!((fit.exponent_t + 1.0).abs() < 1e-9, "{fit:?}");
}

#[test]
fn fit_needs_a_decade_of_time() {
    let g = Grid::spanning(0.0, 4.0, 101).unwrap();
    let params = ModelParams::new(1.0, 0.0).unwrap();
    let slices = (5..=10)
        .map(|k| Field::constant(g, 0.1 * k as f64, 1.0).unwrap())
        .collect();
    assert!(matches!(
        asymptotic_profile_fit(&Trajectory::new(slices).unwrap(), &params),
        Err(Error::FitUnreliable(_))
    ));
}

#[test]
fn normalization_scales() {
    let unit = RawCoefficients { alpha_nl: 1.0, beta: 1.0 };
    assert_eq!(normalize(&unit).unwrap(), (1.0, 1.0));
    let raw = RawCoefficients { alpha_nl: 2.0, beta: 4.0 };
    assert_eq!(normalize(&raw).unwrap(), (2.0, 0.25));
    assert!(matches!(
        normalize(&RawCoefficients { alpha_nl: 0.0, beta: 1.0 }),
        Err(Error::Degenerate(_))
    ));
    assert!(normalize(&RawCoefficients { alpha_nl: 1.0, beta: -1.0 }).is_err());
}

#[test]
fn normalization_round_trip_and_scale_invariance() {
    let raw = RawCoefficients { alpha_nl: 2.0, beta: 0.5 };
    let (sp, st) = normalize(&raw).unwrap();
    let g = Grid::spanning(-10.0, 10.0, 512).unwrap();

    // A front of phi_t + (a/2)(phi^2)_x - beta phi_xx = 0 is sp times the
    // unit-coefficient front, with time scaled by st.
    let unit_front = TravellingWave::burgers_front(0.0, 1.0, 1.0);
    let t_raw = 0.8;
    let raw_front = Field::from_fn(g, t_raw, |x| {
        sp * unit_front.eval(x - unit_front.u * t_raw / st).unwrap()
    })
    .unwrap();
    let normal = to_normalized(&raw_front, &raw).unwrap();
    assert!((normal.t() - t_raw / st).abs() < 1e-12);
    for (&x, v) in g.xs().iter().zip(normal.values()) {
        let want = unit_front.eval(x - unit_front.u * normal.t()).unwrap();
        assert!((v - want).abs() < 1e-12);
    }
    let back = from_normalized(&normal, &raw).unwrap();
    assert!((back.t() - t_raw).abs() < 1e-12);
    for (a, b) in back.values().iter().zip(raw_front.values()) {
        assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
    }
}
