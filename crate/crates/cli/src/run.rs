use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use fracburgers::diagnostics::{asymptotic_profile_fit, conservation_report, AsymptoticFit, ConservationReport};
use fracburgers::diffusion::{diffusion_residual, heat_kernel_solve, superpose};
use fracburgers::fbenn::{fbenn_residual, travelling_wave_residual, Boundary, Stepper, TravellingWave};
use fracburgers::grid::{max_abs_diff, max_abs_diff_mod_const, trapezoid};
use fracburgers::hopfcole::{solve_fbenn_via_transform, transform_modes};
use fracburgers::{Field, Grid, ModelParams, Trajectory};

use crate::io::{read_first_slice, write_table};
use crate::scenario::{BoundaryKind, Equation, Initial, Output, Pipeline, Scenario};
use crate::CliError;

/// Largest residuals measured during the run.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Residuals {
    /// `|phi_t - rhs(phi)|` on the direct trajectory, centered in time.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fbenn: Option<f64>,
    /// Residual of the reduced travelling-wave equation on the grid.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub travelling_wave: Option<f64>,
    /// Gap between the integrated field and the translated profile at `t_end`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile_gap: Option<f64>,
    /// Heat-equation residual over the last step.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diffusion: Option<f64>,
}

/// Direct against transform solution, interior L-inf over the snapshots.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub max_linf: f64,
    pub final_linf: f64,
    /// At `p = 0` fields are compared up to an additive constant.
    pub modulo_constant: bool,
}

/// Everything a run produces apart from timing; written as
/// `<name>.summary.json` and identical between repeated runs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub name: String,
    pub equation: Equation,
    pub params: ModelParams,
    pub grid: Grid,
    pub t_end: f64,
    /// Step actually taken, `t_end / steps`.
    pub dt: f64,
    pub steps: usize,
    pub times: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conservation: Option<ConservationReport>,
    /// Integral of the heat solution per snapshot.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub heat_mass: Option<Vec<f64>>,
    pub residuals: Residuals,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comparison: Option<Comparison>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub asymptotic_fit: Option<AsymptoticFit>,
    /// Field tables written, relative to the output directory.
    pub files: Vec<String>,
    /// Diagnostics that could not be computed, with the reason.
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    #[serde(flatten)]
    pub summary: Summary,
    pub wall_clock_ms: u128,
    /// Final snapshot of the primary field; not serialized.
    #[serde(skip)]
    pub field: Field,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Continuity {
    pub from: f64,
    pub to: f64,
    pub linf: f64,
    pub linf_mod_const: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub runs: Vec<RunReport>,
    /// Interior L-inf distance between final fields of consecutive orders.
    pub continuity: Vec<Continuity>,
}

fn mod_const(p: f64) -> bool {
    p == 0.0
}

/// The initial field, on the scenario grid or the grid of the file.
fn initial_field(s: &Scenario) -> Result<Field, CliError> {
    if let Initial::FromFile(path) = &s.initial {
        let f = read_first_slice(path).map_err(|m| CliError::invalid("initial.path", m))?;
        if let Some(g) = s.grid {
            if !g.matches(f.grid()) {
                return Err(CliError::invalid(
                    "initial.path",
                    format!("table grid {:?} differs from the scenario grid {:?}", f.grid(), g),
                ));
            }
        }
        return Ok(f.with_time(0.0)?);
    }
    let g = s.grid.expect("only file input leaves the grid open");
    let p = &s.params;
    Ok(match &s.initial {
        Initial::ExpModes(modes) if s.equation == Equation::Diffusion => superpose(modes, &p.diffusion(), &g, 0.0)?,
        Initial::ExpModes(modes) => transform_modes(modes, p, &g, 0.0)?,
        Initial::Gaussian { center, width, amplitude } => {
            Field::from_fn(g, 0.0, |x| amplitude * (-((x - center) / width).powi(2)).exp())?
        }
        Initial::TanhFront { phi1, phi2 } => {
            let tw = TravellingWave::burgers_front(*phi1, *phi2, p.alpha);
            Field::new(g, g.xs().iter().map(|&x| tw.eval(x)).collect::<Result<_, _>>()?, 0.0)?
        }
        Initial::LogProfile { u, c } => {
            let tw = TravellingWave::log_profile(*u, *c, p.alpha);
            Field::new(g, g.xs().iter().map(|&x| tw.eval(x)).collect::<Result<_, _>>()?, 0.0)?
        }
        Initial::FromFile(_) => unreachable!(),
    })
}

/// Step counts at which snapshots are kept, ending at `steps`.
fn snapshot_steps(steps: usize, snapshots: usize) -> Vec<usize> {
    let m = snapshots.min(steps);
    let mut ks: Vec<usize> = (1..=m).map(|j| (j * steps + m / 2) / m).collect();
    ks.dedup();
    ks
}

fn snapshot_time(k: usize, steps: usize, t_end: f64) -> f64 {
    if k == steps {
        t_end
    } else {
        t_end * k as f64 / steps as f64
    }
}

/// Exact solution of the scenario at time `t`, when the scenario has one.
type Exact = Arc<dyn Fn(f64) -> fracburgers::Result<Field> + Send + Sync>;

fn transform_solution(s: &Scenario, phi0: &Field) -> Exact {
    let params = s.params;
    match &s.initial {
        Initial::ExpModes(modes) => {
            let (modes, g) = (modes.clone(), *phi0.grid());
            Arc::new(move |t| transform_modes(&modes, &params, &g, t))
        }
        _ => {
            let src = phi0.clone();
            Arc::new(move |t| solve_fbenn_via_transform(&src, &params, t))
        }
    }
}

fn profile_solution(tw: TravellingWave, g: Grid) -> Exact {
    Arc::new(move |t| {
        let v = g.xs().iter().map(|&x| tw.eval(x - tw.u * t)).collect::<Result<_, _>>()?;
        Field::new(g, v, t)
    })
}

fn trace_of(exact: &Exact) -> Boundary {
    let exact = exact.clone();
    Boundary::Trace(Arc::new(move |t| {
        let f = exact(t)?;
        let v = f.values();
        Ok((v[0], v[v.len() - 1]))
    }))
}

struct Direct {
    slices: Vec<Field>,
    residual: Option<f64>,
}

/// Steps the equation, keeping the snapshots; with `residual` the equation
/// residual is measured on every consecutive triple of steps.
fn integrate_direct(
    phi0: &Field,
    params: &ModelParams,
    t_end: f64,
    steps: usize,
    keep: &[usize],
    boundary: Boundary,
    residual: bool,
) -> Result<Direct, CliError> {
    let mut stepper = Stepper::new(phi0, params, t_end / steps as f64, boundary)?;
    let mut slices = vec![phi0.clone()];
    let mut window: Vec<Field> = vec![phi0.clone()];
    let mut worst: Option<f64> = None;
    let mut next = keep.iter().peekable();
    for k in 1..=steps {
        stepper.step()?;
        let t = snapshot_time(k, steps, t_end);
        if next.peek() == Some(&&k) {
            next.next();
            slices.push(Field::new(*phi0.grid(), stepper.values().to_vec(), t)?);
        }
        if residual {
            window.push(Field::new(*phi0.grid(), stepper.values().to_vec(), t)?);
            if window.len() == 3 {
                let tr = Trajectory::new(std::mem::take(&mut window))?;
                let r = fbenn_residual(&tr, params)?;
                worst = Some(worst.map_or(r, |w| w.max(r)));
                window = tr.slices()[1..].to_vec();
            }
        }
    }
    Ok(Direct {
        slices,
        residual: worst,
    })
}

fn compare(direct: &[Field], exact: &[Field], p: f64) -> Comparison {
    let m = mod_const(p);
    let gaps: Vec<f64> = direct
        .iter()
        .zip(exact)
        .map(|(a, b)| {
            let r = a.grid().interior();
            if m {
                max_abs_diff_mod_const(a.values(), b.values(), r)
            } else {
                max_abs_diff(a.values(), b.values(), r)
            }
        })
        .collect();
    Comparison {
        max_linf: gaps.iter().cloned().fold(0.0, f64::max),
        final_linf: *gaps.last().unwrap(),
        modulo_constant: m,
    }
}

fn note<T>(notes: &mut Vec<String>, what: &str, r: fracburgers::Result<T>) -> Option<T> {
    match r {
        Ok(v) => Some(v),
        Err(e) => {
            notes.push(format!("{what}: {e}"));
            None
        }
    }
}

/// Runs a scenario and writes its tables and summary into `out_dir`.
pub fn run(s: &Scenario, out_dir: &Path) -> Result<RunReport, CliError> {
    let start = Instant::now();
    let phi_file = initial_field(s)?;
    let grid = *phi_file.grid();
    let params = s.params;
    if s.equation != Equation::Diffusion {
        let bound = fracburgers::fbenn::stability_bound(grid.dx(), params.alpha);
        if s.dt > bound {
            return Err(CliError::invalid(
                "dt",
                format!("{} exceeds the stability bound dx^2/(4 alpha) = {bound}", s.dt),
            ));
        }
    }
    let steps = ((s.t_end / s.dt - 1e-9).ceil() as usize).max(1);
    let keep = snapshot_steps(steps, s.snapshots);
    let times: Vec<f64> = std::iter::once(0.0)
        .chain(keep.iter().map(|&k| snapshot_time(k, steps, s.t_end)))
        .collect();

    let mut residuals = Residuals::default();
    let mut notes = Vec::new();
    let mut files = Vec::new();
    let mut comparison = None;
    let mut tables: Vec<(String, Vec<Field>)> = Vec::new();

    let primary: Vec<Field> = match s.equation {
        Equation::Diffusion => {
            let dp = params.diffusion();
            let at = |t: f64| -> fracburgers::Result<Field> {
                match &s.initial {
                    Initial::ExpModes(modes) => superpose(modes, &dp, &grid, t),
                    _ if t == 0.0 => Ok(phi_file.clone()),
                    _ => heat_kernel_solve(&phi_file, &dp, t),
                }
            };
            let slices = times.iter().map(|&t| at(t)).collect::<Result<Vec<_>, _>>()?;
            if s.wants(Output::Residuals) {
                let h = s.t_end / steps as f64;
                let before = at(s.t_end - h)?;
                residuals.diffusion = Some(diffusion_residual(&before, slices.last().unwrap(), &dp)?);
            }
            slices
        }
        Equation::TravellingWave => {
            let tw = match s.initial {
                Initial::TanhFront { phi1, phi2 } => TravellingWave::burgers_front(phi1, phi2, params.alpha),
                Initial::LogProfile { u, c } => TravellingWave::log_profile(u, c, params.alpha),
                _ => unreachable!("validated by the parser"),
            };
            let exact = profile_solution(tw, grid);
            let want_res = s.wants(Output::Residuals);
            let d = integrate_direct(&phi_file, &params, s.t_end, steps, &keep, trace_of(&exact), want_res)?;
            residuals.fbenn = d.residual;
            residuals.travelling_wave = Some(travelling_wave_residual(&tw, &grid)?);
            let last = d.slices.last().unwrap();
            let gap = max_abs_diff(last.values(), exact(s.t_end)?.values(), grid.interior());
            residuals.profile_gap = Some(gap);
            d.slices
        }
        _ => {
            let exact = transform_solution(s, &phi_file);
            let want_res = s.wants(Output::Residuals);
            let transformed = || times.iter().map(|&t| exact(t)).collect::<Result<Vec<_>, _>>();
            match s.pipeline {
                Pipeline::ViaTransform => transformed()?,
                Pipeline::Direct | Pipeline::Both => {
                    let use_trace = s.pipeline == Pipeline::Both || s.boundary == BoundaryKind::Transform;
                    let (phi0, boundary) = if use_trace {
                        (exact(0.0)?, trace_of(&exact))
                    } else {
                        (phi_file.clone(), Boundary::Pinned)
                    };
                    let d = integrate_direct(&phi0, &params, s.t_end, steps, &keep, boundary, want_res)?;
                    residuals.fbenn = d.residual;
                    if s.pipeline == Pipeline::Both {
                        let t = transformed()?;
                        comparison = Some(compare(&d.slices, &t, params.p));
                        tables.push((format!("{}.transform.csv", s.name), t));
                    }
                    d.slices
                }
            }
        }
    };

    let primary_name = if s.pipeline == Pipeline::Both {
        format!("{}.direct.csv", s.name)
    } else {
        format!("{}.csv", s.name)
    };
    tables.insert(0, (primary_name, primary.clone()));

    let traj = Trajectory::new(primary.clone())?;
    let mut conservation = None;
    let mut heat_mass = None;
    if s.wants(Output::Invariants) {
        if s.equation == Equation::Diffusion {
            heat_mass = Some(primary.iter().map(|f| trapezoid(f.values(), grid.dx())).collect());
        } else {
            conservation = note(&mut notes, "invariants", conservation_report(&traj, &params));
        }
    }
    let mut asymptotic_fit = None;
    if s.wants(Output::AsymptoticFit) {
        if s.equation == Equation::Diffusion {
            notes.push("asymptotic_fit: not defined for the heat equation".into());
        } else {
            asymptotic_fit = note(&mut notes, "asymptotic_fit", asymptotic_profile_fit(&traj, &params));
        }
    }

    std::fs::create_dir_all(out_dir).map_err(|e| CliError::Io(format!("{}: {e}", out_dir.display())))?;
    if s.wants(Output::Fields) {
        for (name, slices) in &tables {
            write_table(&out_dir.join(name), slices)?;
            files.push(name.clone());
        }
    }

    let summary = Summary {
        name: s.name.clone(),
        equation: s.equation,
        params,
        grid,
        t_end: s.t_end,
        dt: s.t_end / steps as f64,
        steps,
        times,
        conservation,
        heat_mass,
        residuals,
        comparison,
        asymptotic_fit,
        files,
        notes,
    };
    let summary_path: PathBuf = out_dir.join(format!("{}.summary.json", s.name));
    let json = serde_json::to_string_pretty(&summary).map_err(|e| CliError::Io(e.to_string()))?;
    std::fs::write(&summary_path, json + "\n").map_err(|e| CliError::Io(format!("{}: {e}", summary_path.display())))?;

    Ok(RunReport {
        summary,
        wall_clock_ms: start.elapsed().as_millis(),
        field: primary.last().unwrap().clone(),
    })
}

/// Runs an FBENN scenario once per order, in parallel. Outputs are named
/// `<name>.p<order>`.
pub fn sweep(s: &Scenario, p_values: &[f64], out_dir: &Path) -> Result<SweepReport, CliError> {
    if s.equation != Equation::Fbenn {
        return Err(CliError::invalid("equation", "sweep needs equation = fbenn"));
    }
    if p_values.is_empty() {
        return Err(CliError::invalid("p", "no orders given"));
    }
    let scenarios = p_values
        .iter()
        .map(|&p| {
            if !(0.0..=1.0).contains(&p) {
                return Err(CliError::invalid("p", format!("{p} lies outside [0, 1]")));
            }
            let mut one = s.clone();
            one.params = s.params.with_p(p)?;
            one.name = format!("{}.p{p}", s.name);
            Ok(one)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let runs = scenarios
        .par_iter()
        .map(|one| run(one, out_dir))
        .collect::<Result<Vec<_>, _>>()?;
    let continuity = runs
        .windows(2)
        .map(|w| {
            let (a, b) = (&w[0].field, &w[1].field);
            let r = a.grid().interior();
            Continuity {
                from: w[0].summary.params.p,
                to: w[1].summary.params.p,
                linf: max_abs_diff(a.values(), b.values(), r.clone()),
                linf_mod_const: max_abs_diff_mod_const(a.values(), b.values(), r),
            }
        })
        .collect();
    Ok(SweepReport { runs, continuity })
}
