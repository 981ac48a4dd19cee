//! Scenario files: flat `key = value` lines, `#` starts a comment.
//!
//! ```text
//! name      = front
//! equation  = be            # fbenn | nde | be | diffusion | travelling_wave
//! alpha     = 0.1
//! grid.x0   = -10
//! grid.dx   = 0.02
//! grid.n    = 1001
//! initial   = tanh_front
//! initial.phi1 = 0
//! initial.phi2 = 1
//! t_end     = 1
//! dt        = 0.001
//! ```
//!
//! | key | values | default |
//! |-----|--------|---------|
//! | `name` | file stem for outputs | `scenario` |
//! | `equation` | `fbenn`, `nde` (p = 0), `be` (p = 1), `diffusion`, `travelling_wave` | required |
//! | `p` | order in [0, 1] | required for `fbenn` |
//! | `alpha` | positive | required |
//! | `b`, `lambda` | shift in the logarithm, length scale | `0`, `1` |
//! | `terminal` | `unbounded`, `periodic` or a number | `unbounded` |
//! | `side` | `left`, `right` | `left` |
//! | `grid.x0`, `grid.dx`, `grid.n` | uniform grid | required unless `initial = file` |
//! | `initial` | `exp_modes`, `gaussian`, `tanh_front`, `log_profile`, `file` | required |
//! | `initial.modes` | `a b c` triples separated by `;` | |
//! | `initial.center`, `initial.width`, `initial.amplitude` | Gaussian | center `0` |
//! | `initial.phi1`, `initial.phi2` | right and left far-field values | |
//! | `initial.u`, `initial.c` | speed and offset of the log profile | |
//! | `initial.path` | `x,t,phi` table; the first time present is used | |
//! | `t_end`, `dt` | positive; `dt <= dx^2 / (4 alpha)` | required |
//! | `outputs` | comma list of `fields`, `invariants`, `residuals`, `asymptotic_fit` | `fields, invariants` |
//! | `pipeline` | `direct`, `via_transform`, `both` | `direct` |
//! | `boundary` | `pinned`, `transform` (end values from the transform solution) | `pinned` |
//! | `snapshots` | number of output intervals | `1` |

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::Serialize;

use fracburgers::diffusion::ExpMode;
use fracburgers::fbenn::stability_bound;
use fracburgers::{Grid, ModelParams, Side, Terminal};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Equation {
    Fbenn,
    Nde,
    Be,
    Diffusion,
    TravellingWave,
}

impl Equation {
    /// Equations integrated by the FBENN stepper.
    pub fn is_fbenn_family(self) -> bool {
        matches!(self, Equation::Fbenn | Equation::Nde | Equation::Be)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Initial {
    ExpModes(Vec<ExpMode>),
    Gaussian { center: f64, width: f64, amplitude: f64 },
    TanhFront { phi1: f64, phi2: f64 },
    LogProfile { u: f64, c: f64 },
    FromFile(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Output {
    Fields,
    Invariants,
    Residuals,
    AsymptoticFit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Pipeline {
    Direct,
    ViaTransform,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryKind {
    Pinned,
    Transform,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub name: String,
    pub equation: Equation,
    pub params: ModelParams,
    /// `None` only for `initial = file`, where the file fixes the grid.
    pub grid: Option<Grid>,
    pub initial: Initial,
    pub t_end: f64,
    pub dt: f64,
    pub outputs: Vec<Output>,
    pub pipeline: Pipeline,
    pub boundary: BoundaryKind,
    pub snapshots: usize,
}

impl Scenario {
    pub fn wants(&self, o: Output) -> bool {
        self.outputs.contains(&o)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    UnknownKey,
    DuplicateKey,
    MissingKey,
    Range,
}

/// A rejected scenario; names the key and, when known, the line.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub key: String,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(l) = self.line {
            write!(f, "line {l}: ")?;
        }
        let what = match self.kind {
            ParseErrorKind::Syntax => "syntax error at",
            ParseErrorKind::UnknownKey => "unknown key",
            ParseErrorKind::DuplicateKey => "duplicate key",
            ParseErrorKind::MissingKey => "missing key",
            ParseErrorKind::Range => "invalid value for",
        };
        write!(f, "{what} `{}`", self.key)?;
        if !self.message.is_empty() {
            write!(f, ": {}", self.message)?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

const KEYS: &[&str] = &[
    "name",
    "equation",
    "p",
    "alpha",
    "b",
    "lambda",
    "terminal",
    "side",
    "grid.x0",
    "grid.dx",
    "grid.n",
    "initial",
    "initial.modes",
    "initial.center",
    "initial.width",
    "initial.amplitude",
    "initial.phi1",
    "initial.phi2",
    "initial.u",
    "initial.c",
    "initial.path",
    "t_end",
    "dt",
    "outputs",
    "pipeline",
    "boundary",
    "snapshots",
];

struct Entries {
    map: BTreeMap<String, (String, usize)>,
}

impl Entries {
    fn parse(text: &str) -> Result<Self, ParseError> {
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((k, v)) = content.split_once('=') else {
                return Err(ParseError {
                    kind: ParseErrorKind::Syntax,
                    key: content.to_string(),
                    line: Some(line),
                    message: "expected `key = value`".into(),
                });
            };
            let (k, v) = (k.trim(), v.trim());
            if !KEYS.contains(&k) {
                return Err(ParseError {
                    kind: ParseErrorKind::UnknownKey,
                    key: k.to_string(),
                    line: Some(line),
                    message: String::new(),
                });
            }
            if let Some((_, first)) = map.get(k) {
                return Err(ParseError {
                    kind: ParseErrorKind::DuplicateKey,
                    key: k.to_string(),
                    line: Some(line),
                    message: format!("first set on line {first}"),
                });
            }
            map.insert(k.to_string(), (v.to_string(), line));
        }
        Ok(Self { map })
    }

    fn line(&self, key: &str) -> Option<usize> {
        self.map.get(key).map(|(_, l)| *l)
    }

    fn range(&self, key: &str, message: impl Into<String>) -> ParseError {
        ParseError {
            kind: ParseErrorKind::Range,
            key: key.to_string(),
            line: self.line(key),
            message: message.into(),
        }
    }

    fn missing(key: &str, message: impl Into<String>) -> ParseError {
        ParseError {
            kind: ParseErrorKind::MissingKey,
            key: key.to_string(),
            line: None,
            message: message.into(),
        }
    }

    fn text(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(|(v, _)| v.as_str())
    }

    fn number(&self, key: &str) -> Result<Option<f64>, ParseError> {
        match self.text(key) {
            None => Ok(None),
            Some(v) => match v.parse::<f64>() {
                Ok(x) if x.is_finite() => Ok(Some(x)),
                _ => Err(self.range(key, format!("`{v}` is not a finite number"))),
            },
        }
    }

    fn required(&self, key: &str, context: &str) -> Result<f64, ParseError> {
        self.number(key)?
            .ok_or_else(|| Self::missing(key, context.to_string()))
    }

    fn positive(&self, key: &str, context: &str) -> Result<f64, ParseError> {
        let v = self.required(key, context)?;
        if v > 0.0 {
            Ok(v)
        } else {
            Err(self.range(key, format!("{v} must be positive")))
        }
    }

    fn choice<T: Copy>(&self, key: &str, options: &[(&str, T)]) -> Result<Option<T>, ParseError> {
        let Some(v) = self.text(key) else {
            return Ok(None);
        };
        options
            .iter()
            .find(|(name, _)| *name == v)
            .map(|(_, t)| Some(*t))
            .ok_or_else(|| {
                let names: Vec<&str> = options.iter().map(|(n, _)| *n).collect();
                self.range(key, format!("`{v}` is not one of {}", names.join(", ")))
            })
    }
}

/// Parses and validates a scenario. Relative `initial.path` values are kept
/// as written; see [`parse_scenario_file`] for resolution against a file.
pub fn parse_scenario(text: &str) -> Result<Scenario, ParseError> {
    let e = Entries::parse(text)?;

    let name = e.text("name").unwrap_or("scenario").to_string();
    if name.is_empty() || name.contains(['/', '\\']) {
        return Err(e.range("name", "must be a non-empty file stem"));
    }

    let equation = e
        .choice(
            "equation",
            &[
                ("fbenn", Equation::Fbenn),
                ("nde", Equation::Nde),
                ("be", Equation::Be),
                ("diffusion", Equation::Diffusion),
                ("travelling_wave", Equation::TravellingWave),
            ],
        )?
        .ok_or_else(|| Entries::missing("equation", ""))?;

    let p_given = e.number("p")?;
    if let Some(p) = p_given {
        if !(0.0..=1.0).contains(&p) {
            return Err(e.range("p", format!("{p} lies outside [0, 1]")));
        }
    }
    let alpha = e.positive("alpha", "")?;
    let fixed = |want: f64, eq: &str| match p_given {
        Some(p) if p != want => Err(e.range("p", format!("equation {eq} fixes p = {want}"))),
        _ => Ok(want),
    };
    let initial_kind = e.text("initial");
    let p = match equation {
        Equation::Fbenn => p_given.ok_or_else(|| Entries::missing("p", "required for equation fbenn"))?,
        Equation::Nde => fixed(0.0, "nde")?,
        Equation::Be => fixed(1.0, "be")?,
        Equation::Diffusion => p_given.unwrap_or(1.0),
        Equation::TravellingWave => match initial_kind {
            Some("log_profile") => fixed(0.0, "travelling_wave with a log profile")?,
            _ => fixed(1.0, "travelling_wave with a tanh front")?,
        },
    };

    let mut params = ModelParams::new(alpha, p).map_err(|err| e.range("alpha", err.to_string()))?;
    if let Some(b) = e.number("b")? {
        params = params.with_b(b).map_err(|err| e.range("b", err.to_string()))?;
    }
    if let Some(l) = e.number("lambda")? {
        params = params
            .with_lambda(l)
            .map_err(|err| e.range("lambda", err.to_string()))?;
    }
    if let Some(t) = e.text("terminal") {
        let terminal = match t {
            "unbounded" => Terminal::Unbounded,
            "periodic" => Terminal::Periodic,
            other => match other.parse::<f64>() {
                Ok(a) if a.is_finite() => Terminal::At(a),
                _ => {
                    return Err(e.range(
                        "terminal",
                        format!("`{other}` is not `unbounded`, `periodic` or a number"),
                    ))
                }
            },
        };
        params = params.with_terminal(terminal);
    }
    if let Some(side) = e.choice("side", &[("left", Side::Left), ("right", Side::Right)])? {
        params = params.with_side(side);
    }

    let initial = parse_initial(&e, equation)?;

    let grid_keys = ["grid.x0", "grid.dx", "grid.n"];
    let grid = if matches!(initial, Initial::FromFile(_)) && grid_keys.iter().all(|k| e.text(k).is_none()) {
        None
    } else {
        let x0 = e.required("grid.x0", "")?;
        let dx = e.positive("grid.dx", "")?;
        let n_raw = e.required("grid.n", "")?;
        if n_raw.fract() != 0.0 || !(4.0..=1e8).contains(&n_raw) {
            return Err(e.range("grid.n", format!("{n_raw} is not an integer in [4, 1e8]")));
        }
        Some(Grid::new(x0, dx, n_raw as usize).map_err(|err| e.range("grid.n", err.to_string()))?)
    };

    let t_end = e.positive("t_end", "")?;
    let dt = e.positive("dt", "")?;
    if dt > t_end {
        return Err(e.range("dt", format!("{dt} exceeds t_end = {t_end}")));
    }
    if equation != Equation::Diffusion {
        if let Some(g) = grid {
            let bound = stability_bound(g.dx(), alpha);
            if dt > bound {
                return Err(e.range(
                    "dt",
                    format!("{dt} exceeds the stability bound dx^2/(4 alpha) = {bound}"),
                ));
            }
        }
    }

    let outputs = match e.text("outputs") {
        None => vec![Output::Fields, Output::Invariants],
        Some(list) => {
            let mut out = Vec::new();
            for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let o = match item {
                    "fields" => Output::Fields,
                    "invariants" => Output::Invariants,
                    "residuals" => Output::Residuals,
                    "asymptotic_fit" => Output::AsymptoticFit,
                    other => return Err(e.range("outputs", format!("unknown output `{other}`"))),
                };
                if !out.contains(&o) {
                    out.push(o);
                }
            }
            out.sort();
            out
        }
    };

    let pipeline = e
        .choice(
            "pipeline",
            &[
                ("direct", Pipeline::Direct),
                ("via_transform", Pipeline::ViaTransform),
                ("both", Pipeline::Both),
            ],
        )?
        .unwrap_or(Pipeline::Direct);
    if pipeline != Pipeline::Direct && !equation.is_fbenn_family() {
        return Err(e.range(
            "pipeline",
            "the transform pipelines need equation fbenn, nde or be",
        ));
    }

    let boundary = e
        .choice(
            "boundary",
            &[("pinned", BoundaryKind::Pinned), ("transform", BoundaryKind::Transform)],
        )?
        .unwrap_or(BoundaryKind::Pinned);
    if boundary == BoundaryKind::Transform && !equation.is_fbenn_family() {
        return Err(e.range("boundary", "transform end values need equation fbenn, nde or be"));
    }

    let snapshots = match e.number("snapshots")? {
        None => 1,
        Some(s) if s.fract() == 0.0 && (1.0..=1e6).contains(&s) => s as usize,
        Some(s) => return Err(e.range("snapshots", format!("{s} is not an integer in [1, 1e6]"))),
    };

    Ok(Scenario {
        name,
        equation,
        params,
        grid,
        initial,
        t_end,
        dt,
        outputs,
        pipeline,
        boundary,
        snapshots,
    })
}

fn parse_initial(e: &Entries, equation: Equation) -> Result<Initial, ParseError> {
    let kind = e
        .text("initial")
        .ok_or_else(|| Entries::missing("initial", ""))?;
    let uses: &[&str] = match kind {
        "exp_modes" => &["initial.modes"],
        "gaussian" => &["initial.center", "initial.width", "initial.amplitude"],
        "tanh_front" => &["initial.phi1", "initial.phi2"],
        "log_profile" => &["initial.u", "initial.c"],
        "file" => &["initial.path"],
        other => {
            return Err(e.range(
                "initial",
                format!("`{other}` is not one of exp_modes, gaussian, tanh_front, log_profile, file"),
            ))
        }
    };
    for key in KEYS.iter().filter(|k| k.starts_with("initial.")) {
        if e.text(key).is_some() && !uses.contains(key) {
            return Err(e.range(key, format!("does not apply to initial = {kind}")));
        }
    }
    let initial = match kind {
        "exp_modes" => {
            let text = e
                .text("initial.modes")
                .ok_or_else(|| Entries::missing("initial.modes", "required for exp_modes"))?;
            let mut modes = Vec::new();
            for triple in text.split(';').map(str::trim).filter(|s| !s.is_empty()) {
                let nums: Vec<f64> = triple
                    .split_whitespace()
                    .map(|s| s.parse::<f64>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| e.range("initial.modes", format!("`{triple}` is not three numbers")))?;
                if nums.len() != 3 {
                    return Err(e.range("initial.modes", format!("`{triple}` is not three numbers")));
                }
                modes.push(
                    ExpMode::new(nums[0], nums[1], nums[2])
                        .map_err(|err| e.range("initial.modes", err.to_string()))?,
                );
            }
            if modes.is_empty() {
                return Err(e.range("initial.modes", "no modes given"));
            }
            Initial::ExpModes(modes)
        }
        "gaussian" => Initial::Gaussian {
            center: e.number("initial.center")?.unwrap_or(0.0),
            width: e.positive("initial.width", "required for gaussian")?,
            amplitude: e.required("initial.amplitude", "required for gaussian")?,
        },
        "tanh_front" => Initial::TanhFront {
            phi1: e.required("initial.phi1", "required for tanh_front")?,
            phi2: e.required("initial.phi2", "required for tanh_front")?,
        },
        "log_profile" => Initial::LogProfile {
            u: e.required("initial.u", "required for log_profile")?,
            c: e.required("initial.c", "required for log_profile")?,
        },
        _ => Initial::FromFile(PathBuf::from(
            e.text("initial.path")
                .ok_or_else(|| Entries::missing("initial.path", "required for file"))?,
        )),
    };
    match (equation, &initial) {
        (Equation::TravellingWave, Initial::TanhFront { .. } | Initial::LogProfile { .. }) => {}
        (Equation::TravellingWave, _) => {
            return Err(e.range("initial", "travelling_wave needs tanh_front or log_profile"))
        }
        (Equation::Diffusion, Initial::ExpModes(_) | Initial::Gaussian { .. } | Initial::FromFile(_)) => {}
        (Equation::Diffusion, _) => {
            return Err(e.range("initial", "diffusion needs exp_modes, gaussian or file"))
        }
        (_, Initial::LogProfile { .. }) => {
            return Err(e.range("initial", "log_profile is only used by travelling_wave"))
        }
        _ => {}
    }
    Ok(initial)
}

/// Reads and parses a scenario file; a relative `initial.path` is resolved
/// against the file's directory.
pub fn parse_scenario_file(path: &Path) -> Result<Scenario, crate::CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|err| crate::CliError::Io(format!("{}: {err}", path.display())))?;
    let mut s = parse_scenario(&text)?;
    if let Initial::FromFile(p) = &mut s.initial {
        if p.is_relative() {
            if let Some(dir) = path.parent() {
                *p = dir.join(&*p);
            }
        }
    }
    Ok(s)
}
