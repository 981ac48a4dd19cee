use thiserror::Error;

/// Errors raised by operators, solvers and diagnostics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("invalid order {order}: {reason}")]
    InvalidOrder { order: f64, reason: String },

    #[error("invalid terminal: {0}")]
    InvalidTerminal(String),

    #[error("unsupported order {order} for {what}")]
    UnsupportedOrder { order: f64, what: String },

    #[error("tail violation: {0}")]
    TailViolation(String),

    #[error("argument outside the supported domain: {0}")]
    DomainRestriction(String),

    #[error("overflow at x = {x}")]
    OverflowAtPoint { x: f64 },

    #[error("log argument b + w = {value} is not positive at x = {x}")]
    LogDomainViolation { x: f64, value: f64 },

    #[error("amplitude {amplitude} exceeds the small-amplitude threshold {threshold}")]
    AmplitudeTooLarge { amplitude: f64, threshold: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid time {0}")]
    InvalidTime(f64),

    #[error("time step {dt} exceeds the stability bound {bound}")]
    InvalidStep { dt: f64, bound: f64 },

    #[error("blow-up at t = {t}: sup norm grew from {from} to {to}")]
    BlowUp { t: f64, from: f64, to: f64 },

    #[error("singular point at xi = {xi} (terminal {terminal})")]
    SingularPoint { xi: f64, terminal: f64 },

    #[error("companion field fails its linear equation: residual {residual} > {tolerance}")]
    NotACompanionSolution { residual: f64, tolerance: f64 },

    #[error("shifted domain exceeds the grid: {0}")]
    DomainExceeded(String),

    #[error("eps = {0} outside (0, 0.1]")]
    EpsOutOfRange(f64),

    #[error("fit unreliable: {0}")]
    FitUnreliable(String),

    #[error("degenerate coefficients: {0}")]
    Degenerate(String),
}

impl Error {
    /// True for failures of the numerics (as opposed to rejected inputs).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::BlowUp { .. }
                | Error::OverflowAtPoint { .. }
                | Error::LogDomainViolation { .. }
                | Error::NotACompanionSolution { .. }
                | Error::FitUnreliable(_)
                | Error::TailViolation(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
