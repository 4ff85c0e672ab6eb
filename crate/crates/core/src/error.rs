use thiserror::Error;

/// Errors surfaced by the library. Guard events (divergence, convergence)
/// are not errors; they are encoded in [`crate::dynamics::Termination`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("damping coefficient c = {0} outside [0, 1)")]
    InvalidDamping(f64),

    #[error("invalid nonlinearity: {0}")]
    InvalidNonlinearity(String),

    #[error("cannot parse `{input}`: {reason}")]
    Parse { input: String, reason: String },

    #[error("invalid simulation guards: {0}")]
    InvalidGuards(String),

    #[error("non-finite input value {0}")]
    NonFinite(f64),

    #[error("trajectory too short: need at least {need} values, got {got}")]
    TooShort { need: usize, got: usize },

    #[error("expected {expected} trajectory, got {got}")]
    WrongOrbitKind { expected: &'static str, got: &'static str },

    #[error("no feasible weight window for theorem {theorem} at a = {a}, c = {c}")]
    InfeasibleWindow { theorem: &'static str, a: f64, c: f64 },

    #[error("ratio choice {0} outside the open interval (0, 1)")]
    InvalidRatioChoice(f64),

    #[error("certificate does not match orbit: {0}")]
    SpecMismatch(String),

    #[error("invalid sweep config: {0}")]
    InvalidConfig(String),

    #[error("conjecture hypotheses not met: {0}")]
    HypothesisViolation(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
