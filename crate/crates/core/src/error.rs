use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("{what} out of domain: {value}")]
    Domain { what: &'static str, value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid transformation: {0}")]
    InvalidTransformation(String),

    #[error("weight {weight} is invalid at x = {x}: got {value}")]
    InvalidWeight { weight: String, x: f64, value: f64 },

    #[error("non-finite integrand value {value} at u = {u}")]
    Integrand { u: f64, value: f64 },

    #[error("{what} diverges (partial value {estimate}, error estimate {error_estimate})")]
    Divergence {
        what: String,
        estimate: f64,
        error_estimate: f64,
    },

    #[error("unsupported measure: {0}")]
    UnsupportedMeasure(String),

    #[error("insufficient data: need at least {needed} observations, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("bandwidth: {0}")]
    Bandwidth(String),

    #[error("cannot parse {what} from {input:?}: {reason}")]
    Parse {
        what: &'static str,
        input: String,
        reason: String,
    },

    #[error("evaluation failed at {at}: {reason}")]
    Evaluation { at: f64, reason: String },
}

impl Error {
    pub(crate) fn parse(what: &'static str, input: &str, reason: impl Into<String>) -> Self {
        Error::Parse {
            what,
            input: input.to_owned(),
            reason: reason.into(),
        }
    }

    pub fn is_divergence(&self) -> bool {
        matches!(self, Error::Divergence { .. })
    }
}
