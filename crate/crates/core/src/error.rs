use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid interval [{lo}, {hi}]: lower end exceeds upper end")]
    InvalidInterval { lo: String, hi: String },

    #[error("syntax error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("point {0} is outside the domain")]
    Domain(String),

    #[error("invalid function: {0}")]
    InvalidFunction(String),

    #[error("evaluation failed: {0}")]
    Eval(String),

    #[error("malformed envelope at {x}: liminf {liminf} exceeds limsup {limsup}")]
    MalformedEnvelope { x: String, liminf: String, limsup: String },

    #[error("declared envelope rejected at {x}: {reason}")]
    EnvelopeRejected { x: String, reason: String },

    #[error("operand is not Hausdorff continuous: {0}")]
    NotHContinuous(String),

    #[error("operand is outside the piecewise-linear subclass: {0}")]
    NotPiecewiseLinear(String),

    #[error("internal consistency failure: {0}")]
    InternalConsistency(String),

    #[error("unbound name `{0}`")]
    Unbound(String),

    #[error("sequence is not {0}")]
    NonMonotone(String),

    #[error("no convergence: {0}")]
    NonConvergence(String),

    #[error("malformed input: {0}")]
    Format(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
