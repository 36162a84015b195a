//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("gamma pole at non-positive integer x = {0}")]
    GammaPole(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("closed form degenerates (gamma pole in denominator): {0}")]
    DegenerateClosedForm(String),

    #[error("series did not converge: {0}")]
    NoConvergence(String),

    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    #[error("domain error at t = {at}: {message}")]
    Domain { at: f64, message: String },

    #[error("evaluation failed at node {node} (t = {t}): {message}")]
    NodeEvaluation { node: usize, t: f64, message: String },

    #[error("truncation bound unreachable for Re(s) = {re_s}; retry with Re(s) > {suggested}")]
    TruncationUnreachable { re_s: f64, suggested: f64 },

    #[error("quadrature failed to reach tolerance: {0}")]
    QuadratureFailure(String),

    #[error("inverse Laplace transform does not exist: {0}")]
    InverseDoesNotExist(String),

    #[error("evaluator returned a non-finite value at contour node {node} (s = {s_re} + {s_im}i)")]
    ContourNode { node: usize, s_re: f64, s_im: f64 },

    #[error("Dirac order overflow: order {0} exceeds the library cap of 2")]
    DeltaOrderOverflow(usize),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("io error: {0}")]
    Io(String),

    #[error("malformed input: {0}")]
    Malformed(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
