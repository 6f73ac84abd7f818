use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unsupported field p={p}, f={f}")]
    InvalidField { p: u32, f: u32 },
    #[error("form case {case} is not available in characteristic {p}")]
    CaseMismatch { case: String, p: u32 },
    #[error("parity violation: {0}")]
    Parity(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("subspace is not contained in the domain of the form")]
    NotInDomain,
    #[error("ambient dimensions differ ({0} vs {1})")]
    AmbientMismatch(usize, usize),
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("label (h={h}, l={l}) out of range for a={a}")]
    LabelOutOfRange { h: usize, l: usize, a: usize },
    #[error("budget exceeded: estimated {estimate} > budget {budget}")]
    Budget { estimate: u128, budget: u128 },
    #[error("samples are not polynomially consistent: {0}")]
    Inconsistent(String),
    #[error("truncation order {n} insufficient: valuation {valuation} observed")]
    Truncation { valuation: usize, n: usize },
    #[error("constraint `{equation}` fails at t-order {order}")]
    Constraint { equation: String, order: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("degenerate form")]
    Degenerate,
    #[error("invalid datum: {0}")]
    InvalidDatum(String),
    #[error("no stratum matches pattern {0}")]
    NoStratum(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
