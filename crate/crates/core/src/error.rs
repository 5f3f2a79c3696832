use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Broad classification used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Validation,
    Numerical,
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("Blaschke map has a pole at the input point")]
    PoleAtInput,
    #[error("invalid group element: {0}")]
    InvalidGroupElement(String),
    #[error("invalid base a = {0}; must be finite and > 1")]
    InvalidBase(f64),
    #[error("invalid level schedule: {0}")]
    InvalidSchedule(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("function has zero norm")]
    ZeroFunction,
    #[error("evaluation at {re} + {im}i is too close to a kernel singularity")]
    NearSingular { re: f64, im: f64 },
    #[error("Taylor function has {0} coefficients; at most {max} are supported", max = crate::function::MAX_TAYLOR_COEFFS)]
    TooManyCoefficients(usize),
    #[error("nodes {first} and {second} coincide")]
    DuplicateNode { first: usize, second: usize },
    #[error("degenerate pivot at node m = {m}: d = {pivot:e}, K(a,a) = {diag:e}")]
    DegeneratePivot { m: usize, pivot: f64, diag: f64 },
    #[error("triangular system is singular at row {0}")]
    SingularTriangle(usize),
    #[error("expected {expected} samples, found {found}{}", missing.map(|(k, l)| format!("; no value for node (k={k}, l={l})")).unwrap_or_default())]
    LengthMismatch {
        expected: usize,
        found: usize,
        missing: Option<(usize, usize)>,
    },
    #[error("level {level} out of range (grid has levels 0..={max})")]
    LevelOutOfRange { level: usize, max: usize },
    #[error("no node lies deeper than level {0}")]
    InsufficientDepth(usize),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::NearSingular { .. }
            | Error::PoleAtInput
            | Error::DegeneratePivot { .. }
            | Error::SingularTriangle(_) => ErrorClass::Numerical,
            Error::Io(_) => ErrorClass::Io,
            _ => ErrorClass::Validation,
        }
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
