use thiserror::Error;

/// Failure while evaluating an expression at a point.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("log of non-positive argument {0}")]
    LogDomain(f64),
    #[error("sqrt of negative argument {0}")]
    SqrtDomain(f64),
    #[error("variable x{} requested but point has {len} coordinates", .index + 1)]
    MissingVariable { index: usize, len: usize },
    #[error("value {0} lies outside the range of the inverted map")]
    InverseOutOfRange(f64),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("domain too singular: {failed} of {attempted} sample points could not be evaluated")]
    DomainTooSingular { failed: usize, attempted: usize },
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("matrix is degenerate on the domain: |det S| = {det:e} at {point:?}")]
    DegenerateMatrix { det: f64, point: Vec<f64> },
    #[error("matrix is not square: row {row} has {len} entries, expected {n}")]
    NotSquare { row: usize, len: usize, n: usize },
    #[error("row-locality violated: entry ({}, {}) depends on x{}", .row + 1, .col + 1, .var + 1)]
    RowLocality { row: usize, col: usize, var: usize },
    #[error("operator order {order} exceeds the supported cap {cap}")]
    OrderOverflow { order: usize, cap: usize },
    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("dimension {n} outside the supported range {min}..={max}")]
    DimensionOutOfRange { n: usize, min: usize, max: usize },
    #[error("exponents must be mutually different, {0} appears twice")]
    DuplicateExponents(i32),
    #[error("map for axis {} is not monotone on its interval", .axis + 1)]
    NonMonotone { axis: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
