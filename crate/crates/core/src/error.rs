use crate::lorentz::Scalar;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("vector has non-real components (|im| = {max_im:e})")]
    NonRealVector { max_im: f64 },
    #[error("vector is null: <X,X> = {norm_sq:e}")]
    NullVector { norm_sq: f64 },
    #[error("division by a jet whose value is zero")]
    DivisionByZeroValue,
    #[error("{func} is not defined at {value}")]
    DomainError { func: &'static str, value: Scalar },
    #[error("finite-difference stencil left the domain at (s, t) = ({s}, {t}): {reason}")]
    StencilOutsideDomain { s: f64, t: f64, reason: String },
    #[error("degenerate metric at (s, t) = ({s}, {t}): EG - F^2 = {det:e}")]
    DegenerateMetric { s: f64, t: f64, det: f64 },
    #[error("degenerate second fundamental form at (s, t) = ({s}, {t}): |eg| - f^2 = {det:e}")]
    DegenerateSecondForm { s: f64, t: f64, det: f64 },
    #[error("(s, t) = ({s}, {t}) is excluded: {reason}")]
    ExcludedPoint { s: f64, t: f64, reason: String },
    #[error("tangent plane is light-like at (s, t) = ({s}, {t}); the Gauss map is undefined")]
    NullNormal { s: f64, t: f64 },
    #[error("constraint violated: {0}")]
    ConstraintViolation(String),
    #[error("infeasible domain: {0}")]
    InfeasibleDomain(String),
    #[error("unknown surface id `{0}`")]
    UnknownSurface(String),
    #[error("unknown parameter `{name}` for `{surface}` (expected one of {expected})")]
    UnknownParameter { surface: String, name: String, expected: String },
    #[error("`{0}` is not a ruled surface")]
    NotRuled(String),
    #[error("causal character of {what} changes across samples: {detail}")]
    InconsistentCharacter { what: &'static str, detail: String },
    #[error("E is not monotone on the revolution side of `{0}`")]
    NonMonotoneE(String),
    #[error("bisection failed to bracket E = {target} for t = {t}")]
    BisectionFailure { t: f64, target: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
