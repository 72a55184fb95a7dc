use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("form degree {degree} out of range for dimension {dim}")]
    DegreeOutOfRange { degree: usize, dim: usize },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    #[error("inconsistent skew-symmetric data: {0}")]
    SkewViolation(String),

    #[error("not a Lie bracket: Jacobi residual {residual:e} exceeds {tol:e}")]
    NotLie { residual: f64, tol: f64 },

    #[error("3-form is not closed: |d H| = {residual:e} exceeds {tol:e}")]
    NotClosed { residual: f64, tol: f64 },

    #[error("bracket is not nilpotent")]
    NotNilpotent,

    #[error("matrix is singular or ill-conditioned (condition number {condition:e})")]
    Singular { condition: f64 },

    #[error("metric is not symmetric positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("structure drift at t = {t}: {what} = {residual:e} exceeds {tol:e}")]
    StructureDrift {
        t: f64,
        what: &'static str,
        residual: f64,
        tol: f64,
    },

    #[error("flow blew up: last valid time {t_last} ({cause})")]
    Blowup { t_last: f64, cause: String },

    #[error("step budget of {0} steps exhausted")]
    StepBudget(usize),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: parse error at line {line}, column {column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
}

impl Error {
    /// True for failures of the numerics rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::StructureDrift { .. } | Error::Blowup { .. } | Error::StepBudget(_)
        )
    }

    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}
