use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iteration failed to reach its tolerance.
    #[error("numeric error: {what} did not converge after {iterations} iterations (last residual {residual:e})")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("no root in unit interval for p = {p} (scan step {step:e})")]
    NoRootInUnitInterval { p: f64, step: f64 },

    #[error("numeric error: no sign change bracket found for {0}")]
    NoBracket(String),

    #[error("branch degenerate: minus-branch requires p > 2, got p = {0}")]
    BranchDegenerate(f64),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A martingale construction broke one of the hypotheses at a given step.
    #[error("construction error at path {path}, step {step}: {detail}")]
    Construction {
        path: usize,
        step: usize,
        detail: String,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn ensure_finite(name: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be finite, got {x}")))
    }
}
