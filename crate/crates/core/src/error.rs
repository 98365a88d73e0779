use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes shared by every evaluator in the crate.
///
/// Variant names are stable: the CLI reports them verbatim on numeric-domain
/// failures.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("mean {mean} is not attainable by the family (attainable interval {lo}..{hi})")]
    MeanUnattainable { mean: f64, lo: f64, hi: f64 },

    #[error("root finder did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("cumulant function has no positive root")]
    NoPositiveRoot,

    #[error("theta = {theta} lies outside the natural parameter space")]
    ThetaOutOfDomain { theta: f64 },

    #[error("family is neither a span-1 lattice nor a supported continuous kind: {0}")]
    Unsupported(String),

    #[error("walk drift {drift} is not strictly positive")]
    NonPositiveDrift { drift: f64 },

    #[error("series needed more than {budget} terms")]
    TermBudgetExceeded { budget: usize },

    #[error("adaptive quadrature failed: {0}")]
    QuadratureFailure(String),

    #[error("complex logarithm left its continuous branch at x = {x}")]
    BranchDiscontinuity { x: f64 },

    #[error("endpoint cancellation failed at x = {x}")]
    SingularEndpoint { x: f64 },

    #[error("window t = {t} must satisfy 1 <= t < n = {n}")]
    DegenerateWindow { n: u64, t: u64 },

    #[error("operation requires a {expected} family")]
    WrongFamily { expected: &'static str },

    #[error("family support is not bounded above")]
    UnboundedSupport,

    #[error("exact window-sum tail is unavailable: {0}")]
    TailUnavailable(String),

    #[error("effective number of windows n - b/mu1 = {value} is not positive")]
    NonPositiveEffectiveWindows { value: f64 },

    #[error("generating function has no root greater than one")]
    NoRoot,

    #[error("walk support has the wrong shape: {0}")]
    WrongSupportShape(&'static str),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("exact computation needs {states} states, over the budget of {budget}")]
    BudgetExceeded { states: f64, budget: f64 },
}

impl Error {
    /// Variant name, used as the machine-readable error tag.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidParameter { .. } => "InvalidParameter",
            Error::MeanUnattainable { .. } => "MeanUnattainable",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::NoPositiveRoot => "NoPositiveRoot",
            Error::ThetaOutOfDomain { .. } => "ThetaOutOfDomain",
            Error::Unsupported(_) => "Unsupported",
            Error::NonPositiveDrift { .. } => "NonPositiveDrift",
            Error::TermBudgetExceeded { .. } => "TermBudgetExceeded",
            Error::QuadratureFailure(_) => "QuadratureFailure",
            Error::BranchDiscontinuity { .. } => "BranchDiscontinuity",
            Error::SingularEndpoint { .. } => "SingularEndpoint",
            Error::DegenerateWindow { .. } => "DegenerateWindow",
            Error::WrongFamily { .. } => "WrongFamily",
            Error::UnboundedSupport => "UnboundedSupport",
            Error::TailUnavailable(_) => "TailUnavailable",
            Error::NonPositiveEffectiveWindows { .. } => "NonPositiveEffectiveWindows",
            Error::NoRoot => "NoRoot",
            Error::WrongSupportShape(_) => "WrongSupportShape",
            Error::PreconditionViolated(_) => "PreconditionViolated",
            Error::BudgetExceeded { .. } => "BudgetExceeded",
        }
    }

    /// True for errors caused by malformed input rather than numerics.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. } | Error::DegenerateWindow { .. }
        )
    }

    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
