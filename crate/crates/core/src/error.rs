use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParam { name: &'static str, reason: String },
    #[error("unbounded branch: beta must be positive")]
    UnboundedBranch,
    #[error("no admissible interval for mode {0}")]
    NoAdmissibleInterval(i32),
    #[error("mode enumeration needs an explicit k_max when sin(theta1 - theta2) = 0")]
    KmaxRequired,
    #[error("degenerate direction: {0}")]
    DegenerateDirection(&'static str),
    #[error("excluded angle: cos(theta2) = 0")]
    ExcludedAngle,
    #[error("division degenerate: s cos(theta1) + k nu0 cos(theta2) = 0")]
    DivisionDegenerate,
    #[error("not a double eigenvalue at k = {k}, s = {s}")]
    NotDouble { k: i32, s: f64 },
    #[error("sign convention violated: {0}")]
    SignConventionViolated(String),
    #[error("outside scenario: {0}")]
    OutsideScenario(String),
    #[error("solvability degenerate: |d2_10| = {0:e}")]
    SolvabilityDegenerate(f64),
    #[error("determinant zero")]
    DeterminantZero,
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("step-size underflow at x = {0}")]
    StepFailure(f64),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for failures of an iterative numerical method, as opposed to bad input.
    pub fn is_convergence(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence(_) | Error::StepFailure(_) | Error::Inconclusive(_)
        )
    }

    /// Short machine-readable tag used in sweep tables.
    pub fn tag(&self) -> &'static str {
        match self {
            Error::InvalidParam { .. } => "invalid-param",
            Error::UnboundedBranch => "unbounded-branch",
            Error::NoAdmissibleInterval(_) => "no-admissible-interval",
            Error::KmaxRequired => "kmax-required",
            Error::DegenerateDirection(_) => "degenerate-direction",
            Error::ExcludedAngle => "excluded-angle",
            Error::DivisionDegenerate => "division-degenerate",
            Error::NotDouble { .. } => "not-double",
            Error::SignConventionViolated(_) => "sign-convention-violated",
            Error::OutsideScenario(_) => "outside-scenario",
            Error::SolvabilityDegenerate(_) => "solvability-degenerate",
            Error::DeterminantZero => "determinant-zero",
            Error::Inconclusive(_) => "inconclusive",
            Error::StepFailure(_) => "step-failure",
            Error::NoConvergence(_) => "no-convergence",
            Error::Parse(_) => "parse",
        }
    }
}
