//! Error type shared by every module of the laboratory.

use std::fmt;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong in a verification routine.
///
/// Variants distinguish *mathematical* failure modes (a tail that genuinely
/// diverges, a parameter regime where a quantity is undefined) from
/// *numerical* ones (an iteration that did not converge, a time step that
/// blew up), because callers react differently: the former are usually the
/// expected answer for out-of-range parameters, the latter indicate that a
/// discretization knob needs adjusting.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Parameters outside the admissible range of the routine.
    InvalidParams(String),
    /// A radial integral diverges at infinity; `rate` is the exponent of the
    /// non-integrable power growth (`integrand ~ r^rate` with `rate >= -1`).
    DivergentTail { rate: f64 },
    /// A classification or fitted rate sits too close to a decision boundary
    /// to call.
    Inconclusive(String),
    /// A least-squares fit is degenerate or its residuals are too large to
    /// trust the fitted exponents.
    FitFailure(String),
    /// The sesquilinear form is not sectorial for these parameters, so no
    /// sector angle exists.
    NonAnalyticRegime { alpha_limit: f64 },
    /// A lumped mass entry underflowed to a subnormal or zero value, so the
    /// generalized eigenproblem is numerically singular at this node.
    SingularMass { node: usize },
    /// A norm trace grew during time stepping; the scheme rejected the run.
    Instability { step: usize, growth: f64 },
    /// A quantity that must be monotone (in the grid, the radius, or time)
    /// was not, beyond the allowed roundoff slack.
    MonotonicityViolation(String),
    /// An iterative procedure exhausted its budget without meeting its
    /// convergence criterion.
    NonConvergence(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParams(msg) => write!(f, "invalid parameters: {msg}"),
            Error::DivergentTail { rate } => {
                write!(f, "integral diverges at infinity (integrand ~ r^{rate:.6})")
            }
            Error::Inconclusive(msg) => write!(f, "inconclusive: {msg}"),
            Error::FitFailure(msg) => write!(f, "fit failure: {msg}"),
            Error::NonAnalyticRegime { alpha_limit } => write!(
                f,
                "form is not sectorial here (requires alpha < {alpha_limit:.6})"
            ),
            Error::SingularMass { node } => {
                write!(f, "mass matrix entry underflowed at node {node}")
            }
            Error::Instability { step, growth } => write!(
                f,
                "norm grew by a factor {growth:.3e} at step {step}; run rejected"
            ),
            Error::MonotonicityViolation(msg) => write!(f, "monotonicity violated: {msg}"),
            Error::NonConvergence(msg) => write!(f, "did not converge: {msg}"),
        }
    }
}

impl std::error::Error for Error {}
