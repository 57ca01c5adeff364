use thiserror::Error;

/// Errors raised by the analytic models, the solvers and the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The closed forms are only valid for equiprobable hypotheses.
    #[error("unequal priors are not supported (prior_plus = {prior_plus})")]
    InvalidPrior { prior_plus: f64 },

    /// A parameter lies outside the domain of its type.
    #[error("{name} = {value} is out of domain: {reason}")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// Every candidate gives the same error; there is no unique optimum.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// The stationarity condition for the transmittance is singular at |alpha| = |gamma|.
    #[error("singular input: alpha = gamma = {alpha}")]
    SingularInput { alpha: f64 },

    #[error("{what} did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("invalid bracket [{lo}, {hi}]")]
    InvalidBracket { lo: f64, hi: f64 },

    #[error("no sign change on [{lo}, {hi}] (f(lo) = {f_lo:e}, f(hi) = {f_hi:e})")]
    NoSignChange {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    /// A formula produced a value outside its algebraic range. Always a bug.
    #[error("internal consistency violation: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
