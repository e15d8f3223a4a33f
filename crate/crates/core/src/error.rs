use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("t = {t} lies before the profile domain start {start}")]
    Domain { t: f64, start: f64 },

    #[error("t = {t} lies beyond the end {end} of the reparametrized time range")]
    BeyondRange { t: f64, end: f64 },

    #[error("non-finite value while evaluating {what} at t = {t}")]
    NonFinite { what: &'static str, t: f64 },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("division by zero: {0}")]
    Division(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("maximum step count {max_steps} exceeded at t = {t}")]
    MaxStepsExceeded { max_steps: u64, t: f64 },

    #[error("step size {h:e} underflowed at t = {t}")]
    StepUnderflow { h: f64, t: f64 },

    #[error("{function} overflows at nu = {nu}, z = {z}; use the exponentially scaled variant")]
    Overflow {
        function: &'static str,
        nu: f64,
        z: f64,
    },

    #[error("{0} did not converge")]
    NoConvergence(&'static str),

    #[error("gamma function pole at x = {0}")]
    Pole(f64),

    #[error("singular 2x2 system while fitting integration constants (det = {det:e})")]
    SingularSystem { det: f64 },

    #[error("could not bracket tau for t = {t}")]
    Bracket { t: f64 },
}

impl Error {
    /// Numerical failures (as opposed to bad inputs or violated hypotheses).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonFinite { .. }
                | Error::MaxStepsExceeded { .. }
                | Error::StepUnderflow { .. }
                | Error::Overflow { .. }
                | Error::NoConvergence(_)
                | Error::SingularSystem { .. }
                | Error::Bracket { .. }
        )
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain { .. } => "domain",
            Error::BeyondRange { .. } => "beyond_range",
            Error::NonFinite { .. } => "non_finite",
            Error::Hypothesis(_) => "hypothesis",
            Error::Division(_) => "division",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::MaxStepsExceeded { .. } => "max_steps_exceeded",
            Error::StepUnderflow { .. } => "step_underflow",
            Error::Overflow { .. } => "overflow",
            Error::NoConvergence(_) => "no_convergence",
            Error::Pole(_) => "pole",
            Error::SingularSystem { .. } => "singular_system",
            Error::Bracket { .. } => "bracket",
        }
    }
}
