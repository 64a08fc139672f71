use thiserror::Error;

/// Errors raised by the model, the special-function kernel and the solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error in {what}: {detail}")]
    Domain { what: &'static str, detail: String },

    #[error("overflow in {what}: exponent {exponent:.6e} exceeds {limit}")]
    Overflow {
        what: &'static str,
        exponent: f64,
        limit: f64,
    },

    #[error("degenerate configuration in {what}: {detail}")]
    Degenerate { what: &'static str, detail: String },

    #[error("singular Robin denominator: gamma_r = {gamma_r:.6e}, critical value {critical:.6e}")]
    SingularRobin { gamma_r: f64, critical: f64 },

    #[error("axial resonance: sin(eta_n (L - ell)) vanishes for term n = {n}")]
    Resonance { n: usize },

    #[error("quadrature did not converge on [{a:.6e}, {b:.6e}]: error estimate {estimate:.3e}")]
    Quadrature { a: f64, b: f64, estimate: f64 },

    #[error("root finding failed: {0}")]
    Root(String),

    #[error("damage integral stays below one up to horizon {horizon:.6e} s (reached {reached:.6e})")]
    HorizonExceeded { horizon: f64, reached: f64 },

    #[error("fixed point did not converge after {iterations} iterations (last change {last_change:.3e})")]
    NoConvergence { iterations: usize, last_change: f64 },

    #[error("finite-difference instability: {0}")]
    Unstable(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn domain(what: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            what,
            detail: detail.into(),
        }
    }

    pub(crate) fn degenerate(what: &'static str, detail: impl Into<String>) -> Self {
        Error::Degenerate {
            what,
            detail: detail.into(),
        }
    }

    /// Wraps the error with region/phase information.
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// Innermost error, with context layers removed.
    pub fn root_cause(&self) -> &Error {
        match self {
            Error::Context { source, .. } => source.root_cause(),
            other => other,
        }
    }

    /// True for overflow and degeneracy failures, i.e. the model left its valid numeric regime.
    pub fn is_numeric_regime(&self) -> bool {
        matches!(
            self.root_cause(),
            Error::Overflow { .. }
                | Error::Degenerate { .. }
                | Error::SingularRobin { .. }
                | Error::Resonance { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
