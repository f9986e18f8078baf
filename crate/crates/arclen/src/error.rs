use thiserror::Error;

/// Errors surfaced by curve construction, planning and sampling.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A curve needs at least one component polynomial.
    #[error("curve has no components")]
    NoComponents,

    /// The parameter interval `[a, b]` must satisfy `a < b`.
    #[error("empty parameter domain [{a}, {b}]")]
    EmptyDomain { a: f64, b: f64 },

    /// A coefficient or domain endpoint was NaN or infinite.
    #[error("non-finite value in input data")]
    NonFiniteInput,

    /// The operation requires the canonical domain `[-1, 1]`.
    #[error("curve domain is [{a}, {b}]; rescale to [-1, 1] first")]
    DomainNotCanonical { a: f64, b: f64 },

    /// The minimum speed is below the certifiable threshold, so the
    /// condition number is effectively infinite and no error budget can
    /// be guaranteed.
    #[error("speed vanishes on the domain (min speed {min_speed:.3e}, coefficient norm {coeff_norm:.3e})")]
    VanishingSpeed { min_speed: f64, coeff_norm: f64 },

    /// Root finding on the zero polynomial is undefined.
    #[error("zero polynomial has no well-defined root set")]
    ZeroPoly,

    /// The simultaneous root iteration did not meet its residual
    /// tolerance within the iteration cap.
    #[error("root finder did not converge within {0} iterations")]
    NoConvergence(usize),

    /// A root of the squared speed lies (numerically) on `[-1, 1]`,
    /// which makes the density non-analytic there.
    #[error("a squared-speed root lies within {dist:.1e} of [-1, 1]")]
    RootOnInterval { dist: f64 },

    /// The squared speed vanishes on the requested ellipse boundary, so
    /// the ellipse encloses a root.
    #[error("squared speed vanishes on the ellipse boundary (rho = {rho})")]
    RootInside { rho: f64 },

    /// The interpolated density stayed negative after the retry budget.
    #[error("density interpolant still dips below tolerance after {retries} degree doublings")]
    PositivityFailure { retries: usize },

    /// The function handed to the interpolator produced a non-finite
    /// sample at a Chebyshev node.
    #[error("non-finite sample {value} at interpolation node {node}")]
    NonFiniteSample { node: f64, value: f64 },

    /// A deserialized plan failed structural validation.
    #[error("invalid sampler plan: {0}")]
    InvalidPlan(String),
}

pub type Result<T> = std::result::Result<T, Error>;
