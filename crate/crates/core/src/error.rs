use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("quadrature did not converge: estimated error {error:e} above target {target:e} after {subdivisions} subdivisions")]
    NonConvergence {
        error: f64,
        target: f64,
        subdivisions: usize,
    },

    #[error("integrand is not finite at t = {at}")]
    NonFinite { at: f64 },

    #[error("principal value point {x} is within the guard distance of an endpoint of ({lo}, {hi})")]
    SingularityAtEndpoint { x: f64, lo: f64, hi: f64 },

    #[error("invalid decay certificate: {0}")]
    InvalidCertificate(String),

    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("evaluation at a pole: {at}")]
    Pole { at: Complex64 },

    #[error("the signal is singular at the kernel pole {at}; use the merged residue")]
    MergedPole { at: Complex64 },

    #[error("circle radius {radius} reaches the singularity at {nearest}")]
    RadiusTooLarge { radius: f64, nearest: Complex64 },

    #[error("closed-form residue unavailable for pole order {0}")]
    UnsupportedOrder(u32),

    #[error("singularity {at} lies on the integration contour")]
    PoleOnContour { at: Complex64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("sample {index} has non-positive magnitude {value}")]
    NonPositiveMagnitude { index: usize, value: f64 },
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
