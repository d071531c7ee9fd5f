use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },

    #[error("series for E_{{α,β}}({z}) did not converge within {terms} terms")]
    SeriesNonConvergence { z: f64, terms: usize },

    #[error("quadrature did not reach tolerance: estimate {value}, error bound {error}")]
    QuadratureNonConvergence { value: f64, error: f64 },

    #[error("series ({series}) and integral ({integral}) regimes disagree at z = {z}")]
    RegimeDisagreement { z: f64, series: f64, integral: f64 },

    #[error("root scan bound {bound} is not certified: two-term/one-term asymptotic ratio {ratio}")]
    UncertifiedBound { bound: f64, ratio: f64 },

    #[error("{count} propagator value(s) below the floor; T^α is near a root of E_{{α,2}}(−λT^α)")]
    DegenerateModes { count: usize },

    #[error("L1 time stepping diverged at step {step}: |c| = {value}")]
    Divergence { step: usize, value: f64 },

    #[error("matrix is not positive definite (pivot {pivot} at index {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    #[error("variational identity residual {residual:e} exceeds tolerance")]
    VariationalMismatch { residual: f64 },

    #[error("reconstruction has zero X-norm; restart with a smaller initial ρ")]
    ZeroNorm,

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("eigenvalue iteration did not converge after {sweeps} sweeps")]
    EigenNonConvergence { sweeps: usize },
}
