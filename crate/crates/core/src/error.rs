use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectreError {
    #[error("parameter out of range: |λ| must be < 1, got |λ| = {modulus}")]
    ParameterOutOfRange { modulus: f64 },

    #[error("non-finite parameter: {0}")]
    NonFiniteParameter(String),

    #[error("point within {distance:e} of the pole of τ")]
    PoleProximity { distance: f64 },

    #[error("inverse branches coincide (separation {separation:e}); point is outside the covering domain")]
    DegenerateBranches { separation: f64 },

    #[error("no certified invariant annulus on the search grid for |λ| = {modulus}")]
    AnnulusSearchFailed { modulus: f64 },

    #[error("map reverses orientation on the circle; only the orientation-preserving case is supported")]
    OrientationReversing,

    #[error("quadrature did not converge: {points} points, last change {change:e} > tol {tol:e}")]
    NonConvergence { points: usize, change: f64, tol: f64 },

    #[error("index {index} exceeds the supported bound {max}")]
    IndexOutOfRange { index: i64, max: i64 },

    #[error("binomial coefficient overflow at n = {n}")]
    BinomialOverflow { n: u64 },

    #[error("closed-form sign probe matched neither convention (residuals {plain:e}, {flipped:e})")]
    SignProbeFailed { plain: f64, flipped: f64 },

    #[error("matrix structure violated: {0}")]
    StructureViolation(String),

    #[error("eigensolver failed: {0}")]
    EigenSolverFailed(String),

    #[error("dense eigenvalues deviate from the triangular read-off by {distance:e} > {tol:e}")]
    DenseMismatch { distance: f64, tol: f64 },

    #[error("no matrix eigenvalue within {tol:e} of {re} + {im}i")]
    NoSuchEigenvalue { re: f64, im: f64, tol: f64 },

    #[error("x = {x} is outside [{lo}, {hi}]")]
    OutOfDomain { x: f64, lo: f64, hi: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl SpectreError {
    /// Failures caused by a numerical budget running out rather than bad input.
    pub fn is_non_convergence(&self) -> bool {
        matches!(
            self,
            SpectreError::NonConvergence { .. }
                | SpectreError::EigenSolverFailed(_)
                | SpectreError::AnnulusSearchFailed { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, SpectreError>;
