use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeoError {
    #[error("metric is singular: |det| = {det:e}")]
    SingularMetric { det: f64 },
    #[error("point {point:?} (with stencil reach {reach:e}) leaves chart `{chart}`")]
    OutOfChart { chart: String, point: Vec<f64>, reach: f64 },
    #[error("matrix is not symmetric positive definite (smallest eigenvalue {min_eigenvalue:e})")]
    NotSpd { min_eigenvalue: f64 },
    #[error("skew form is degenerate (smallest singular value {min_singular:e})")]
    DegenerateOmega { min_singular: f64 },
    #[error("basis is rank deficient: rank {rank} of {expected}")]
    RankDeficientBasis { rank: usize, expected: usize },
    #[error("1-form is not contact: linear system for the Reeb field has rank {rank} of {dim}")]
    NotContact { rank: usize, dim: usize },
    #[error("vector field is not null: g(p, p) = {value:e}")]
    NotNull { value: f64 },
    #[error("no shearfree decomposition: least-squares residual {residual:e}")]
    NoDecomposition { residual: f64 },
    #[error("integrator failed to reach tolerance: {0}")]
    OdeStep(String),
    #[error("missing analytic derivative: {0}")]
    MissingDerivative(String),
    #[error("signature drift: expected {expected:?}, found {found:?}")]
    SignatureError {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("curvature sign not allowed for base `{kind}`: lambda0 = {lambda0}")]
    BadCurvatureSign { kind: String, lambda0: f64 },
    #[error("profile coefficient alpha too small: |alpha| = {0:e}")]
    DegenerateAlpha(f64),
    #[error("coordinate change crosses a zero of beta at t = {t}")]
    HorizonCrossing { t: f64 },
    #[error("base `{0}` has no holomorphic chart")]
    NoHolomorphicChart(String),
    #[error("joint kernel has dimension {found}, expected {expected}")]
    KernelDimensionMismatch { expected: usize, found: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, GeoError>;
