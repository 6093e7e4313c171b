use thiserror::Error;

pub type Result<T> = std::result::Result<T, ZenoError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ZenoError {
    #[error("matrix is not Hermitian: ||A - A^H|| = {deviation:e} exceeds {allowed:e}")]
    NotHermitian { deviation: f64, allowed: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("matrix must be square with dimension >= 1, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("Hamiltonian needs at least one level")]
    EmptySpectrum,

    #[error("state is not normalized: |psi|^2 = {norm_sq}")]
    NotNormalized { norm_sq: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("operator is not a projector: {reason}")]
    NotProjector { reason: String },

    #[error("survival factor {value:e} is negative beyond round-off")]
    NegativeSurvival { value: f64 },

    #[error("energy variance vanishes: the initial state is an eigenstate of H")]
    ZeroVariance,

    #[error("invalid waiting time {value}: {reason}")]
    InvalidInterval { value: f64, reason: &'static str },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("distribution has no finite mean (power-law alpha = {alpha} <= 1)")]
    InfiniteMean { alpha: f64 },

    #[error("distribution has no finite second moment (power-law alpha = {alpha} <= 2)")]
    InfiniteSecondMoment { alpha: f64 },

    #[error("adaptive quadrature did not reach tolerance: estimate {estimate:e}, error {error:e} after {subdivisions} subdivisions")]
    QuadratureNoConvergence {
        estimate: f64,
        error: f64,
        subdivisions: usize,
    },

    #[error("value {x:e} is outside the attainable range: {reason}")]
    OutOfRange { x: f64, reason: String },

    #[error("could not bracket the tilt parameter for target {x:e}")]
    RootBracketFailure { x: f64 },

    #[error("measurement counts are inconsistent: {0}")]
    Inconsistent(String),

    #[error("second waiting time {mu2:e} must be positive (requires mean > p1 * mu1)")]
    InvalidMean { mu2: f64 },

    #[error("insufficient samples: {have} records, need at least {need}")]
    InsufficientSamples { have: usize, need: usize },

    #[error("invalid ensemble configuration: {0}")]
    InvalidConfig(String),

    #[error("cannot parse quantity {input:?}: {reason}")]
    Unit { input: String, reason: String },
}
