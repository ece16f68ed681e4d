use thiserror::Error;

/// Every failure mode of the certification pipeline.
///
/// Numeric payloads are stored as `f64` regardless of the scalar type used
/// for the computation, so errors stay comparable and printable.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: String,
        found: String,
    },
    #[error("matrix {0} contains non-finite entries")]
    NonFinite(&'static str),
    #[error("matrix {0} is not Hermitian within tolerance")]
    NotHermitian(&'static str),
    #[error("{which} is not coercive: smallest Hermitian-part eigenvalue {value}")]
    NotCoercive { which: &'static str, value: f64 },
    #[error("matrix is not positive definite: smallest eigenvalue {min_eig}")]
    NotPositiveDefinite { min_eig: f64 },
    #[error("invalid tolerance {name} = {value}: must lie in (0, 1e-3]")]
    InvalidTolerance { name: &'static str, value: f64 },
    #[error("Re z = {re_z} lies outside the half-plane Re z > {floor}")]
    HalfPlaneViolation { re_z: f64, floor: f64 },
    #[error("kernel block z + k0* gamma k0 is numerically singular")]
    SingularKernelBlock,
    #[error("reduced two-block operator is numerically singular")]
    SingularReducedBlock,
    #[error("right-hand side component is not in ran(C): residual {residual}")]
    NotInRange { residual: f64 },
    #[error("parameter {name} = {value} out of range")]
    ParameterOutOfRange { name: &'static str, value: f64 },
    #[error("degenerate problem: {0}")]
    DegenerateProblem(String),
    #[error("C has trivial range; no decay path for the second component")]
    ZeroRangeOperator,
    #[error("certificate audit failed after {halvings} halvings of the abscissa")]
    CertificateFailure { halvings: usize },
    #[error("z lies numerically in the spectrum: sigma_min = {sigma_min}, sigma_max = {sigma_max}")]
    Singular { sigma_min: f64, sigma_max: f64 },
    #[error("state norms underflow inside the fit window")]
    Underflow,
    #[error("too few samples in the fit window: found {found}, need {required}")]
    TooFewSamples { found: usize, required: usize },
    #[error("change of variables requires z != 0")]
    ZeroFrequency,
    #[error("change of variables requires delta != -z")]
    DegenerateShift,
    #[error("{0} is not invertible")]
    NotInvertible(&'static str),
    #[error("block {0} of the block operator is singular")]
    SingularBlock(&'static str),
    #[error("grid too large for dense assembly: {rows} rows exceed limit {limit}")]
    GridTooLarge { rows: usize, limit: usize },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("eigenvalue iteration did not converge")]
    NoConvergence,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn dim_mismatch(
    context: &'static str,
    expected: impl ToString,
    found: impl ToString,
) -> Error {
    Error::DimensionMismatch {
        context,
        expected: expected.to_string(),
        found: found.to_string(),
    }
}
