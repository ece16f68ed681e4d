//! Exponential-stability certificates for damped block systems
//!
//! ```text
//! d/dt diag(alpha, beta) U + [[gamma, 0], [0, 0]] U + [[0, -C*], [C, 0]] U = 0
//! ```
//!
//! with `alpha, beta` Hermitian positive definite and `Re gamma >= c > 0`.
//!
//! The pipeline normalizes the mass coefficients ([`normalize`]), splits off
//! the kernel of `C` ([`helmholtz`]), computes explicit decay constants
//! ([`certificate`]) and audits every constant against dense spectral,
//! resolvent and time-domain computations ([`verify`]). [`maxwell`] provides
//! periodic-grid Maxwell surrogates and [`cli`] the file-based front end.
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the scalar to `f64`, the precision the default tolerances are
//! calibrated for.

pub mod certificate;
pub mod cli;
pub mod error;
pub mod helmholtz;
pub mod linalg;
pub mod maxwell;
pub mod model;
pub mod normalize;
pub mod scalar;
pub mod verify;

pub use certificate::{
    damping_lower_bound, full_certificate, invertible_certificate, kernel_block_bound,
    optimize_shift, InvertibleCaseCertificate, StabilityCertificate,
};
pub use error::{Error, Result};
pub use helmholtz::{decompose, decoupled_solve, decoupling_transforms, three_block_form};
pub use model::{hermitian_min_eig, operator_norm, validate_system, BlockSystem, Tolerances};
pub use normalize::{map_state, normalize_system, sqrt_factor, Direction, NormalizedSystem};
pub use scalar::{ComplexMatrix, ComplexVector, Real};
pub use verify::{
    assemble_generator, check_m_dissipative, fit_decay_rate, gp_sweep, resolvent_norm, simulate,
    spectral_abscissa, ResolventSweepReport, TrajectoryTrace,
};

pub type Matrix = scalar::ComplexMatrix<f64>;
pub type Vector = scalar::ComplexVector<f64>;
pub type System = model::BlockSystem<f64>;
pub type Normalized = normalize::NormalizedSystem<f64>;
pub type Frames = helmholtz::HelmholtzFrames<f64>;
pub type Blocks = helmholtz::DecoupledBlocks<f64>;
pub type Certificate = certificate::StabilityCertificate<f64>;
pub type InvertibleCertificate = certificate::InvertibleCaseCertificate<f64>;
pub type Trace = verify::TrajectoryTrace<f64>;
pub type Curl = maxwell::DiscreteCurl<f64>;

pub type MatrixF32 = scalar::ComplexMatrix<f32>;
pub type SystemF32 = model::BlockSystem<f32>;
pub type CertificateF32 = certificate::StabilityCertificate<f32>;
