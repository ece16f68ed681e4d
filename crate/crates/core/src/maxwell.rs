//! Periodic-grid surrogate of the conductivity-damped Maxwell system
//!
//! ```text
//! d/dt diag(eps, mu)(E, H) = -diag(sigma, 0)(E, H) - [[0, -curl], [curl, 0]](E, H)
//! ```
//!
//! Central differences on a periodic grid give mutually commuting skew
//! difference operators `Dx, Dy, Dz`, so the assembled curl is exactly
//! Hermitian and annihilates discrete gradients. On a torus the maximal
//! curl and its boundary-condition counterpart coincide, so a single `K`
//! plays both roles.
//!
//! For `N = 2` the central stencil `f(i+1) - f(i-1)` vanishes identically
//! and `K = 0`; nondegenerate curls need `N >= 3`.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::certificate::{certify_normalized, CertificateOptions, StabilityCertificate};
use crate::error::{Error, Result};
use crate::helmholtz::decompose;
use crate::linalg;
use crate::model::{validate_system, BlockSystem, Tolerances};
use crate::normalize::{map_state, normalize_system, Direction};
use crate::scalar::{re, ComplexMatrix, ComplexVector, Real};
use crate::verify::{
    admissible_initial, assemble_generator, gp_sweep, restricted_generator, simulate,
    spectral_abscissa, ResolventSweepReport, TrajectoryTrace,
};

/// Default cap on the number of rows of the dense curl (`3 N^3`).
pub const DEFAULT_DENSE_LIMIT: usize = 1536;
/// Environment variable overriding [`DEFAULT_DENSE_LIMIT`].
pub const DENSE_LIMIT_ENV: &str = "STABCERT_DENSE_LIMIT";

pub fn dense_limit_from_env() -> usize {
    std::env::var(DENSE_LIMIT_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_DENSE_LIMIT)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    /// Cells per axis.
    pub n: usize,
    /// Grid spacing.
    pub h: f64,
}

impl GridSpec {
    pub fn new(n: usize, h: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGrid(format!("N = {n} must be at least 2")));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidGrid(format!("h = {h} must be positive")));
        }
        Ok(Self { n, h })
    }

    pub fn cells(&self) -> usize {
        self.n * self.n * self.n
    }

    /// Rows of the vector-field space, `3 N^3`.
    pub fn field_dim(&self) -> usize {
        3 * self.cells()
    }

    fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.n * (j + self.n * k)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteCurl<T: Real> {
    pub k: ComplexMatrix<T>,
    /// Discrete gradient, the column stack `(Dx; Dy; Dz)`.
    pub grad: ComplexMatrix<T>,
    pub rank: usize,
    /// Smallest nonzero singular value; `None` when `K = 0`.
    pub sigma_min_pos: Option<T>,
}

/// Central periodic difference along one axis (0 = x, 1 = y, 2 = z).
pub fn central_difference<T: Real>(spec: &GridSpec, axis: usize) -> ComplexMatrix<T> {
    let n = spec.n;
    let cells = spec.cells();
    let w = T::lit(1.0 / (2.0 * spec.h));
    let mut d = DMatrix::zeros(cells, cells);
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                let row = spec.index(i, j, k);
                let mut fwd = [i, j, k];
                let mut bwd = [i, j, k];
                fwd[axis] = (fwd[axis] + 1) % n;
                bwd[axis] = (bwd[axis] + n - 1) % n;
                d[(row, spec.index(fwd[0], fwd[1], fwd[2]))] += re(w);
                d[(row, spec.index(bwd[0], bwd[1], bwd[2]))] -= re(w);
            }
        }
    }
    d
}

pub fn build_curl<T: Real>(spec: &GridSpec, tol: &Tolerances) -> Result<DiscreteCurl<T>> {
    build_curl_with_limit(spec, tol, DEFAULT_DENSE_LIMIT)
}

/// Assembles `K = [[0, -Dz, Dy], [Dz, 0, -Dx], [-Dy, Dx, 0]]` together with
/// its closed-range data.
pub fn build_curl_with_limit<T: Real>(
    spec: &GridSpec,
    tol: &Tolerances,
    dense_limit: usize,
) -> Result<DiscreteCurl<T>> {
    let (k, grad) = curl_operators::<T>(spec, dense_limit)?;
    let sigma = linalg::singular_values(&k);
    let floor = sigma.first().map_or(T::zero(), |&s| s * T::lit(tol.rank_rel_tol));
    let positive: Vec<T> = sigma.into_iter().filter(|&s| s > T::zero() && s >= floor).collect();
    Ok(DiscreteCurl {
        k,
        grad,
        rank: positive.len(),
        sigma_min_pos: positive.last().copied(),
    })
}

/// The curl `K` and gradient `[Dx; Dy; Dz]` without any factorization.
pub fn curl_operators<T: Real>(
    spec: &GridSpec,
    dense_limit: usize,
) -> Result<(ComplexMatrix<T>, ComplexMatrix<T>)> {
    let spec = GridSpec::new(spec.n, spec.h)?;
    let rows = spec.field_dim();
    if rows > dense_limit {
        return Err(Error::GridTooLarge {
            rows,
            limit: dense_limit,
        });
    }
    let m = spec.cells();
    let dx = central_difference::<T>(&spec, 0);
    let dy = central_difference::<T>(&spec, 1);
    let dz = central_difference::<T>(&spec, 2);
    let mut k = linalg::zeros::<T>(rows, rows);
    let blocks: [[Option<(&ComplexMatrix<T>, bool)>; 3]; 3] = [
        [None, Some((&dz, true)), Some((&dy, false))],
        [Some((&dz, false)), None, Some((&dx, true))],
        [Some((&dy, true)), Some((&dx, false)), None],
    ];
    for (bi, row) in blocks.iter().enumerate() {
        for (bj, entry) in row.iter().enumerate() {
            if let Some((d, negate)) = entry {
                let block = if *negate { -(*d) } else { (*d).clone() };
                k.view_mut((bi * m, bj * m), (m, m)).copy_from(&block);
            }
        }
    }
    let mut grad = linalg::zeros::<T>(rows, m);
    grad.view_mut((0, 0), (m, m)).copy_from(&dx);
    grad.view_mut((m, 0), (m, m)).copy_from(&dy);
    grad.view_mut((2 * m, 0), (m, m)).copy_from(&dz);
    Ok((k, grad))
}

/// Material coefficient: one value everywhere, a per-cell profile applied to
/// all three field components, or a full per-component diagonal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Material {
    Uniform(f64),
    Cells(Vec<f64>),
    Components(Vec<f64>),
}

impl Material {
    fn diagonal<T: Real>(&self, spec: &GridSpec, name: &'static str) -> Result<ComplexMatrix<T>> {
        let rows = spec.field_dim();
        let cells = spec.cells();
        let values: Vec<f64> = match self {
            Material::Uniform(v) => vec![*v; rows],
            Material::Cells(p) if p.len() == cells => (0..rows).map(|i| p[i % cells]).collect(),
            Material::Components(p) if p.len() == rows => p.clone(),
            Material::Cells(p) | Material::Components(p) => {
                return Err(crate::error::dim_mismatch(
                    name,
                    format!("{cells} cell values or {rows} component values"),
                    p.len(),
                ))
            }
        };
        Ok(DMatrix::from_diagonal(&ComplexVector::from_iterator(
            rows,
            values.into_iter().map(|v| re(T::lit(v))),
        )))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Materials {
    pub eps: Material,
    pub mu: Material,
    pub sigma: Material,
}

impl Materials {
    pub fn uniform(eps: f64, mu: f64, sigma: f64) -> Self {
        Self {
            eps: Material::Uniform(eps),
            mu: Material::Uniform(mu),
            sigma: Material::Uniform(sigma),
        }
    }
}

/// `alpha = eps`, `beta = mu`, `gamma = sigma`, `C = K`, validated.
pub fn build_maxwell_system<T: Real>(
    spec: &GridSpec,
    materials: &Materials,
    tol: &Tolerances,
    dense_limit: usize,
) -> Result<BlockSystem<T>> {
    let (k, _) = curl_operators::<T>(spec, dense_limit)?;
    validate_system(
        materials.eps.diagonal(spec, "eps")?,
        materials.mu.diagonal(spec, "mu")?,
        materials.sigma.diagonal(spec, "sigma")?,
        k,
        tol,
    )
}

#[derive(Debug, Clone)]
pub struct MaxwellReport<T: Real> {
    pub certificate: StabilityCertificate<T>,
    pub spectral_abscissa: T,
    pub sweep_axis: ResolventSweepReport,
    pub sweep_shifted: ResolventSweepReport,
    pub trajectory: TrajectoryTrace<T>,
    /// Distance moved by projecting the random magnetic field onto the admissible set.
    pub admissible_residual: T,
    pub seed: u64,
    pub fitted_rate_ok: bool,
    pub sweeps_clean: bool,
}

/// Settings of the audits run by [`maxwell_report`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportSettings {
    pub lambda_max: f64,
    pub sweep_points: usize,
    pub t_end: f64,
    pub samples: usize,
    pub seed: u64,
    pub dense_limit: usize,
}

impl Default for ReportSettings {
    fn default() -> Self {
        Self {
            lambda_max: 50.0,
            sweep_points: 401,
            t_end: 20.0,
            samples: 801,
            seed: 7,
            dense_limit: DEFAULT_DENSE_LIMIT,
        }
    }
}

/// Certificate, resolvent sweeps at `Re z = 0` and `Re z = -delta_cert/2`,
/// and a trajectory from seeded random admissible initial data.
pub fn maxwell_report<T: Real>(
    spec: &GridSpec,
    materials: &Materials,
    tol: &Tolerances,
    settings: &ReportSettings,
) -> Result<MaxwellReport<T>> {
    let sys = build_maxwell_system::<T>(spec, materials, tol, settings.dense_limit)?;
    let ns = normalize_system(&sys, tol)?;
    let frames = decompose(&ns.d, tol);
    let certificate = certify_normalized(&ns, &frames, tol, &CertificateOptions::default())?;
    let restricted = restricted_generator(&ns, &frames);
    let spectral_abscissa = spectral_abscissa(&restricted)?;
    let lmax = T::lit(settings.lambda_max);
    let sweep_axis = gp_sweep(&restricted, T::zero(), lmax, settings.sweep_points)?;
    let sweep_shifted = gp_sweep(
        &restricted,
        -certificate.delta_cert / T::lit(2.0),
        lmax,
        settings.sweep_points,
    )?;

    let n = spec.field_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let mut draw = |len: usize| -> ComplexVector<T> {
        ComplexVector::from_iterator(
            len,
            (0..len).map(|_| {
                let x: f64 = StandardNormal.sample(&mut rng);
                re(T::lit(x))
            }),
        )
    };
    let u0 = draw(n);
    let q0 = draw(n);
    let original_frames = decompose(sys.coupling(), tol);
    let (q_adm, admissible_residual) = admissible_initial(sys.beta(), &original_frames, &q0, tol)?;
    let state0 = map_state(&ns, &linalg::concat(&u0, &q_adm), Direction::Forward)?;
    let generator = assemble_generator(&ns);
    let trajectory = simulate(&generator, &state0, T::lit(settings.t_end), settings.samples)?;
    let fitted_rate_ok = trajectory
        .fitted_rate
        .map_or(false, |r| r >= certificate.delta_cert - T::lit(1e-6));
    let sweeps_clean = sweep_axis.singular_points.is_empty() && sweep_shifted.singular_points.is_empty();
    Ok(MaxwellReport {
        certificate,
        spectral_abscissa,
        sweep_axis,
        sweep_shifted,
        trajectory,
        admissible_residual,
        seed: settings.seed,
        fitted_rate_ok,
        sweeps_clean,
    })
}
