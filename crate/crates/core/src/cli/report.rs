//! Report construction for each subcommand. Reports are plain serde
//! structures; every number in them is finite (optional quantities are
//! `null` rather than NaN).

use std::path::Path;

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::problem::{from_json_matrix, to_json_matrix, JsonMatrix, ProblemError, ProblemFile};
use super::CliError;
use crate::certificate::{
    certify_normalized, formulas, CertificateOptions, SmallFrequencyAudit, StabilityCertificate,
};
use crate::helmholtz::{
    decompose, decoupling_transforms, reduced_operator, three_block_form, HelmholtzFrames,
};
use crate::linalg;
use crate::model::{hermitian_min_eig, BlockSystem, Tolerances};
use crate::normalize::{map_state, normalize_system, Direction, NormalizedSystem};
use crate::scalar::{ComplexMatrix, ComplexVector};
use crate::verify::{
    admissible_initial, assemble_generator, check_m_dissipative, gp_sweep, restricted_generator,
    simulate as run_simulation, spectral_abscissa, DissipativityReport, ResolventSweepReport,
    TrajectoryTrace,
};

pub const REPORT_SCHEMA_VERSION: u32 = 1;
/// Slack on `spectral_abscissa <= -delta_cert`.
pub const ABSCISSA_SLACK: f64 = 1e-9;
/// Relative slack on `sweep max <= M_total`.
pub const SWEEP_REL_SLACK: f64 = 1e-6;
/// Slack on `fitted_rate >= delta_cert`.
pub const RATE_SLACK: f64 = 1e-6;
/// Relative slack on norm increases between samples.
pub const MONOTONE_REL_SLACK: f64 = 1e-12;
pub const REDUCE_REL_TOL: f64 = 1e-10;

pub const CERTIFY_LAMBDA_MAX: f64 = 50.0;
pub const CERTIFY_SWEEP_POINTS: usize = 401;
pub const CERTIFY_SAMPLES: usize = 801;

fn finite_or_null(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

fn to_pretty<S: Serialize>(s: &S) -> String {
    serde_json::to_string_pretty(s).expect("reports always serialize")
}

#[derive(Debug, Clone, Serialize)]
pub struct Dimensions {
    pub n0: usize,
    pub n1: usize,
    pub rank: usize,
    pub kernel_dim: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateSection {
    pub delta_cert: f64,
    #[serde(rename = "M_total")]
    pub m_total: f64,
    pub working_abscissa: f64,
    pub c: f64,
    pub gamma_norm: f64,
    pub c_eff: f64,
    pub g_eff: f64,
    pub kernel_bound: Option<f64>,
    pub transform_bound: f64,
    pub kappa: f64,
    pub sigma_min_pos: Option<f64>,
    pub c_inv_norm: Option<f64>,
    pub delta_star: Option<f64>,
    pub p_star: Option<f64>,
    pub c_tilde: Option<f64>,
    pub v_term: Option<f64>,
    pub d: Option<f64>,
    #[serde(rename = "M_inner")]
    pub m_inner: Option<f64>,
    pub grid_steps: Option<usize>,
    pub range_trivial: bool,
}

impl From<&StabilityCertificate<f64>> for CertificateSection {
    fn from(c: &StabilityCertificate<f64>) -> Self {
        let inner = c.inner.as_ref();
        Self {
            delta_cert: c.delta_cert,
            m_total: c.m_total,
            working_abscissa: c.working_abscissa,
            c: c.c,
            gamma_norm: c.gamma_norm,
            c_eff: c.c_eff,
            g_eff: c.g_eff,
            kernel_bound: c.kernel_bound,
            transform_bound: c.transform_bound,
            kappa: c.kappa,
            sigma_min_pos: c.sigma_min_pos,
            c_inv_norm: inner.map(|i| i.c_inv_norm),
            delta_star: inner.map(|i| i.delta_star),
            p_star: inner.map(|i| i.p_star),
            c_tilde: inner.map(|i| i.c_tilde),
            v_term: inner.map(|i| i.v_term),
            d: inner.map(|i| i.d),
            m_inner: inner.map(|i| i.m_inner),
            grid_steps: inner.map(|i| i.grid_steps),
            range_trivial: c.range_trivial,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Formulas {
    pub u_term: &'static str,
    pub v_term: &'static str,
    pub d: &'static str,
    #[serde(rename = "M_inner")]
    pub m_inner: &'static str,
    pub working_abscissa: &'static str,
    pub c_eff: &'static str,
    pub g_eff: &'static str,
    pub kernel_bound: &'static str,
    pub transform_bound: &'static str,
    pub delta_cert: &'static str,
    #[serde(rename = "M_total")]
    pub m_total: &'static str,
    pub kappa: &'static str,
}

impl Default for Formulas {
    fn default() -> Self {
        Self {
            u_term: formulas::U_TERM,
            v_term: formulas::V_TERM,
            d: formulas::D,
            m_inner: formulas::M_INNER,
            working_abscissa: formulas::WORKING_ABSCISSA,
            c_eff: formulas::C_EFF,
            g_eff: formulas::G_EFF,
            kernel_bound: formulas::KERNEL_BOUND,
            transform_bound: formulas::TRANSFORM_BOUND,
            delta_cert: formulas::DELTA_CERT,
            m_total: formulas::M_TOTAL,
            kappa: formulas::KAPPA,
        }
    }
}

/// Sweep along `Re z = abscissa`, with the raw arrays for plotting.
#[derive(Debug, Clone, Serialize)]
pub struct SweepSection {
    pub abscissa: f64,
    pub lambda_max: f64,
    pub points: usize,
    pub max_norm: f64,
    pub argmax_lambda: f64,
    pub singular_points: Vec<f64>,
    pub lambdas: Vec<f64>,
    /// `null` at singular points.
    pub norms: Vec<Option<f64>>,
}

impl SweepSection {
    fn new(r: ResolventSweepReport, lambda_max: f64) -> Self {
        Self {
            abscissa: r.abscissa,
            lambda_max,
            points: r.lambdas.len(),
            max_norm: r.max_norm,
            argmax_lambda: r.argmax_lambda,
            singular_points: r.singular_points,
            lambdas: r.lambdas,
            norms: r.norms,
        }
    }
}

/// Trajectory summary; norms are energy norms (normalized variables).
#[derive(Debug, Clone, Serialize)]
pub struct TrajectorySection {
    pub t_end: f64,
    pub samples: usize,
    pub seed: Option<u64>,
    pub method: String,
    pub admissible_residual: f64,
    pub initial_norm: f64,
    pub final_norm: f64,
    pub max_increase: f64,
    pub fitted_rate: Option<f64>,
    pub fit_window: Option<(f64, f64)>,
    pub times: Vec<f64>,
    pub state_norms: Vec<f64>,
}

impl TrajectorySection {
    fn new(trace: &TrajectoryTrace<f64>, seed: Option<u64>, admissible_residual: f64) -> Self {
        Self {
            t_end: *trace.times.last().unwrap_or(&0.0),
            samples: trace.times.len(),
            seed,
            method: format!("{:?}", trace.method),
            admissible_residual,
            initial_norm: trace.state_norms.first().copied().unwrap_or(0.0),
            final_norm: trace.state_norms.last().copied().unwrap_or(0.0),
            max_increase: trace.max_increase(),
            fitted_rate: trace.fitted_rate.and_then(finite_or_null),
            fit_window: trace.fit_window,
            times: trace.times.clone(),
            state_norms: trace.state_norms.clone(),
        }
    }

    fn monotone(&self) -> bool {
        self.max_increase <= MONOTONE_REL_SLACK * self.initial_norm.max(f64::MIN_POSITIVE)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleComparison {
    /// Spectral abscissa of the generator restricted to `H0 x ran(D)`.
    pub spectral_abscissa: f64,
    /// `-spectral_abscissa - delta_cert`; nonnegative when the certificate is sound.
    pub abscissa_margin: f64,
    pub fitted_rate: Option<f64>,
    /// `fitted_rate - delta_cert`.
    pub rate_margin: Option<f64>,
    pub dissipativity: DissipativityReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub name: &'static str,
    pub passed: bool,
    pub rule: String,
}

fn verdict(name: &'static str, passed: bool, rule: impl Into<String>) -> Verdict {
    Verdict {
        name,
        passed,
        rule: rule.into(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CertifyReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub tolerances: Tolerances,
    pub dimensions: Dimensions,
    pub certificate: CertificateSection,
    pub formulas: Formulas,
    pub audit: SmallFrequencyAudit,
    pub sweeps: Vec<SweepSection>,
    pub trajectory: TrajectorySection,
    pub oracles: OracleComparison,
    pub verdicts: Vec<Verdict>,
    pub all_pass: bool,
}

impl CertifyReport {
    pub fn to_json(&self) -> String {
        to_pretty(self)
    }
}

struct Prepared {
    sys: BlockSystem<f64>,
    tol: Tolerances,
    ns: NormalizedSystem<f64>,
    frames: HelmholtzFrames<f64>,
}

fn prepare(file: &ProblemFile) -> Result<Prepared, CliError> {
    let tol = file.tolerances();
    tol.validate()?;
    let sys = file.system()?;
    let ns = normalize_system(&sys, &tol)?;
    let frames = decompose(&ns.d, &tol);
    Ok(Prepared { sys, tol, ns, frames })
}

fn dimensions(p: &Prepared) -> Dimensions {
    Dimensions {
        n0: p.sys.n0(),
        n1: p.sys.n1(),
        rank: p.frames.rank,
        kernel_dim: p.frames.kernel_dim(),
    }
}

fn random_vector(rng: &mut ChaCha8Rng, len: usize) -> ComplexVector<f64> {
    ComplexVector::from_iterator(
        len,
        (0..len).map(|_| {
            let a: f64 = StandardNormal.sample(rng);
            let b: f64 = StandardNormal.sample(rng);
            Complex::new(a, b)
        }),
    )
}

/// Seeded Gaussian initial state `(u0, v0)` in original variables.
pub fn seeded_initial_state(n0: usize, n1: usize, seed: u64) -> ComplexVector<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = random_vector(&mut rng, n0);
    let v = random_vector(&mut rng, n1);
    linalg::concat(&u, &v)
}

/// Projects the second component onto the admissible set, maps to
/// normalized variables and simulates the full generator.
fn admissible_run(
    p: &Prepared,
    state: &ComplexVector<f64>,
    t_end: f64,
    samples: usize,
) -> Result<(TrajectoryTrace<f64>, f64), CliError> {
    let (n0, n1) = (p.sys.n0(), p.sys.n1());
    if state.len() != n0 + n1 {
        return Err(crate::error::dim_mismatch("initial state", n0 + n1, state.len()).into());
    }
    let (u0, v0) = linalg::split(state, n0);
    let original_frames = decompose(p.sys.coupling(), &p.tol);
    let (v_adm, residual) = admissible_initial(p.sys.beta(), &original_frames, &v0, &p.tol)?;
    let start = map_state(&p.ns, &linalg::concat(&u0, &v_adm), Direction::Forward)?;
    let trace = run_simulation(&assemble_generator(&p.ns), &start, t_end, samples)?;
    Ok((trace, residual))
}

/// Simulation horizon for the certify audit: about twelve e-foldings of the
/// slowest mode, capped so long runs stay affordable.
pub fn auto_t_end(spectral_abscissa: f64) -> f64 {
    let rate = spectral_abscissa.abs().max(1e-3);
    (12.0 / rate).min(400.0)
}

pub fn certify(file: &ProblemFile, seed: u64) -> Result<CertifyReport, CliError> {
    let p = prepare(file)?;
    let cert = certify_normalized(&p.ns, &p.frames, &p.tol, &CertificateOptions::default())?;
    let restricted = restricted_generator(&p.ns, &p.frames);
    let sa = spectral_abscissa(&restricted)?;
    let dissipativity = check_m_dissipative(&assemble_generator(&p.ns))?;

    let sweeps = [0.0, -cert.delta_cert / 2.0]
        .into_iter()
        .map(|a| {
            gp_sweep(&restricted, a, CERTIFY_LAMBDA_MAX, CERTIFY_SWEEP_POINTS)
                .map(|r| SweepSection::new(r, CERTIFY_LAMBDA_MAX))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let state = seeded_initial_state(p.sys.n0(), p.sys.n1(), seed);
    let (trace, residual) = admissible_run(&p, &state, auto_t_end(sa), CERTIFY_SAMPLES)?;
    let trajectory = TrajectorySection::new(&trace, Some(seed), residual);

    let bound = cert.m_total * (1.0 + SWEEP_REL_SLACK);
    let mut verdicts = vec![
        verdict(
            "small_frequency_audit",
            cert.audit.passed,
            "audit.passed",
        ),
        verdict(
            "m_dissipative",
            dissipativity.dissipative && dissipativity.shifted_invertible,
            "oracles.dissipativity.dissipative && shifted_invertible",
        ),
        verdict(
            "spectral_abscissa",
            sa <= -cert.delta_cert + ABSCISSA_SLACK,
            format!("spectral_abscissa <= -delta_cert + {ABSCISSA_SLACK:e}"),
        ),
    ];
    for (name, s) in ["sweep_axis", "sweep_shifted"].into_iter().zip(&sweeps) {
        verdicts.push(verdict(
            name,
            s.singular_points.is_empty() && s.max_norm <= bound,
            format!("no singular points and max_norm <= M_total*(1 + {SWEEP_REL_SLACK:e})"),
        ));
    }
    verdicts.push(verdict(
        "fitted_rate",
        trajectory
            .fitted_rate
            .is_some_and(|r| r >= cert.delta_cert - RATE_SLACK),
        format!("fitted_rate >= delta_cert - {RATE_SLACK:e}"),
    ));
    verdicts.push(verdict(
        "energy_monotone",
        trajectory.monotone(),
        format!("max_increase <= {MONOTONE_REL_SLACK:e} * initial_norm"),
    ));
    let all_pass = verdicts.iter().all(|v| v.passed);

    let oracles = OracleComparison {
        spectral_abscissa: sa,
        abscissa_margin: -sa - cert.delta_cert,
        fitted_rate: trajectory.fitted_rate,
        rate_margin: trajectory.fitted_rate.map(|r| r - cert.delta_cert),
        dissipativity,
    };
    Ok(CertifyReport {
        schema_version: REPORT_SCHEMA_VERSION,
        command: "certify",
        tolerances: p.tol,
        dimensions: dimensions(&p),
        certificate: CertificateSection::from(&cert),
        formulas: Formulas::default(),
        audit: cert.audit.clone(),
        sweeps,
        trajectory,
        oracles,
        verdicts,
        all_pass,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub dimensions: Dimensions,
    /// The sweep runs on the generator restricted to `H0 x ran(D)`.
    pub generator: &'static str,
    pub sweep: SweepSection,
    /// Certificate bound when the certificate exists and the abscissa lies
    /// inside its half-plane.
    #[serde(rename = "M_total")]
    pub m_total: Option<f64>,
    pub delta_cert: Option<f64>,
    pub verdicts: Vec<Verdict>,
    pub all_pass: bool,
}

impl SweepReport {
    pub fn to_json(&self) -> String {
        to_pretty(self)
    }
}

pub fn sweep(
    file: &ProblemFile,
    abscissa: f64,
    lambda_max: f64,
    points: usize,
) -> Result<SweepReport, CliError> {
    if !abscissa.is_finite() {
        return Err(crate::error::Error::ParameterOutOfRange {
            name: "abscissa",
            value: abscissa,
        }
        .into());
    }
    if !(lambda_max.is_finite() && lambda_max > 0.0) {
        return Err(crate::error::Error::ParameterOutOfRange {
            name: "lambda_max",
            value: lambda_max,
        }
        .into());
    }
    let p = prepare(file)?;
    let restricted = restricted_generator(&p.ns, &p.frames);
    let sweep = SweepSection::new(gp_sweep(&restricted, abscissa, lambda_max, points)?, lambda_max);
    let cert = certify_normalized(&p.ns, &p.frames, &p.tol, &CertificateOptions::default()).ok();
    let in_half_plane = cert.as_ref().filter(|c| abscissa > -c.delta_cert);

    let mut verdicts = vec![verdict(
        "no_singular_points",
        sweep.singular_points.is_empty(),
        "singular_points is empty",
    )];
    if let Some(c) = in_half_plane {
        verdicts.push(verdict(
            "within_certificate",
            sweep.max_norm <= c.m_total * (1.0 + SWEEP_REL_SLACK),
            format!("max_norm <= M_total*(1 + {SWEEP_REL_SLACK:e})"),
        ));
    }
    let all_pass = verdicts.iter().all(|v| v.passed);
    Ok(SweepReport {
        schema_version: REPORT_SCHEMA_VERSION,
        command: "sweep",
        dimensions: dimensions(&p),
        generator: "restricted",
        sweep,
        m_total: in_half_plane.map(|c| c.m_total),
        delta_cert: cert.map(|c| c.delta_cert),
        verdicts,
        all_pass,
    })
}

/// Contents of a `--u0` file: the full state `(u0, v0)` in original variables.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InitialStateFile {
    pub u0: Vec<[f64; 2]>,
}

pub fn read_initial_state(path: &Path) -> Result<ComplexVector<f64>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| ProblemError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let file: InitialStateFile = serde_json::from_str(&text).map_err(ProblemError::Parse)?;
    let v = ComplexVector::from_iterator(file.u0.len(), file.u0.iter().map(|[a, b]| Complex::new(*a, *b)));
    if !v.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        return Err(crate::error::Error::NonFinite("u0").into());
    }
    Ok(v)
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulateReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub dimensions: Dimensions,
    pub trajectory: TrajectorySection,
    pub verdicts: Vec<Verdict>,
    pub all_pass: bool,
}

impl SimulateReport {
    pub fn to_json(&self) -> String {
        to_pretty(self)
    }
}

/// With `initial = None` the initial state is drawn from `seed`.
pub fn simulate(
    file: &ProblemFile,
    t_end: f64,
    samples: usize,
    initial: Option<ComplexVector<f64>>,
    seed: u64,
) -> Result<SimulateReport, CliError> {
    let p = prepare(file)?;
    let (state, seed) = match initial {
        Some(s) => (s, None),
        None => (seeded_initial_state(p.sys.n0(), p.sys.n1(), seed), Some(seed)),
    };
    let (trace, residual) = admissible_run(&p, &state, t_end, samples)?;
    let trajectory = TrajectorySection::new(&trace, seed, residual);
    let verdicts = vec![
        verdict(
            "energy_monotone",
            trajectory.monotone(),
            format!("max_increase <= {MONOTONE_REL_SLACK:e} * initial_norm"),
        ),
        verdict(
            "finite_states",
            trajectory.state_norms.iter().all(|x| x.is_finite()),
            "every state norm finite",
        ),
    ];
    let all_pass = verdicts.iter().all(|v| v.passed);
    Ok(SimulateReport {
        schema_version: REPORT_SCHEMA_VERSION,
        command: "simulate",
        dimensions: dimensions(&p),
        trajectory,
        verdicts,
        all_pass,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct FramesSection {
    pub rank: usize,
    pub singular_values: Vec<f64>,
    pub sigma_min_pos: Option<f64>,
    pub iota0: JsonMatrix,
    pub kappa0: JsonMatrix,
    pub iota1: JsonMatrix,
    pub kappa1: JsonMatrix,
    pub c_tilde: JsonMatrix,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReduceReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub z: [f64; 2],
    /// Coercivity constant of the normalized damping.
    pub c: f64,
    pub dimensions: Dimensions,
    /// All matrices act in normalized variables.
    pub frames: FramesSection,
    pub three_block_form: JsonMatrix,
    pub t1: JsonMatrix,
    pub t1_inv: JsonMatrix,
    pub t2: JsonMatrix,
    pub t2_inv: JsonMatrix,
    pub schur_block: JsonMatrix,
    pub kernel_block: JsonMatrix,
    pub reduced_operator: JsonMatrix,
    pub schur_coercivity: f64,
    pub schur_coercivity_floor: f64,
    pub decoupling_residual: f64,
    pub t1_inverse_residual: f64,
    pub t2_inverse_residual: f64,
    pub verdicts: Vec<Verdict>,
    pub all_pass: bool,
}

impl ReduceReport {
    pub fn to_json(&self) -> String {
        to_pretty(self)
    }
}

fn inverse_residual(a: &ComplexMatrix<f64>, b: &ComplexMatrix<f64>) -> f64 {
    let n = a.nrows();
    linalg::spectral_norm(&(a * b - linalg::identity::<f64>(n)))
}

pub fn reduce(file: &ProblemFile, z: Complex<f64>) -> Result<ReduceReport, CliError> {
    let p = prepare(file)?;
    let c = p.ns.c_gamma_tilde;
    let gamma = &p.ns.gamma_tilde;
    let blocks = decoupling_transforms(gamma, &p.frames, z, c, &p.tol)?;
    let m = three_block_form(gamma, &p.frames, z)?;
    let reduced = reduced_operator(&blocks, &p.frames);
    let kernel_block = linalg::shift(&blocks.gamma2, z);

    let target = linalg::block_diag(&reduced, &kernel_block);
    let scale = linalg::spectral_norm(&m).max(1.0);
    let decoupling_residual = linalg::spectral_norm(&(&blocks.t1 * &m * &blocks.t2 - target)) / scale;
    let t1_res = inverse_residual(&blocks.t1, &blocks.t1_inv);
    let t2_res = inverse_residual(&blocks.t2, &blocks.t2_inv);

    let (schur_coercivity, floor) = if p.frames.rank > 0 {
        let h = hermitian_min_eig(&blocks.gamma1_z)?;
        (h, (z.re + c).min(c))
    } else {
        (0.0, 0.0)
    };
    let verdicts = vec![
        verdict(
            "decoupling",
            decoupling_residual <= REDUCE_REL_TOL,
            format!("|T1 M T2 - diag(reduced, kernel)| / max(|M|, 1) <= {REDUCE_REL_TOL:e}"),
        ),
        verdict(
            "transforms_invertible",
            t1_res <= REDUCE_REL_TOL && t2_res <= REDUCE_REL_TOL,
            format!("|T T^-1 - I| <= {REDUCE_REL_TOL:e} for T1 and T2"),
        ),
        verdict(
            "schur_coercive",
            schur_coercivity >= floor - REDUCE_REL_TOL,
            format!("schur_coercivity >= min(Re z + c, c) - {REDUCE_REL_TOL:e}"),
        ),
    ];
    let all_pass = verdicts.iter().all(|v| v.passed);
    let f = &p.frames;
    Ok(ReduceReport {
        schema_version: REPORT_SCHEMA_VERSION,
        command: "reduce",
        z: [z.re, z.im],
        c,
        dimensions: dimensions(&p),
        frames: FramesSection {
            rank: f.rank,
            singular_values: f.singular_values.clone(),
            sigma_min_pos: f.sigma_min_pos,
            iota0: to_json_matrix(&f.iota0),
            kappa0: to_json_matrix(&f.kappa0),
            iota1: to_json_matrix(&f.iota1),
            kappa1: to_json_matrix(&f.kappa1),
            c_tilde: to_json_matrix(&f.c_tilde),
        },
        three_block_form: to_json_matrix(&m),
        t1: to_json_matrix(&blocks.t1),
        t1_inv: to_json_matrix(&blocks.t1_inv),
        t2: to_json_matrix(&blocks.t2),
        t2_inv: to_json_matrix(&blocks.t2_inv),
        schur_block: to_json_matrix(&blocks.gamma1_z),
        kernel_block: to_json_matrix(&kernel_block),
        reduced_operator: to_json_matrix(&reduced),
        schur_coercivity,
        schur_coercivity_floor: floor,
        decoupling_residual,
        t1_inverse_residual: t1_res,
        t2_inverse_residual: t2_res,
        verdicts,
        all_pass,
    })
}

/// Re-reads a matrix from report JSON (used by tests and tooling).
pub fn matrix_from_report(name: &'static str, rows: &JsonMatrix) -> Result<ComplexMatrix<f64>, CliError> {
    Ok(from_json_matrix(name, rows, 0)?)
}
