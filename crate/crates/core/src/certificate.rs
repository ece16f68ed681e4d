//! Explicit stability constants.
//!
//! For an invertible coupling the resolvent bound comes from a shifted
//! change of variables `u -> (1 + delta/z) u`, whose damping block satisfies
//!
//! ```text
//! Re(...) >= Re z + min{ c - delta (1 + ((|g| + delta) |C^-1|)^2 / (2p)),  delta (1 - p/2) }
//! ```
//!
//! for any Young parameter `0 < p < 2`. With `d = min{..}/2` the resolvent is
//! bounded by `(2/d)((1 + |g| + delta)|C^-1| + 2)` on `Re z > -d`.
//!
//! The general case eliminates `ker(C)` first (see [`crate::helmholtz`]) and
//! chains the bounds of the elimination transforms, the kernel block and the
//! reduced invertible problem.

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::helmholtz::{decompose, HelmholtzFrames};
use crate::model::{operator_norm, BlockSystem, Tolerances};
use crate::normalize::{normalize_system, NormalizedSystem};
use crate::scalar::{ComplexMatrix, Real};
use crate::verify::{resolvent_norm, restricted_generator};

/// Grid points per axis in the `(delta, p)` search.
pub const DEFAULT_GRID_STEPS: usize = 2000;
/// Points per axis of the small-|z| audit rectangle.
pub const AUDIT_GRID: usize = 41;
pub const MAX_HALVINGS: usize = 20;

/// Human-readable formulas embedded in reports.
pub mod formulas {
    pub const U_TERM: &str = "u_term = c - delta*(1 + ((gamma_norm + delta)*C_inv_norm)^2/(2p))";
    pub const V_TERM: &str = "v_term = delta*(1 - p/2)";
    pub const D: &str = "d = min(u_term, v_term)/2 at (delta*, p*)";
    pub const M_INNER: &str = "M_inner = (2/d)*((1 + gamma_norm + delta*)*C_inv_norm + 2)";
    pub const WORKING_ABSCISSA: &str = "a0 = c/4";
    pub const C_EFF: &str = "c_eff = 3c/4 if ker(D) nontrivial else c";
    pub const G_EFF: &str = "g_eff = |g| + (4/3)|g|^2/c if ker(D) nontrivial else |g|";
    pub const KERNEL_BOUND: &str = "kernel_bound = 1/(c - a0) = 4/(3c)";
    pub const TRANSFORM_BOUND: &str = "T_max = 1 + |g|/(c - a0) = 1 + (4/3)|g|/c if ker(D) nontrivial else 1";
    pub const DELTA_CERT: &str = "delta_cert = min(a0, d), halved while the small-|z| audit fails";
    pub const M_TOTAL: &str = "M_total = T_max^2 * max(M_inner, kernel_bound) * kappa^2";
    pub const KAPPA: &str = "kappa = max(|sqrt a|, |sqrt b|) * max(|sqrt a^-1|, |sqrt b^-1|)";
}

fn check_positive<T: Real>(name: &'static str, value: T) -> Result<()> {
    if value > T::zero() && value.is_finite_value() {
        Ok(())
    } else {
        Err(Error::ParameterOutOfRange {
            name,
            value: value.as_f64(),
        })
    }
}

/// Coercivity constants `(u_term, v_term)` of the shifted damping block.
pub fn damping_lower_bound<T: Real>(
    c: T,
    gamma_norm: T,
    c_inv_norm: T,
    delta: T,
    p: T,
) -> Result<(T, T)> {
    check_positive("c", c)?;
    check_positive("delta", delta)?;
    if !(gamma_norm >= T::zero()) {
        return Err(Error::ParameterOutOfRange {
            name: "gamma_norm",
            value: gamma_norm.as_f64(),
        });
    }
    if !(c_inv_norm >= T::zero()) {
        return Err(Error::ParameterOutOfRange {
            name: "C_inv_norm",
            value: c_inv_norm.as_f64(),
        });
    }
    let two = T::lit(2.0);
    if !(p > T::zero() && p < two) {
        return Err(Error::ParameterOutOfRange {
            name: "p",
            value: p.as_f64(),
        });
    }
    Ok(shift_terms(c, gamma_norm, c_inv_norm, delta, p))
}

#[inline]
fn shift_terms<T: Real>(c: T, gamma_norm: T, c_inv_norm: T, delta: T, p: T) -> (T, T) {
    let two = T::lit(2.0);
    let coupling = (gamma_norm + delta) * c_inv_norm;
    let u_term = c - delta * (T::one() + coupling * coupling / (two * p));
    let v_term = delta * (T::one() - p / two);
    (u_term, v_term)
}

/// Optimal `(delta, p)` on the search grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShiftChoice<T: Real> {
    pub delta_star: T,
    pub p_star: T,
    pub c_tilde: T,
    pub v_term: T,
    pub d: T,
}

/// The `delta` axis: geometric in `(lo, c)` so that small shifts are
/// resolved finely. `lo` shrinks with the coupling strength, which keeps
/// `u_term > 0` reachable at the first grid point.
pub fn delta_grid<T: Real>(c: T, gamma_norm: T, c_inv_norm: T, steps: usize) -> Vec<T> {
    let strength = (gamma_norm + c) * c_inv_norm;
    let lo = c * T::lit(1e-6) / (T::one() + strength * strength);
    let hi = c * (T::one() - T::lit(1e-6));
    let ratio = (hi / lo).ln();
    (0..steps)
        .map(|i| {
            let s = if steps == 1 {
                T::zero()
            } else {
                T::from_count(i) / T::from_count(steps - 1)
            };
            lo * (ratio * s).exp()
        })
        .collect()
}

/// The `p` axis: uniform interior points of `(0, 2)`.
pub fn p_grid<T: Real>(steps: usize) -> Vec<T> {
    (1..=steps)
        .map(|j| T::lit(2.0) * T::from_count(j) / T::from_count(steps + 1))
        .collect()
}

/// Maximizes `d = min(u_term, v_term)/2` over the `(delta, p)` grid.
/// Ties keep the earliest point, i.e. the smaller `delta`.
pub fn optimize_shift<T: Real>(
    c: T,
    gamma_norm: T,
    c_inv_norm: T,
    grid_steps: usize,
) -> Result<ShiftChoice<T>> {
    if !(c > T::zero()) {
        return Err(Error::DegenerateProblem(format!("coercivity c = {c} must be positive")));
    }
    if !(c_inv_norm > T::zero()) || !c_inv_norm.is_finite_value() {
        return Err(Error::DegenerateProblem(format!(
            "|C^-1| = {c_inv_norm} must be positive and finite"
        )));
    }
    if !(gamma_norm >= T::zero()) {
        return Err(Error::ParameterOutOfRange {
            name: "gamma_norm",
            value: gamma_norm.as_f64(),
        });
    }
    if grid_steps < 1 {
        return Err(Error::ParameterOutOfRange {
            name: "grid_steps",
            value: 0.0,
        });
    }
    let half = T::lit(0.5);
    let deltas = delta_grid(c, gamma_norm, c_inv_norm, grid_steps);
    let ps = p_grid::<T>(grid_steps);
    let mut best: Option<ShiftChoice<T>> = None;
    for &delta in &deltas {
        for &p in &ps {
            let (u, v) = shift_terms(c, gamma_norm, c_inv_norm, delta, p);
            let d = half * u.min(v);
            if best.map_or(true, |b| d > b.d) {
                best = Some(ShiftChoice {
                    delta_star: delta,
                    p_star: p,
                    c_tilde: u,
                    v_term: v,
                    d,
                });
            }
        }
    }
    match best {
        Some(b) if b.d > T::zero() => Ok(b),
        _ => Err(Error::DegenerateProblem(
            "no admissible shift: u_term <= 0 on the whole grid".into(),
        )),
    }
}

/// Constants for the case of an invertible coupling operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InvertibleCaseCertificate<T: Real> {
    pub c: T,
    pub gamma_norm: T,
    pub c_inv_norm: T,
    pub delta_star: T,
    pub p_star: T,
    pub c_tilde: T,
    pub v_term: T,
    pub d: T,
    pub m_inner: T,
    pub grid_steps: usize,
}

pub fn invertible_certificate<T: Real>(
    c: T,
    gamma_norm: T,
    c_inv_norm: T,
) -> Result<InvertibleCaseCertificate<T>> {
    invertible_certificate_with_grid(c, gamma_norm, c_inv_norm, DEFAULT_GRID_STEPS)
}

pub fn invertible_certificate_with_grid<T: Real>(
    c: T,
    gamma_norm: T,
    c_inv_norm: T,
    grid_steps: usize,
) -> Result<InvertibleCaseCertificate<T>> {
    let s = optimize_shift(c, gamma_norm, c_inv_norm, grid_steps)?;
    let two = T::lit(2.0);
    let m_inner = two / s.d * ((T::one() + gamma_norm + s.delta_star) * c_inv_norm + two);
    Ok(InvertibleCaseCertificate {
        c,
        gamma_norm,
        c_inv_norm,
        delta_star: s.delta_star,
        p_star: s.p_star,
        c_tilde: s.c_tilde,
        v_term: s.v_term,
        d: s.d,
        m_inner,
        grid_steps,
    })
}

/// `1 / (re_z_floor + c)`, the bound on `|(z + k0* g k0)^-1|` for `Re z >= re_z_floor`.
pub fn kernel_block_bound<T: Real>(c: T, re_z_floor: T) -> Result<T> {
    check_positive("c", c)?;
    if re_z_floor <= -c {
        return Err(Error::HalfPlaneViolation {
            re_z: re_z_floor.as_f64(),
            floor: (-c).as_f64(),
        });
    }
    Ok(T::one() / (re_z_floor + c))
}

/// Outcome of the numeric resolvent check on the compact set near `z = 0`
/// that the analytic bound does not cover.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmallFrequencyAudit {
    pub grid_points_per_axis: usize,
    pub re_range: (f64, f64),
    pub im_range: (f64, f64),
    pub max_norm: f64,
    pub singular_points: usize,
    pub halvings: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertificateOptions {
    pub grid_steps: usize,
    pub audit_grid: usize,
    pub max_halvings: usize,
}

impl Default for CertificateOptions {
    fn default() -> Self {
        Self {
            grid_steps: DEFAULT_GRID_STEPS,
            audit_grid: AUDIT_GRID,
            max_halvings: MAX_HALVINGS,
        }
    }
}

/// Certified decay data for the full system.
///
/// The claim is: every `z` with `Re z > -delta_cert` lies in the resolvent
/// set of the normalized generator restricted to `H0 x ran(D)`, and
/// `|(z - B)^-1| <= m_total` for `Re z >= -delta_cert / 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityCertificate<T: Real> {
    pub delta_cert: T,
    pub m_total: T,
    pub working_abscissa: T,
    /// Coercivity of the normalized damping.
    pub c: T,
    pub gamma_norm: T,
    pub c_eff: T,
    pub g_eff: T,
    pub kernel_bound: Option<T>,
    pub transform_bound: T,
    pub kappa: T,
    pub rank: usize,
    pub n0: usize,
    pub n1: usize,
    pub sigma_min_pos: Option<T>,
    pub inner: Option<InvertibleCaseCertificate<T>>,
    pub audit: SmallFrequencyAudit,
    /// `C = 0`: the certificate covers the damped block alone and the
    /// second component has no decay mechanism.
    pub range_trivial: bool,
}

/// Runs the full constant chain on a validated system.
pub fn full_certificate<T: Real>(
    sys: &BlockSystem<T>,
    tol: &Tolerances,
) -> Result<StabilityCertificate<T>> {
    let ns = normalize_system(sys, tol)?;
    let frames = decompose(&ns.d, tol);
    certify_normalized(&ns, &frames, tol, &CertificateOptions::default())
}

/// Constant chain on an already normalized system with precomputed frames.
pub fn certify_normalized<T: Real>(
    ns: &NormalizedSystem<T>,
    frames: &HelmholtzFrames<T>,
    _tol: &Tolerances,
    opts: &CertificateOptions,
) -> Result<StabilityCertificate<T>> {
    let c = ns.c_gamma_tilde;
    if !(c > T::zero()) {
        return Err(Error::NotCoercive {
            which: "gamma_tilde",
            value: c.as_f64(),
        });
    }
    let gamma_norm = operator_norm(&ns.gamma_tilde);
    let kappa = ns.kappa();
    let a0 = c / T::lit(4.0);
    let three_quarters_c = c - a0;
    let kernel_present = frames.kernel_dim() > 0;
    let kb = kernel_block_bound(c, -a0)?;

    let (c_eff, g_eff, transform_bound, inner, delta, m_core, small_radius) = match frames
        .c_tilde_inv_norm
    {
        None => {
            // C = 0: only the damped block u' = -g u survives on H0 x ran(D).
            (c, gamma_norm, T::one(), None, a0, kb, a0)
        }
        Some(c_inv_norm) => {
            let (c_eff, g_eff, t_max) = if kernel_present {
                (
                    three_quarters_c,
                    gamma_norm + gamma_norm * gamma_norm / three_quarters_c,
                    T::one() + gamma_norm / three_quarters_c,
                )
            } else {
                (c, gamma_norm, T::one())
            };
            let inner = invertible_certificate_with_grid(c_eff, g_eff, c_inv_norm, opts.grid_steps)?;
            let m_core = if kernel_present {
                inner.m_inner.max(kb)
            } else {
                inner.m_inner
            };
            let radius = T::lit(2.0) * inner.delta_star;
            (c_eff, g_eff, t_max, Some(inner), a0.min(inner.d), m_core, radius)
        }
    };
    let m_total = transform_bound * transform_bound * m_core * kappa * kappa;

    let restricted = restricted_generator(ns, frames);
    let mut delta_cert = delta;
    let mut halvings = 0;
    let audit = loop {
        let (max_norm, singular) = audit_rectangle(&restricted, delta_cert, small_radius, opts.audit_grid);
        let passed = singular == 0 && max_norm <= m_total;
        if passed || halvings >= opts.max_halvings {
            break SmallFrequencyAudit {
                grid_points_per_axis: opts.audit_grid,
                re_range: ((-delta_cert).as_f64(), 0.0),
                im_range: ((-small_radius).as_f64(), small_radius.as_f64()),
                max_norm: max_norm.as_f64(),
                singular_points: singular,
                halvings,
                passed,
            };
        }
        delta_cert = delta_cert / T::lit(2.0);
        halvings += 1;
    };
    if !audit.passed {
        return Err(Error::CertificateFailure { halvings });
    }

    Ok(StabilityCertificate {
        delta_cert,
        m_total,
        working_abscissa: a0,
        c,
        gamma_norm,
        c_eff,
        g_eff,
        kernel_bound: (kernel_present || frames.rank == 0).then_some(kb),
        transform_bound,
        kappa,
        rank: frames.rank,
        n0: ns.n0(),
        n1: ns.n1(),
        sigma_min_pos: frames.sigma_min_pos,
        inner,
        audit,
        range_trivial: frames.rank == 0,
    })
}

/// Max resolvent norm over a `grid x grid` lattice on
/// `[-delta, 0] x [-radius, radius]`, and the number of singular points.
fn audit_rectangle<T: Real>(b: &ComplexMatrix<T>, delta: T, radius: T, grid: usize) -> (T, usize) {
    let grid = grid.max(2);
    let last = T::from_count(grid - 1);
    let points: Vec<Complex<T>> = (0..grid)
        .flat_map(|i| {
            (0..grid).map(move |j| {
                let x = -delta + delta * T::from_count(i) / last;
                let y = -radius + T::lit(2.0) * radius * T::from_count(j) / last;
                Complex::new(x, y)
            })
        })
        .collect();
    let norms: Vec<Option<T>> = points.par_iter().map(|&z| resolvent_norm(b, z).ok()).collect();
    let singular = norms.iter().filter(|n| n.is_none()).count();
    let max = norms
        .iter()
        .flatten()
        .fold(T::zero(), |a, &x| a.max(x));
    (max, singular)
}
