//! Independent numerical audits of the stability claims: dense generator
//! assembly, dissipativity, resolvent norms along vertical lines, spectra,
//! matrix-exponential trajectories and decay-rate fitting.

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{dim_mismatch, Error, Result};
use crate::helmholtz::HelmholtzFrames;
use crate::linalg::{self, block2, zeros};
use crate::model::{hermitian_max_eig, shape, BlockSystem, Tolerances};
use crate::normalize::NormalizedSystem;
use crate::scalar::{re, ComplexMatrix, ComplexVector, Real};

/// `sigma_min <= SINGULAR_REL * sigma_max` marks `z` as a point of the spectrum.
pub const SINGULAR_REL: f64 = 1e-14;

/// Normalized generator `B = [[-gamma~, D*], [-D, 0]]` acting on `(u, v)`.
pub fn assemble_generator<T: Real>(ns: &NormalizedSystem<T>) -> ComplexMatrix<T> {
    block2(
        &(-&ns.gamma_tilde),
        &ns.d.adjoint(),
        &(-&ns.d),
        &zeros(ns.n1(), ns.n1()),
    )
}

/// Generator in the original variables,
/// `diag(alpha, beta)^-1 [[-gamma, C*], [-C, 0]]`.
pub fn assemble_original_generator<T: Real>(
    sys: &BlockSystem<T>,
    tol: &Tolerances,
) -> Result<ComplexMatrix<T>> {
    let rel = T::lit(tol.solve_tol);
    let alpha_inv = linalg::checked_inverse(sys.alpha(), rel).ok_or(Error::NotInvertible("alpha"))?;
    let beta_inv = linalg::checked_inverse(sys.beta(), rel).ok_or(Error::NotInvertible("beta"))?;
    let raw = block2(
        &(-sys.gamma()),
        &sys.coupling().adjoint(),
        &(-sys.coupling()),
        &zeros(sys.n1(), sys.n1()),
    );
    Ok(linalg::block_diag(&alpha_inv, &beta_inv) * raw)
}

/// The generator restricted to its invariant subspace `H0 x ran(D)`,
/// written in the orthonormal basis `[[I, 0], [0, iota1]]`.
pub fn restricted_generator<T: Real>(
    ns: &NormalizedSystem<T>,
    frames: &HelmholtzFrames<T>,
) -> ComplexMatrix<T> {
    let p = frames.range_embedding();
    p.adjoint() * assemble_generator(ns) * p
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DissipativityReport {
    pub dissipative: bool,
    /// Largest eigenvalue of `(B + B*) / 2`.
    pub max_re_quadratic: f64,
    pub shifted_invertible: bool,
}

/// Checks both halves of m-dissipativity for a matrix generator:
/// `Re <Bx, x> <= 0` and invertibility of `I - B`.
pub fn check_m_dissipative<T: Real>(b: &ComplexMatrix<T>) -> Result<DissipativityReport> {
    let max_re = hermitian_max_eig(b)?;
    let shifted = linalg::shift(&(-b), re(T::one()));
    let s = linalg::singular_values(&shifted);
    let shifted_invertible = s[s.len() - 1] > T::lit(1e-12) * s[0];
    Ok(DissipativityReport {
        dissipative: max_re <= T::lit(1e-12),
        max_re_quadratic: max_re.as_f64(),
        shifted_invertible,
    })
}

/// `|(z - B)^-1|` as the reciprocal of the smallest singular value.
pub fn resolvent_norm<T: Real>(b: &ComplexMatrix<T>, z: Complex<T>) -> Result<T> {
    if !b.is_square() {
        return Err(dim_mismatch("resolvent_norm", "square matrix", shape(b)));
    }
    if b.nrows() == 0 {
        return Ok(T::zero());
    }
    let s = linalg::singular_values(&linalg::shift(&(-b), z));
    let (smax, smin) = (s[0], s[s.len() - 1]);
    if smin <= T::lit(SINGULAR_REL) * smax {
        return Err(Error::Singular {
            sigma_min: smin.as_f64(),
            sigma_max: smax.as_f64(),
        });
    }
    Ok(T::one() / smin)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolventSweepReport {
    pub abscissa: f64,
    pub lambdas: Vec<f64>,
    /// Resolvent norm per frequency; `None` where the shift is singular.
    pub norms: Vec<Option<f64>>,
    /// Maximum over the finite norms.
    pub max_norm: f64,
    pub argmax_lambda: f64,
    pub singular_points: Vec<f64>,
}

/// Evaluates `|((a + i lambda) - B)^-1|` on the symmetric grid
/// `lambda in [-lambda_max, lambda_max]`. An even point count is bumped to
/// the next odd one so that `lambda = 0` is always on the grid.
pub fn gp_sweep<T: Real>(
    b: &ComplexMatrix<T>,
    abscissa: T,
    lambda_max: T,
    points: usize,
) -> Result<ResolventSweepReport> {
    if !b.is_square() {
        return Err(dim_mismatch("gp_sweep", "square matrix", shape(b)));
    }
    if points < 2 {
        return Err(Error::ParameterOutOfRange {
            name: "points",
            value: points as f64,
        });
    }
    let points = if points % 2 == 0 { points + 1 } else { points };
    let half = (points - 1) / 2;
    let lambdas: Vec<T> = (0..points)
        .map(|i| {
            let k = i as f64 - half as f64;
            lambda_max * T::lit(k / half as f64)
        })
        .collect();
    let norms: Vec<Option<T>> = lambdas
        .par_iter()
        .map(|&l| resolvent_norm(b, Complex::new(abscissa, l)).ok())
        .collect();
    let mut max_norm = T::zero();
    let mut argmax = T::zero();
    let mut singular_points = Vec::new();
    for (l, n) in lambdas.iter().zip(&norms) {
        match n {
            Some(v) if *v > max_norm => {
                max_norm = *v;
                argmax = *l;
            }
            Some(_) => {}
            None => singular_points.push(l.as_f64()),
        }
    }
    Ok(ResolventSweepReport {
        abscissa: abscissa.as_f64(),
        lambdas: lambdas.iter().map(|l| l.as_f64()).collect(),
        norms: norms.iter().map(|n| n.map(|v| v.as_f64())).collect(),
        max_norm: max_norm.as_f64(),
        argmax_lambda: argmax.as_f64(),
        singular_points,
    })
}

/// Largest real part over the spectrum.
pub fn spectral_abscissa<T: Real>(b: &ComplexMatrix<T>) -> Result<T> {
    if !b.is_square() {
        return Err(dim_mismatch("spectral_abscissa", "square matrix", shape(b)));
    }
    let ev = linalg::eigenvalues(b)?;
    Ok(ev.iter().map(|z| z.re).fold(T::min_value().unwrap_or(-T::one()), |a, x| a.max(x)))
}

/// How the matrix exponential was evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ExpMethod {
    /// One Pade scaling-and-squaring exponential `exp(dt B)`, applied
    /// repeatedly to step between equally spaced samples.
    PadeScalingSquaringStepped,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryTrace<T: Real> {
    pub times: Vec<T>,
    pub states: Vec<ComplexVector<T>>,
    pub state_norms: Vec<T>,
    /// Decay rate fitted over the last half of the time range, when the fit succeeds.
    pub fitted_rate: Option<T>,
    pub fit_window: Option<(T, T)>,
    pub method: ExpMethod,
}

impl<T: Real> TrajectoryTrace<T> {
    /// Largest increase between consecutive norms (zero for monotone traces).
    pub fn max_increase(&self) -> T {
        self.state_norms
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(T::zero(), |a, x| a.max(x))
    }
}

pub const DEFAULT_WINDOW_FRACTION: f64 = 0.5;

/// `U(t) = exp(t B) U0` at `samples` equally spaced times in `[0, t_end]`.
pub fn simulate<T: Real>(
    b: &ComplexMatrix<T>,
    u0: &ComplexVector<T>,
    t_end: T,
    samples: usize,
) -> Result<TrajectoryTrace<T>> {
    if !b.is_square() || b.nrows() != u0.len() {
        return Err(dim_mismatch("simulate", format!("{0}x{0}", u0.len()), shape(b)));
    }
    if !(t_end > T::zero()) {
        return Err(Error::ParameterOutOfRange {
            name: "t_end",
            value: t_end.as_f64(),
        });
    }
    if samples < 2 {
        return Err(Error::ParameterOutOfRange {
            name: "samples",
            value: samples as f64,
        });
    }
    let dt = t_end / T::from_count(samples - 1);
    let step = if b.nrows() == 0 {
        b.clone()
    } else {
        (b * re(dt)).exp()
    };
    let mut times = Vec::with_capacity(samples);
    let mut states = Vec::with_capacity(samples);
    let mut state = u0.clone();
    for k in 0..samples {
        times.push(dt * T::from_count(k));
        if k > 0 {
            state = &step * &state;
        }
        states.push(state.clone());
    }
    let state_norms = states.iter().map(|s| s.norm()).collect();
    let mut trace = TrajectoryTrace {
        times,
        states,
        state_norms,
        fitted_rate: None,
        fit_window: None,
        method: ExpMethod::PadeScalingSquaringStepped,
    };
    if let Ok(rate) = fit_decay_rate(&trace, T::lit(DEFAULT_WINDOW_FRACTION)) {
        trace.fitted_rate = Some(rate);
        trace.fit_window = Some(fit_window(&trace.times, T::lit(DEFAULT_WINDOW_FRACTION)));
    }
    Ok(trace)
}

fn fit_window<T: Real>(times: &[T], fraction: T) -> (T, T) {
    let t0 = times[0];
    let t1 = times[times.len() - 1];
    (t1 - fraction * (t1 - t0), t1)
}

pub const MIN_FIT_SAMPLES: usize = 10;
const UNDERFLOW_NORM: f64 = 1e-30;

fn least_squares_slope(t: &[f64], y: &[f64]) -> (f64, f64) {
    let n = t.len() as f64;
    let tm = t.iter().sum::<f64>() / n;
    let ym = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (a, b) in t.iter().zip(y) {
        sxy += (a - tm) * (b - ym);
        sxx += (a - tm) * (a - tm);
    }
    let slope = sxy / sxx;
    (slope, ym - slope * tm)
}

/// Least-squares slope of `-log |U(t)|` over the last `window_fraction` of
/// the time range.
///
/// When the detrended log-norm oscillates (more than four sign changes of
/// its discrete derivative) the fit is redone on the upper envelope, i.e. on
/// the samples where the norm has a local maximum relative to the trend.
pub fn fit_decay_rate<T: Real>(trace: &TrajectoryTrace<T>, window_fraction: T) -> Result<T> {
    if !(window_fraction > T::zero() && window_fraction <= T::one()) {
        return Err(Error::ParameterOutOfRange {
            name: "window_fraction",
            value: window_fraction.as_f64(),
        });
    }
    if trace.times.len() < MIN_FIT_SAMPLES {
        return Err(Error::TooFewSamples {
            found: trace.times.len(),
            required: MIN_FIT_SAMPLES,
        });
    }
    let (start, _) = fit_window(&trace.times, window_fraction);
    let mut t = Vec::new();
    let mut y = Vec::new();
    for (ti, ni) in trace.times.iter().zip(&trace.state_norms) {
        if *ti >= start {
            if ni.as_f64() <= UNDERFLOW_NORM {
                return Err(Error::Underflow);
            }
            t.push(ti.as_f64());
            y.push(-ni.as_f64().ln());
        }
    }
    if t.len() < MIN_FIT_SAMPLES {
        return Err(Error::TooFewSamples {
            found: t.len(),
            required: MIN_FIT_SAMPLES,
        });
    }
    let (mut slope, mut intercept) = least_squares_slope(&t, &y);
    for _ in 0..3 {
        let resid: Vec<f64> = t
            .iter()
            .zip(&y)
            .map(|(a, b)| b - (intercept + slope * a))
            .collect();
        let spread = resid.iter().cloned().fold(f64::MIN, f64::max)
            - resid.iter().cloned().fold(f64::MAX, f64::min);
        let scale = 1.0 + y.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if spread <= 1e-10 * scale {
            break;
        }
        let signs: Vec<i8> = resid
            .windows(2)
            .map(|w| (w[1] - w[0]).partial_cmp(&0.0).map_or(0, |o| o as i8))
            .filter(|&s| s != 0)
            .collect();
        let changes = signs.windows(2).filter(|w| w[0] != w[1]).count();
        if changes <= 4 {
            break;
        }
        // local maxima of the norm are local minima of the detrended -log norm
        let idx: Vec<usize> = (1..resid.len() - 1)
            .filter(|&i| resid[i] <= resid[i - 1] && resid[i] <= resid[i + 1])
            .collect();
        if idx.len() < 2 {
            break;
        }
        let te: Vec<f64> = idx.iter().map(|&i| t[i]).collect();
        let ye: Vec<f64> = idx.iter().map(|&i| y[i]).collect();
        let (s, b) = least_squares_slope(&te, &ye);
        slope = s;
        intercept = b;
    }
    Ok(T::lit(slope))
}

/// Projects `v0` onto the admissible set `beta^-1 ran(C)`:
/// `v_adm = beta^-1 iota1 iota1* (beta v0)`. Returns `v_adm` and `|v_adm - v0|`.
pub fn admissible_initial<T: Real>(
    beta: &ComplexMatrix<T>,
    frames: &HelmholtzFrames<T>,
    v0: &ComplexVector<T>,
    tol: &Tolerances,
) -> Result<(ComplexVector<T>, T)> {
    let n1 = frames.n1();
    if beta.shape() != (n1, n1) || v0.len() != n1 {
        return Err(dim_mismatch(
            "admissible_initial",
            format!("beta {n1}x{n1}, v0 {n1}"),
            format!("beta {}, v0 {}", shape(beta), v0.len()),
        ));
    }
    let beta_inv =
        linalg::checked_inverse(beta, T::lit(tol.solve_tol)).ok_or(Error::NotInvertible("beta"))?;
    let w = beta * v0;
    let projected = &frames.iota1 * (frames.iota1.adjoint() * w);
    let v_adm = beta_inv * projected;
    let residual = (&v_adm - v0).norm();
    Ok((v_adm, residual))
}

/// Closed-form inverse of `[[A, B], [C, 0]]` for invertible `B` and `C`:
/// `[[0, C^-1], [B^-1, -B^-1 A C^-1]]`.
pub fn block_inverse<T: Real>(
    a: &ComplexMatrix<T>,
    b: &ComplexMatrix<T>,
    c: &ComplexMatrix<T>,
    tol: &Tolerances,
) -> Result<ComplexMatrix<T>> {
    let n = a.nrows();
    if !a.is_square() || b.shape() != (n, n) || c.shape() != (n, n) {
        return Err(dim_mismatch(
            "block_inverse",
            format!("three {n}x{n} blocks"),
            format!("A {}, B {}, C {}", shape(a), shape(b), shape(c)),
        ));
    }
    let rel = T::lit(tol.solve_tol);
    let b_inv = linalg::checked_inverse(b, rel).ok_or(Error::SingularBlock("B"))?;
    let c_inv = linalg::checked_inverse(c, rel).ok_or(Error::SingularBlock("C"))?;
    let corner = -(&b_inv * a * &c_inv);
    Ok(block2(&zeros(n, n), &c_inv, &b_inv, &corner))
}

/// Residual of the shifted-variable identity: with `(z - B) U = F`,
/// `U_delta = ((1 + delta/z) u, v)` and
/// `F_delta = (f + (g~ - delta)(delta/z) D^-1 g, (1 + delta/z) g)`,
/// returns
/// `|(z + [[g~ - delta, (g~ - delta) delta D^-1], [0, delta]] + [[0, -D*], [D, 0]]) U_delta - F_delta|`.
pub fn change_of_variables_residual<T: Real>(
    ns: &NormalizedSystem<T>,
    z: Complex<T>,
    delta: T,
    state: &ComplexVector<T>,
    rhs: &ComplexVector<T>,
    tol: &Tolerances,
) -> Result<T> {
    let (n0, n1) = (ns.n0(), ns.n1());
    if z == Complex::new(T::zero(), T::zero()) {
        return Err(Error::ZeroFrequency);
    }
    if z + re(delta) == Complex::new(T::zero(), T::zero()) {
        return Err(Error::DegenerateShift);
    }
    if n0 != n1 {
        return Err(Error::NotInvertible("D"));
    }
    if state.len() != n0 + n1 || rhs.len() != n0 + n1 {
        return Err(dim_mismatch(
            "change_of_variables_residual",
            n0 + n1,
            format!("U {}, F {}", state.len(), rhs.len()),
        ));
    }
    let d_inv =
        linalg::checked_inverse(&ns.d, T::lit(tol.solve_tol)).ok_or(Error::NotInvertible("D"))?;
    let (u, v) = linalg::split(state, n0);
    let (f, g) = linalg::split(rhs, n0);
    let factor = re(T::one()) + re(delta) / z;
    let shifted = linalg::shift(&ns.gamma_tilde, re(-delta));
    let top_right = (&shifted * &d_inv) * re(delta);
    let operator = linalg::shift(
        &block2(
            &shifted,
            &(top_right - ns.d.adjoint()),
            &ns.d,
            &linalg::shift(&zeros(n1, n1), re(delta)),
        ),
        z,
    );
    let u_delta = linalg::concat(&(u * factor), &v);
    let f_delta = linalg::concat(
        &(f + (&shifted * (&d_inv * &g)) * (re(delta) / z)),
        &(g * factor),
    );
    Ok((operator * u_delta - f_delta).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{from_real_rows, from_real_vec, identity};
    use crate::normalize::unit_weight_system;

    fn benchmark() -> ComplexMatrix<f64> {
        from_real_rows(2, 2, &[-1.0, 1.0, -1.0, 0.0])
    }

    #[test]
    fn scalar_generator_assembly() {
        let ns = unit_weight_system(identity::<f64>(1), identity(1)).unwrap();
        assert_eq!(assemble_generator(&ns), benchmark());
        let undamped = unit_weight_system(zeros::<f64>(1, 1), identity(1)).unwrap();
        assert_eq!(
            assemble_generator(&undamped),
            from_real_rows(2, 2, &[0.0, 1.0, -1.0, 0.0])
        );
        let uncoupled = unit_weight_system(identity::<f64>(1), zeros(1, 1)).unwrap();
        assert_eq!(
            assemble_generator(&uncoupled),
            from_real_rows(2, 2, &[-1.0, 0.0, 0.0, 0.0])
        );
    }

    #[test]
    fn dissipativity_examples() {
        let rep = check_m_dissipative(&benchmark()).unwrap();
        assert!(rep.dissipative && rep.shifted_invertible);
        assert!(rep.max_re_quadratic.abs() < 1e-15);
        let bad = check_m_dissipative(&from_real_rows::<f64>(2, 2, &[1.0, 0.0, 0.0, 0.0])).unwrap();
        assert!(!bad.dissipative);
    }

    #[test]
    fn golden_ratio_resolvent() {
        let n = resolvent_norm(&benchmark(), Complex::new(0.0, 0.0)).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((n - phi).abs() < 1e-12);
    }

    #[test]
    fn eigenvalue_of_skew_is_singular() {
        let b = from_real_rows::<f64>(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        assert!(matches!(
            resolvent_norm(&b, Complex::new(0.0, 1.0)),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn spectral_abscissa_examples() {
        assert!((spectral_abscissa(&benchmark()).unwrap() + 0.5).abs() < 1e-12);
        let skew = from_real_rows::<f64>(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        assert!(spectral_abscissa(&skew).unwrap().abs() < 1e-12);
        let diag = from_real_rows::<f64>(2, 2, &[-1.0, 0.0, 0.0, -2.0]);
        assert!((spectral_abscissa(&diag).unwrap() + 1.0).abs() < 1e-14);
    }

    #[test]
    fn sweep_forces_odd_grid() {
        let rep = gp_sweep(&benchmark(), 0.0, 10.0, 200).unwrap();
        assert_eq!(rep.lambdas.len(), 201);
        assert_eq!(rep.lambdas[100], 0.0);
        assert!(rep.singular_points.is_empty());
    }

    #[test]
    fn zero_generator_keeps_state() {
        let u0 = from_real_vec::<f64>(&[1.0, 2.0]);
        let tr = simulate(&zeros(2, 2), &u0, 1.0, 11).unwrap();
        for s in &tr.states {
            assert!((s - &u0).norm() < 1e-15);
        }
    }

    #[test]
    fn synthetic_exponential_fit() {
        let times: Vec<f64> = (0..101).map(|i| i as f64 * 0.2).collect();
        let trace = TrajectoryTrace {
            state_norms: times.iter().map(|t| (-0.5 * t).exp()).collect(),
            states: Vec::new(),
            times,
            fitted_rate: None,
            fit_window: None,
            method: ExpMethod::PadeScalingSquaringStepped,
        };
        let rate = fit_decay_rate(&trace, 0.5).unwrap();
        assert!((rate - 0.5).abs() < 1e-8);
    }

    #[test]
    fn fit_errors() {
        let times: Vec<f64> = (0..5).map(|i| i as f64).collect();
        let trace = TrajectoryTrace {
            state_norms: vec![1.0; 5],
            states: Vec::new(),
            times,
            fitted_rate: None,
            fit_window: None,
            method: ExpMethod::PadeScalingSquaringStepped,
        };
        assert!(matches!(fit_decay_rate(&trace, 0.5), Err(Error::TooFewSamples { .. })));
        let times: Vec<f64> = (0..40).map(|i| i as f64).collect();
        let trace = TrajectoryTrace {
            state_norms: times.iter().map(|t| if *t > 20.0 { 0.0 } else { 1.0 }).collect(),
            states: Vec::new(),
            times,
            fitted_rate: None,
            fit_window: None,
            method: ExpMethod::PadeScalingSquaringStepped,
        };
        assert_eq!(fit_decay_rate(&trace, 0.5), Err(Error::Underflow));
    }

    #[test]
    fn block_inverse_scalar() {
        let inv = block_inverse(
            &from_real_rows::<f64>(1, 1, &[1.0]),
            &from_real_rows(1, 1, &[2.0]),
            &from_real_rows(1, 1, &[4.0]),
            &Tolerances::default(),
        )
        .unwrap();
        let expected = from_real_rows(2, 2, &[0.0, 0.25, 0.5, -0.125]);
        assert!((inv - expected).norm() < 1e-15);
    }

    #[test]
    fn block_inverse_swaps_identities() {
        let inv = block_inverse(
            &zeros::<f64>(2, 2),
            &identity(2),
            &identity(2),
            &Tolerances::default(),
        )
        .unwrap();
        let expected = block2(&zeros(2, 2), &identity(2), &identity(2), &zeros(2, 2));
        assert_eq!(inv, expected);
        let err = block_inverse(
            &zeros::<f64>(2, 2),
            &zeros(2, 2),
            &identity(2),
            &Tolerances::default(),
        )
        .unwrap_err();
        assert_eq!(err, Error::SingularBlock("B"));
    }

    #[test]
    fn change_of_variables_preconditions() {
        let ns = unit_weight_system(identity::<f64>(1), identity(1)).unwrap();
        let u = from_real_vec(&[1.0, 1.0]);
        let tol = Tolerances::default();
        assert_eq!(
            change_of_variables_residual(&ns, Complex::new(0.0, 0.0), 0.1, &u, &u, &tol),
            Err(Error::ZeroFrequency)
        );
        assert_eq!(
            change_of_variables_residual(&ns, Complex::new(-0.1, 0.0), 0.1, &u, &u, &tol),
            Err(Error::DegenerateShift)
        );
    }
}
