//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rand::Rng;
use stabcert::helmholtz::decompose;
use stabcert::maxwell::{self, GridSpec, Materials, ReportSettings};
use stabcert::normalize::unit_weight_system;
use stabcert::verify::{
    assemble_original_generator, block_inverse, change_of_variables_residual, restricted_generator,
};
use stabcert::{
    assemble_generator, check_m_dissipative, damping_lower_bound, decoupled_solve,
    decoupling_transforms, fit_decay_rate, full_certificate, gp_sweep, hermitian_min_eig, map_state,
    normalize_system, resolvent_norm, simulate, spectral_abscissa, Direction, Error, Matrix,
    Tolerances, Vector,
};

use common::{CorpusSpec, C64};

struct Outcome {
    passed: bool,
    detail: String,
}

fn pass_if(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn hermitian_part(m: &Matrix) -> Matrix {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

fn dense_solve(m: &Matrix, rhs: &Vector) -> Vector {
    m.clone().lu().solve(rhs).expect("dense matrix invertible")
}

fn concat(a: &Vector, b: &Vector) -> Vector {
    Vector::from_iterator(a.len() + b.len(), a.iter().chain(b.iter()).copied())
}

fn criterion_1() -> Outcome {
    let tol = Tolerances::default();
    let start = Instant::now();
    let mut failures = Vec::new();
    let (mut ranked, mut worst_margin, mut worst_ratio) = (0, f64::INFINITY, 0.0f64);
    for seed in 0..200u64 {
        let sys = common::random_system(1_000 + seed, CorpusSpec::default());
        let ns = normalize_system(&sys, &tol).unwrap();
        let frames = decompose(&ns.d, &tol);
        if frames.rank == 0 {
            continue;
        }
        ranked += 1;
        let cert = match full_certificate(&sys, &tol) {
            Ok(c) => c,
            Err(e) => {
                failures.push(format!("seed {seed}: {e}"));
                continue;
            }
        };
        let restricted = restricted_generator(&ns, &frames);
        let sa = spectral_abscissa(&restricted).unwrap();
        worst_margin = worst_margin.min(-cert.delta_cert - sa);
        if sa > -cert.delta_cert + 1e-9 {
            failures.push(format!("seed {seed}: abscissa {sa} vs delta_cert {}", cert.delta_cert));
        }
        for a in [0.0, -cert.delta_cert / 2.0] {
            let sweep = gp_sweep(&restricted, a, 50.0, 401).unwrap();
            worst_ratio = worst_ratio.max(sweep.max_norm / cert.m_total);
            if !sweep.singular_points.is_empty() || sweep.max_norm > cert.m_total * (1.0 + 1e-6) {
                failures.push(format!("seed {seed}: sweep at {a} max {} > {}", sweep.max_norm, cert.m_total));
            }
        }
    }
    let elapsed = start.elapsed();
    pass_if(
        failures.is_empty() && elapsed < Duration::from_secs(60),
        format!(
            "{ranked} systems with r>=1, min(-abscissa - delta_cert) = {worst_margin:.3e}, \
             max sweep/M_total = {worst_ratio:.3e}, {:.1}s (limit 60s){}",
            elapsed.as_secs_f64(),
            first_failures(&failures)
        ),
    )
}

fn first_failures(f: &[String]) -> String {
    if f.is_empty() {
        String::new()
    } else {
        format!("; {} failures, first: {}", f.len(), f[0])
    }
}

fn criterion_2() -> Outcome {
    let sys = common::scalar_benchmark();
    let tol = Tolerances::default();
    let ns = normalize_system(&sys, &tol).unwrap();
    let b = assemble_generator(&ns);
    // [[-1, 1], [-1, 0]] has singular values phi and 1/phi.
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    let norm0 = resolvent_norm(&b, C64::new(0.0, 0.0)).unwrap();
    // Eigenvalues solve l^2 + l + 1 = 0, so the decay rate is 1/2.
    let rate_oracle = 0.5;
    let u0 = Vector::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
    let trace = simulate(&b, &u0, 20.0, 801).unwrap();
    let fitted = trace.fitted_rate.unwrap_or(f64::NAN);
    let cert = full_certificate(&sys, &tol).unwrap();
    let ok = (norm0 - golden).abs() <= 1e-6
        && (fitted - rate_oracle).abs() <= 1e-2
        && cert.delta_cert > 0.0
        && cert.delta_cert <= 0.5;
    pass_if(
        ok,
        format!(
            "|R(0)| = {norm0:.9} (oracle {golden:.9}, tol 1e-6), fitted rate = {fitted:.6} \
             (oracle 0.5, tol 1e-2), delta_cert = {:.6} in (0, 0.5]",
            cert.delta_cert
        ),
    )
}

fn criterion_3() -> Outcome {
    let tol = Tolerances::default();
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for seed in 0..100u64 {
        let sys = common::random_system(2_000 + seed, CorpusSpec::default());
        let ns = normalize_system(&sys, &tol).unwrap();
        let frames = decompose(&ns.d, &tol);
        let mut rng = common::rng(20_000 + seed);
        let c = ns.c_gamma_tilde;
        let z = C64::new(rng.random_range(-0.5 * c..1.0), rng.random_range(-3.0..3.0));
        let f = common::gaussian_vec(&mut rng, ns.n0());
        let g = &ns.d * common::gaussian_vec(&mut rng, ns.n0());
        let (u, v) = match decoupled_solve(&ns, &frames, z, &f, &g, &tol) {
            Ok(x) => x,
            Err(e) => {
                failures.push(format!("seed {seed}: {e}"));
                continue;
            }
        };
        let b = assemble_generator(&ns);
        let n = b.nrows();
        let shifted = DMatrix::<C64>::identity(n, n) * z - &b;
        let direct = dense_solve(&shifted, &concat(&f, &g));
        let rel = (concat(&u, &v) - &direct).norm() / direct.norm().max(1e-300);
        worst = worst.max(rel);
        if rel > 1e-9 {
            failures.push(format!("seed {seed}: relative error {rel:.3e}"));
        }
    }
    let elapsed = start.elapsed();
    pass_if(
        failures.is_empty() && elapsed < Duration::from_secs(10),
        format!(
            "100 systems, max relative error {worst:.3e} (tol 1e-9), {:.2}s (limit 10s){}",
            elapsed.as_secs_f64(),
            first_failures(&failures)
        ),
    )
}

fn criterion_4() -> Outcome {
    let tol = Tolerances::default();
    let (mut schur_slack, mut kernel_slack, mut shift_slack) = (f64::INFINITY, f64::INFINITY, f64::INFINITY);
    let mut count = (0, 0);
    // Schur block and kernel block of the eliminated problem, on systems with r >= 1.
    let mut seed = 0u64;
    while count.0 < 100 {
        seed += 1;
        let sys = common::random_system(3_000 + seed, CorpusSpec::default());
        let ns = normalize_system(&sys, &tol).unwrap();
        let frames = decompose(&ns.d, &tol);
        if frames.rank == 0 {
            continue;
        }
        count.0 += 1;
        let c = ns.c_gamma_tilde;
        let mut rng = common::rng(30_000 + seed);
        let z = C64::new(rng.random_range(-0.99 * c..2.0), rng.random_range(-5.0..5.0));
        let blocks = decoupling_transforms(&ns.gamma_tilde, &frames, z, c, &tol).unwrap();
        let h = hermitian_min_eig(&blocks.gamma1_z).unwrap();
        schur_slack = schur_slack.min(h - (z.re + c).min(c));
        if frames.kernel_dim() > 0 {
            let k = DMatrix::<C64>::identity(blocks.gamma2.nrows(), blocks.gamma2.nrows()) * z + &blocks.gamma2;
            kernel_slack = kernel_slack.min(hermitian_min_eig(&k).unwrap() - (z.re + c));
        }
    }
    for seed in 0..100u64 {
        // Shifted damping block for invertible D.
        let mut rng = common::rng(40_000 + seed);
        let inv = common::random_system(
            4_000 + seed,
            CorpusSpec {
                invertible: true,
                ..CorpusSpec::default()
            },
        );
        let ns = normalize_system(&inv, &tol).unwrap();
        let n = ns.n0();
        let c = ns.c_gamma_tilde;
        let gn = ns.gamma_tilde.clone().svd(false, false).singular_values[0];
        let d_inv = ns.d.clone().try_inverse().unwrap();
        let cin = d_inv.clone().svd(false, false).singular_values[0];
        let delta = rng.random_range(0.01 * c..0.99 * c);
        let p = rng.random_range(0.05..1.95);
        let (u_term, v_term) = damping_lower_bound(c, gn, cin, delta, p).unwrap();
        let z = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-5.0..5.0));
        let id = DMatrix::<C64>::identity(n, n);
        let shifted = &ns.gamma_tilde - &id * C64::new(delta, 0.0);
        let mut block = DMatrix::<C64>::zeros(2 * n, 2 * n);
        block.view_mut((0, 0), (n, n)).copy_from(&shifted);
        block
            .view_mut((0, n), (n, n))
            .copy_from(&(&shifted * &d_inv * C64::new(delta, 0.0)));
        block.view_mut((n, n), (n, n)).copy_from(&(&id * C64::new(delta, 0.0)));
        let block = DMatrix::<C64>::identity(2 * n, 2 * n) * z + block;
        let h = hermitian_min_eig(&hermitian_part(&block)).unwrap();
        shift_slack = shift_slack.min(h - (z.re + u_term.min(v_term)));
        count.1 += 1;
    }
    let ok = schur_slack >= -1e-10 && kernel_slack >= -1e-10 && shift_slack >= -1e-10;
    pass_if(
        ok,
        format!(
            "Schur slack {schur_slack:.3e} over {} instances, kernel slack {kernel_slack:.3e}, \
             shifted-block slack {shift_slack:.3e} over {} instances (tol -1e-10)",
            count.0, count.1
        ),
    )
}

fn criterion_5() -> Outcome {
    let tol = Tolerances::default();
    let mut worst = 0.0f64;
    let mut rejected = true;
    for seed in 0..100u64 {
        let sys = common::random_system(
            5_000 + seed,
            CorpusSpec {
                invertible: true,
                ..CorpusSpec::default()
            },
        );
        let ns = normalize_system(&sys, &tol).unwrap();
        let mut rng = common::rng(50_000 + seed);
        let b = assemble_generator(&ns);
        let n = b.nrows();
        let z = C64::new(rng.random_range(-1.0..1.0), rng.random_range(0.1..4.0));
        let delta = rng.random_range(0.01..0.99) * ns.c_gamma_tilde;
        let u = common::gaussian_vec(&mut rng, n);
        let f = (DMatrix::<C64>::identity(n, n) * z - &b) * &u;
        let r = change_of_variables_residual(&ns, z, delta, &u, &f, &tol).unwrap();
        worst = worst.max(r / (u.norm() + f.norm()));
        if seed == 0 {
            let zero = change_of_variables_residual(&ns, C64::new(0.0, 0.0), delta, &u, &f, &tol);
            let degenerate = change_of_variables_residual(&ns, C64::new(-delta, 0.0), delta, &u, &f, &tol);
            rejected = zero == Err(Error::ZeroFrequency) && degenerate == Err(Error::DegenerateShift);
        }
    }
    pass_if(
        worst <= 1e-9 && rejected,
        format!(
            "max residual/(|U|+|F|) = {worst:.3e} (tol 1e-9), z=0 and delta=-z rejected: {rejected}"
        ),
    )
}

fn criterion_6() -> Outcome {
    let tol = Tolerances::default();
    let (mut worst_dense, mut worst_back) = (0.0f64, 0.0f64);
    for seed in 0..100u64 {
        let mut rng = common::rng(60_000 + seed);
        let n = rng.random_range(1..=6);
        let a = common::gaussian(&mut rng, n, n);
        let well = |rng: &mut rand_chacha::ChaCha8Rng| {
            let q = common::orthonormal(rng, n, n);
            let w = common::orthonormal(rng, n, n);
            let s = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(n, |_, _| {
                C64::new(rng.random_range(0.5..2.0), 0.0)
            }));
            q * s * w.adjoint()
        };
        let b = well(&mut rng);
        let c = well(&mut rng);
        let mut full = DMatrix::<C64>::zeros(2 * n, 2 * n);
        full.view_mut((0, 0), (n, n)).copy_from(&a);
        full.view_mut((0, n), (n, n)).copy_from(&b);
        full.view_mut((n, 0), (n, n)).copy_from(&c);
        let inv = block_inverse(&a, &b, &c, &tol).unwrap();
        let dense = full.clone().try_inverse().unwrap();
        worst_dense = worst_dense.max((&inv - &dense).norm() / dense.norm());
        let id = DMatrix::<C64>::identity(2 * n, 2 * n);
        worst_back = worst_back.max((&full * &inv - &id).norm()).max((&inv * &full - &id).norm());
    }
    pass_if(
        worst_dense <= 1e-10 && worst_back <= 1e-10,
        format!("max |inv - dense|/|dense| = {worst_dense:.3e}, max |M inv - I| = {worst_back:.3e} (tol 1e-10)"),
    )
}

fn criterion_7() -> Outcome {
    let tol = Tolerances::default();
    let (mut worst_traj, mut worst_conj) = (0.0f64, 0.0f64);
    for seed in 0..20u64 {
        let sys = common::random_system(7_000 + seed, CorpusSpec::default());
        let ns = normalize_system(&sys, &tol).unwrap();
        let b_orig = assemble_original_generator(&sys, &tol).unwrap();
        let b_norm = assemble_generator(&ns);
        let conj = &ns.weight() * &b_orig * ns.weight_inv();
        worst_conj = worst_conj.max((&conj - &b_norm).norm() / b_norm.norm());

        let mut rng = common::rng(70_000 + seed);
        let x0 = common::gaussian_vec(&mut rng, b_orig.nrows());
        let y0 = map_state(&ns, &x0, Direction::Forward).unwrap();
        let orig = simulate(&b_orig, &x0, 5.0, 51).unwrap();
        let norm = simulate(&b_norm, &y0, 5.0, 51).unwrap();
        for (x, y) in orig.states.iter().zip(&norm.states) {
            let back = map_state(&ns, y, Direction::Backward).unwrap();
            worst_traj = worst_traj.max((back - x).norm() / x0.norm());
        }
    }
    pass_if(
        worst_traj <= 1e-9 && worst_conj <= 1e-10,
        format!(
            "20 systems, max pointwise trajectory mismatch {worst_traj:.3e} (tol 1e-9), \
             conjugation residual {worst_conj:.3e} (tol 1e-10)"
        ),
    )
}

fn criterion_8() -> Outcome {
    let tol = Tolerances::default();
    let start = Instant::now();
    let spec = GridSpec::new(3, 1.0).unwrap();
    let curl = maxwell::build_curl::<f64>(&spec, &tol).unwrap();
    let kg = (&curl.k * &curl.grad).iter().map(|z| z.norm()).fold(0.0, f64::max);

    // sigma = 0 is not coercive, so the lossless run uses the unit-weight form directly.
    let lossless = unit_weight_system(DMatrix::zeros(81, 81), curl.k.clone()).unwrap();
    let b0 = assemble_generator(&lossless);
    let mut rng = common::rng(80_000);
    let x0 = common::gaussian_vec(&mut rng, b0.nrows());
    let trace0 = simulate(&b0, &x0, 20.0, 801).unwrap();
    let rate0 = fit_decay_rate(&trace0, 0.5).unwrap_or(f64::NAN);

    let report = maxwell::maxwell_report::<f64>(
        &spec,
        &Materials::uniform(1.0, 1.0, 1.0),
        &tol,
        &ReportSettings::default(),
    )
    .unwrap();
    let generator_dim = 2 * spec.field_dim();
    let delta = report.certificate.delta_cert;
    let fitted = report.trajectory.fitted_rate.unwrap_or(f64::NAN);
    let increase = report.trajectory.max_increase();
    let initial = report.trajectory.state_norms[0];
    let elapsed = start.elapsed();
    let ok = kg <= 1e-13
        && rate0.abs() <= 1e-8
        && delta > 0.0
        && fitted >= delta - 1e-6
        && increase <= 1e-12 * initial
        && generator_dim == 162
        && elapsed < Duration::from_secs(120);
    pass_if(
        ok,
        format!(
            "max |K grad| = {kg:.3e}, lossless rate = {rate0:.3e} (tol 1e-8), delta_cert = {delta:.4e}, \
             fitted = {fitted:.6} (>= delta_cert - 1e-6), max norm increase = {increase:.3e}, \
             generator {generator_dim}x{generator_dim}, {:.1}s (limit 120s)",
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_9() -> Outcome {
    let (mut worst_eig, mut all_invertible) = (f64::NEG_INFINITY, true);
    for seed in 0..100u64 {
        let mut rng = common::rng(90_000 + seed);
        let n0 = rng.random_range(1..=6);
        let n1 = rng.random_range(1..=6);
        // Re gamma >= 0, singular on every other instance.
        let rank = if seed % 2 == 0 { rng.random_range(0..=n0) } else { n0 };
        let f = common::gaussian(&mut rng, n0, rank);
        let g = common::gaussian(&mut rng, n0, n0);
        let gamma = &f * f.adjoint() + (&g - g.adjoint()) * C64::new(0.5, 0.0);
        let d = common::gaussian(&mut rng, n1, n0);
        let ns = unit_weight_system(gamma, d).unwrap();
        let rep = check_m_dissipative(&assemble_generator(&ns)).unwrap();
        worst_eig = worst_eig.max(rep.max_re_quadratic);
        all_invertible &= rep.shifted_invertible;
    }
    pass_if(
        worst_eig <= 1e-12 && all_invertible,
        format!(
            "100 systems, max eigenvalue of Re B = {worst_eig:.3e} (tol 1e-12), I - B invertible on all: {all_invertible}"
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("certificate soundness corpus", criterion_1),
        ("scalar benchmark", criterion_2),
        ("decoupling equivalence", criterion_3),
        ("coercivity bounds", criterion_4),
        ("change-of-variables identity", criterion_5),
        ("closed-form block inverse", criterion_6),
        ("normalization round trip", criterion_7),
        ("periodic Maxwell grid", criterion_8),
        ("m-dissipativity", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = run();
        let tag = if outcome.passed { "PASS" } else { "FAIL" };
        if !outcome.passed {
            failed += 1;
        }
        println!("criterion {} [{tag}] {name}: {}", i + 1, outcome.detail);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
