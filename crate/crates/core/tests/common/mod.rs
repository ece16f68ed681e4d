//! Seeded random systems shared by the integration tests.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use stabcert::{validate_system, Matrix, System, Tolerances, Vector};

pub type C64 = Complex<f64>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    DMatrix::from_fn(rows, cols, |_, _| {
        let a: f64 = StandardNormal.sample(rng);
        let b: f64 = StandardNormal.sample(rng);
        C64::new(a, b)
    })
}

pub fn gaussian_vec(rng: &mut ChaCha8Rng, len: usize) -> Vector {
    gaussian(rng, len, 1).column(0).into_owned()
}

/// Columns of a random `n x k` matrix with orthonormal columns.
pub fn orthonormal(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Matrix {
    if k == 0 {
        return DMatrix::zeros(n, 0);
    }
    gaussian(rng, n, k).qr().q().columns(0, k).into_owned()
}

/// Hermitian positive definite with spectrum in `[lo, hi]`.
pub fn spd(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Matrix {
    let q = orthonormal(rng, n, n);
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(n, |_, _| {
        C64::new(rng.random_range(lo..=hi), 0.0)
    }));
    let m = &q * d * q.adjoint();
    (&m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// Damping whose Hermitian part has spectrum in `[c, c + 2]`, plus a random
/// skew-Hermitian part when `skew` is set.
pub fn damping(rng: &mut ChaCha8Rng, n: usize, c: f64, skew: bool) -> Matrix {
    let h = spd(rng, n, c, c + 2.0);
    if !skew {
        return h;
    }
    let g = gaussian(rng, n, n) * C64::new(0.5, 0.0);
    let s = (&g - g.adjoint()) * C64::new(0.5, 0.0);
    h + s
}

/// `n1 x n0` coupling of exact rank `r` with singular values in `[0.3, 3]`.
pub fn coupling(rng: &mut ChaCha8Rng, n0: usize, n1: usize, r: usize) -> Matrix {
    let u = orthonormal(rng, n1, r);
    let v = orthonormal(rng, n0, r);
    let s = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(r, |_, _| {
        C64::new(rng.random_range(0.3..=3.0), 0.0)
    }));
    u * s * v.adjoint()
}

#[derive(Debug, Clone, Copy)]
pub struct CorpusSpec {
    pub max_dim: usize,
    pub c_gamma: f64,
    /// Identity weights when false.
    pub weighted: bool,
    /// Force `C` to be square and invertible.
    pub invertible: bool,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        Self {
            max_dim: 6,
            c_gamma: 0.3,
            weighted: true,
            invertible: false,
        }
    }
}

/// Random validated system; ranks cycle through zero, deficient and full.
pub fn random_system(seed: u64, spec: CorpusSpec) -> System {
    let mut rng = rng(seed);
    let n0 = rng.random_range(1..=spec.max_dim);
    let n1 = if spec.invertible {
        n0
    } else {
        rng.random_range(1..=spec.max_dim)
    };
    let rmax = n0.min(n1);
    let r = if spec.invertible {
        n0
    } else {
        match seed % 4 {
            0 => 0,
            1 => rmax,
            _ => rng.random_range(0..=rmax),
        }
    };
    let (alpha, beta) = if spec.weighted {
        (spd(&mut rng, n0, 0.5, 3.0), spd(&mut rng, n1, 0.5, 3.0))
    } else {
        (DMatrix::identity(n0, n0), DMatrix::identity(n1, n1))
    };
    let gamma = damping(&mut rng, n0, spec.c_gamma, seed % 3 != 0);
    let c = coupling(&mut rng, n0, n1, r);
    validate_system(alpha, beta, gamma, c, &Tolerances::default()).expect("corpus system is valid")
}

pub fn scalar_benchmark() -> System {
    let one = DMatrix::from_element(1, 1, C64::new(1.0, 0.0));
    validate_system(one.clone(), one.clone(), one.clone(), one, &Tolerances::default()).unwrap()
}

pub fn rel_diff(a: &Matrix, b: &Matrix) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}
