//! Reduction to unit mass coefficients.
//!
//! With `W = diag(sqrt(alpha), sqrt(beta))` the state `W U` obeys the same
//! kind of system with `alpha = beta = 1`, damping
//! `sqrt(alpha)^-1 gamma sqrt(alpha)^-1` and coupling
//! `D = sqrt(beta)^-1 C sqrt(alpha)^-1`.

use nalgebra::DMatrix;

use crate::error::{dim_mismatch, Error, Result};
use crate::linalg;
use crate::model::{hermitian_min_eig, operator_norm, BlockSystem, Tolerances};
use crate::scalar::{re, ComplexMatrix, ComplexVector, Real};

#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedSystem<T: Real> {
    pub gamma_tilde: ComplexMatrix<T>,
    /// Normalized coupling `D` (n1 x n0).
    pub d: ComplexMatrix<T>,
    pub sqrt_alpha: ComplexMatrix<T>,
    pub sqrt_alpha_inv: ComplexMatrix<T>,
    pub sqrt_beta: ComplexMatrix<T>,
    pub sqrt_beta_inv: ComplexMatrix<T>,
    pub c_gamma_tilde: T,
}

/// Which way [`map_state`] transports a state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Original variables to normalized ones: applies `diag(sqrt(alpha), sqrt(beta))`.
    Forward,
    /// Normalized variables back to original ones.
    Backward,
}

impl<T: Real> NormalizedSystem<T> {
    pub fn n0(&self) -> usize {
        self.gamma_tilde.nrows()
    }

    pub fn n1(&self) -> usize {
        self.d.nrows()
    }

    /// `diag(sqrt(alpha), sqrt(beta))`.
    pub fn weight(&self) -> ComplexMatrix<T> {
        linalg::block_diag(&self.sqrt_alpha, &self.sqrt_beta)
    }

    pub fn weight_inv(&self) -> ComplexMatrix<T> {
        linalg::block_diag(&self.sqrt_alpha_inv, &self.sqrt_beta_inv)
    }

    /// `max{|sqrt a|, |sqrt b|} * max{|sqrt a^-1|, |sqrt b^-1|}`, the
    /// condition number of the weight; it bounds how far norms in the two
    /// variable sets can drift apart.
    pub fn kappa(&self) -> T {
        let fwd = operator_norm(&self.sqrt_alpha).max(operator_norm(&self.sqrt_beta));
        let bwd = operator_norm(&self.sqrt_alpha_inv).max(operator_norm(&self.sqrt_beta_inv));
        fwd * bwd
    }
}

/// Hermitian square root of a positive definite matrix and its inverse,
/// both via the eigendecomposition.
pub fn sqrt_factor<T: Real>(
    m: &ComplexMatrix<T>,
    tol: &Tolerances,
) -> Result<(ComplexMatrix<T>, ComplexMatrix<T>)> {
    if !m.is_square() {
        return Err(dim_mismatch("sqrt_factor", "square matrix", crate::model::shape(m)));
    }
    let n = m.nrows();
    if n == 0 {
        return Ok((linalg::zeros(0, 0), linalg::zeros(0, 0)));
    }
    if linalg::hermitian_defect(m) > T::lit(tol.hermitian_tol) * m.norm() {
        return Err(Error::NotHermitian("sqrt_factor input"));
    }
    let (vals, vecs) = linalg::hermitian_eigh(m);
    let lmin = vals[0];
    let lmax = vals[n - 1];
    // Refuse rather than regularize: near-singular weights break the whole reduction.
    if lmin <= T::zero() || lmin <= T::lit(tol.eig_tol) * lmax {
        return Err(Error::NotPositiveDefinite {
            min_eig: lmin.as_f64(),
        });
    }
    let root = |f: &dyn Fn(T) -> T| {
        let scaled = DMatrix::from_fn(n, n, |i, j| vecs[(i, j)] * re(f(vals[j])));
        scaled * vecs.adjoint()
    };
    let sqrt = linalg::hermitian_part(&root(&|l: T| l.sqrt()));
    let sqrt_inv = linalg::hermitian_part(&root(&|l: T| T::one() / l.sqrt()));
    Ok((sqrt, sqrt_inv))
}

pub fn normalize_system<T: Real>(sys: &BlockSystem<T>, tol: &Tolerances) -> Result<NormalizedSystem<T>> {
    let (sqrt_alpha, sqrt_alpha_inv) = sqrt_factor(sys.alpha(), tol)?;
    let (sqrt_beta, sqrt_beta_inv) = sqrt_factor(sys.beta(), tol)?;
    let gamma_tilde = &sqrt_alpha_inv * sys.gamma() * &sqrt_alpha_inv;
    let d = &sqrt_beta_inv * sys.coupling() * &sqrt_alpha_inv;
    let c_gamma_tilde = hermitian_min_eig(&gamma_tilde)?;
    Ok(NormalizedSystem {
        gamma_tilde,
        d,
        sqrt_alpha,
        sqrt_alpha_inv,
        sqrt_beta,
        sqrt_beta_inv,
        c_gamma_tilde,
    })
}

/// Builds the already-normalized system `(gamma, D)` directly, with unit weights.
pub fn unit_weight_system<T: Real>(
    gamma: ComplexMatrix<T>,
    d: ComplexMatrix<T>,
) -> Result<NormalizedSystem<T>> {
    let n0 = gamma.nrows();
    if !gamma.is_square() || d.ncols() != n0 {
        return Err(dim_mismatch(
            "unit_weight_system",
            format!("gamma n0 x n0, D n1 x {n0}"),
            format!("gamma {}, D {}", crate::model::shape(&gamma), crate::model::shape(&d)),
        ));
    }
    let n1 = d.nrows();
    let c_gamma_tilde = hermitian_min_eig(&gamma)?;
    Ok(NormalizedSystem {
        gamma_tilde: gamma,
        d,
        sqrt_alpha: linalg::identity(n0),
        sqrt_alpha_inv: linalg::identity(n0),
        sqrt_beta: linalg::identity(n1),
        sqrt_beta_inv: linalg::identity(n1),
        c_gamma_tilde,
    })
}

/// Transports a state `(u, v)` between original and normalized variables.
pub fn map_state<T: Real>(
    ns: &NormalizedSystem<T>,
    state: &ComplexVector<T>,
    direction: Direction,
) -> Result<ComplexVector<T>> {
    let (n0, n1) = (ns.n0(), ns.n1());
    if state.len() != n0 + n1 {
        return Err(dim_mismatch("map_state", n0 + n1, state.len()));
    }
    let (u, v) = linalg::split(state, n0);
    let (a, b) = match direction {
        Direction::Forward => (&ns.sqrt_alpha, &ns.sqrt_beta),
        Direction::Backward => (&ns.sqrt_alpha_inv, &ns.sqrt_beta_inv),
    };
    Ok(linalg::concat(&(a * u), &(b * v)))
}
