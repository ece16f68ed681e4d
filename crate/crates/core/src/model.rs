//! Problem data for the damped block system
//!
//! ```text
//! d/dt diag(alpha, beta) U + [[gamma, 0], [0, 0]] U + [[0, -C*], [C, 0]] U = 0
//! ```
//!
//! together with the coercivity diagnostics every later stage relies on.

use serde::{Deserialize, Serialize};

use crate::error::{dim_mismatch, Error, Result};
use crate::linalg;
use crate::scalar::{ComplexMatrix, Real};

/// Relative tolerances used throughout the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub hermitian_tol: f64,
    pub rank_rel_tol: f64,
    pub solve_tol: f64,
    pub eig_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermitian_tol: 1e-12,
            rank_rel_tol: 1e-10,
            solve_tol: 1e-10,
            eig_tol: 1e-10,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("hermitian_tol", self.hermitian_tol),
            ("rank_rel_tol", self.rank_rel_tol),
            ("solve_tol", self.solve_tol),
            ("eig_tol", self.eig_tol),
        ] {
            if !(value > 0.0 && value <= 1e-3) {
                return Err(Error::InvalidTolerance { name, value });
            }
        }
        Ok(())
    }
}

/// Validated coefficient set. Only obtainable through [`validate_system`],
/// so the coercivity constants always match the matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSystem<T: Real> {
    alpha: ComplexMatrix<T>,
    beta: ComplexMatrix<T>,
    gamma: ComplexMatrix<T>,
    coupling: ComplexMatrix<T>,
    c_alpha: T,
    c_beta: T,
    c_gamma: T,
}

impl<T: Real> BlockSystem<T> {
    pub fn alpha(&self) -> &ComplexMatrix<T> {
        &self.alpha
    }
    pub fn beta(&self) -> &ComplexMatrix<T> {
        &self.beta
    }
    pub fn gamma(&self) -> &ComplexMatrix<T> {
        &self.gamma
    }
    /// The coupling operator `C : H0 -> H1` (n1 x n0).
    pub fn coupling(&self) -> &ComplexMatrix<T> {
        &self.coupling
    }
    pub fn c_alpha(&self) -> T {
        self.c_alpha
    }
    pub fn c_beta(&self) -> T {
        self.c_beta
    }
    pub fn c_gamma(&self) -> T {
        self.c_gamma
    }
    /// Dimension of the damped component space.
    pub fn n0(&self) -> usize {
        self.alpha.nrows()
    }
    /// Dimension of the undamped component space.
    pub fn n1(&self) -> usize {
        self.beta.nrows()
    }
    pub fn into_parts(self) -> [ComplexMatrix<T>; 4] {
        [self.alpha, self.beta, self.gamma, self.coupling]
    }
}

/// Checks shapes, finiteness, Hermitian symmetry of `alpha` and `beta`, and
/// strict coercivity of `alpha`, `beta` and `Re gamma`.
pub fn validate_system<T: Real>(
    alpha: ComplexMatrix<T>,
    beta: ComplexMatrix<T>,
    gamma: ComplexMatrix<T>,
    coupling: ComplexMatrix<T>,
    tol: &Tolerances,
) -> Result<BlockSystem<T>> {
    tol.validate()?;
    let n0 = alpha.nrows();
    let n1 = beta.nrows();
    if n0 == 0 {
        return Err(dim_mismatch("alpha", "n0 >= 1", "0"));
    }
    if alpha.ncols() != n0 {
        return Err(dim_mismatch("alpha", format!("{n0}x{n0}"), shape(&alpha)));
    }
    if beta.ncols() != n1 {
        return Err(dim_mismatch("beta", format!("{n1}x{n1}"), shape(&beta)));
    }
    if gamma.shape() != (n0, n0) {
        return Err(dim_mismatch("gamma", format!("{n0}x{n0}"), shape(&gamma)));
    }
    if coupling.shape() != (n1, n0) {
        return Err(dim_mismatch("C", format!("{n1}x{n0}"), shape(&coupling)));
    }
    for (name, m) in [("alpha", &alpha), ("beta", &beta), ("gamma", &gamma), ("C", &coupling)] {
        if !linalg::all_finite(m) {
            return Err(Error::NonFinite(name));
        }
    }
    let htol = T::lit(tol.hermitian_tol);
    for (name, m) in [("alpha", &alpha), ("beta", &beta)] {
        if linalg::hermitian_defect(m) > htol * m.norm() {
            return Err(Error::NotHermitian(name));
        }
    }
    let floor = T::lit(tol.eig_tol);
    let c_alpha = hermitian_min_eig(&alpha)?;
    let c_beta = if n1 == 0 { T::one() } else { hermitian_min_eig(&beta)? };
    let c_gamma = hermitian_min_eig(&gamma)?;
    for (which, value) in [("alpha", c_alpha), ("beta", c_beta), ("gamma", c_gamma)] {
        if value <= floor {
            return Err(Error::NotCoercive {
                which,
                value: value.as_f64(),
            });
        }
    }
    Ok(BlockSystem {
        alpha,
        beta,
        gamma,
        coupling,
        c_alpha,
        c_beta,
        c_gamma,
    })
}

/// Re-runs validation on an existing system.
pub fn revalidate<T: Real>(sys: &BlockSystem<T>, tol: &Tolerances) -> Result<BlockSystem<T>> {
    validate_system(
        sys.alpha.clone(),
        sys.beta.clone(),
        sys.gamma.clone(),
        sys.coupling.clone(),
        tol,
    )
}

/// Smallest eigenvalue of the Hermitian part `(M + M*) / 2`, i.e. the
/// largest `c` with `Re M >= c`.
pub fn hermitian_min_eig<T: Real>(m: &ComplexMatrix<T>) -> Result<T> {
    if !m.is_square() {
        return Err(dim_mismatch("hermitian_min_eig", "square matrix", shape(m)));
    }
    if m.nrows() == 0 {
        return Err(dim_mismatch("hermitian_min_eig", "non-empty matrix", "0x0"));
    }
    Ok(linalg::hermitian_eigenvalues(m)[0])
}

/// Largest eigenvalue of the Hermitian part.
pub fn hermitian_max_eig<T: Real>(m: &ComplexMatrix<T>) -> Result<T> {
    if !m.is_square() || m.nrows() == 0 {
        return Err(dim_mismatch("hermitian_max_eig", "non-empty square matrix", shape(m)));
    }
    Ok(*linalg::hermitian_eigenvalues(m).last().expect("non-empty"))
}

/// Operator 2-norm, the largest singular value.
pub fn operator_norm<T: Real>(m: &ComplexMatrix<T>) -> T {
    linalg::spectral_norm(m)
}

pub(crate) fn shape<T: Real>(m: &ComplexMatrix<T>) -> String {
    format!("{}x{}", m.nrows(), m.ncols())
}
